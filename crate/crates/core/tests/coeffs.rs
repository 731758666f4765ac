use nervecov::coeffs::{c_bruteforce, c_chi, c_chi_rel, c_face_count, Invariant};
use nervecov::simplicial::{Subcomplex, SubcomplexFamily};

#[test]
fn chi_matches_oracle_up_to_four_vertices() {
    for n in 1..=4 {
        let fam = SubcomplexFamily::enumerate(n).unwrap();
        for s in fam.all() {
            for k in 0..=(n as u32 + 2) {
                assert_eq!(
                    c_chi(s, k).unwrap(),
                    c_bruteforce(Invariant::Chi, s, None, k).unwrap(),
                    "s={s} k={k}"
                );
            }
        }
    }
}

#[test]
fn face_count_matches_oracle() {
    let fam = SubcomplexFamily::enumerate(4).unwrap();
    for s in fam.all() {
        for d in 0..=2 {
            for k in 0..=4 {
                assert_eq!(
                    c_face_count(s, d, k).unwrap(),
                    c_bruteforce(Invariant::FaceCount(d), s, None, k).unwrap(),
                    "s={s} d={d} k={k}"
                );
            }
        }
    }
}

#[test]
fn chi_rel_matches_oracle_on_pairs() {
    let fam = SubcomplexFamily::enumerate(3).unwrap();
    for s in fam.all() {
        for r in fam.all().iter().filter(|r| r.is_subcomplex_of(s)) {
            for k in 0..=5 {
                assert_eq!(
                    c_chi_rel(s, r, k).unwrap(),
                    c_bruteforce(Invariant::ChiRel, s, Some(r), k).unwrap(),
                    "s={s} r={r} k={k}"
                );
            }
        }
    }
}

#[test]
fn chi_rel_with_no_boundary_reduces_to_chi() {
    let fam = SubcomplexFamily::enumerate(3).unwrap();
    let void = Subcomplex::void(3).unwrap();
    for s in fam.all() {
        for k in 0..=6 {
            assert_eq!(c_chi_rel(s, &void, k).unwrap(), c_chi(s, k).unwrap());
        }
    }
}

#[test]
fn reconstruction_recovers_powers() {
    for n in 1..=4 {
        let fam = SubcomplexFamily::enumerate(n).unwrap();
        for t in fam.all() {
            for k in 0..=(n as u32 + 2) {
                let total: i128 = fam
                    .all()
                    .iter()
                    .filter(|s| s.is_subcomplex_of(t))
                    .map(|s| c_chi(s, k).unwrap())
                    .sum();
                assert_eq!(total, (t.euler_char() as i128).pow(k), "t={t} k={k}");
            }
        }
    }
}

#[test]
fn vanishes_below_top_face_count() {
    let fam = SubcomplexFamily::enumerate(4).unwrap();
    for s in fam.all() {
        let top = s.antichain().len() as u32;
        for k in 0..top {
            assert_eq!(c_chi(s, k).unwrap(), 0, "s={s} k={k}");
        }
    }
}

fn c(text: &str, k: u32) -> i128 {
    c_chi(&Subcomplex::parse(3, text).unwrap(), k).unwrap()
}

#[test]
fn three_vertex_expansion_table() {
    // x, y, z = vertices 1, 2, 3; a = 12, b = 23, c = 13; F = 123
    for k in 1..=3u32 {
        let p2 = 2i128.pow(k);
        let p3 = 3i128.pow(k);
        assert_eq!(c("1", k), 1);
        assert_eq!(c("1+2", k), -2 + p2);
        assert_eq!(c("1+2+3", k), 3 - 3 * p2 + p3);
        assert_eq!(c("1+2+12", k), 1 - p2);
        assert_eq!(c("2+3+23", k), 1 - p2);
        assert_eq!(c("1+2+3+12", k), -1 + 2 * p2 - p3);
        assert_eq!(c("1+2+3+12+23", k), 1 - 2 * p2 + p3);
        assert_eq!(c("1+2+3+12+13+23", k), -3 + 3 * p2 - p3);
        assert_eq!(c("1+2+3+12+13+23+123", k), 1);
    }
}

#[test]
fn three_vertex_powers_with_vertices_present() {
    // coefficients after setting every vertex indicator to 1:
    // constant, per edge, per edge pair, all three edges, filled triangle
    let expected: [(u32, [i128; 5]); 3] = [
        (1, [3, -1, 0, 0, 1]),
        (2, [9, -5, 2, 0, 1]),
        (3, [27, -19, 12, -6, 1]),
    ];
    let fam = SubcomplexFamily::enumerate(3).unwrap();
    for (k, want) in expected {
        let mut got = [0i128; 5];
        for s in fam.all() {
            let edges = s.face_count(1);
            let slot = if s.face_count(2) == 1 { 4 } else { edges };
            got[slot] += c_chi(s, k).unwrap();
        }
        // sums over the three (or three pairs of) edges are per monomial
        got[1] /= 3;
        got[2] /= 3;
        assert_eq!(got, want, "k={k}");
    }
}
