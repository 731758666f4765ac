//! Expansion coefficients of powers of random invariants in the basis of
//! indicator monomials.
//!
//! For an invariant `Q` of a random complex and a power `k`,
//! `Q^k = Σ_s c_{s,k}(Q) e_s`, where `e_s` is the indicator that the random
//! complex contains `s`. Evaluating at a realization `t` gives
//! `Σ_{s ⊆ t} c_{s,k} = Q(t)^k`, so `c_{·,k}` is the Möbius inversion of
//! `Q^k` over the lattice of subcomplexes.
//!
//! That lattice is distributive, so the Möbius function is supported on
//! intervals `[s − T, s]` with `T` a set of maximal elements of `s`. Every
//! closed form below is therefore an alternating sum over how many maximal
//! faces of each kind are kept, grouped by how removing one changes `Q`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{param, Error, Result};
use crate::simplicial::{Subcomplex, SubcomplexFamily};

/// The random invariants with closed-form coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Invariant {
    /// Euler characteristic χ.
    Chi,
    /// Number of faces of the given dimension.
    FaceCount(usize),
    /// Relative Euler characteristic χ(K) − χ(L) of a pair `L ⊆ K`.
    ChiRel,
}

impl Invariant {
    /// Value of an absolute invariant on a single complex.
    pub fn eval(&self, s: &Subcomplex) -> Result<i64> {
        match *self {
            Invariant::Chi => Ok(s.euler_char()),
            Invariant::FaceCount(d) => Ok(s.face_count(d) as i64),
            Invariant::ChiRel => Err(param("χ_rel is defined on pairs")),
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::Chi => write!(f, "chi"),
            Invariant::FaceCount(d) => write!(f, "f{d}"),
            Invariant::ChiRel => write!(f, "chi_rel"),
        }
    }
}

fn ovf() -> Error {
    Error::Overflow("expansion coefficient")
}

fn pow(base: i128, k: u32) -> Result<i128> {
    base.checked_pow(k).ok_or_else(ovf)
}

fn binom(n: usize, r: usize) -> Result<i128> {
    if r > n {
        return Ok(0);
    }
    let r = r.min(n - r);
    let mut acc: i128 = 1;
    for i in 0..r {
        acc = acc
            .checked_mul((n - i) as i128)
            .ok_or_else(ovf)?
            / (i as i128 + 1);
    }
    Ok(acc)
}

/// Σ over kept counts `0 ≤ kept_g ≤ count_g` of
/// `Π_g (−1)^{count_g − kept_g} C(count_g, kept_g) · (full − Σ_g w_g (count_g − kept_g))^k`,
/// i.e. the Möbius sum over subsets of maximal elements, grouped by the
/// change `w_g` each removal makes to the invariant.
fn grouped_alternating_sum(groups: &[(usize, i128)], full: i128, k: u32) -> Result<i128> {
    fn rec(groups: &[(usize, i128)], value: i128, sign: i128, weight: i128, k: u32) -> Result<i128> {
        let Some((&(count, w), rest)) = groups.split_first() else {
            return pow(value, k)?
                .checked_mul(sign * weight)
                .ok_or_else(ovf);
        };
        let mut acc: i128 = 0;
        for removed in 0..=count {
            let b = binom(count, removed)?;
            let s = if removed % 2 == 0 { sign } else { -sign };
            let term = rec(
                rest,
                value - w * removed as i128,
                s,
                weight.checked_mul(b).ok_or_else(ovf)?,
                k,
            )?;
            acc = acc.checked_add(term).ok_or_else(ovf)?;
        }
        Ok(acc)
    }
    rec(groups, full, 1, 1, k)
}

/// Coefficient of `e_s` in `χ^k`.
///
/// Removing an even-dimensional top face lowers χ by one and removing an odd
/// one raises it, so with `i` even and `j` odd top faces kept the value is
/// `i − j + r⁺_low − r⁻_low`. The coefficient vanishes for `k < r_top(s)`.
pub fn c_chi(s: &Subcomplex, k: u32) -> Result<i128> {
    if s.is_void() {
        return Ok(if k == 0 { 1 } else { 0 });
    }
    if s.is_empty() {
        // the empty face is maximal and changes nothing
        return Ok(0);
    }
    let p = s.face_profile();
    if (k as usize) < p.top {
        return Ok(0);
    }
    grouped_alternating_sum(
        &[(p.top_even, 1), (p.top_odd, -1)],
        s.euler_char() as i128,
        k,
    )
}

/// Coefficient of `e_s` in `f_d^k`.
///
/// Nonzero only when every top face of `s` has dimension `d`; then
/// `Σ_{i=0}^{r_top} (−1)^{r_top − i} C(r_top, i) i^k` (with `0^0 = 1`).
pub fn c_face_count(s: &Subcomplex, d: usize, k: u32) -> Result<i128> {
    if s.is_void() {
        return Ok(if k == 0 { 1 } else { 0 });
    }
    if s.is_empty() {
        return Ok(0);
    }
    let top = s.antichain();
    if top.iter().any(|f| f.dim() != d) {
        return Ok(0);
    }
    grouped_alternating_sum(&[(top.len(), 1)], top.len() as i128, k)
}

/// Coefficient of `e_s w_r` in `χ_rel^k`, for a pair with `r ⊆ s`.
///
/// The pair lattice has maximal elements `w_J` for `J` a top face of `r` and
/// `e_I` for `I` a top face of `s` not lying in `r`. Removing `e_I` lowers
/// χ_rel by `(−1)^dim I`; removing `w_J` raises it by `(−1)^dim J`. A void
/// second component means no boundary indicators at all, and then the
/// coefficient equals [`c_chi`]. Returns 0 when `r ⊄ s`.
pub fn c_chi_rel(s: &Subcomplex, r: &Subcomplex, k: u32) -> Result<i128> {
    if !r.is_subcomplex_of(s) {
        return Ok(0);
    }
    if s.is_void() {
        return Ok(if k == 0 { 1 } else { 0 });
    }
    // the empty face, as an e- or w-element, is maximal and changes nothing
    if s.is_empty() || (r.is_empty() && !r.is_void()) {
        return Ok(0);
    }
    let (mut e_even, mut e_odd, mut w_even, mut w_odd) = (0, 0, 0, 0);
    for f in s.antichain() {
        if !r.contains(f) {
            if f.is_even_dim() {
                e_even += 1;
            } else {
                e_odd += 1;
            }
        }
    }
    for f in r.antichain() {
        if f.is_even_dim() {
            w_even += 1;
        } else {
            w_odd += 1;
        }
    }
    if (k as usize) < e_even + e_odd + w_even + w_odd {
        return Ok(0);
    }
    grouped_alternating_sum(
        &[(e_even, 1), (e_odd, -1), (w_even, -1), (w_odd, 1)],
        s.relative_euler_char(r) as i128,
        k,
    )
}

/// Largest face count accepted by the brute-force oracle.
pub const BRUTEFORCE_MAX_FACES: usize = 20;

/// Brute-force coefficient by solving `Σ_{l ⊆ t} c_l = Q(t)^k` for every
/// family member `t ⊆ s` in increasing order. For [`Invariant::ChiRel`]
/// pass the second component as `r`; the system then runs over pairs
/// `(s', r') ≤ (s, r)` with `r' ⊆ s'`.
pub fn c_bruteforce(
    invariant: Invariant,
    s: &Subcomplex,
    r: Option<&Subcomplex>,
    k: u32,
) -> Result<i128> {
    if s.len() > BRUTEFORCE_MAX_FACES {
        return Err(param(format!(
            "brute-force oracle limited to {BRUTEFORCE_MAX_FACES} faces, got {}",
            s.len()
        )));
    }
    match (invariant, r) {
        (Invariant::ChiRel, Some(r)) => bruteforce_pair(s, r, k),
        (Invariant::ChiRel, None) => Err(param("χ_rel needs a second component")),
        (_, Some(_)) => Err(param("absolute invariants take a single complex")),
        (inv, None) => {
            let mut subs = s.subcomplexes();
            subs.sort_by_key(|t| t.face_set().count_ones());
            let mut c: Vec<i128> = Vec::with_capacity(subs.len());
            for (i, t) in subs.iter().enumerate() {
                let mut v = pow(inv.eval(t)? as i128, k)?;
                for (j, l) in subs[..i].iter().enumerate() {
                    if l.is_subcomplex_of(t) {
                        v = v.checked_sub(c[j]).ok_or_else(ovf)?;
                    }
                }
                c.push(v);
            }
            Ok(*c.last().expect("s is among its own subcomplexes"))
        }
    }
}

fn bruteforce_pair(s: &Subcomplex, r: &Subcomplex, k: u32) -> Result<i128> {
    if !r.is_subcomplex_of(s) {
        return Ok(0);
    }
    let mut pairs = Vec::new();
    for s2 in s.subcomplexes() {
        for r2 in r.subcomplexes() {
            if r2.is_subcomplex_of(&s2) {
                pairs.push((s2, r2));
            }
        }
    }
    pairs.sort_by_key(|(a, b)| a.face_set().count_ones() + b.face_set().count_ones());
    let mut c: Vec<i128> = Vec::with_capacity(pairs.len());
    for (i, (a, b)) in pairs.iter().enumerate() {
        let mut v = pow(a.relative_euler_char(b) as i128, k)?;
        for (j, (a2, b2)) in pairs[..i].iter().enumerate() {
            if a2.is_subcomplex_of(a) && b2.is_subcomplex_of(b) {
                v = v.checked_sub(c[j]).ok_or_else(ovf)?;
            }
        }
        c.push(v);
    }
    Ok(*c.last().expect("(s, r) is the top pair"))
}

/// Coefficients of one invariant power over a whole family.
///
/// Absolute invariants are tabulated eagerly in family order; χ_rel pair
/// coefficients are computed on demand and memoized.
#[derive(Debug)]
pub struct CoefficientTable {
    invariant: Invariant,
    k: u32,
    family: Arc<SubcomplexFamily>,
    entries: Vec<i128>,
    pairs: Mutex<HashMap<(usize, usize), i128>>,
}

type TableKey = (Invariant, usize, u32);

impl CoefficientTable {
    pub fn build(invariant: Invariant, family: Arc<SubcomplexFamily>, k: u32) -> Result<Self> {
        let entries = match invariant {
            Invariant::Chi => family.all().iter().map(|s| c_chi(s, k)).collect::<Result<_>>()?,
            Invariant::FaceCount(d) => family
                .all()
                .iter()
                .map(|s| c_face_count(s, d, k))
                .collect::<Result<_>>()?,
            Invariant::ChiRel => Vec::new(),
        };
        Ok(CoefficientTable { invariant, k, family, entries, pairs: Mutex::new(HashMap::new()) })
    }

    /// Process-wide memoized table for `(invariant, n, k)`.
    pub fn shared(invariant: Invariant, n: usize, k: u32) -> Result<Arc<CoefficientTable>> {
        static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<CoefficientTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (invariant, n, k);
        if let Some(t) = cache.lock().expect("coefficient cache poisoned").get(&key) {
            return Ok(t.clone());
        }
        let table = Arc::new(CoefficientTable::build(invariant, SubcomplexFamily::shared(n)?, k)?);
        let mut guard = cache.lock().expect("coefficient cache poisoned");
        Ok(guard.entry(key).or_insert(table).clone())
    }

    pub fn invariant(&self) -> Invariant {
        self.invariant
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn family(&self) -> &SubcomplexFamily {
        &self.family
    }

    /// Coefficients aligned with the family's canonical order (empty for χ_rel).
    pub fn entries(&self) -> &[i128] {
        &self.entries
    }

    pub fn get(&self, s: &Subcomplex) -> Result<i128> {
        if self.invariant == Invariant::ChiRel {
            return Err(param("χ_rel coefficients are indexed by pairs"));
        }
        Ok(self.entries[self.family.index_or_err(s)?])
    }

    /// Pair coefficient by family ordinals of `(s, r)`.
    pub fn get_pair_index(&self, si: usize, ri: usize) -> Result<i128> {
        if self.invariant != Invariant::ChiRel {
            return Err(param("pair lookup needs the χ_rel table"));
        }
        if let Some(&c) = self.pairs.lock().expect("pair memo poisoned").get(&(si, ri)) {
            return Ok(c);
        }
        let c = c_chi_rel(&self.family.get(si), &self.family.get(ri), self.k)?;
        self.pairs.lock().expect("pair memo poisoned").insert((si, ri), c);
        Ok(c)
    }

    pub fn get_pair(&self, s: &Subcomplex, r: &Subcomplex) -> Result<i128> {
        self.get_pair_index(self.family.index_or_err(s)?, self.family.index_or_err(r)?)
    }

    /// CSV rows `subcomplex,k,coefficient`, nonzero entries only.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "subcomplex,k,coefficient")?;
        for (s, c) in self.family.all().iter().zip(&self.entries) {
            if *c != 0 {
                writeln!(out, "{s},{},{c}", self.k)?;
            }
        }
        Ok(())
    }
}
