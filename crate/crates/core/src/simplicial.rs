//! Labeled subcomplexes of the full simplex on `n` vertices.
//!
//! A face is a nonempty vertex set, stored as a bitmask ([`FaceMask`]). A
//! subcomplex is a downward-closed set of faces; because `n` is capped at
//! [`MAX_VERTICES`] there are at most 63 faces, so a whole subcomplex fits in
//! one `u64` whose bit `m - 1` records the presence of face `m`.
//!
//! The face poset is augmented with the empty face (slot 63). Every complex
//! with at least one vertex contains it; the face-less complex `"0"` holds
//! only the empty face, and the adjoined bottom element `"void"` holds
//! nothing at all. With both present the family on `n` vertices is the set of
//! down-sets of the Boolean lattice, counted by the Dedekind number M(n).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{param, Error, Result};

/// Largest supported vertex count.
pub const MAX_VERTICES: usize = 6;

/// A nonempty face of the full simplex, encoded as a vertex bitmask
/// (bit `i - 1` set iff vertex `i` belongs to the face).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FaceMask(u32);

impl FaceMask {
    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 {
            return Err(param("the empty face is not a FaceMask"));
        }
        if bits >= 1 << MAX_VERTICES {
            return Err(param(format!(
                "face {bits:#b} uses a vertex label above {MAX_VERTICES}"
            )));
        }
        Ok(FaceMask(bits))
    }

    /// Builds a face from 1-based vertex labels.
    pub fn from_vertices<I: IntoIterator<Item = usize>>(vertices: I) -> Result<Self> {
        let mut bits = 0u32;
        for v in vertices {
            if v == 0 || v > MAX_VERTICES {
                return Err(param(format!("vertex label {v} out of range 1..={MAX_VERTICES}")));
            }
            bits |= 1 << (v - 1);
        }
        FaceMask::new(bits)
    }

    pub(crate) const fn from_bits_unchecked(bits: u32) -> Self {
        FaceMask(bits)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    /// Number of vertices of the face.
    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// True for the empty face.
    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn dim(self) -> usize {
        self.len() - 1
    }

    #[inline]
    pub fn is_even_dim(self) -> bool {
        self.dim().is_multiple_of(2)
    }

    /// 1-based vertex labels in increasing order.
    pub fn vertices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_VERTICES).filter(move |i| bits & (1 << i) != 0).map(|i| i + 1)
    }

    #[inline]
    pub fn is_subface_of(self, other: FaceMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub(crate) fn slot(self) -> u64 {
        1u64 << (self.0 - 1)
    }
}

impl Ord for FaceMask {
    /// Faces are ordered by size, then lexicographically by sorted vertex list.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

impl PartialOrd for FaceMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FaceMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.vertices() {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Slot masks selecting faces of each size, indexed by vertex count.
const fn size_slots() -> [u64; MAX_VERTICES + 1] {
    let mut out = [0u64; MAX_VERTICES + 1];
    let mut m = 1u32;
    while m < (1 << MAX_VERTICES) {
        out[m.count_ones() as usize] |= 1u64 << (m - 1);
        m += 1;
    }
    out
}

const SIZE_SLOTS: [u64; MAX_VERTICES + 1] = size_slots();

/// Slot of the empty face.
const EMPTY_FACE: u64 = 1 << 63;

const fn parity_slots() -> (u64, u64) {
    let mut even = 0u64;
    let mut odd = 0u64;
    let mut k = 1;
    while k <= MAX_VERTICES {
        if (k - 1) % 2 == 0 {
            even |= SIZE_SLOTS[k];
        } else {
            odd |= SIZE_SLOTS[k];
        }
        k += 1;
    }
    (even, odd)
}

/// Slots of even- and odd-dimensional faces.
const PARITY_SLOTS: (u64, u64) = parity_slots();

fn all_slots(n: usize) -> u64 {
    let count = (1u64 << n) - 1;
    if count == 64 {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

fn iter_slots(set: u64) -> impl Iterator<Item = FaceMask> {
    let mut rest = set & !EMPTY_FACE;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        Some(FaceMask::from_bits_unchecked(b + 1))
    })
}

fn facets_present(face: FaceMask, set: u64) -> bool {
    if face.len() == 1 {
        return set & EMPTY_FACE != 0;
    }
    let bits = face.bits();
    let mut rest = bits;
    while rest != 0 {
        let v = rest & rest.wrapping_neg();
        rest &= rest - 1;
        if set & FaceMask::from_bits_unchecked(bits & !v).slot() == 0 {
            return false;
        }
    }
    true
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VERTICES {
        return Err(param(format!("vertex count {n} out of range 1..={MAX_VERTICES}")));
    }
    Ok(())
}

/// Counts of top (maximal) and lower faces split by dimension parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FaceProfile {
    pub top_even: usize,
    pub top_odd: usize,
    pub low_even: usize,
    pub low_odd: usize,
    pub top: usize,
    pub low: usize,
    pub total: usize,
}

/// A labeled subcomplex of the full simplex on `n` vertices, held as its
/// chain representative (every face together with all of its subfaces).
///
/// Face counts, iteration and Euler characteristics ignore the empty face.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Subcomplex {
    n: u8,
    set: u64,
}

impl Subcomplex {
    /// The face-less complex (text form `"0"`).
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Subcomplex { n: n as u8, set: EMPTY_FACE })
    }

    /// The adjoined bottom element below the face-less complex.
    pub fn void(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Subcomplex { n: n as u8, set: 0 })
    }

    /// The full simplex on `n` vertices.
    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Subcomplex { n: n as u8, set: all_slots(n) | EMPTY_FACE })
    }

    /// Builds a subcomplex from its complete face list; fails unless the list
    /// is downward closed and every face lives on labels `1..=n`.
    pub fn from_faces<I: IntoIterator<Item = FaceMask>>(n: usize, faces: I) -> Result<Self> {
        check_n(n)?;
        let mut set = EMPTY_FACE;
        for f in faces {
            if f.bits() >= 1 << n {
                return Err(param(format!("face {f} uses a label above n={n}")));
            }
            set |= f.slot();
        }
        let s = Subcomplex { n: n as u8, set };
        if let Some(bad) = s.iter().find(|f| !facets_present(*f, set)) {
            return Err(param(format!("face list is not downward closed (face {bad})")));
        }
        Ok(s)
    }

    /// Downward closure of an antichain of faces (`antichain_to_chain`).
    pub fn from_antichain(n: usize, faces: &[FaceMask]) -> Result<Self> {
        check_n(n)?;
        for (i, a) in faces.iter().enumerate() {
            if a.bits() >= 1 << n {
                return Err(param(format!("face {a} uses a label above n={n}")));
            }
            for b in &faces[i + 1..] {
                if a.is_subface_of(*b) || b.is_subface_of(*a) {
                    return Err(param(format!("faces {a} and {b} are comparable")));
                }
            }
        }
        let mut set = EMPTY_FACE;
        for f in faces {
            let m = f.bits();
            let mut sub = m;
            while sub != 0 {
                set |= FaceMask::from_bits_unchecked(sub).slot();
                sub = (sub - 1) & m;
            }
        }
        Ok(Subcomplex { n: n as u8, set })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Raw face-set bits (bit `m - 1` for face `m`, bit 63 for the empty face).
    #[inline]
    pub fn face_set(&self) -> u64 {
        self.set
    }

    /// Total number of (nonempty) faces, r(s).
    #[inline]
    pub fn len(&self) -> usize {
        (self.set & !EMPTY_FACE).count_ones() as usize
    }

    /// True for both the face-less complex and the void element.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.set & !EMPTY_FACE == 0
    }

    #[inline]
    pub fn is_void(&self) -> bool {
        self.set == 0
    }

    #[inline]
    pub fn contains(&self, face: FaceMask) -> bool {
        face.bits() < 1 << self.n && self.set & face.slot() != 0
    }

    /// `self ⊆ other` as face sets.
    #[inline]
    pub fn is_subcomplex_of(&self, other: &Subcomplex) -> bool {
        self.set & !other.set == 0
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex { n: self.n.max(other.n), set: self.set | other.set }
    }

    pub fn intersection(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex { n: self.n.max(other.n), set: self.set & other.set }
    }

    /// Faces in increasing mask order.
    pub fn iter(&self) -> impl Iterator<Item = FaceMask> {
        iter_slots(self.set)
    }

    /// Faces in canonical order (size, then lexicographic).
    pub fn faces(&self) -> Vec<FaceMask> {
        let mut v: Vec<FaceMask> = self.iter().collect();
        v.sort();
        v
    }

    /// Bitmask of the vertices present.
    pub fn vertex_mask(&self) -> u32 {
        (self.set & SIZE_SLOTS[1]) as u32
    }

    fn is_maximal(&self, face: FaceMask) -> bool {
        let bits = face.bits();
        (0..self.n()).all(|v| {
            let b = 1u32 << v;
            bits & b != 0 || self.set & FaceMask::from_bits_unchecked(bits | b).slot() == 0
        })
    }

    /// Maximal faces (`chain_to_antichain`), canonical order.
    pub fn antichain(&self) -> Vec<FaceMask> {
        let mut v: Vec<FaceMask> = self.iter().filter(|f| self.is_maximal(*f)).collect();
        v.sort();
        v
    }

    /// Faces not in `self` whose facets all are: the faces that can be added
    /// one at a time while staying downward closed. For the void element this
    /// is empty; see [`Subcomplex::cover_slots`].
    pub fn addable_faces(&self) -> Vec<FaceMask> {
        iter_slots(all_slots(self.n()) & !self.set)
            .filter(|f| facets_present(*f, self.set))
            .collect()
    }

    /// Slots (including the empty face) whose addition yields an upper cover
    /// of `self` in the family lattice.
    pub(crate) fn cover_slots(&self) -> Vec<u64> {
        if self.is_void() {
            return vec![EMPTY_FACE];
        }
        self.addable_faces().into_iter().map(|f| f.slot()).collect()
    }

    /// Number of faces of dimension `d`.
    pub fn face_count(&self, d: usize) -> usize {
        if d + 1 > MAX_VERTICES {
            return 0;
        }
        (self.set & SIZE_SLOTS[d + 1]).count_ones() as usize
    }

    /// χ(s) = #even-dimensional faces − #odd-dimensional faces.
    #[inline]
    pub fn euler_char(&self) -> i64 {
        (self.set & PARITY_SLOTS.0).count_ones() as i64
            - (self.set & PARITY_SLOTS.1).count_ones() as i64
    }

    /// χ(s) − χ(r) when `r ⊆ s`, and 0 otherwise.
    pub fn relative_euler_char(&self, r: &Subcomplex) -> i64 {
        if r.is_subcomplex_of(self) {
            self.euler_char() - r.euler_char()
        } else {
            0
        }
    }

    pub fn face_profile(&self) -> FaceProfile {
        let mut p = FaceProfile::default();
        for f in self.iter() {
            let top = self.is_maximal(f);
            match (top, f.is_even_dim()) {
                (true, true) => p.top_even += 1,
                (true, false) => p.top_odd += 1,
                (false, true) => p.low_even += 1,
                (false, false) => p.low_odd += 1,
            }
        }
        p.top = p.top_even + p.top_odd;
        p.low = p.low_even + p.low_odd;
        p.total = p.top + p.low;
        p
    }

    /// Every family member contained in `self`, from void up to `self`.
    pub fn subcomplexes(&self) -> Vec<Subcomplex> {
        let mut faces: Vec<FaceMask> = self.iter().collect();
        faces.sort_by_key(|f| f.len());
        let mut out = vec![0u64];
        if !self.is_void() {
            downsets(&faces, 0, EMPTY_FACE, &mut out);
        }
        out.into_iter().map(|set| Subcomplex { n: self.n, set }).collect()
    }

    /// Parses the `+`-joined text form (`"0"` is the face-less complex,
    /// `"void"` the bottom element). The listed faces must already form a
    /// downward-closed set.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "0" {
            return Subcomplex::empty(n);
        }
        if text == "void" {
            return Subcomplex::void(n);
        }
        let mut faces = Vec::new();
        for tok in text.split('+') {
            let verts = tok
                .trim()
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| param(format!("bad face token {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            faces.push(FaceMask::from_vertices(verts)?);
        }
        Subcomplex::from_faces(n, faces)
    }
}

impl Ord for Subcomplex {
    /// Canonical order: by number of faces, then lexicographically on the
    /// canonically sorted face list.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.faces().cmp(&other.faces()))
            .then_with(|| self.set.cmp(&other.set))
            .then_with(|| self.n.cmp(&other.n))
    }
}

impl PartialOrd for Subcomplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Subcomplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_void() {
            return write!(f, "void");
        }
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, face) in self.faces().into_iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{face}")?;
        }
        Ok(())
    }
}

/// Depth-first enumeration of downward-closed subsets of `faces`, which must
/// be sorted by size so that every facet is decided before its cofaces.
fn downsets(faces: &[FaceMask], i: usize, set: u64, out: &mut Vec<u64>) {
    if i == faces.len() {
        out.push(set);
        return;
    }
    downsets(faces, i + 1, set, out);
    if facets_present(faces[i], set) {
        downsets(faces, i + 1, set | faces[i].slot(), out);
    }
}

/// All subcomplexes on `n` labeled vertices in canonical order, with reverse lookup.
#[derive(Debug)]
pub struct SubcomplexFamily {
    n: usize,
    all: Vec<Subcomplex>,
    index: HashMap<u64, usize>,
}

impl SubcomplexFamily {
    /// Enumerates every subcomplex on `n ≤ 6` vertices (Dedekind number M(n) of them).
    pub fn enumerate(n: usize) -> Result<Self> {
        check_n(n)?;
        let mut faces: Vec<FaceMask> = iter_slots(all_slots(n)).collect();
        faces.sort_by_key(|f| f.len());
        let mut sets = vec![0u64];
        downsets(&faces, 0, EMPTY_FACE, &mut sets);
        let mut all: Vec<Subcomplex> = sets
            .into_iter()
            .map(|set| Subcomplex { n: n as u8, set })
            .collect();
        all.sort_by_cached_key(|s| (s.len(), s.faces(), s.set));
        let index = all.iter().enumerate().map(|(i, s)| (s.set, i)).collect();
        Ok(SubcomplexFamily { n, all, index })
    }

    /// Process-wide cached family for `n`.
    pub fn shared(n: usize) -> Result<Arc<SubcomplexFamily>> {
        static CACHE: [OnceLock<Arc<SubcomplexFamily>>; MAX_VERTICES + 1] =
            [const { OnceLock::new() }; MAX_VERTICES + 1];
        check_n(n)?;
        if let Some(f) = CACHE[n].get() {
            return Ok(f.clone());
        }
        let family = Arc::new(SubcomplexFamily::enumerate(n)?);
        Ok(CACHE[n].get_or_init(|| family).clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn all(&self) -> &[Subcomplex] {
        &self.all
    }

    pub fn get(&self, i: usize) -> Subcomplex {
        self.all[i]
    }

    pub fn index_of(&self, s: &Subcomplex) -> Option<usize> {
        if s.n() != self.n {
            return None;
        }
        self.index.get(&s.set).copied()
    }

    pub(crate) fn index_of_set(&self, set: u64) -> Option<usize> {
        self.index.get(&set).copied()
    }

    /// Ordinal of the void element (always 0 under the canonical order).
    pub fn void_index(&self) -> usize {
        0
    }

    /// Ordinal of the face-less complex (always 1).
    pub fn empty_index(&self) -> usize {
        1
    }

    pub fn index_or_err(&self, s: &Subcomplex) -> Result<usize> {
        self.index_of(s)
            .ok_or_else(|| Error::Parameter(format!("subcomplex {s} not in family n={}", self.n)))
    }
}

/// Independent count of down-sets of the Boolean lattice on `n` points by
/// filtering all `2^(2^n)` families of vertex sets (empty set included).
/// Only practical for `n ≤ 4`.
pub fn count_downward_closed_bruteforce(n: usize) -> Result<usize> {
    if n == 0 || n > 4 {
        return Err(param("brute-force filter is limited to 1 ≤ n ≤ 4"));
    }
    let points = 1u32 << n;
    let mut count = 0;
    for family in 0u64..(1u64 << points) {
        let has = |m: u32| family & (1 << m) != 0;
        let closed = (0..points)
            .filter(|&m| has(m))
            .all(|m| (0..n).all(|v| m & (1 << v) == 0 || has(m & !(1 << v))));
        if closed {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn face(v: &[usize]) -> FaceMask {
        FaceMask::from_vertices(v.iter().copied()).unwrap()
    }

    fn full_triangle() -> Subcomplex {
        Subcomplex::from_antichain(3, &[face(&[1, 2, 3])]).unwrap()
    }

    fn hollow_triangle() -> Subcomplex {
        Subcomplex::parse(3, "1+2+3+12+13+23").unwrap()
    }

    #[test]
    fn dedekind_counts() {
        let expected = [3, 6, 20, 168, 7581];
        for (i, &m) in expected.iter().enumerate() {
            assert_eq!(SubcomplexFamily::enumerate(i + 1).unwrap().len(), m);
        }
        for n in 1..=4 {
            assert_eq!(count_downward_closed_bruteforce(n).unwrap(), expected[n - 1]);
        }
    }

    #[test]
    #[ignore = "M(6) = 7,828,354; slow"]
    fn dedekind_six() {
        assert_eq!(SubcomplexFamily::enumerate(6).unwrap().len(), 7_828_354);
    }

    #[test]
    fn enumerate_rejects_bad_n() {
        assert!(SubcomplexFamily::enumerate(0).is_err());
        assert!(SubcomplexFamily::enumerate(7).is_err());
    }

    #[test]
    fn canonical_order_is_deterministic() {
        let fam = SubcomplexFamily::enumerate(2).unwrap();
        let text: Vec<String> = fam.all().iter().map(|s| s.to_string()).collect();
        assert_eq!(text, ["void", "0", "1", "2", "1+2", "1+2+12"]);
        assert!(fam.all().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(fam.get(fam.void_index()), Subcomplex::void(2).unwrap());
        assert_eq!(fam.get(fam.empty_index()), Subcomplex::empty(2).unwrap());
    }

    #[test]
    fn antichain_examples() {
        assert_eq!(full_triangle().antichain(), vec![face(&[1, 2, 3])]);
        assert!(Subcomplex::empty(3).unwrap().antichain().is_empty());
        assert_eq!(
            hollow_triangle().antichain(),
            vec![face(&[1, 2]), face(&[1, 3]), face(&[2, 3])]
        );
    }

    #[test]
    fn chain_examples() {
        assert_eq!(full_triangle().len(), 7);
        assert!(Subcomplex::from_antichain(3, &[]).unwrap().is_empty());
        let s = Subcomplex::from_antichain(3, &[face(&[1, 2]), face(&[3])]).unwrap();
        assert_eq!(s.to_string(), "1+2+3+12");
        assert!(Subcomplex::from_antichain(3, &[face(&[1, 2]), face(&[1])]).is_err());
    }

    #[test]
    fn from_faces_requires_closure() {
        assert!(Subcomplex::from_faces(3, [face(&[1, 2])]).is_err());
        assert!(Subcomplex::parse(3, "1+12").is_err());
        assert!(FaceMask::new(0).is_err());
    }

    #[test]
    fn euler_examples() {
        assert_eq!(Subcomplex::empty(3).unwrap().euler_char(), 0);
        assert_eq!(full_triangle().euler_char(), 1);
        assert_eq!(hollow_triangle().euler_char(), 0);
    }

    #[test]
    fn relative_euler_examples() {
        let e = Subcomplex::empty(3).unwrap();
        assert_eq!(full_triangle().relative_euler_char(&e), 1);
        let edge = Subcomplex::parse(3, "1+2+12").unwrap();
        let ends = Subcomplex::parse(3, "1+2").unwrap();
        assert_eq!(edge.relative_euler_char(&ends), -1);
        assert_eq!(edge.relative_euler_char(&edge), 0);
        // r not contained in s
        assert_eq!(ends.relative_euler_char(&edge), 0);
    }

    #[test]
    fn face_count_examples() {
        assert_eq!(hollow_triangle().face_count(1), 3);
        assert_eq!(hollow_triangle().face_count(2), 0);
        assert_eq!(full_triangle().face_count(0), 3);
    }

    #[test]
    fn face_profile_examples() {
        let p = full_triangle().face_profile();
        assert_eq!(
            (p.top_even, p.top_odd, p.low_even, p.low_odd, p.top, p.low, p.total),
            (1, 0, 3, 3, 1, 6, 7)
        );
        let p = hollow_triangle().face_profile();
        assert_eq!(
            (p.top_even, p.top_odd, p.low_even, p.low_odd, p.top, p.low, p.total),
            (0, 3, 3, 0, 3, 3, 6)
        );
        let p = Subcomplex::parse(3, "1").unwrap().face_profile();
        assert_eq!(
            (p.top_even, p.top_odd, p.low_even, p.low_odd, p.top, p.low, p.total),
            (1, 0, 0, 0, 1, 0, 1)
        );
    }

    #[test]
    fn enumerated_family_properties() {
        for n in 1..=4 {
            let fam = SubcomplexFamily::enumerate(n).unwrap();
            for s in fam.all().iter().filter(|s| !s.is_void()) {
                let back = Subcomplex::from_antichain(n, &s.antichain()).unwrap();
                assert_eq!(back, *s);
                let alt: i64 = (0..n)
                    .map(|d| if d % 2 == 0 { 1 } else { -1 } * s.face_count(d) as i64)
                    .sum();
                assert_eq!(alt, s.euler_char());
                let p = s.face_profile();
                assert_eq!(p.total, s.len());
                assert_eq!(p.top, s.antichain().len());
                assert_eq!(p.top_even + p.top_odd, p.top);
                assert_eq!(p.low_even + p.low_odd, p.low);
                assert_eq!(p.top + p.low, p.total);
                assert_eq!(Subcomplex::parse(n, &s.to_string()).unwrap(), *s);
                assert_eq!(fam.index_of(s).map(|i| fam.get(i)), Some(*s));
            }
        }
    }

    #[test]
    fn subcomplexes_of_triangle() {
        // every member of the n=3 family lies below the full triangle
        assert_eq!(full_triangle().subcomplexes().len(), 20);
        // void, 0, 1, 2, 1+2, 1+2+12
        assert_eq!(Subcomplex::parse(3, "1+2+12").unwrap().subcomplexes().len(), 6);
        assert_eq!(Subcomplex::void(3).unwrap().subcomplexes().len(), 1);
    }

    #[test]
    fn addable_faces_of_path() {
        let s = Subcomplex::parse(3, "1+2+3+12+23").unwrap();
        assert_eq!(s.addable_faces(), vec![face(&[1, 3])]);
    }
}
