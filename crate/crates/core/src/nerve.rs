//! Closed ε-ball covers of a metric graph, their nerves and Rips complexes,
//! goodness checks, and the direct geometric coverage oracle.
//!
//! A ball is stored exactly as a sorted list of closed intervals on every
//! edge. Intersections, unions and complements of balls are computed edge by
//! edge, and connectivity is recovered by gluing pieces at shared vertices.

use std::fmt;

use crate::error::{param, Result};
use crate::metric_graph::{GraphPoint, MetricGraph};
use crate::simplicial::{FaceMask, Subcomplex, MAX_VERTICES};

/// Closed intervals on one edge, sorted and disjoint.
pub type Intervals = Vec<(f64, f64)>;

/// Relative tolerance for endpoint comparisons, scaled by total length.
pub const REL_TOL: f64 = 1e-12;

fn merge(mut v: Intervals, tol: f64) -> Intervals {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Intervals = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 + tol => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> Intervals {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi + tol {
            out.push((lo, hi.max(lo)));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Per-edge intervals `{t : d_X(center, (e, t)) ≤ eps}`.
pub fn ball_intervals(graph: &MetricGraph, center: &GraphPoint, eps: f64) -> Result<Vec<Intervals>> {
    if eps.is_nan() || eps < 0.0 {
        return Err(param(format!("radius must be non-negative, got {eps}")));
    }
    let tol = REL_TOL * graph.total_length();
    let mut out = Vec::with_capacity(graph.edges().len());
    for (i, e) in graph.edges().iter().enumerate() {
        let mut v = Vec::with_capacity(3);
        let ru = eps - graph.distance_to_vertex(center, e.u)?;
        if ru >= 0.0 {
            v.push((0.0, ru.min(e.length)));
        }
        let rv = eps - graph.distance_to_vertex(center, e.v)?;
        if rv >= 0.0 {
            v.push(((e.length - rv).max(0.0), e.length));
        }
        if center.edge == i {
            v.push(((center.offset - eps).max(0.0), (center.offset + eps).min(e.length)));
        }
        out.push(merge(v, tol));
    }
    Ok(out)
}

/// Why a realization fails the pair-good condition.
#[derive(Clone, Debug, PartialEq)]
pub enum CoverDiagnosis {
    Ok,
    /// `eps ≥ C/4`, so goodness is not guaranteed.
    RadiusTooLarge { eps: f64, girth: f64 },
    /// A ball meets the boundary in more than one point.
    SeveralBoundaryPoints { ball: usize, count: usize },
}

impl CoverDiagnosis {
    pub fn is_ok(&self) -> bool {
        *self == CoverDiagnosis::Ok
    }
}

impl fmt::Display for CoverDiagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverDiagnosis::Ok => write!(f, "ok"),
            CoverDiagnosis::RadiusTooLarge { eps, girth } => {
                write!(f, "radius {eps} is not below a quarter of the girth {girth}")
            }
            CoverDiagnosis::SeveralBoundaryPoints { ball, count } => {
                write!(f, "ball {ball} covers {count} boundary points")
            }
        }
    }
}

/// A nerve or Rips complex with the regime flags of the radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NerveComplex {
    pub complex: Subcomplex,
    /// `eps < C/6`: the nerve equals the Rips complex.
    pub is_rips_valid: bool,
    /// `eps < C/4`: the cover is good.
    pub is_good_guaranteed: bool,
}

/// Betti numbers and Euler characteristic of a closed subset of the graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SetTopology {
    pub beta0: i64,
    pub beta1: i64,
    pub euler: i64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }

    fn count_roots(&mut self, nodes: impl Iterator<Item = usize>) -> usize {
        let mut roots: Vec<usize> = nodes.map(|x| self.find(x)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

/// Topology of a closed set given by per-edge interval lists.
///
/// Each covered vertex is a 0-cell; a piece touching neither endpoint adds a
/// contractible component, a piece touching one endpoint adds nothing, and a
/// whole edge adds an open 1-cell.
pub fn set_topology(graph: &MetricGraph, set: &[Intervals]) -> SetTopology {
    let tol = REL_TOL * graph.total_length();
    let nv = graph.vertex_count();
    let mut covered = vec![false; nv];
    let mut pieces = 0usize;
    for (e, list) in graph.edges().iter().zip(set) {
        for &(a, b) in list {
            pieces += 1;
            if a <= tol {
                covered[e.u] = true;
            }
            if b >= e.length - tol {
                covered[e.v] = true;
            }
        }
    }
    let mut uf = UnionFind::new(nv + pieces);
    let mut euler = covered.iter().filter(|c| **c).count() as i64;
    let mut node = nv;
    for (e, list) in graph.edges().iter().zip(set) {
        for &(a, b) in list {
            let at_u = a <= tol;
            let at_v = b >= e.length - tol;
            match (at_u, at_v) {
                (false, false) => euler += 1,
                (true, true) => euler -= 1,
                _ => {}
            }
            if at_u {
                uf.union(node, e.u);
            }
            if at_v {
                uf.union(node, e.v);
            }
            node += 1;
        }
    }
    let beta0 =
        uf.count_roots((0..nv).filter(|&w| covered[w]).chain(nv..nv + pieces)) as i64;
    SetTopology { beta0, beta1: beta0 - euler, euler }
}

/// One sample of `n` closed ε-balls on a graph.
#[derive(Clone, Debug)]
pub struct BallCoverRealization<'g> {
    graph: &'g MetricGraph,
    eps: f64,
    centers: Vec<GraphPoint>,
    balls: Vec<Vec<Intervals>>,
    tol: f64,
}

impl<'g> BallCoverRealization<'g> {
    pub fn new(graph: &'g MetricGraph, eps: f64, centers: Vec<GraphPoint>) -> Result<Self> {
        let balls = centers
            .iter()
            .map(|c| ball_intervals(graph, c, eps))
            .collect::<Result<_>>()?;
        Ok(BallCoverRealization { graph, eps, centers, balls, tol: REL_TOL * graph.total_length() })
    }

    pub fn graph(&self) -> &'g MetricGraph {
        self.graph
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[GraphPoint] {
        &self.centers
    }

    /// Intervals of ball `i`, indexed by edge.
    pub fn ball(&self, i: usize) -> &[Intervals] {
        &self.balls[i]
    }

    fn check_n(&self) -> Result<()> {
        if self.n() == 0 || self.n() > MAX_VERTICES {
            return Err(param(format!("nerve needs 1..={MAX_VERTICES} balls, got {}", self.n())));
        }
        Ok(())
    }

    /// Per-edge intersection of the balls in the vertex mask `mask`.
    pub fn intersection(&self, mask: u32) -> Vec<Intervals> {
        let mut members = (0..self.n()).filter(|i| mask & (1 << i) != 0);
        let Some(first) = members.next() else {
            return self.graph.edges().iter().map(|e| vec![(0.0, e.length)]).collect();
        };
        let mut acc = self.balls[first].clone();
        for i in members {
            for (a, b) in acc.iter_mut().zip(&self.balls[i]) {
                if !a.is_empty() {
                    *a = intersect(a, b, self.tol);
                }
            }
        }
        acc
    }

    fn flags(&self) -> (bool, bool) {
        let girth = self.graph.shortest_cycle_length();
        (self.eps < girth / 6.0, self.eps < girth / 4.0)
    }

    fn downset(&self, mut present: impl FnMut(u32) -> bool) -> Result<Subcomplex> {
        let n = self.n();
        let mut masks: Vec<u32> = (1..1u32 << n).collect();
        masks.sort_by_key(|m| m.count_ones());
        let mut have = vec![false; 1 << n];
        let mut faces = Vec::new();
        for m in masks {
            let facets_ok = m.count_ones() == 1
                || (0..n).filter(|i| m & (1 << i) != 0).all(|i| have[(m & !(1 << i)) as usize]);
            if facets_ok && present(m) {
                have[m as usize] = true;
                faces.push(FaceMask::new(m)?);
            }
        }
        Subcomplex::from_faces(n, faces)
    }

    /// The nerve: faces are index sets whose balls share a point. Below the
    /// Rips threshold the result is cross-checked against [`Self::build_rips`].
    pub fn build_nerve(&self) -> Result<NerveComplex> {
        let nerve = self.build_nerve_unchecked()?;
        if nerve.is_rips_valid {
            let rips = self.build_rips()?;
            if rips.complex != nerve.complex {
                return Err(crate::error::Error::Consistency {
                    what: format!("nerve {} differs from Rips complex {}", nerve.complex, rips.complex),
                    discrepancy: 1.0,
                    tolerance: 0.0,
                });
            }
        }
        Ok(nerve)
    }

    /// The nerve without the Rips cross-check.
    pub fn build_nerve_unchecked(&self) -> Result<NerveComplex> {
        self.check_n()?;
        let complex = self.downset(|m| self.intersection(m).iter().any(|l| !l.is_empty()))?;
        let (is_rips_valid, is_good_guaranteed) = self.flags();
        Ok(NerveComplex { complex, is_rips_valid, is_good_guaranteed })
    }

    /// Whether balls `i` and `j` meet: `d_X(ξ_i, ξ_j) ≤ 2 eps`.
    pub fn balls_meet(&self, i: usize, j: usize) -> Result<bool> {
        let d = self.graph.intrinsic_distance(&self.centers[i], &self.centers[j])?;
        Ok(d <= 2.0 * self.eps + self.tol)
    }

    /// Clique complex of the intersection graph.
    pub fn build_rips(&self) -> Result<NerveComplex> {
        self.check_n()?;
        let n = self.n();
        let mut adj = vec![0u32; n];
        for i in 0..n {
            for j in i + 1..n {
                if self.balls_meet(i, j)? {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let complex = self.downset(|m| {
            (0..n).filter(|i| m & (1 << i) != 0).all(|i| m & !(1 << i) & !adj[i] == 0)
        })?;
        let (is_rips_valid, is_good_guaranteed) = self.flags();
        Ok(NerveComplex { complex, is_rips_valid, is_good_guaranteed })
    }

    /// `w[i][b]`: ball `i` contains the `b`-th boundary vertex.
    pub fn boundary_indicators(&self) -> Result<Vec<Vec<bool>>> {
        self.centers
            .iter()
            .map(|c| {
                self.graph
                    .boundary()
                    .iter()
                    .map(|&w| Ok(self.graph.distance_to_vertex(c, w)? <= self.eps + self.tol))
                    .collect()
            })
            .collect()
    }

    /// Number of boundary points covered by at least one ball.
    pub fn covered_boundary_count(&self) -> Result<usize> {
        let w = self.boundary_indicators()?;
        Ok((0..self.graph.boundary().len()).filter(|&b| w.iter().any(|row| row[b])).count())
    }

    /// Nerve of the traces of the balls on the boundary. Void when the graph
    /// has no boundary; otherwise it contains the empty face.
    pub fn boundary_nerve(&self) -> Result<Subcomplex> {
        self.check_n()?;
        let n = self.n();
        if self.graph.boundary().is_empty() {
            return Subcomplex::void(n);
        }
        let w = self.boundary_indicators()?;
        let mut faces = Vec::new();
        for m in 1..1u32 << n {
            let shared = (0..self.graph.boundary().len())
                .any(|b| (0..n).all(|i| m & (1 << i) == 0 || w[i][b]));
            if shared {
                faces.push(FaceMask::new(m)?);
            }
        }
        Subcomplex::from_faces(n, faces)
    }

    /// Pair-good condition: `eps < C/4` and every ball meets the boundary in
    /// at most one point.
    pub fn pair_good_cover_check(&self) -> Result<CoverDiagnosis> {
        let girth = self.graph.shortest_cycle_length();
        if self.eps.is_nan() || self.eps >= girth / 4.0 {
            return Ok(CoverDiagnosis::RadiusTooLarge { eps: self.eps, girth });
        }
        self.boundary_diagnosis()
    }

    fn boundary_diagnosis(&self) -> Result<CoverDiagnosis> {
        for (ball, row) in self.boundary_indicators()?.iter().enumerate() {
            let count = row.iter().filter(|b| **b).count();
            if count > 1 {
                return Ok(CoverDiagnosis::SeveralBoundaryPoints { ball, count });
            }
        }
        Ok(CoverDiagnosis::Ok)
    }

    /// Sample-wise goodness: every nonempty intersection of balls is
    /// contractible (connected with χ = 1) and every ball meets the boundary
    /// in at most one point.
    pub fn is_good_exact(&self) -> Result<bool> {
        self.check_n()?;
        if !self.boundary_diagnosis()?.is_ok() {
            return Ok(false);
        }
        for m in 1..1u32 << self.n() {
            let set = self.intersection(m);
            if set.iter().all(|l| l.is_empty()) {
                continue;
            }
            let t = set_topology(self.graph, &set);
            if t.beta0 != 1 || t.euler != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Per-edge union of all balls.
    pub fn union(&self) -> Vec<Intervals> {
        (0..self.graph.edges().len())
            .map(|e| merge(self.balls.iter().flat_map(|b| b[e].iter().copied()).collect(), self.tol))
            .collect()
    }

    /// Whether the balls cover the whole graph.
    pub fn covers_fully(&self) -> bool {
        if self.graph.edges().is_empty() {
            return !self.centers.is_empty();
        }
        self.graph.edges().iter().zip(self.union()).all(|(e, u)| {
            u.len() == 1 && u[0].0 <= self.tol && u[0].1 >= e.length - self.tol
        })
    }

    /// Number of connected components of the uncovered set.
    pub fn complement_components(&self) -> usize {
        let g = self.graph;
        let nv = g.vertex_count();
        let union = self.union();
        let tol = self.tol;
        let mut vertex_covered = vec![false; nv];
        for (e, u) in g.edges().iter().zip(&union) {
            if u.first().is_some_and(|p| p.0 <= tol) {
                vertex_covered[e.u] = true;
            }
            if u.last().is_some_and(|p| p.1 >= e.length - tol) {
                vertex_covered[e.v] = true;
            }
        }
        if g.edges().is_empty() {
            vertex_covered[0] = !self.centers.is_empty();
        }
        // open gaps between consecutive covered pieces
        let mut gaps: Vec<(usize, bool, bool)> = Vec::new();
        for (ei, (e, u)) in g.edges().iter().zip(&union).enumerate() {
            let mut start = 0.0;
            let mut at_start = true;
            for &(a, b) in u {
                if a - start > tol {
                    gaps.push((ei, at_start, false));
                }
                start = b;
                at_start = false;
            }
            if e.length - start > tol {
                gaps.push((ei, at_start, true));
            }
        }
        let mut uf = UnionFind::new(nv + gaps.len());
        for (k, &(ei, at_u, at_v)) in gaps.iter().enumerate() {
            let e = &g.edges()[ei];
            if at_u && !vertex_covered[e.u] {
                uf.union(nv + k, e.u);
            }
            if at_v && !vertex_covered[e.v] {
                uf.union(nv + k, e.v);
            }
        }
        uf.count_roots((0..nv).filter(|&w| !vertex_covered[w]).chain(nv..nv + gaps.len()))
    }

    /// Betti numbers of the covered set `|A|`.
    pub fn union_topology(&self) -> SetTopology {
        set_topology(self.graph, &self.union())
    }

    /// CSV rows `ball,edge,interval_start,interval_end`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "ball,edge,interval_start,interval_end")?;
        for (i, ball) in self.balls.iter().enumerate() {
            for (e, list) in ball.iter().enumerate() {
                for (a, b) in list {
                    writeln!(out, "{},{},{a},{b}", i + 1, self.graph.edges()[e].id)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> MetricGraph {
        MetricGraph::circle(1.0).unwrap()
    }

    fn on_circle<'g>(g: &'g MetricGraph, eps: f64, offsets: &[f64]) -> BallCoverRealization<'g> {
        let centers = offsets.iter().map(|&t| g.point(0, t).unwrap()).collect();
        BallCoverRealization::new(g, eps, centers).unwrap()
    }

    fn close(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| (x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12)
    }

    #[test]
    fn ball_interval_examples() {
        let g = circle();
        let c = g.point(0, 0.5).unwrap();
        assert!(close(&ball_intervals(&g, &c, 0.2).unwrap()[0], &[(0.3, 0.7)]));
        assert!(close(&ball_intervals(&g, &c, 0.6).unwrap()[0], &[(0.0, 1.0)]));
        let i = MetricGraph::interval(1.0).unwrap();
        let c = i.point(0, 0.0).unwrap();
        assert!(close(&ball_intervals(&i, &c, 0.25).unwrap()[0], &[(0.0, 0.25)]));
        // a ball across the seam of the circle
        let c = g.point(0, 0.05).unwrap();
        assert!(close(&ball_intervals(&g, &c, 0.1).unwrap()[0], &[(0.0, 0.15), (0.95, 1.0)]));
        assert!(ball_intervals(&g, &c, -1.0).is_err());
    }

    #[test]
    fn nerve_examples() {
        let g = circle();
        let r = on_circle(&g, 0.05, &[0.0, 0.3, 0.6]);
        let nv = r.build_nerve().unwrap().complex;
        assert_eq!(nv.to_string(), "1+2+3");
        assert_eq!(nv.euler_char(), 3);
        let r = on_circle(&g, 0.2, &[0.0, 0.25, 0.5]);
        let nv = r.build_nerve_unchecked().unwrap().complex;
        assert_eq!(nv.to_string(), "1+2+3+12+23");
        assert_eq!(nv.euler_char(), 1);
        assert_eq!(r.build_rips().unwrap().complex, nv);
        let r = on_circle(&g, 0.2, &[0.0, 0.1, 0.2]);
        let nv = r.build_nerve_unchecked().unwrap().complex;
        assert_eq!(nv, Subcomplex::full(3).unwrap());
    }

    #[test]
    fn rips_fills_cliques_even_without_common_point() {
        // three arcs of length 0.8 pairwise overlapping around the circle
        let g = circle();
        let r = on_circle(&g, 0.2, &[0.0, 1.0 / 3.0, 2.0 / 3.0]);
        let rips = r.build_rips().unwrap();
        assert_eq!(rips.complex, Subcomplex::full(3).unwrap());
        assert_eq!(r.build_nerve_unchecked().unwrap().complex.to_string(), "1+2+3+12+13+23");
        assert!(!rips.is_rips_valid);
    }

    #[test]
    fn boundary_examples() {
        let g = circle();
        let r = on_circle(&g, 0.2, &[0.5]);
        assert!(r.boundary_indicators().unwrap()[0].is_empty());
        assert!(r.boundary_nerve().unwrap().is_void());
        let i = MetricGraph::interval(1.0).unwrap();
        let r = BallCoverRealization::new(&i, 0.2, vec![i.point(0, 0.1).unwrap()]).unwrap();
        assert_eq!(r.boundary_indicators().unwrap(), vec![vec![true, false]]);
        assert_eq!(r.covered_boundary_count().unwrap(), 1);
        assert_eq!(r.boundary_nerve().unwrap().to_string(), "1");
    }

    #[test]
    fn pair_good_examples() {
        let g = circle();
        assert!(on_circle(&g, 0.2, &[0.1]).pair_good_cover_check().unwrap().is_ok());
        assert!(matches!(
            on_circle(&g, 0.3, &[0.1]).pair_good_cover_check().unwrap(),
            CoverDiagnosis::RadiusTooLarge { .. }
        ));
        let i = MetricGraph::interval(0.3).unwrap();
        let r = BallCoverRealization::new(&i, 0.2, vec![i.point(0, 0.15).unwrap()]).unwrap();
        assert!(!r.pair_good_cover_check().unwrap().is_ok());
        assert!(!r.is_good_exact().unwrap());
    }

    #[test]
    fn coverage_examples() {
        let g = circle();
        let third = 1.0 / 3.0;
        let r = on_circle(&g, 0.2, &[0.0, third, 2.0 * third]);
        assert!(r.covers_fully());
        assert_eq!(r.complement_components(), 0);
        let r = on_circle(&g, 0.2, &[0.0, 0.0, 0.0]);
        assert!(!r.covers_fully());
        assert_eq!(r.complement_components(), 1);
        let r = on_circle(&g, 0.2, &[]);
        assert!(!r.covers_fully());
        assert_eq!(r.complement_components(), 1);
        let r = on_circle(&g, 0.05, &[0.0, 0.3, 0.6]);
        assert_eq!(r.complement_components(), 3);
    }

    #[test]
    fn union_topology_examples() {
        let g = circle();
        let r = on_circle(&g, 0.2, &[0.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(r.union_topology(), SetTopology { beta0: 1, beta1: 1, euler: 0 });
        let r = on_circle(&g, 0.05, &[0.0, 0.3, 0.6]);
        assert_eq!(r.union_topology(), SetTopology { beta0: 3, beta1: 0, euler: 3 });
        let t = MetricGraph::theta(1.0, 1.0, 2.0).unwrap();
        let r = BallCoverRealization::new(&t, 5.0, vec![t.point(0, 0.5).unwrap()]).unwrap();
        assert_eq!(r.union_topology(), SetTopology { beta0: 1, beta1: 2, euler: -1 });
    }

    #[test]
    fn large_ball_on_circle_is_not_good() {
        let g = circle();
        let r = on_circle(&g, 0.3, &[0.0, 0.5]);
        // the two arcs meet in two disjoint pieces
        assert!(!r.is_good_exact().unwrap());
        assert!(on_circle(&g, 0.2, &[0.0, 0.3]).is_good_exact().unwrap());
    }

    #[test]
    fn csv_dump() {
        let g = circle();
        let mut buf = Vec::new();
        on_circle(&g, 0.2, &[0.5]).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("ball,edge,interval_start,interval_end\n1,loop,"));
    }
}
