//! Metric graphs: finite 1-complexes with edge lengths and the intrinsic
//! (shortest-path) distance.
//!
//! Points live on edges as `(edge, offset)` with the offset measured from
//! the edge's first endpoint. All vertex-to-vertex distances are computed
//! once at construction; point-to-point distances then follow from the
//! endpoint candidates.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use crate::error::{param, Error, Result};
use crate::simplicial::{FaceMask, Subcomplex, MAX_VERTICES};

/// An edge between vertex indices `u` and `v` (equal for a loop).
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// A point of the graph: an edge index and an offset from its `u` end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphPoint {
    pub edge: usize,
    pub offset: f64,
}

#[derive(Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Single-source shortest paths, optionally ignoring one edge.
fn dijkstra(nv: usize, edges: &[Edge], adj: &[Vec<usize>], src: usize, skip: Option<usize>) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; nv];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Reverse((Dist(0.0), src)));
    while let Some(Reverse((Dist(d), x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &ei in &adj[x] {
            if Some(ei) == skip {
                continue;
            }
            let e = &edges[ei];
            let y = if e.u == x { e.v } else { e.u };
            let nd = d + e.length;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Reverse((Dist(nd), y)));
            }
        }
    }
    dist
}

fn adjacency(nv: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); nv];
    for (i, e) in edges.iter().enumerate() {
        adj[e.u].push(i);
        if !e.is_loop() {
            adj[e.v].push(i);
        }
    }
    adj
}

/// A connected metric graph with its boundary (leaf) vertices.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    vertex_ids: Vec<String>,
    edges: Vec<Edge>,
    edge_index: HashMap<String, usize>,
    boundary: Vec<usize>,
    dist: Vec<Vec<f64>>,
    total_length: f64,
    girth: f64,
}

impl MetricGraph {
    /// Builds and validates a graph from vertex ids and `(id, u, v, length)`
    /// edges. The boundary is the set of degree-one vertices (a loop adds two
    /// to the degree of its vertex).
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S, f64)]) -> Result<Self> {
        let mut vertex_index = HashMap::new();
        let mut vertex_ids = Vec::new();
        for v in vertices {
            let v = v.as_ref();
            if vertex_index.insert(v.to_string(), vertex_ids.len()).is_some() {
                return Err(param(format!("duplicate vertex id {v:?}")));
            }
            vertex_ids.push(v.to_string());
        }
        if vertex_ids.is_empty() {
            return Err(param("a graph needs at least one vertex"));
        }
        let mut edge_index = HashMap::new();
        let mut list = Vec::new();
        for (id, u, v, length) in edges {
            let (id, u, v) = (id.as_ref(), u.as_ref(), v.as_ref());
            if !(length.is_finite() && *length > 0.0) {
                return Err(param(format!("edge {id:?} has non-positive length {length}")));
            }
            let lookup = |x: &str| {
                vertex_index
                    .get(x)
                    .copied()
                    .ok_or_else(|| param(format!("edge {id:?} uses unknown vertex {x:?}")))
            };
            let e = Edge { id: id.to_string(), u: lookup(u)?, v: lookup(v)?, length: *length };
            if edge_index.insert(id.to_string(), list.len()).is_some() {
                return Err(param(format!("duplicate edge id {id:?}")));
            }
            list.push(e);
        }
        let nv = vertex_ids.len();
        let adj = adjacency(nv, &list);
        let mut dist: Vec<Vec<f64>> = (0..nv).map(|s| dijkstra(nv, &list, &adj, s, None)).collect();
        #[allow(clippy::needless_range_loop)]
        for a in 0..nv {
            for b in 0..a {
                let d = dist[a][b].min(dist[b][a]);
                dist[a][b] = d;
                dist[b][a] = d;
            }
        }
        if dist[0].iter().any(|d| d.is_infinite()) {
            return Err(Error::Inconsistent("graph is not connected".into()));
        }
        let mut degree = vec![0usize; nv];
        for e in &list {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let boundary = (0..nv).filter(|&w| degree[w] == 1).collect();
        let total_length = list.iter().map(|e| e.length).sum();
        let mut g = MetricGraph {
            vertex_ids,
            edges: list,
            edge_index,
            boundary,
            dist,
            total_length,
            girth: f64::INFINITY,
        };
        g.girth = g.quotient_girth();
        Ok(g)
    }

    /// Replaces the inferred boundary by a named subset of the leaves.
    pub fn with_boundary<S: AsRef<str>>(mut self, ids: &[S]) -> Result<Self> {
        let mut chosen = Vec::new();
        for id in ids {
            let id = id.as_ref();
            let w = self
                .vertex_ids
                .iter()
                .position(|v| v == id)
                .ok_or_else(|| param(format!("unknown boundary vertex {id:?}")))?;
            if !self.boundary.contains(&w) {
                return Err(param(format!("boundary vertex {id:?} is not a leaf")));
            }
            if !chosen.contains(&w) {
                chosen.push(w);
            }
        }
        chosen.sort_unstable();
        self.boundary = chosen;
        self.girth = self.quotient_girth();
        Ok(self)
    }

    /// Parses the line format `vertex <id>` / `edge <id> <u> <v> <length>`,
    /// with `#` starting a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vertices: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String, String, f64)> = Vec::new();
        let mut seen_v = HashMap::new();
        let mut seen_e = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| Error::Parse { line, message };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tok: Vec<&str> = body.split_whitespace().collect();
            match tok.as_slice() {
                ["vertex", id] => {
                    if seen_v.insert(id.to_string(), line).is_some() {
                        return Err(err(format!("duplicate vertex id {id:?}")));
                    }
                    vertices.push(id.to_string());
                }
                ["edge", id, u, v, len] => {
                    let length: f64 = len
                        .parse()
                        .map_err(|_| err(format!("bad edge length {len:?}")))?;
                    if !(length.is_finite() && length > 0.0) {
                        return Err(err(format!("edge length must be positive, got {len}")));
                    }
                    for x in [u, v] {
                        if !seen_v.contains_key(*x) {
                            return Err(err(format!("edge {id:?} uses undeclared vertex {x:?}")));
                        }
                    }
                    if seen_e.insert(id.to_string(), line).is_some() {
                        return Err(err(format!("duplicate edge id {id:?}")));
                    }
                    edges.push((id.to_string(), u.to_string(), v.to_string(), length));
                }
                _ => return Err(err(format!("unrecognized line {body:?}"))),
            }
        }
        MetricGraph::new(&vertices, &edges)
    }

    /// Circle of circumference `c`: one vertex with a loop.
    pub fn circle(c: f64) -> Result<Self> {
        MetricGraph::new(&["o"], &[("loop", "o", "o", c)])
    }

    /// Interval of length `l`.
    pub fn interval(l: f64) -> Result<Self> {
        MetricGraph::new(&["a", "b"], &[("ab", "a", "b", l)])
    }

    /// Two vertices joined by three edges of the given lengths.
    pub fn theta(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        MetricGraph::new(
            &["a", "b"],
            &[("e1", "a", "b", l1), ("e2", "a", "b", l2), ("e3", "a", "b", l3)],
        )
    }

    /// Star with one center and a leg of each given length.
    pub fn star(lengths: &[f64]) -> Result<Self> {
        let mut vertices = vec!["c".to_string()];
        let mut edges = Vec::new();
        for (i, &l) in lengths.iter().enumerate() {
            vertices.push(format!("l{}", i + 1));
            edges.push((format!("e{}", i + 1), "c".to_string(), format!("l{}", i + 1), l));
        }
        MetricGraph::new(&vertices, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn vertex_id(&self, w: usize) -> &str {
        &self.vertex_ids[w]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Result<&Edge> {
        self.edges.get(i).ok_or_else(|| param(format!("unknown edge index {i}")))
    }

    pub fn edge_by_id(&self, id: &str) -> Result<usize> {
        self.edge_index.get(id).copied().ok_or_else(|| param(format!("unknown edge id {id:?}")))
    }

    /// Boundary vertex indices, increasing.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Shortest-path distance between two vertices.
    pub fn vertex_distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a][b]
    }

    /// A validated point; offsets at an endpoint are canonicalized.
    pub fn point(&self, edge: usize, offset: f64) -> Result<GraphPoint> {
        let e = self.edge(edge)?;
        if !(0.0..=e.length).contains(&offset) {
            return Err(param(format!("offset {offset} outside edge {:?} of length {}", e.id, e.length)));
        }
        if offset == 0.0 {
            return self.vertex_point(e.u);
        }
        if offset == e.length {
            return self.vertex_point(e.v);
        }
        Ok(GraphPoint { edge, offset })
    }

    /// Canonical representative of a vertex: the first incident edge, at
    /// the matching end.
    pub fn vertex_point(&self, w: usize) -> Result<GraphPoint> {
        let (i, e) = self
            .edges
            .iter()
            .enumerate()
            .find(|(_, e)| e.u == w || e.v == w)
            .ok_or_else(|| param(format!("vertex {:?} has no incident edge", self.vertex_ids[w])))?;
        let offset = if e.u == w { 0.0 } else { e.length };
        Ok(GraphPoint { edge: i, offset })
    }

    fn check_point(&self, p: &GraphPoint) -> Result<&Edge> {
        let e = self.edge(p.edge)?;
        if !(0.0..=e.length).contains(&p.offset) {
            return Err(param(format!("offset {} outside edge {:?}", p.offset, e.id)));
        }
        Ok(e)
    }

    /// Distance from a point to a vertex.
    pub fn distance_to_vertex(&self, p: &GraphPoint, w: usize) -> Result<f64> {
        let e = self.check_point(p)?;
        Ok((p.offset + self.dist[e.u][w]).min(e.length - p.offset + self.dist[e.v][w]))
    }

    /// Intrinsic distance: through the endpoints of both edges, or directly
    /// along a shared edge.
    pub fn intrinsic_distance(&self, p: &GraphPoint, q: &GraphPoint) -> Result<f64> {
        // fixed evaluation order keeps the result exactly symmetric
        let (p, q) = if (p.edge, p.offset) <= (q.edge, q.offset) { (p, q) } else { (q, p) };
        let ep = self.check_point(p)?;
        let eq = self.check_point(q)?;
        let pu = [(ep.u, p.offset), (ep.v, ep.length - p.offset)];
        let qu = [(eq.u, q.offset), (eq.v, eq.length - q.offset)];
        let mut best = f64::INFINITY;
        for (x, dx) in pu {
            for (y, dy) in qu {
                best = best.min(dx + self.dist[x][y] + dy);
            }
        }
        if p.edge == q.edge {
            best = best.min((p.offset - q.offset).abs());
        }
        Ok(best)
    }

    /// Length of the shortest cycle of the quotient obtained by identifying
    /// all boundary vertices to one point; `+∞` when the quotient is a tree.
    pub fn shortest_cycle_length(&self) -> f64 {
        self.girth
    }

    fn quotient_girth(&self) -> f64 {
        let nv = self.vertex_count();
        let merged = self.boundary.first().copied();
        let map = |w: usize| match merged {
            Some(m) if self.boundary.contains(&w) => m,
            _ => w,
        };
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge { id: e.id.clone(), u: map(e.u), v: map(e.v), length: e.length })
            .collect();
        let adj = adjacency(nv, &edges);
        let mut best = f64::INFINITY;
        for (i, e) in edges.iter().enumerate() {
            if e.is_loop() {
                best = best.min(e.length);
            } else {
                let d = dijkstra(nv, &edges, &adj, e.u, Some(i));
                best = best.min(d[e.v] + e.length);
            }
        }
        best
    }

    /// χ(X) = |V| − |E|.
    pub fn euler_char(&self) -> i64 {
        self.vertex_count() as i64 - self.edges.len() as i64
    }

    /// χ_rel(X, ∂X) = χ(X) − |∂X|.
    pub fn chi_rel(&self) -> i64 {
        self.euler_char() - self.boundary.len() as i64
    }

    /// A simplicial triangulation as a [`Subcomplex`]: one interior vertex on
    /// every ordinary edge and two on every loop. Fails when that needs more
    /// than the supported number of vertices.
    pub fn triangulate(&self) -> Result<Subcomplex> {
        let extra: usize = self.edges.iter().map(|e| if e.is_loop() { 2 } else { 1 }).sum();
        let total = self.vertex_count() + extra;
        if total > MAX_VERTICES {
            return Err(param(format!("triangulation needs {total} vertices")));
        }
        let mut faces = Vec::new();
        for w in 0..self.vertex_count() {
            faces.push(FaceMask::from_vertices([w + 1])?);
        }
        let mut next = self.vertex_count() + 1;
        for e in &self.edges {
            let mut chain = vec![e.u + 1];
            let inner = if e.is_loop() { 2 } else { 1 };
            for _ in 0..inner {
                faces.push(FaceMask::from_vertices([next])?);
                chain.push(next);
                next += 1;
            }
            chain.push(e.v + 1);
            for pair in chain.windows(2) {
                faces.push(FaceMask::from_vertices([pair[0], pair[1]])?);
            }
        }
        Subcomplex::from_faces(total, faces)
    }
}

impl fmt::Display for MetricGraph {
    /// Writes the graph in its text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.vertex_ids {
            writeln!(f, "vertex {v}")?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {} {} {} {}",
                e.id, self.vertex_ids[e.u], self.vertex_ids[e.v], e.length
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn distance_examples() {
        let c = MetricGraph::circle(1.0).unwrap();
        let p = c.point(0, 0.1).unwrap();
        let q = c.point(0, 0.9).unwrap();
        assert_eq!(c.intrinsic_distance(&p, &p).unwrap(), 0.0);
        assert!(close(c.intrinsic_distance(&p, &q).unwrap(), 0.2));
        let i = MetricGraph::interval(1.0).unwrap();
        let d = i
            .intrinsic_distance(&i.point(0, 0.2).unwrap(), &i.point(0, 0.7).unwrap())
            .unwrap();
        assert!(close(d, 0.5));
        assert!(i.intrinsic_distance(&GraphPoint { edge: 3, offset: 0.0 }, &p).is_err());
    }

    #[test]
    fn girth_examples() {
        for c in [0.5, 1.0, 2.0] {
            assert_eq!(MetricGraph::circle(c).unwrap().shortest_cycle_length(), c);
        }
        assert_eq!(MetricGraph::interval(0.7).unwrap().shortest_cycle_length(), 0.7);
        assert_eq!(MetricGraph::theta(1.0, 1.0, 2.0).unwrap().shortest_cycle_length(), 2.0);
        // a star with all legs identified at the leaves
        assert_eq!(MetricGraph::star(&[1.0, 2.0, 0.5]).unwrap().shortest_cycle_length(), 1.5);
    }

    #[test]
    fn girth_of_tree_without_cycle_is_infinite() {
        let g = MetricGraph::new(&["a"], &[] as &[(&str, &str, &str, f64)]).unwrap();
        assert_eq!(g.shortest_cycle_length(), f64::INFINITY);
        assert_eq!(g.euler_char(), 1);
        let one_leaf = MetricGraph::interval(1.0).unwrap().with_boundary(&["a"]).unwrap();
        assert_eq!(one_leaf.shortest_cycle_length(), f64::INFINITY);
    }

    #[test]
    fn euler_examples() {
        assert_eq!(MetricGraph::circle(1.0).unwrap().euler_char(), 0);
        assert_eq!(MetricGraph::theta(1.0, 1.0, 2.0).unwrap().euler_char(), -1);
        assert_eq!(MetricGraph::interval(1.0).unwrap().euler_char(), 1);
        assert_eq!(MetricGraph::interval(1.0).unwrap().chi_rel(), -1);
        assert_eq!(MetricGraph::circle(1.0).unwrap().chi_rel(), 0);
        assert_eq!(MetricGraph::star(&[1.0, 1.0, 1.0]).unwrap().chi_rel(), -2);
    }

    #[test]
    fn triangulations_preserve_euler_characteristic() {
        for g in [
            MetricGraph::circle(1.0).unwrap(),
            MetricGraph::theta(1.0, 1.0, 2.0).unwrap(),
            MetricGraph::interval(1.0).unwrap(),
        ] {
            assert_eq!(g.triangulate().unwrap().euler_char(), g.euler_char());
        }
    }

    #[test]
    fn endpoint_points_are_canonical() {
        let g = MetricGraph::theta(1.0, 1.0, 2.0).unwrap();
        assert_eq!(g.point(2, 2.0).unwrap(), g.point(0, 1.0).unwrap());
        assert_eq!(g.point(1, 0.0).unwrap(), GraphPoint { edge: 0, offset: 0.0 });
        assert!(g.point(0, 1.5).is_err());
    }

    #[test]
    fn parse_and_errors() {
        let g = MetricGraph::parse("# circle\nvertex o\nedge e o o 1.0 # loop\n").unwrap();
        assert_eq!(g.euler_char(), 0);
        assert_eq!(g.shortest_cycle_length(), 1.0);
        let bad = MetricGraph::parse("vertex a\nvertex b\nedge e a b -1\n");
        assert!(matches!(bad, Err(Error::Parse { line: 3, .. })));
        assert!(matches!(MetricGraph::parse("vertex a\nvertex a\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(MetricGraph::parse("vertex a\nedge e a b 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(MetricGraph::parse("vertex a\nvertex b\n"), Err(Error::Inconsistent(_))));
        let round = MetricGraph::parse(&g.to_string()).unwrap();
        assert_eq!(round.edges(), g.edges());
    }

    #[test]
    fn boundary_inference_and_override() {
        let g = MetricGraph::star(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(g.boundary().len(), 3);
        assert_eq!(g.with_boundary(&["l1"]).unwrap().boundary().len(), 1);
        let g = MetricGraph::star(&[1.0, 1.0]).unwrap();
        assert!(g.clone().with_boundary(&["c"]).is_err());
        assert!(g.with_boundary(&["zz"]).is_err());
        assert!(MetricGraph::circle(1.0).unwrap().boundary().is_empty());
    }
}
