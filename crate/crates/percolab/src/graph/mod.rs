//! Simple d-regular graphs with a canonical edge order.
//!
//! Edges are stored lexicographically sorted with endpoints (u, v), u < v;
//! the position in that order is the edge's index. Adjacency rows are sorted
//! ascending, which fixes the neighbor-visiting order everywhere else in the
//! crate.

pub mod cycles;
pub mod io;
mod vertex_set;

pub use vertex_set::VertexSet;

use crate::error::{Error, Result};

pub type Vertex = u32;
pub type EdgeId = u32;

pub struct RegularGraph {
    n: usize,
    d: usize,
    neighbors: Vec<Vertex>,
    incident: Vec<EdgeId>,
    edges: Vec<(Vertex, Vertex)>,
}

impl RegularGraph {
    /// Builds a graph from an edge list, validating simplicity and
    /// d-regularity. Edges may arrive in any order and orientation.
    pub fn from_edges(n: usize, d: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidGraph(format!("degree {d} < 2")));
        }
        if n <= d {
            return Err(Error::InvalidGraph(format!(
                "n = {n} too small for a simple {d}-regular graph"
            )));
        }
        if n * d % 2 != 0 {
            return Err(Error::InvalidGraph(format!("n*d = {} is odd", n * d)));
        }
        let m = n * d / 2;
        if edges.len() != m {
            return Err(Error::InvalidGraph(format!(
                "expected {m} edges, got {}",
                edges.len()
            )));
        }
        let mut edges: Vec<(Vertex, Vertex)> = edges
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        edges.sort_unstable();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if v as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if i > 0 && edges[i - 1] == (u, v) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
        }

        let mut degree = vec![0u32; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        if let Some(v) = degree.iter().position(|&x| x != d as u32) {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} has degree {}, expected {d}",
                degree[v]
            )));
        }

        let mut neighbors = vec![0 as Vertex; n * d];
        let mut incident = vec![0 as EdgeId; n * d];
        let mut by_vertex: Vec<Vec<(Vertex, EdgeId)>> = vec![Vec::with_capacity(d); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            by_vertex[u as usize].push((v, e as EdgeId));
            by_vertex[v as usize].push((u, e as EdgeId));
        }
        for (v, row) in by_vertex.iter_mut().enumerate() {
            row.sort_unstable();
            for (slot, &(w, e)) in row.iter().enumerate() {
                neighbors[v * d + slot] = w;
                incident[v * d + slot] = e;
            }
        }

        Ok(RegularGraph {
            n,
            d,
            neighbors,
            incident,
            edges,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v`, ascending.
    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        let v = v as usize;
        &self.neighbors[v * self.d..(v + 1) * self.d]
    }

    /// Edge indices aligned with `neighbors(v)`.
    #[inline]
    pub fn incident_edges(&self, v: Vertex) -> &[EdgeId] {
        let v = v as usize;
        &self.incident[v * self.d..(v + 1) * self.d]
    }

    /// Lexicographically sorted edge list; the slice position is the edge id.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e as usize]
    }

    pub fn edge_of(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok().map(|i| i as EdgeId)
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Closed ball of radius `r` around `v`.
    pub fn ball(&self, v: Vertex, r: usize) -> Result<VertexSet> {
        self.check_vertex(v)?;
        let mut scratch = BfsScratch::new(self.n);
        self.ball_members(v, r, &mut scratch);
        Ok(VertexSet::from_indices(self.n, scratch.queue.iter().copied()))
    }

    /// |B(v, r)| without materializing the set. Scratch is reused across
    /// calls; cost is proportional to the ball, not to n.
    pub fn ball_size_with(&self, v: Vertex, r: usize, scratch: &mut BfsScratch) -> usize {
        self.ball_members(v, r, scratch);
        scratch.queue.len()
    }

    /// (|B(v, r)|, whether B(v, r) induces a forest). The ball is connected,
    /// so forest here means exactly |B| - 1 induced edges.
    pub fn ball_forest_with(&self, v: Vertex, r: usize, scratch: &mut BfsScratch) -> (usize, bool) {
        self.ball_members(v, r, scratch);
        let size = scratch.queue.len();
        let mut twice_edges = 0usize;
        for &u in &scratch.queue {
            twice_edges += self
                .neighbors(u)
                .iter()
                .filter(|&&w| scratch.mark[w as usize] == scratch.epoch)
                .count();
        }
        (size, twice_edges / 2 == size - 1)
    }

    fn ball_members(&self, v: Vertex, r: usize, scratch: &mut BfsScratch) {
        scratch.begin();
        scratch.queue.clear();
        scratch.queue.push(v);
        scratch.mark[v as usize] = scratch.epoch;
        let mut frontier = 0usize;
        for _ in 0..r {
            let end = scratch.queue.len();
            if frontier == end {
                break;
            }
            for i in frontier..end {
                let u = scratch.queue[i];
                for &w in self.neighbors(u) {
                    if scratch.mark[w as usize] != scratch.epoch {
                        scratch.mark[w as usize] = scratch.epoch;
                        scratch.queue.push(w);
                    }
                }
            }
            frontier = end;
        }
    }

    /// Graph distance, or None if `u` and `v` are in different components.
    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<Option<usize>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Some(0));
        }
        let mut seen = VertexSet::new(self.n);
        seen.insert(u);
        let mut frontier = vec![u];
        let mut next = Vec::new();
        let mut dist = 0usize;
        while !frontier.is_empty() {
            dist += 1;
            for &x in &frontier {
                for &w in self.neighbors(x) {
                    if w == v {
                        return Ok(Some(dist));
                    }
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
            next.clear();
        }
        Ok(None)
    }

    /// BFS distances from a vertex set; None marks unreachable vertices.
    pub fn multi_source_distances(&self, sources: &VertexSet) -> Vec<Option<u32>> {
        assert_eq!(sources.universe(), self.n, "universe mismatch");
        let mut dist: Vec<Option<u32>> = vec![None; self.n];
        let mut frontier: Vec<Vertex> = sources.iter().collect();
        for &v in &frontier {
            dist[v as usize] = Some(0);
        }
        let mut next = Vec::new();
        let mut level = 0u32;
        while !frontier.is_empty() {
            level += 1;
            for &x in &frontier {
                for &w in self.neighbors(x) {
                    if dist[w as usize].is_none() {
                        dist[w as usize] = Some(level);
                        next.push(w);
                    }
                }
            }
            std::mem::swap(&mut frontier, &mut next);
            next.clear();
        }
        dist
    }

    /// Number of edges with exactly one endpoint in `s`.
    pub fn edge_boundary(&self, s: &VertexSet) -> usize {
        assert_eq!(s.universe(), self.n, "universe mismatch");
        s.iter()
            .map(|v| self.neighbors(v).iter().filter(|&&w| !s.contains(w)).count())
            .sum()
    }

    /// Number of edges with both endpoints in `s`.
    pub fn internal_edges(&self, s: &VertexSet) -> usize {
        assert_eq!(s.universe(), self.n, "universe mismatch");
        let twice: usize = s
            .iter()
            .map(|v| self.neighbors(v).iter().filter(|&&w| s.contains(w)).count())
            .sum();
        twice / 2
    }

    pub fn is_connected(&self) -> bool {
        let mut scratch = BfsScratch::new(self.n);
        self.ball_members(0, self.n, &mut scratch);
        scratch.queue.len() == self.n
    }

    /// One side of a bipartition if the graph is bipartite.
    pub fn bipartition(&self) -> Option<VertexSet> {
        let mut color: Vec<i8> = vec![-1; self.n];
        let mut side = VertexSet::new(self.n);
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.n as Vertex {
            if color[start as usize] >= 0 {
                continue;
            }
            color[start as usize] = 0;
            side.insert(start);
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                let c = color[v as usize];
                for &w in self.neighbors(v) {
                    match color[w as usize] {
                        -1 => {
                            color[w as usize] = 1 - c;
                            if c == 1 {
                                side.insert(w);
                            }
                            queue.push_back(w);
                        }
                        x if x == c => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side)
    }
}

/// Reusable BFS workspace: epoch-stamped marks avoid clearing an n-sized
/// array on every call.
pub struct BfsScratch {
    mark: Vec<u32>,
    epoch: u32,
    queue: Vec<Vertex>,
}

impl BfsScratch {
    pub fn new(n: usize) -> Self {
        BfsScratch {
            mark: vec![0; n],
            epoch: 0,
            queue: Vec::new(),
        }
    }

    fn begin(&mut self) {
        if self.epoch == u32::MAX {
            self.mark.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cube() -> RegularGraph {
        let edges = vec![
            (0, 1),
            (0, 2),
            (0, 4),
            (1, 3),
            (1, 5),
            (2, 3),
            (2, 6),
            (3, 7),
            (4, 5),
            (4, 6),
            (5, 7),
            (6, 7),
        ];
        RegularGraph::from_edges(8, 3, edges).unwrap()
    }

    fn triangle() -> RegularGraph {
        RegularGraph::from_edges(3, 2, vec![(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn construction_normalizes_and_sorts() {
        // Shuffled, reversed orientations; must come out canonical.
        let g = RegularGraph::from_edges(
            4,
            3,
            vec![(3, 2), (1, 0), (3, 0), (2, 1), (3, 1), (2, 0)],
        )
        .unwrap();
        assert_eq!(
            g.edges(),
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        );
        assert_eq!(g.neighbors(2), &[0, 1, 3]);
        assert_eq!(g.incident_edges(2), &[1, 3, 5]);
        assert_eq!(g.edge_of(3, 1), Some(4));
        assert_eq!(g.edge_of(0, 0), None);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(RegularGraph::from_edges(3, 2, vec![(0, 1), (1, 2), (1, 1)]).is_err());
        assert!(RegularGraph::from_edges(3, 2, vec![(0, 1), (0, 1), (1, 2)]).is_err());
        assert!(RegularGraph::from_edges(3, 2, vec![(0, 1), (1, 2)]).is_err());
        assert!(RegularGraph::from_edges(3, 2, vec![(0, 1), (1, 2), (1, 3)]).is_err());
        // Right edge count, wrong degree sequence: a path plus a pendant.
        assert!(RegularGraph::from_edges(4, 2, vec![(0, 1), (1, 2), (2, 3), (0, 2)]).is_err());
        assert!(RegularGraph::from_edges(3, 3, vec![(0, 1), (0, 2), (1, 2)]).is_err());
    }

    #[test]
    fn balls_on_the_cube() {
        let g = cube();
        assert_eq!(g.ball(0, 0).unwrap().to_vec(), vec![0]);
        assert_eq!(g.ball(0, 1).unwrap().to_vec(), vec![0, 1, 2, 4]);
        assert_eq!(g.ball(0, 2).unwrap().len(), 7);
        assert_eq!(g.ball(0, 3).unwrap().len(), 8);
        assert_eq!(g.ball(0, 50).unwrap().len(), 8);
    }

    #[test]
    fn ball_forest_detects_cycles() {
        let g = cube();
        let mut scratch = BfsScratch::new(g.n());
        assert_eq!(g.ball_forest_with(0, 1, &mut scratch), (4, true));
        // Radius 2 contains 4-cycles.
        assert_eq!(g.ball_forest_with(0, 2, &mut scratch), (7, false));
    }

    #[test]
    fn distances() {
        let g = cube();
        assert_eq!(g.distance(0, 0).unwrap(), Some(0));
        assert_eq!(g.distance(0, 3).unwrap(), Some(2));
        assert_eq!(g.distance(0, 7).unwrap(), Some(3));
        assert_eq!(g.distance(7, 0).unwrap(), Some(3));
        assert!(g.distance(0, 8).is_err());
    }

    #[test]
    fn multi_source_distances_match_pairwise() {
        let g = cube();
        let sources = VertexSet::from_indices(8, [0, 7]);
        let dist = g.multi_source_distances(&sources);
        for v in 0..8u32 {
            let d0 = g.distance(0, v).unwrap().unwrap();
            let d7 = g.distance(7, v).unwrap().unwrap();
            assert_eq!(dist[v as usize], Some(d0.min(d7) as u32));
        }
    }

    #[test]
    fn boundary_and_internal_edges() {
        let g = cube();
        let s = VertexSet::from_indices(8, [0, 1, 2, 3]);
        // Bottom face: 4 internal edges, 4 vertical edges leaving.
        assert_eq!(g.internal_edges(&s), 4);
        assert_eq!(g.edge_boundary(&s), 4);
        let whole = VertexSet::full(8);
        assert_eq!(g.internal_edges(&whole), 12);
        assert_eq!(g.edge_boundary(&whole), 0);
    }

    #[test]
    fn triangle_is_allowed() {
        let g = triangle();
        assert_eq!(g.d(), 2);
        assert_eq!(g.m(), 3);
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn connectivity_and_bipartiteness() {
        let g = cube();
        assert!(g.is_connected());
        let side = g.bipartition().expect("cube is bipartite");
        // Even-weight vertices form one side.
        assert_eq!(side.to_vec(), vec![0, 3, 5, 6]);
        assert!(triangle().bipartition().is_none());
    }
}
