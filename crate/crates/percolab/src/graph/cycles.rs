//! Exhaustive enumeration of short cycles.

use std::collections::BTreeSet;

use super::{EdgeId, RegularGraph, Vertex, VertexSet};
use crate::error::{Error, Result};

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// Finds every cycle of length at most `max_len`, reported as its sorted
/// vertex list, together with the girth restricted to that horizon (None if
/// no such cycle exists). Cycles sharing a vertex set are reported once.
/// The output is sorted by (length, lexicographic), so the first entry
/// witnesses the girth.
///
/// `cap` bounds the total number of search steps; exceeding it is an error
/// rather than a silent truncation.
pub fn girth_and_cycle_vertices(
    g: &RegularGraph,
    max_len: usize,
    cap: usize,
) -> Result<(Option<usize>, Vec<Vec<Vertex>>)> {
    let mut found: BTreeSet<Vec<Vertex>> = BTreeSet::new();
    if max_len >= 3 {
        let mut search = Search {
            g,
            on_path: VertexSet::new(g.n()),
            path: Vec::with_capacity(max_len),
            found: &mut found,
            work: 0,
            cap,
        };
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            // Anchor each cycle at its minimum edge id: the path from v back
            // to u may only use strictly larger edge ids.
            search.path.clear();
            search.path.push(v);
            search.on_path.insert(v);
            search.extend(e as EdgeId, u, v, max_len - 1)?;
            search.on_path.remove(v);
        }
    }
    let mut cycles: Vec<Vec<Vertex>> = found.into_iter().collect();
    cycles.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let girth = cycles.first().map(|c| c.len());
    Ok((girth, cycles))
}

struct Search<'a> {
    g: &'a RegularGraph,
    on_path: VertexSet,
    path: Vec<Vertex>,
    found: &'a mut BTreeSet<Vec<Vertex>>,
    work: usize,
    cap: usize,
}

impl Search<'_> {
    /// Grows the simple path ending at `x` by one edge; `edges_left` is the
    /// remaining budget for path edges (the anchor edge is accounted
    /// separately).
    fn extend(&mut self, anchor: EdgeId, target: Vertex, x: Vertex, edges_left: usize) -> Result<()> {
        let row = self.g.neighbors(x);
        let ids = self.g.incident_edges(x);
        for (slot, &w) in row.iter().enumerate() {
            if ids[slot] <= anchor {
                continue;
            }
            self.work += 1;
            if self.work > self.cap {
                return Err(Error::EnumerationCap(self.cap));
            }
            if w == target {
                let mut cycle = self.path.clone();
                cycle.push(target);
                cycle.sort_unstable();
                self.found.insert(cycle);
            } else if edges_left >= 2 && !self.on_path.contains(w) {
                self.path.push(w);
                self.on_path.insert(w);
                self.extend(anchor, target, w, edges_left - 1)?;
                self.on_path.remove(w);
                self.path.pop();
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> RegularGraph {
        RegularGraph::from_edges(4, 3, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap()
    }

    fn cube() -> RegularGraph {
        RegularGraph::from_edges(
            8,
            3,
            vec![
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
            ],
        )
        .unwrap()
    }

    #[test]
    fn k4_triangles() {
        let (girth, cycles) = girth_and_cycle_vertices(&k4(), 3, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(girth, Some(3));
        assert_eq!(
            cycles,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
        );
    }

    #[test]
    fn k4_with_larger_horizon_adds_the_four_set() {
        let (girth, cycles) = girth_and_cycle_vertices(&k4(), 4, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(girth, Some(3));
        // Three distinct 4-cycles collapse onto one vertex set.
        assert_eq!(cycles.len(), 5);
        assert_eq!(cycles[4], vec![0, 1, 2, 3]);
    }

    #[test]
    fn cube_has_girth_four() {
        let g = cube();
        let (girth, cycles) = girth_and_cycle_vertices(&g, 3, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(girth, None);
        assert!(cycles.is_empty());

        let (girth, cycles) = girth_and_cycle_vertices(&g, 4, DEFAULT_CYCLE_CAP).unwrap();
        assert_eq!(girth, Some(4));
        // The six faces of the cube.
        assert_eq!(cycles.len(), 6);
        assert!(cycles.contains(&vec![0, 1, 2, 3]));
        assert!(cycles.contains(&vec![0, 2, 4, 6]));
    }

    #[test]
    fn cap_overflow_is_an_error() {
        let err = girth_and_cycle_vertices(&k4(), 4, 3).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap(3)));
    }

    #[test]
    fn every_reported_cycle_closes() {
        // On the cube with horizon 6 each reported set must carry at least
        // |set| induced edges (a cycle through all its vertices).
        let g = cube();
        let (_, cycles) = girth_and_cycle_vertices(&g, 6, DEFAULT_CYCLE_CAP).unwrap();
        assert!(!cycles.is_empty());
        for c in &cycles {
            let s = VertexSet::from_indices(g.n(), c.iter().copied());
            assert!(g.internal_edges(&s) >= c.len());
        }
    }
}
