//! Graph generators: fixed families plus the configuration model.

use crate::error::{Error, Result};
use crate::graph::{RegularGraph, Vertex};
use crate::rng::{mix, Rng64, STREAM_GEN};

pub const DEFAULT_MAX_RETRIES: usize = 100_000;

/// The complete graph on d + 1 vertices.
pub fn complete(d: usize) -> Result<RegularGraph> {
    let n = d + 1;
    let mut edges = Vec::with_capacity(n * d / 2);
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            edges.push((u, v));
        }
    }
    RegularGraph::from_edges(n, d, edges)
}

/// The Petersen graph: outer 5-cycle, inner 5-cycle at step 2, spokes.
pub fn petersen() -> RegularGraph {
    let edges = vec![
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 4),
        (0, 4),
        (0, 5),
        (1, 6),
        (2, 7),
        (3, 8),
        (4, 9),
        (5, 7),
        (7, 9),
        (6, 9),
        (6, 8),
        (5, 8),
    ];
    RegularGraph::from_edges(10, 3, edges).expect("fixed edge list")
}

/// Circulant graph: vertex v is adjacent to v +- s (mod n) for each offset s.
/// Offsets must be distinct, in [1, n/2]; an offset of exactly n/2 (n even)
/// contributes one edge per vertex instead of two.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<RegularGraph> {
    if offsets.is_empty() {
        return Err(Error::DegenerateSpec("no offsets".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &s in offsets {
        if s == 0 || 2 * s > n {
            return Err(Error::DegenerateSpec(format!(
                "offset {s} outside [1, {}]",
                n / 2
            )));
        }
        if !seen.insert(s) {
            return Err(Error::DegenerateSpec(format!("offset {s} repeated")));
        }
    }
    let mut edges = Vec::new();
    let mut d = 0;
    for &s in offsets {
        if 2 * s == n {
            d += 1;
            for v in 0..(n / 2) as Vertex {
                edges.push((v, v + (n / 2) as Vertex));
            }
        } else {
            d += 2;
            for v in 0..n as Vertex {
                let u = (v as usize + s) % n;
                edges.push((v.min(u as Vertex), v.max(u as Vertex)));
            }
        }
    }
    RegularGraph::from_edges(n, d, edges)
}

/// Uniform random simple d-regular graph via the configuration model with
/// full-restart rejection: pair stubs uniformly, restart on loops or
/// repeated pairs. Acceptance odds per attempt are roughly
/// exp(-(d*d - 1) / 4), so retries stay cheap for the small degrees used
/// here.
pub fn random_regular(n: usize, d: usize, seed: u64, max_retries: usize) -> Result<RegularGraph> {
    if d < 2 || n <= d || n * d % 2 != 0 {
        return Err(Error::DegenerateSpec(format!(
            "no simple {d}-regular graph on {n} vertices"
        )));
    }
    let mut rng = Rng64::from_seed(seed);
    let mut stubs: Vec<Vertex> = (0..n * d).map(|i| (i / d) as Vertex).collect();
    let mut pairs: Vec<(Vertex, Vertex)> = Vec::with_capacity(n * d / 2);
    'attempt: for _ in 0..max_retries {
        rng.shuffle(&mut stubs);
        pairs.clear();
        for c in stubs.chunks_exact(2) {
            let (a, b) = (c[0], c[1]);
            if a == b {
                continue 'attempt;
            }
            pairs.push((a.min(b), a.max(b)));
        }
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            continue 'attempt;
        }
        return RegularGraph::from_edges(n, d, std::mem::take(&mut pairs));
    }
    Err(Error::RetriesExhausted(max_retries))
}

/// Glues two d-regular graphs into one: delete `bridges` vertex-disjoint
/// edges from each side, then reconnect the freed endpoints across. The
/// result is d-regular with an edge cut of size 2 * bridges between the
/// sides, so its expansion is at most 2 * bridges / min(n1, n2).
///
/// The per-side matchings are picked greedily from a seeded shuffle of each
/// edge list; a side whose greedy pass cannot supply `bridges` disjoint
/// edges is rejected.
pub fn adversarial_union(
    g1: &RegularGraph,
    g2: &RegularGraph,
    bridges: usize,
    seed: u64,
) -> Result<RegularGraph> {
    if g1.d() != g2.d() {
        return Err(Error::DegenerateSpec(format!(
            "degree mismatch: {} vs {}",
            g1.d(),
            g2.d()
        )));
    }
    if bridges == 0 {
        return Err(Error::DegenerateSpec("bridges must be positive".into()));
    }
    let m1 = pick_matching(g1, bridges, mix(seed, STREAM_GEN, 0))?;
    let m2 = pick_matching(g2, bridges, mix(seed, STREAM_GEN, 1))?;

    let shift = g1.n() as Vertex;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::with_capacity(g1.m() + g2.m());
    edges.extend(g1.edges().iter().copied().filter(|e| !m1.contains(e)));
    edges.extend(
        g2.edges()
            .iter()
            .copied()
            .filter(|e| !m2.contains(e))
            .map(|(u, v)| (u + shift, v + shift)),
    );
    for (&(a1, b1), &(a2, b2)) in m1.iter().zip(&m2) {
        edges.push((a1, a2 + shift));
        edges.push((b1, b2 + shift));
    }
    RegularGraph::from_edges(g1.n() + g2.n(), g1.d(), edges)
}

fn pick_matching(g: &RegularGraph, want: usize, seed: u64) -> Result<Vec<(Vertex, Vertex)>> {
    let mut rng = Rng64::from_seed(seed);
    let mut order: Vec<u32> = (0..g.m() as u32).collect();
    rng.shuffle(&mut order);
    let mut used = crate::graph::VertexSet::new(g.n());
    let mut picked = Vec::with_capacity(want);
    for &e in &order {
        let (u, v) = g.endpoints(e);
        if !used.contains(u) && !used.contains(v) {
            used.insert(u);
            used.insert(v);
            picked.push((u, v));
            if picked.len() == want {
                return Ok(picked);
            }
        }
    }
    Err(Error::DegenerateSpec(format!(
        "could not find {want} disjoint edges in a side with {} vertices",
        g.n()
    )))
}

/// A generator request as it arrives from configuration.
#[derive(Clone, Debug)]
pub enum GenModel {
    RandomRegular,
    Complete,
    Petersen,
    Circulant { offsets: Vec<usize> },
    /// Two independent random regular halves of n/2 vertices each, glued by
    /// `bridges` edge swaps.
    AdversarialUnion { bridges: usize },
}

#[derive(Clone, Debug)]
pub struct GenSpec {
    pub model: GenModel,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub max_retries: usize,
}

pub fn generate(spec: &GenSpec) -> Result<RegularGraph> {
    match &spec.model {
        GenModel::RandomRegular => {
            random_regular(spec.n, spec.d, spec.seed, spec.max_retries)
        }
        GenModel::Complete => {
            if spec.n != spec.d + 1 {
                return Err(Error::DegenerateSpec(format!(
                    "complete graph of degree {} has {} vertices, not {}",
                    spec.d,
                    spec.d + 1,
                    spec.n
                )));
            }
            complete(spec.d)
        }
        GenModel::Petersen => {
            if spec.n != 10 || spec.d != 3 {
                return Err(Error::DegenerateSpec(
                    "the Petersen graph is cubic on 10 vertices".into(),
                ));
            }
            Ok(petersen())
        }
        GenModel::Circulant { offsets } => {
            let g = circulant(spec.n, offsets)?;
            if g.d() != spec.d {
                return Err(Error::DegenerateSpec(format!(
                    "offsets give degree {}, not {}",
                    g.d(),
                    spec.d
                )));
            }
            Ok(g)
        }
        GenModel::AdversarialUnion { bridges } => {
            if spec.n % 2 != 0 {
                return Err(Error::DegenerateSpec(
                    "adversarial union needs an even vertex count".into(),
                ));
            }
            let half = spec.n / 2;
            let g1 = random_regular(half, spec.d, mix(spec.seed, STREAM_GEN, 10), spec.max_retries)?;
            let g2 = random_regular(half, spec.d, mix(spec.seed, STREAM_GEN, 11), spec.max_retries)?;
            adversarial_union(&g1, &g2, *bridges, spec.seed)
        }
    }
}
