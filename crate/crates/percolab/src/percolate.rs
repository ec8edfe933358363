//! Bond percolation sampling and component census.

use crate::error::{Error, Result};
use crate::graph::{RegularGraph, Vertex};
use crate::rng::{mix, Rng64, STREAM_MASK};
use crate::theory::TheoremConstants;
use rayon::prelude::*;

/// Retained-edge bitmap of one percolation outcome. A mask sampled by
/// [`sample_mask`] regenerates bit-identically from (seed, p, m); masks
/// produced by [`union_mask`] carry no seed of their own.
#[derive(Clone, PartialEq)]
pub struct EdgeMask {
    blocks: Vec<u64>,
    m: usize,
    pub p: f64,
    pub seed: Option<u64>,
    retained: usize,
}

impl std::fmt::Debug for EdgeMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EdgeMask")
            .field("m", &self.m)
            .field("retained", &self.retained)
            .field("p", &self.p)
            .field("seed", &self.seed)
            .finish()
    }
}

impl EdgeMask {
    pub fn empty(m: usize) -> Self {
        EdgeMask {
            blocks: vec![0; m.div_ceil(64)],
            m,
            p: 0.0,
            seed: None,
            retained: 0,
        }
    }

    /// Explicit mask over a fixed edge list. `p` records the nominal
    /// probability the caller associates with it; no seed, so it cannot be
    /// regenerated.
    pub fn from_retained(m: usize, retained: &[u32], p: f64) -> Self {
        let mut mask = EdgeMask::empty(m);
        mask.p = p;
        for &e in retained {
            assert!((e as usize) < m);
            assert!(!mask.get(e), "duplicate edge {e}");
            mask.set(e as usize);
        }
        mask.retained = retained.len();
        mask
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn retained_count(&self) -> usize {
        self.retained
    }

    #[inline]
    pub fn get(&self, e: u32) -> bool {
        debug_assert!((e as usize) < self.m);
        self.blocks[e as usize >> 6] >> (e & 63) & 1 == 1
    }

    fn set(&mut self, e: usize) {
        self.blocks[e >> 6] |= 1 << (e & 63);
    }

    /// Retained edge indices, ascending.
    pub fn iter_retained(&self) -> impl Iterator<Item = u32> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &block)| {
            let base = (i * 64) as u32;
            std::iter::successors(
                if block == 0 { None } else { Some(block) },
                |&b| {
                    let b = b & (b - 1);
                    if b == 0 { None } else { Some(b) }
                },
            )
            .map(move |b| base + b.trailing_zeros())
        })
    }
}

/// Draws one Bernoulli(p) bit per edge, in edge-index order.
pub fn sample_mask(g: &RegularGraph, p: f64, seed: u64) -> Result<EdgeMask> {
    check_probability(p)?;
    let mut rng = Rng64::from_seed(seed);
    let mut mask = EdgeMask::empty(g.m());
    mask.p = p;
    mask.seed = Some(seed);
    for e in 0..g.m() {
        if rng.bernoulli(p) {
            mask.set(e);
            mask.retained += 1;
        }
    }
    Ok(mask)
}

/// Coupled masks from one uniform draw per edge, thresholded at each given
/// probability. The mask for `ps[i]` is bit-identical to
/// `sample_mask(g, ps[i], seed)`, and whenever ps[i] <= ps[j] the former is
/// a subset of the latter, which is what stochastic-domination tests need.
pub fn sample_coupled(g: &RegularGraph, ps: &[f64], seed: u64) -> Result<Vec<EdgeMask>> {
    for &p in ps {
        check_probability(p)?;
    }
    let mut rng = Rng64::from_seed(seed);
    let mut masks: Vec<EdgeMask> = ps
        .iter()
        .map(|&p| {
            let mut mask = EdgeMask::empty(g.m());
            mask.p = p;
            mask.seed = Some(seed);
            mask
        })
        .collect();
    for e in 0..g.m() {
        let u = rng.unit_f64();
        for (i, &p) in ps.iter().enumerate() {
            if u < p {
                masks[i].set(e);
                masks[i].retained += 1;
            }
        }
    }
    Ok(masks)
}

/// Bitwise OR of two outcomes; the combined retention probability is
/// 1 - (1-p1)(1-p2).
pub fn union_mask(a: &EdgeMask, b: &EdgeMask) -> Result<EdgeMask> {
    if a.m != b.m {
        return Err(Error::MaskMismatch { left: a.m, right: b.m });
    }
    let mut out = EdgeMask::empty(a.m);
    for (o, (&x, &y)) in out.blocks.iter_mut().zip(a.blocks.iter().zip(&b.blocks)) {
        *o = x | y;
    }
    out.p = 1.0 - (1.0 - a.p) * (1.0 - b.p);
    out.seed = None;
    out.retained = out.blocks.iter().map(|b| b.count_ones() as usize).sum();
    Ok(out)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")))
    }
}

/// Component census of a percolation outcome.
#[derive(Clone, Debug)]
pub struct ComponentStats {
    /// Component sizes, descending.
    pub sizes: Vec<u32>,
    pub l1: u32,
    /// 0 when the graph percolates into a single component.
    pub l2: u32,
    pub num_components: usize,
    /// Per-vertex label: the smallest vertex of the component.
    pub component_id: Vec<Vertex>,
    size_by_label: Vec<u32>,
}

impl ComponentStats {
    pub fn component_size(&self, v: Vertex) -> u32 {
        self.size_by_label[self.component_id[v as usize] as usize]
    }

    /// Number of components whose size lands inside [lo, hi].
    pub fn sizes_within(&self, lo: f64, hi: f64) -> usize {
        self.sizes
            .iter()
            .filter(|&&s| (s as f64) >= lo && (s as f64) <= hi)
            .count()
    }
}

/// Union-find census over the retained edges.
pub fn components(g: &RegularGraph, mask: &EdgeMask) -> ComponentStats {
    assert_eq!(mask.len(), g.m(), "mask length mismatch");
    let n = g.n();
    let mut uf = UnionFind::new(n);
    for e in mask.iter_retained() {
        let (u, v) = g.endpoints(e);
        uf.union(u, v);
    }

    // Scanning vertices in order makes the first visitor of each root the
    // smallest member, hence the label.
    let mut component_id = vec![0 as Vertex; n];
    let mut size_by_label = vec![0u32; n];
    let mut label_of_root = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    for v in 0..n as Vertex {
        let root = uf.find(v) as usize;
        if label_of_root[root] == u32::MAX {
            label_of_root[root] = v;
            size_by_label[v as usize] = uf.size[root];
            sizes.push(uf.size[root]);
        }
        component_id[v as usize] = label_of_root[root];
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let l1 = sizes[0];
    let l2 = if sizes.len() > 1 { sizes[1] } else { 0 };
    ComponentStats {
        l1,
        l2,
        num_components: sizes.len(),
        sizes,
        component_id,
        size_by_label,
    }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            // Path halving.
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// One row of a percolation census.
#[derive(Clone, Debug)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub l1: u32,
    pub l2: u32,
    pub num_components: usize,
    pub gap_violations: usize,
}

/// Runs `trials` independent percolation rounds; trial t samples with seed
/// cell (base_seed, STREAM_MASK, t). `gap_violations` counts components
/// whose size lands in the forbidden window [gap_low, gap_high]. Trials run
/// in parallel but rows come back in trial order.
pub fn trial_census(
    g: &RegularGraph,
    p: f64,
    trials: usize,
    base_seed: u64,
    constants: &TheoremConstants,
) -> Result<Vec<TrialRow>> {
    check_probability(p)?;
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = mix(base_seed, STREAM_MASK, t as u64);
            let mask = sample_mask(g, p, seed)?;
            let stats = components(g, &mask);
            Ok(TrialRow {
                trial: t,
                seed,
                n: g.n(),
                p,
                l1: stats.l1,
                l2: stats.l2,
                num_components: stats.num_components,
                gap_violations: stats.sizes_within(constants.gap_low, constants.gap_high),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, random_regular, DEFAULT_MAX_RETRIES};
    use crate::theory::theorem_constants;

    fn triangle() -> RegularGraph {
        RegularGraph::from_edges(3, 2, vec![(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn extreme_masks() {
        let g = triangle();
        let empty = sample_mask(&g, 0.0, 1).unwrap();
        assert_eq!(empty.retained_count(), 0);
        let full = sample_mask(&g, 1.0, 1).unwrap();
        assert_eq!(full.retained_count(), 3);
        assert!(sample_mask(&g, 1.5, 1).is_err());
    }

    #[test]
    fn mask_regenerates_bit_identically() {
        let g = random_regular(64, 3, 5, DEFAULT_MAX_RETRIES).unwrap();
        let a = sample_mask(&g, 0.6, 42).unwrap();
        let b = sample_mask(&g, 0.6, 42).unwrap();
        let c = sample_mask(&g, 0.6, 43).unwrap();
        assert!(a == b);
        assert!(a != c);
        assert_eq!(a.retained, a.iter_retained().count());
    }

    #[test]
    fn retained_count_concentrates() {
        let g = random_regular(1000, 3, 1, DEFAULT_MAX_RETRIES).unwrap();
        let m = g.m() as f64;
        let p = 0.75;
        let sigma = (m * p * (1.0 - p)).sqrt();
        for seed in 0..20 {
            let mask = sample_mask(&g, p, seed).unwrap();
            assert!(
                (mask.retained_count() as f64 - m * p).abs() < 5.0 * sigma,
                "seed {seed}: {} retained",
                mask.retained_count()
            );
        }
    }

    #[test]
    fn coupled_masks_nest_and_match_direct_sampling() {
        let g = random_regular(200, 3, 9, DEFAULT_MAX_RETRIES).unwrap();
        let masks = sample_coupled(&g, &[0.2, 0.5, 0.9], 77).unwrap();
        for e in 0..g.m() as u32 {
            assert!(!masks[0].get(e) || masks[1].get(e));
            assert!(!masks[1].get(e) || masks[2].get(e));
        }
        let direct = sample_mask(&g, 0.5, 77).unwrap();
        assert!(masks[1] == direct);
    }

    #[test]
    fn union_or_and_p_arithmetic() {
        let g = triangle();
        let a = sample_mask(&g, 0.5, 1).unwrap();
        let empty = sample_mask(&g, 0.0, 2).unwrap();
        let full = sample_mask(&g, 1.0, 3).unwrap();
        let u = union_mask(&a, &empty).unwrap();
        for e in 0..3 {
            assert_eq!(u.get(e), a.get(e));
        }
        assert_eq!(union_mask(&a, &full).unwrap().retained_count(), 3);

        let mut m1 = EdgeMask::empty(3);
        m1.p = 14.0 / 19.0;
        let mut m2 = EdgeMask::empty(3);
        m2.p = 0.05;
        let combined = union_mask(&m1, &m2).unwrap();
        assert!((combined.p - 0.75).abs() < 1e-12);
        assert!(combined.seed.is_none());

        let k4_mask = EdgeMask::empty(6);
        assert!(union_mask(&a, &k4_mask).is_err());
    }

    #[test]
    fn union_frequency_matches_combined_p() {
        // Per-edge retention of a union of independent masks.
        let g = triangle();
        let (p1, p2) = (14.0 / 19.0, 0.05);
        let rounds = 100_000u64;
        let mut count = [0u64; 3];
        for t in 0..rounds {
            let a = sample_mask(&g, p1, mix(5, 1, t)).unwrap();
            let b = sample_mask(&g, p2, mix(5, 2, t)).unwrap();
            let u = union_mask(&a, &b).unwrap();
            for (e, c) in count.iter_mut().enumerate() {
                *c += u.get(e as u32) as u64;
            }
        }
        let sigma = (rounds as f64 * 0.75 * 0.25).sqrt();
        for &c in &count {
            assert!((c as f64 - rounds as f64 * 0.75).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn census_trivial_cases() {
        let g = triangle();
        let none = components(&g, &sample_mask(&g, 0.0, 1).unwrap());
        assert_eq!((none.l1, none.l2, none.num_components), (1, 1, 3));
        assert_eq!(none.sizes, vec![1, 1, 1]);
        assert_eq!(none.component_id, vec![0, 1, 2]);

        let all = components(&g, &sample_mask(&g, 1.0, 1).unwrap());
        assert_eq!((all.l1, all.l2, all.num_components), (3, 0, 1));
        assert_eq!(all.component_id, vec![0, 0, 0]);
        assert_eq!(all.component_size(2), 3);
    }

    #[test]
    fn census_hand_trace_on_k4() {
        // Retain exactly 0-1 and 2-3.
        let g = complete(3).unwrap();
        let mut mask = EdgeMask::empty(6);
        mask.set(0);
        mask.set(5);
        mask.retained = 2;
        let stats = components(&g, &mask);
        assert_eq!(stats.sizes, vec![2, 2]);
        assert_eq!((stats.l1, stats.l2), (2, 2));
        assert_eq!(stats.component_id, vec![0, 0, 2, 2]);
        assert_eq!(stats.sizes_within(2.0, 2.0), 2);
        assert_eq!(stats.sizes_within(3.0, 10.0), 0);
    }

    #[test]
    fn coupling_is_monotone_in_p() {
        for seed in 0..25 {
            let g = random_regular(60, 3, seed, DEFAULT_MAX_RETRIES).unwrap();
            let masks = sample_coupled(&g, &[0.3, 0.5, 0.7], seed ^ 0xabc).unwrap();
            let l1s: Vec<u32> = masks.iter().map(|m| components(&g, m).l1).collect();
            assert!(l1s[0] <= l1s[1] && l1s[1] <= l1s[2], "seed {seed}: {l1s:?}");
        }
    }

    #[test]
    fn census_rows_are_deterministic_and_ordered() {
        let g = random_regular(500, 3, 11, DEFAULT_MAX_RETRIES).unwrap();
        let tc = theorem_constants(500, 3, 1.5, 0.1, 4.0, 0.02, 0.2, None).unwrap();
        let a = trial_census(&g, 0.75, 8, 123, &tc).unwrap();
        let b = trial_census(&g, 0.75, 8, 123, &tc).unwrap();
        assert_eq!(a.len(), 8);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.trial, x.seed, x.l1, x.l2), (y.trial, y.seed, y.l1, y.l2));
        }
        assert!(a.windows(2).all(|w| w[0].trial + 1 == w[1].trial));
        // Sizes always sum to n.
        let mask = sample_mask(&g, 0.75, 99).unwrap();
        let stats = components(&g, &mask);
        assert_eq!(stats.sizes.iter().sum::<u32>() as usize, g.n());
    }

    #[test]
    fn subcritical_mask_has_no_gap_violations() {
        let g = random_regular(500, 3, 2, DEFAULT_MAX_RETRIES).unwrap();
        let tc = theorem_constants(500, 3, 1.5, 0.1, 4.0, 0.02, 0.2, None).unwrap();
        let rows = trial_census(&g, 0.0, 3, 5, &tc).unwrap();
        for row in rows {
            assert_eq!(row.l1, 1);
            assert_eq!(row.num_components, 500);
            assert_eq!(row.gap_violations, 0);
        }
    }
}
