//! Query-by-query cluster exploration.
//!
//! The process maintains a partition of the vertices into S (done), Q (a
//! FIFO of vertices being explored) and T (untouched). Each round looks at
//! the head of Q, finds its first unexamined neighbor in T by ascending
//! vertex index, and queries that edge: a 1 moves the neighbor to the tail
//! of Q, a 0 discards the edge. A head with no remaining T-neighbors
//! retires to S. Every edge is queried at most once, and one answer bit is
//! consumed per query, so driving the process from a Bernoulli stream or
//! from a fixed edge mask yields identically distributed components.
//!
//! The hop variant starts from a whole first-round component, excludes a
//! given vertex set from T, and lets every positive answer absorb the full
//! first-round component of the discovered endpoint.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, RegularGraph, Vertex, VertexSet};
use crate::percolate::{ComponentStats, EdgeMask};
use crate::rng::{mix, Rng64, STREAM_EXPLORE};
use rayon::prelude::*;

/// Answers one bit per queried edge.
pub trait AnswerSource {
    fn answer(&mut self, edge: EdgeId) -> Result<bool>;
}

/// Fresh Bernoulli(p) bit per query, regardless of which edge asks.
pub struct BernoulliAnswers {
    rng: Rng64,
    p: f64,
}

impl BernoulliAnswers {
    pub fn new(p: f64, seed: u64) -> Self {
        Self::from_rng(p, Rng64::from_seed(seed))
    }

    /// Continues an existing stream; used when the caller has already drawn
    /// from the generator (say, a random start vertex).
    pub fn from_rng(p: f64, rng: Rng64) -> Self {
        assert!((0.0..=1.0).contains(&p));
        BernoulliAnswers { rng, p }
    }
}

impl AnswerSource for BernoulliAnswers {
    fn answer(&mut self, _edge: EdgeId) -> Result<bool> {
        Ok(self.rng.bernoulli(self.p))
    }
}

/// Answers by looking up the queried edge in a fixed percolation outcome.
pub struct MaskAnswers<'a> {
    mask: &'a EdgeMask,
}

impl<'a> MaskAnswers<'a> {
    pub fn new(mask: &'a EdgeMask) -> Self {
        MaskAnswers { mask }
    }
}

impl AnswerSource for MaskAnswers<'_> {
    fn answer(&mut self, edge: EdgeId) -> Result<bool> {
        Ok(self.mask.get(edge))
    }
}

/// Fixed finite answer list; running past the end is an error.
pub struct ScriptedAnswers {
    bits: Vec<bool>,
    next: usize,
}

impl ScriptedAnswers {
    pub fn new<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        ScriptedAnswers {
            bits: bits.into_iter().collect(),
            next: 0,
        }
    }
}

impl AnswerSource for ScriptedAnswers {
    fn answer(&mut self, _edge: EdgeId) -> Result<bool> {
        let bit = self
            .bits
            .get(self.next)
            .copied()
            .ok_or(Error::AnswersExhausted(self.bits.len()))?;
        self.next += 1;
        Ok(bit)
    }
}

#[derive(Clone, Debug)]
pub struct ExplorationResult {
    /// The final S: everything the process explored.
    pub component: VertexSet,
    pub queries: usize,
    pub positives: usize,
    /// (edge index, answer bit) per query, in order.
    pub log: Vec<(EdgeId, bool)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Code {
    T,
    Q,
    S,
    /// Excluded from T for the whole run (the hop variant's W).
    Off,
}

#[derive(Clone, Copy, Debug)]
pub enum StepEvent {
    Queried { edge: EdgeId, positive: bool },
    Retired(Vertex),
    Done,
}

/// Full partition checks are linear in n; past this size debug builds rely
/// on the O(1) per-transition assertions instead.
const FULL_CHECK_LIMIT: usize = 2048;

/// Reusable exploration engine. `start` (or `start_with_hops`) arms it;
/// `step` advances one query or retirement. Epoch-stamped per-vertex state
/// makes a restart O(restarted set), not O(n), which is what lets the tail
/// sampler run hundreds of thousands of short explorations.
pub struct Explorer<'g> {
    g: &'g RegularGraph,
    stamp: Vec<u32>,
    epoch: u32,
    code: Vec<Code>,
    cursor: Vec<u16>,
    queue: VecDeque<Vertex>,
    discovered: usize,
    s_count: usize,
    queries: usize,
    positives: usize,
    log: Vec<(EdgeId, bool)>,
    record_log: bool,
    hop: Option<HopInfo>,
}

struct HopInfo {
    labels: Vec<Vertex>,
    members: BTreeMap<Vertex, Vec<Vertex>>,
}

impl<'g> Explorer<'g> {
    pub fn new(g: &'g RegularGraph) -> Self {
        assert!(g.d() <= u16::MAX as usize);
        Explorer {
            g,
            stamp: vec![0; g.n()],
            epoch: 0,
            code: vec![Code::T; g.n()],
            cursor: vec![0; g.n()],
            queue: VecDeque::new(),
            discovered: 0,
            s_count: 0,
            queries: 0,
            positives: 0,
            log: Vec::new(),
            record_log: false,
            hop: None,
        }
    }

    /// Arms a plain exploration: Q = u_init (ascending), T = everything
    /// else.
    pub fn start(&mut self, u_init: &VertexSet, record_log: bool) -> Result<()> {
        if u_init.is_empty() {
            return Err(Error::EmptySet);
        }
        assert_eq!(u_init.universe(), self.g.n(), "universe mismatch");
        self.reset(record_log);
        self.hop = None;
        for v in u_init.iter() {
            self.set_code(v, Code::Q);
            self.queue.push_back(v);
        }
        self.discovered = u_init.len();
        Ok(())
    }

    /// Arms the hop variant: Q = k_start (a union of whole first-round
    /// components), T = V minus k_start minus w_set, and positive answers
    /// absorb entire first-round components.
    pub fn start_with_hops(
        &mut self,
        first_round: &ComponentStats,
        w_set: &VertexSet,
        k_start: &VertexSet,
        record_log: bool,
    ) -> Result<()> {
        if k_start.is_empty() {
            return Err(Error::EmptySet);
        }
        let n = self.g.n();
        assert_eq!(w_set.universe(), n, "universe mismatch");
        assert_eq!(k_start.universe(), n, "universe mismatch");
        assert_eq!(first_round.component_id.len(), n, "labeling mismatch");
        if !k_start.is_disjoint_from(w_set) {
            return Err(Error::InvalidParameter(
                "k_start intersects w_set".into(),
            ));
        }

        let labels = first_round.component_id.clone();
        let mut members: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
        for v in 0..n as Vertex {
            members.entry(labels[v as usize]).or_default().push(v);
        }
        // Both the start set and the exclusion set must respect first-round
        // components, or absorption would straddle the partition.
        for (label, group) in &members {
            let in_k = group.iter().filter(|&&v| k_start.contains(v)).count();
            if in_k != 0 && in_k != group.len() {
                return Err(Error::InvalidParameter(format!(
                    "k_start splits first-round component {label}"
                )));
            }
            let in_w = group.iter().filter(|&&v| w_set.contains(v)).count();
            if in_w != 0 && in_w != group.len() {
                return Err(Error::InvalidParameter(format!(
                    "w_set splits first-round component {label}"
                )));
            }
        }

        self.reset(record_log);
        for v in w_set.iter() {
            self.set_code(v, Code::Off);
        }
        for v in k_start.iter() {
            self.set_code(v, Code::Q);
            self.queue.push_back(v);
        }
        self.discovered = k_start.len();
        self.hop = Some(HopInfo { labels, members });
        Ok(())
    }

    fn reset(&mut self, record_log: bool) {
        if self.epoch == u32::MAX {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.queue.clear();
        self.discovered = 0;
        self.s_count = 0;
        self.queries = 0;
        self.positives = 0;
        self.log.clear();
        self.record_log = record_log;
    }

    #[inline]
    fn code_of(&self, v: Vertex) -> Code {
        if self.stamp[v as usize] == self.epoch {
            self.code[v as usize]
        } else {
            Code::T
        }
    }

    #[inline]
    fn set_code(&mut self, v: Vertex, code: Code) {
        let i = v as usize;
        if self.stamp[i] != self.epoch {
            self.stamp[i] = self.epoch;
            self.cursor[i] = 0;
        }
        self.code[i] = code;
    }

    /// |S| + |Q|: everything discovered so far, a lower bound on the final
    /// component size that only ever grows.
    pub fn discovered(&self) -> usize {
        self.discovered
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    /// One round: a single query, or the retirement of an exhausted head,
    /// or Done when the queue is empty.
    pub fn step<A: AnswerSource>(&mut self, answers: &mut A) -> Result<StepEvent> {
        let Some(&head) = self.queue.front() else {
            debug_assert!(self.partition_ok());
            return Ok(StepEvent::Done);
        };
        debug_assert_eq!(self.code_of(head), Code::Q);

        let row = self.g.neighbors(head);
        let ids = self.g.incident_edges(head);
        let mut cur = self.cursor[head as usize] as usize;
        while cur < row.len() {
            let w = row[cur];
            if self.code_of(w) == Code::T {
                let edge = ids[cur];
                self.cursor[head as usize] = (cur + 1) as u16;
                let bit = answers.answer(edge)?;
                self.queries += 1;
                if self.record_log {
                    self.log.push((edge, bit));
                }
                if bit {
                    self.positives += 1;
                    self.admit(w);
                }
                debug_assert!(self.g.n() > FULL_CHECK_LIMIT || self.partition_ok());
                return Ok(StepEvent::Queried { edge, positive: bit });
            }
            cur += 1;
        }
        self.cursor[head as usize] = cur as u16;
        self.queue.pop_front();
        self.set_code(head, Code::S);
        self.s_count += 1;
        debug_assert!(self.g.n() > FULL_CHECK_LIMIT || self.partition_ok());
        Ok(StepEvent::Retired(head))
    }

    fn admit(&mut self, w: Vertex) {
        if let Some(hop) = self.hop.take() {
            let label = hop.labels[w as usize];
            let group = &hop.members[&label];
            for &v in group {
                debug_assert_eq!(self.code_of(v), Code::T);
                self.set_code(v, Code::Q);
                self.queue.push_back(v);
            }
            self.discovered += group.len();
            self.hop = Some(hop);
        } else {
            self.set_code(w, Code::Q);
            self.queue.push_back(w);
            self.discovered += 1;
        }
    }

    /// Runs to completion and snapshots the result.
    pub fn run<A: AnswerSource>(&mut self, answers: &mut A) -> Result<ExplorationResult> {
        while !matches!(self.step(answers)?, StepEvent::Done) {}
        let mut component = VertexSet::new(self.g.n());
        for v in 0..self.g.n() as Vertex {
            if self.code_of(v) == Code::S {
                component.insert(v);
            }
        }
        debug_assert_eq!(component.len(), self.s_count);
        Ok(ExplorationResult {
            component,
            queries: self.queries,
            positives: self.positives,
            log: std::mem::take(&mut self.log),
        })
    }

    /// Runs until completion or until more than `max_size` vertices have
    /// been discovered; the flag reports the abort. Because S and Q only
    /// grow, an abort certifies the true component exceeds `max_size`.
    pub fn run_capped<A: AnswerSource>(
        &mut self,
        answers: &mut A,
        max_size: usize,
    ) -> Result<(usize, bool)> {
        loop {
            if self.discovered > max_size {
                return Ok((self.discovered, true));
            }
            if matches!(self.step(answers)?, StepEvent::Done) {
                return Ok((self.s_count, false));
            }
        }
    }

    /// S, Q, T (plus the excluded set) partition V: every vertex has
    /// exactly one state and the queue mirrors Q. Linear in n; debug builds
    /// call it per round on small graphs.
    pub fn partition_ok(&self) -> bool {
        let mut q_seen = 0usize;
        let mut s_seen = 0usize;
        for v in 0..self.g.n() as Vertex {
            match self.code_of(v) {
                Code::Q => q_seen += 1,
                Code::S => s_seen += 1,
                Code::T | Code::Off => {}
            }
        }
        q_seen == self.queue.len()
            && s_seen == self.s_count
            && s_seen + q_seen == self.discovered
            && self
                .queue
                .iter()
                .all(|&v| self.code_of(v) == Code::Q)
    }
}

/// Explores the joint cluster of `u_init` and returns the final S with the
/// full query log.
pub fn explore<A: AnswerSource>(
    g: &RegularGraph,
    u_init: &VertexSet,
    answers: &mut A,
) -> Result<ExplorationResult> {
    let mut ex = Explorer::new(g);
    ex.start(u_init, true)?;
    ex.run(answers)
}

/// The hop variant: T excludes `w_set`, exploration starts from the whole
/// component `k_start`, and each positive answer pulls in the entire
/// first-round component of the discovered endpoint.
pub fn explore_with_component_hops<A: AnswerSource>(
    g: &RegularGraph,
    first_round: &ComponentStats,
    w_set: &VertexSet,
    k_start: &VertexSet,
    answers: &mut A,
) -> Result<ExplorationResult> {
    let mut ex = Explorer::new(g);
    ex.start_with_hops(first_round, w_set, k_start, true)?;
    ex.run(answers)
}

/// Empirical cluster-size frequencies from uniformly random start vertices.
#[derive(Clone, Debug)]
pub struct TailTable {
    pub k_min: usize,
    pub k_max: usize,
    /// counts[k - k_min] = number of trials whose cluster had exactly k
    /// vertices.
    pub counts: Vec<u64>,
    pub below_range: u64,
    /// Trials aborted once the cluster grew past k_max.
    pub above_range: u64,
    pub trials: usize,
}

impl TailTable {
    pub fn frequency(&self, k: usize) -> f64 {
        assert!((self.k_min..=self.k_max).contains(&k));
        self.counts[k - self.k_min] as f64 / self.trials as f64
    }

    /// Fraction of trials with cluster size strictly below `k`.
    pub fn mass_below(&self, k: usize) -> f64 {
        assert!((self.k_min..=self.k_max + 1).contains(&k));
        let in_range: u64 = self.counts[..k - self.k_min].iter().sum();
        (self.below_range + in_range) as f64 / self.trials as f64
    }
}

/// Runs `trials` independent explorations in Bernoulli-stream mode, each
/// from a uniformly random start vertex, recording exact cluster sizes in
/// [k_min, k_max] and aborting (into `above_range`) as soon as a cluster
/// outgrows the range. Trial t draws its start vertex and then its answer
/// stream from the seed cell (seed, STREAM_EXPLORE, t).
pub fn cluster_size_tail(
    g: &RegularGraph,
    p: f64,
    k_min: usize,
    k_max: usize,
    trials: usize,
    seed: u64,
) -> Result<TailTable> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    if !(1 <= k_min && k_min <= k_max && k_max <= g.n()) {
        return Err(Error::InvalidParameter(format!(
            "bad size range [{k_min}, {k_max}] for n = {}",
            g.n()
        )));
    }
    let len = k_max - k_min + 1;
    let zero = || TailTable {
        k_min,
        k_max,
        counts: vec![0; len],
        below_range: 0,
        above_range: 0,
        trials,
    };
    let table = (0..trials as u64)
        .into_par_iter()
        .fold(
            || (None::<Explorer>, zero()),
            |(ex, mut acc), t| {
                let mut ex = ex.unwrap_or_else(|| Explorer::new(g));
                let mut rng = Rng64::from_seed(mix(seed, STREAM_EXPLORE, t));
                let start = rng.below(g.n() as u64) as Vertex;
                let mut u_init = VertexSet::new(g.n());
                u_init.insert(start);
                ex.start(&u_init, false).expect("nonempty start");
                let mut answers = BernoulliAnswers::from_rng(p, rng);
                let (size, aborted) = ex
                    .run_capped(&mut answers, k_max)
                    .expect("bernoulli stream never exhausts");
                if aborted {
                    acc.above_range += 1;
                } else if size < k_min {
                    acc.below_range += 1;
                } else {
                    acc.counts[size - k_min] += 1;
                }
                (Some(ex), acc)
            },
        )
        .map(|(_, acc)| acc)
        .reduce(zero, |mut a, b| {
            for (x, y) in a.counts.iter_mut().zip(&b.counts) {
                *x += y;
            }
            a.below_range += b.below_range;
            a.above_range += b.above_range;
            a
        });
    Ok(table)
}
