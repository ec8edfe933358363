//! Closed-form percolation numerics on the d-regular tree.
//!
//! Retaining each edge independently with probability p = lambda/(d-1) makes
//! the cluster of a vertex look locally like a branching process: the root
//! spawns Bin(d, p) children, everyone else Bin(d-1, p). Extinction and
//! survival probabilities of that process are the predicted densities that
//! the simulation side of the crate measures on actual graphs.

use crate::error::{Error, Result};
use crate::rng::{mix, Rng64, STREAM_GW};
use rayon::prelude::*;

pub const DEFAULT_TOL: f64 = 1e-13;

/// One supercritical parameter point with its solved probabilities.
#[derive(Clone, Copy, Debug)]
pub struct TheoryParams {
    pub d: usize,
    pub lambda: f64,
    pub p: f64,
    /// Extinction probability: the smallest root of q = (1-p+pq)^(d-1).
    pub q: f64,
    /// Survival probability of the degree-d root, 1 - (1-p+pq)^d.
    pub y: f64,
}

impl TheoryParams {
    pub fn from_lambda(d: usize, lambda: f64) -> Result<Self> {
        if !(0.0..=(d as f64 - 1.0)).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} outside [0, d-1]"
            )));
        }
        Self::from_p(d, lambda / (d as f64 - 1.0))
    }

    pub fn from_p(d: usize, p: f64) -> Result<Self> {
        let q = solve_extinction(d, p, DEFAULT_TOL)?;
        let (y, y_alt) = survival_forms(d, p, q);
        debug_assert!((y - y_alt).abs() <= 1e-12);
        Ok(TheoryParams {
            d,
            lambda: p * (d as f64 - 1.0),
            p,
            q,
            y,
        })
    }
}

fn validate_dp(d: usize, p: f64) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("d = {d} < 3")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Extinction probability of the cluster branching process: the smallest
/// root in (0, 1) of f(q) = (1-p+pq)^(d-1) - q, or exactly 1 when
/// lambda = p(d-1) <= 1. Bisection on [0, 1-1e-15] followed by fixed-point
/// refinement; |f(q)| <= tol at the returned value.
pub fn solve_extinction(d: usize, p: f64, tol: f64) -> Result<f64> {
    validate_dp(d, p)?;
    if tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tol = {tol} <= 0")));
    }
    if p * (d as f64 - 1.0) <= 1.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(0.0);
    }

    let phi = |q: f64| (1.0 - p + p * q).powi(d as i32 - 1);
    let f = |q: f64| phi(q) - q;

    // f > 0 on [0, q*), f < 0 on (q*, 1); so close to 1 that rounding eats
    // the gap, f evaluates to 0.0, which we count as the negative side.
    let mut lo = 0.0f64;
    let mut hi = 1.0 - 1e-15;
    let mut q = if f(hi) <= 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    } else {
        0.0
    };

    // phi is increasing with phi(q) > q below the root and phi(q) < q above
    // it, so iteration converges to q* monotonically from either side. This
    // polishes the bisection result and carries the rare near-critical case
    // where the bracket sign test failed outright.
    let mut residual = f(q).abs();
    let max_iter = 10_000_000;
    let mut iterations = 0usize;
    while residual > 0.5 * tol && iterations < max_iter {
        q = phi(q);
        residual = f(q).abs();
        iterations += 1;
    }

    if residual > tol {
        return Err(Error::NoConvergence(max_iter));
    }
    // A result this close to 1 means we captured the trivial root instead.
    if q >= 1.0 - 10.0 * tol {
        return Err(Error::NoConvergence(iterations));
    }
    Ok(q)
}

/// Survival probability y = 1 - (1-p+pq)^d.
pub fn survival(d: usize, p: f64) -> Result<f64> {
    let q = solve_extinction(d, p, DEFAULT_TOL)?;
    let (y, y_alt) = survival_forms(d, p, q);
    assert!(
        (y - y_alt).abs() <= 1e-12,
        "survival forms disagree: {y} vs {y_alt}"
    );
    Ok(y)
}

/// Both algebraic forms of the survival probability: the direct power form
/// and its expansion 1 - q(1-p) - p q^2. They agree exactly at any root of
/// the extinction equation; their difference is a solver-residual witness.
pub fn survival_forms(d: usize, p: f64, q: f64) -> (f64, f64) {
    let s = 1.0 - p + p * q;
    (1.0 - s.powi(d as i32), 1.0 - q * (1.0 - p) - p * q * q)
}

/// All thresholds a theorem check needs, derived once from the run
/// parameters. Component sizes are compared against `gap_low`..`gap_high`
/// (the forbidden middle range), `small_cap` bounds every non-giant
/// component, and the radii drive the spread and tree-likeness checks.
#[derive(Clone, Debug)]
pub struct TheoremConstants {
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    pub p: f64,
    pub c: f64,
    /// Exponent C of the polylog component-size threshold (ln n)^C.
    pub cap_c: f64,
    pub alpha: f64,
    pub b: f64,
    pub delta: f64,
    pub p1: f64,
    pub p2: f64,
    /// 5 lambda ln n / (lambda-1)^2.
    pub gap_low: f64,
    /// (ln n)^C.
    pub gap_high: f64,
    /// Bound on the second-largest component; numerically equal to gap_low.
    pub small_cap: f64,
    /// 10 lambda ln n / (lambda-1)^2, the ball-growth demand.
    pub ball_target: f64,
    /// ceil(2 ln ln n).
    pub spread_radius: usize,
    /// ceil(1/(16c)).
    pub cycle_radius: usize,
}

pub fn default_delta(lambda: f64) -> f64 {
    (0.1f64).min((lambda - 1.0) / 2.0)
}

/// Derives every threshold of the main theorem and the sprinkling argument.
/// `delta` defaults to min(0.1, (lambda-1)/2); it must keep lambda - delta
/// supercritical.
#[allow(clippy::too_many_arguments)]
pub fn theorem_constants(
    n: usize,
    d: usize,
    lambda: f64,
    c: f64,
    cap_c: f64,
    alpha: f64,
    b: f64,
    delta: Option<f64>,
) -> Result<TheoremConstants> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n = {n} < 3")));
    }
    if d < 3 {
        return Err(Error::InvalidParameter(format!("d = {d} < 3")));
    }
    if !(lambda > 1.0 && lambda <= d as f64 - 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} outside (1, d-1]"
        )));
    }
    if c <= 0.0 || alpha <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidParameter(
            "c, alpha, b must be positive".into(),
        ));
    }
    let delta = delta.unwrap_or_else(|| default_delta(lambda));
    if !(delta > 0.0 && lambda - delta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must lie in (0, lambda-1)"
        )));
    }

    let p = lambda / (d as f64 - 1.0);
    let p2 = delta / (d as f64 - 1.0);
    let p1 = 1.0 - (1.0 - p) / (1.0 - p2);
    let ln_n = (n as f64).ln();
    let gap_low = 5.0 * lambda * ln_n / ((lambda - 1.0) * (lambda - 1.0));
    let gap_high = ln_n.powf(cap_c);
    if gap_low >= gap_high {
        return Err(Error::InvalidParameter(format!(
            "empty component-size gap: gap_low = {gap_low:.1} >= gap_high = {gap_high:.1}; \
             raise n or C"
        )));
    }
    Ok(TheoremConstants {
        n,
        d,
        lambda,
        p,
        c,
        cap_c,
        alpha,
        b,
        delta,
        p1,
        p2,
        gap_low,
        gap_high,
        small_cap: gap_low,
        ball_target: 2.0 * gap_low,
        spread_radius: (2.0 * ln_n.ln()).ceil() as usize,
        cycle_radius: (1.0 / (16.0 * c)).ceil() as usize,
    })
}

/// Binomial concentration: P(|X - np| >= t) <= 2 exp(-t^2 / (3np)) for
/// Bin(n, p) and 0 < t <= np/2.
pub fn chernoff_bound(n: u64, p: f64, t: f64) -> Result<f64> {
    let np = n as f64 * p;
    if !(t > 0.0 && t <= np / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside (0, np/2] = (0, {}]",
            np / 2.0
        )));
    }
    Ok(2.0 * (-t * t / (3.0 * np)).exp())
}

/// Predicted tail for the size of a finite cluster: exp(-(lambda-1)^2 k /
/// (4 lambda)). Vacuously 1 at k = 0.
pub fn gap_tail_prediction(k: usize, lambda: f64) -> f64 {
    assert!(lambda > 1.0, "tail prediction needs lambda > 1");
    (-(lambda - 1.0) * (lambda - 1.0) * k as f64 / (4.0 * lambda)).exp()
}

/// Simulates one branching-process cluster breadth-first: the root draws
/// Bin(d, p) children, everyone else Bin(d-1, p). Growth stops the moment
/// the population reaches `size_cap`; reaching it is reported as survival.
/// The surviving-frequency estimate this yields is biased upward by the
/// finite cap, vanishingly so for caps far beyond the finite-cluster scale.
pub fn gw_cluster_sample(d: usize, p: f64, size_cap: usize, seed: u64) -> (usize, bool) {
    assert!(size_cap >= 1);
    let mut rng = Rng64::from_seed(seed);
    let mut size = 1usize;
    if size >= size_cap {
        return (size, true);
    }
    let mut active = 1usize;
    let mut fan = d;
    while active > 0 {
        active -= 1;
        for _ in 0..fan {
            if rng.bernoulli(p) {
                size += 1;
                active += 1;
                if size >= size_cap {
                    return (size, true);
                }
            }
        }
        fan = d - 1;
    }
    (size, false)
}

/// Fraction of `samples` independent clusters that reach `size_cap`.
/// Sample i uses the seed cell (base_seed, STREAM_GW, i), so the estimate
/// is independent of worker count and iteration order.
pub fn gw_survival_frequency(
    d: usize,
    p: f64,
    size_cap: usize,
    samples: usize,
    base_seed: u64,
) -> f64 {
    let survived: usize = (0..samples as u64)
        .into_par_iter()
        .map(|i| gw_cluster_sample(d, p, size_cap, mix(base_seed, STREAM_GW, i)).1 as usize)
        .sum();
    survived as f64 / samples as f64
}
