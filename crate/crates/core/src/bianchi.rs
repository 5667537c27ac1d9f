//! Saturated slotted-DCF fixed point for a group of contending nodes.
//!
//! Given `n` saturated nodes sharing one collision domain, solve jointly for
//! the per-slot transmit probability τ, the conditional collision
//! probability p and the mean backoff E[B] (in slots) under binary
//! exponential backoff with `m` doubling stages and no retry limit.

use serde::Serialize;

use crate::error::{Error, Result};

const DAMPING: f64 = 0.5;
const MAX_ITERATIONS: usize = 10_000;
const BISECTION_STEPS: usize = 200;
/// Residual accepted from the damped iteration before falling back.
const ITERATION_TOLERANCE: f64 = 1e-14;
/// Residual every returned point satisfies.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Solved operating point of `n_total` contending nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BianchiPoint {
    pub n_total: u32,
    pub tau: f64,
    pub p: f64,
    pub e_b: f64,
}

/// Per-slot event probabilities seen by a tagged group of nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotProbabilities {
    /// Slot stays empty.
    pub a: f64,
    /// Exactly one transmission (any node).
    pub b: f64,
    /// Two or more transmissions.
    pub c: f64,
    /// Exactly one transmission and it comes from the tagged group.
    pub d: f64,
}

/// Mean backoff in slots at collision probability `p`.
///
/// Uses `(1 + p Σ_{j<m} (2p)^j) CW_min/2 − 1/2`, which equals the usual
/// rational form `(1 − p − p(2p)^m)/(1 − 2p) · CW_min/2 − 1/2` but has no
/// pole at `p = 1/2`.
pub fn expected_backoff(p: f64, cw_min: u32, m: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
    }
    if cw_min < 2 {
        return Err(Error::invalid(
            "cw_min",
            format!("must be at least 2, got {cw_min}"),
        ));
    }
    Ok(backoff_slots(p, cw_min, m))
}

fn backoff_slots(p: f64, cw_min: u32, m: u32) -> f64 {
    let q = 2.0 * p;
    let mut term = 1.0;
    let mut series = 0.0;
    for _ in 0..m {
        series += term;
        term *= q;
    }
    (1.0 + p * series) * f64::from(cw_min) / 2.0 - 0.5
}

fn collision_probability(tau: f64, n_total: u32) -> f64 {
    1.0 - (1.0 - tau).powi(n_total as i32 - 1)
}

/// `1/(E[B](p(τ)) + 1)`; non-increasing in τ.
fn attempt_map(tau: f64, n_total: u32, cw_min: u32, m: u32) -> f64 {
    let p = collision_probability(tau, n_total);
    1.0 / (backoff_slots(p, cw_min, m) + 1.0)
}

/// Solves the (τ, p, E[B]) system for `n_total` contending nodes.
pub fn solve_fixed_point(n_total: u32, cw_min: u32, m: u32) -> Result<BianchiPoint> {
    if n_total == 0 {
        return Err(Error::invalid("n_total", "at least one node must contend"));
    }
    if cw_min < 2 {
        return Err(Error::invalid(
            "cw_min",
            format!("must be at least 2, got {cw_min}"),
        ));
    }
    if n_total > i32::MAX as u32 {
        return Err(Error::invalid("n_total", "too many nodes"));
    }

    let tau = damped_iteration(n_total, cw_min, m)
        .unwrap_or_else(|| bisect_root(n_total, cw_min, m));

    let p = collision_probability(tau, n_total);
    let e_b = backoff_slots(p, cw_min, m);
    let residual = (tau - 1.0 / (e_b + 1.0)).abs();
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(Error::Numerical {
            context: "DCF fixed point",
            residual,
        });
    }
    Ok(BianchiPoint {
        n_total,
        tau,
        p,
        e_b,
    })
}

fn damped_iteration(n_total: u32, cw_min: u32, m: u32) -> Option<f64> {
    let mut tau = 2.0 / (f64::from(cw_min) + 1.0);
    let mut best = f64::INFINITY;
    let mut since_improvement = 0;
    for _ in 0..MAX_ITERATIONS {
        let target = attempt_map(tau, n_total, cw_min, m);
        let residual = (tau - target).abs();
        if residual <= ITERATION_TOLERANCE {
            return Some(tau);
        }
        if residual < best * 0.999 {
            best = residual;
            since_improvement = 0;
        } else {
            since_improvement += 1;
            if since_improvement > 50 {
                return None;
            }
        }
        tau = (1.0 - DAMPING) * tau + DAMPING * target;
    }
    None
}

/// Root of `g(τ) = τ − attempt_map(τ)` on (0, 1). `g` is strictly increasing,
/// negative near 0 and positive at 1.
fn bisect_root(n_total: u32, cw_min: u32, m: u32) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid - attempt_map(mid, n_total, cw_min, m) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Slot outcome probabilities for a solved point, with `n_tagged` of the
/// `n_total` nodes belonging to the tagged WLAN.
pub fn slot_probabilities(point: &BianchiPoint, n_tagged: u32) -> Result<SlotProbabilities> {
    if n_tagged == 0 || n_tagged > point.n_total {
        return Err(Error::invalid(
            "n_tagged",
            format!("must lie in 1..={}, got {n_tagged}", point.n_total),
        ));
    }
    let idle = 1.0 - point.tau;
    let others_idle = idle.powi(point.n_total as i32 - 1);
    let a = idle * others_idle;
    let single = point.tau * others_idle;
    let b = f64::from(point.n_total) * single;
    let d = f64::from(n_tagged) * single;
    Ok(SlotProbabilities {
        a,
        b,
        c: (1.0 - a - b).max(0.0),
        d,
    })
}
