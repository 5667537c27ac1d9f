//! Feasible-state CTMC over sets of simultaneously active WLANs.
//!
//! A state is an independent set of the conflict graph. WLAN `i` activates
//! at rate λ_i from any state where it can join, and every active WLAN
//! finishes at rate μ. The chain is reversible, so its stationary law is
//! `π_s ∝ ∏_{i∈s} θ_i`.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scenario::{wlan_label, ConflictGraph, Scenario, MAX_WLANS};

/// Largest state space the dense generator oracle accepts.
pub const GENERATOR_SOLVE_LIMIT: usize = 4096;

/// A set of WLAN ids, bit `i` set when WLAN `i` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FeasibleState(u32);

impl FeasibleState {
    pub const EMPTY: FeasibleState = FeasibleState(0);

    pub fn from_mask(mask: u32) -> Self {
        Self(mask)
    }

    pub fn from_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        Self(ids.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, wlan: usize) -> bool {
        self.0 & (1 << wlan) != 0
    }

    pub fn with(self, wlan: usize) -> Self {
        Self(self.0 | (1 << wlan))
    }

    pub fn without(self, wlan: usize) -> Self {
        Self(self.0 & !(1 << wlan))
    }

    pub fn ids(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// Label such as `∅`, `A`, `ADE`.
    pub fn label(self) -> String {
        if self.is_empty() {
            "∅".to_string()
        } else {
            self.ids().map(wlan_label).collect()
        }
    }
}

impl serde::Serialize for FeasibleState {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.label())
    }
}

impl fmt::Display for FeasibleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// All independent sets of a conflict graph, ordered by (size, mask value).
#[derive(Debug, Clone)]
pub struct FeasibleStateSpace {
    graph: ConflictGraph,
    states: Vec<FeasibleState>,
    index: HashMap<FeasibleState, usize>,
}

impl FeasibleStateSpace {
    pub fn states(&self) -> &[FeasibleState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn wlan_count(&self) -> usize {
        self.graph.len()
    }

    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }

    pub fn index_of(&self, state: FeasibleState) -> Option<usize> {
        self.index.get(&state).copied()
    }

    pub fn contains(&self, state: FeasibleState) -> bool {
        self.index.contains_key(&state)
    }

    /// True if `wlan` can become active in `state` without overlapping anyone.
    pub fn can_join(&self, state: FeasibleState, wlan: usize) -> bool {
        !state.contains(wlan) && self.graph.closed_neighbors(wlan) & state.mask() == 0
    }

    /// Count of states per size, index = size.
    pub fn size_histogram(&self) -> Vec<usize> {
        let max = self.states.last().map_or(0, |s| s.len());
        let mut hist = vec![0; max + 1];
        for s in &self.states {
            hist[s.len()] += 1;
        }
        hist
    }
}

/// Enumerates every independent set of the scenario's conflict graph,
/// including the empty state.
pub fn enumerate_states(scenario: &Scenario) -> Result<FeasibleStateSpace> {
    enumerate_graph(scenario.graph())
}

pub(crate) fn enumerate_graph(graph: &ConflictGraph) -> Result<FeasibleStateSpace> {
    let w = graph.len();
    if w > MAX_WLANS {
        return Err(Error::StateSpaceTooLarge {
            wlans: w,
            limit: MAX_WLANS,
        });
    }
    // Level-by-level extension, only ever adding an id above the current
    // maximum, so each independent set is produced exactly once.
    let mut states = vec![FeasibleState::EMPTY];
    let mut level = vec![FeasibleState::EMPTY];
    while !level.is_empty() {
        let mut next = Vec::new();
        for s in &level {
            let start = if s.is_empty() {
                0
            } else {
                32 - s.mask().leading_zeros() as usize
            };
            for j in start..w {
                if graph.neighbors(j) & s.mask() == 0 {
                    next.push(s.with(j));
                }
            }
        }
        next.sort_unstable();
        states.extend_from_slice(&next);
        level = next;
    }
    let index = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    Ok(FeasibleStateSpace {
        graph: graph.clone(),
        states,
        index,
    })
}

/// Maximal independent sets: states no WLAN can join.
pub fn dominant_states(space: &FeasibleStateSpace) -> Vec<FeasibleState> {
    let w = space.wlan_count();
    space
        .states()
        .iter()
        .copied()
        .filter(|&s| (0..w).all(|i| !space.can_join(s, i)))
        .collect()
}

/// Long-run occupancy probability of each state, aligned with
/// [`FeasibleStateSpace::states`].
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    probs: Vec<f64>,
}

impl StationaryDistribution {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, space: &FeasibleStateSpace, state: FeasibleState) -> Option<f64> {
        space.index_of(state).map(|k| self.probs[k])
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &StationaryDistribution) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Worst relative deviation of `π_{s∪{i}} / π_s` from θ_i over every
    /// adjacent pair of states.
    pub fn detailed_balance_error(&self, space: &FeasibleStateSpace, thetas: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &s) in space.states().iter().enumerate() {
            for (i, &theta) in thetas.iter().enumerate() {
                if let Some(up) = space.can_join(s, i).then(|| s.with(i)) {
                    let j = space.index_of(up).expect("space is downward closed");
                    let ratio = self.probs[j] / self.probs[k];
                    worst = worst.max(((ratio - theta) / theta).abs());
                }
            }
        }
        worst
    }
}

/// Closed-form product-form distribution.
pub fn stationary_product_form(
    space: &FeasibleStateSpace,
    thetas: &[f64],
) -> Result<StationaryDistribution> {
    if thetas.len() != space.wlan_count() {
        return Err(Error::invalid(
            "thetas",
            format!("expected {} values, got {}", space.wlan_count(), thetas.len()),
        ));
    }
    if let Some(t) = thetas.iter().find(|t| !t.is_finite() || **t <= 0.0) {
        return Err(Error::invalid(
            "thetas",
            format!("every θ must be finite and > 0, got {t}"),
        ));
    }
    let weights: Vec<f64> = space
        .states()
        .iter()
        .map(|s| s.ids().map(|i| thetas[i]).product())
        .collect();
    let mut sorted = weights.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let total: f64 = sorted.iter().sum();
    if !total.is_finite() {
        return Err(Error::Numerical {
            context: "product-form normalizing constant overflowed",
            residual: total,
        });
    }
    Ok(StationaryDistribution {
        probs: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// Solves `πQ = 0, Σπ = 1` on the explicit generator (forward rate λ_i,
/// backward rate μ) by dense LU. Independent check on the product form.
pub fn stationary_generator_solve(
    space: &FeasibleStateSpace,
    lambdas: &[f64],
    mu: f64,
) -> Result<StationaryDistribution> {
    let n = space.len();
    if n > GENERATOR_SOLVE_LIMIT {
        return Err(Error::invalid(
            "space",
            format!("{n} states exceeds dense-solve limit {GENERATOR_SOLVE_LIMIT}"),
        ));
    }
    if lambdas.len() != space.wlan_count() {
        return Err(Error::invalid(
            "lambdas",
            format!("expected {} values, got {}", space.wlan_count(), lambdas.len()),
        ));
    }
    let mut q = DMatrix::<f64>::zeros(n, n);
    for (from, &s) in space.states().iter().enumerate() {
        for (i, &rate) in lambdas.iter().enumerate() {
            if space.can_join(s, i) {
                let to = space.index_of(s.with(i)).expect("downward closed");
                q[(from, to)] += rate;
            } else if s.contains(i) {
                let to = space.index_of(s.without(i)).expect("downward closed");
                q[(from, to)] += mu;
            }
        }
        let out: f64 = q.row(from).sum();
        q[(from, from)] = -out;
    }
    // Balance equations Qᵀπ = 0 with the last row swapped for Σπ = 1.
    let mut a = q.transpose();
    a.row_mut(n - 1).fill(1.0);
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("singular generator system".into()))?;
    Ok(StationaryDistribution {
        probs: pi.iter().copied().collect(),
    })
}
