//! Per-WLAN saturation throughput.
//!
//! The CTMC gives how long each WLAN is active; a slotted-DCF solve over the
//! WLANs contending at the moment a WLAN activates gives the fraction of that
//! activity lost to collisions (γ). Throughput is then
//! `x_i = μL Σ_{s∋i} π_s (1 − γ_{i|s∖{i}→s})`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bianchi::{slot_probabilities, solve_fixed_point, BianchiPoint};
use crate::ctmc::{
    dominant_states, enumerate_states, stationary_product_form, FeasibleState,
    FeasibleStateSpace,
};
use crate::error::{Error, Result};
use crate::scenario::{PhyMacParams, Scenario, Wlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Sum over every feasible state.
    Full,
    /// Sum over maximal states and their immediate predecessors only.
    DominantOnly,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::DominantOnly => "dominant-only",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub mode: Mode,
    /// When false every γ is forced to 0 (plain CTMC throughput).
    pub collisions: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Full,
            collisions: true,
        }
    }
}

impl AnalysisOptions {
    /// Label used in CSV output: `full`, `dominant-only`, `ctmc`,
    /// `ctmc-dominant-only`.
    pub fn label(&self) -> &'static str {
        match (self.collisions, self.mode) {
            (true, Mode::Full) => "full",
            (true, Mode::DominantOnly) => "dominant-only",
            (false, Mode::Full) => "ctmc",
            (false, Mode::DominantOnly) => "ctmc-dominant-only",
        }
    }
}

/// Collision factor of WLAN `wlan` entering `state` from `predecessor`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaRecord {
    pub wlan: usize,
    pub state: FeasibleState,
    pub predecessor: FeasibleState,
    pub contenders: FeasibleState,
    pub k_nodes: u32,
    /// Slot-level conditional throughput, bits/s.
    pub y: f64,
    pub gamma_raw: f64,
    pub gamma: f64,
    /// Conditional collision probability from the same DCF solve.
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contribution {
    pub wlan: usize,
    pub state: FeasibleState,
    pub pi: f64,
    /// γ actually applied (0 when collisions are disabled).
    pub gamma: f64,
    /// `π_s (1 − γ) μ L`, bits/s.
    pub term: f64,
    pub record: GammaRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputReport {
    /// Throughput of each WLAN in bits/s, indexed by WLAN id.
    pub per_wlan: Vec<f64>,
    pub contributions: Vec<Contribution>,
    pub mode: Mode,
    pub collisions: bool,
    /// Stationary mass of the states that were summed over.
    pub dominant_mass: f64,
}

impl ThroughputReport {
    pub fn label(&self) -> &'static str {
        AnalysisOptions {
            mode: self.mode,
            collisions: self.collisions,
        }
        .label()
    }
}

/// WLANs that overlap `wlan` and are free to count down at `predecessor`.
pub fn contender_set(
    wlan: usize,
    predecessor: FeasibleState,
    space: &FeasibleStateSpace,
) -> Result<FeasibleState> {
    if wlan >= space.wlan_count() {
        return Err(Error::Contract(format!("unknown WLAN id {wlan}")));
    }
    if !space.contains(predecessor) || !space.can_join(predecessor, wlan) {
        return Err(Error::Contract(format!(
            "WLAN {wlan} cannot activate from state {predecessor}"
        )));
    }
    let graph = space.graph();
    let mut rest = graph.neighbors(wlan);
    let mut out = FeasibleState::EMPTY;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if space.can_join(predecessor, j) {
            out = out.with(j);
        }
    }
    Ok(out)
}

/// Throughput of a tagged WLAN contending slot-by-slot with `k_nodes` other
/// saturated nodes, bits/s.
pub fn conditional_throughput(wlan: &Wlan, k_nodes: u32, params: &PhyMacParams) -> Result<f64> {
    conditional_solve(wlan.n_nodes, k_nodes, params).map(|(y, _)| y)
}

fn conditional_solve(n_tagged: u32, k_nodes: u32, params: &PhyMacParams) -> Result<(f64, BianchiPoint)> {
    let n_total = n_tagged
        .checked_add(k_nodes)
        .ok_or_else(|| Error::invalid("k_nodes", "node count overflow"))?;
    let point = solve_fixed_point(n_total, params.cw_min, params.backoff_stages)?;
    let s = slot_probabilities(&point, n_tagged)?;
    let mean_slot = s.a * params.slot_time + s.b * params.tx_time + s.c * params.collision_time;
    Ok((s.d * params.payload_bits / mean_slot, point))
}

/// Local collision factor: the γ that makes the CTMC throughput of the tagged
/// WLAN among its contenders equal the slot-level throughput `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalGamma {
    pub y: f64,
    pub gamma_raw: f64,
    pub gamma: f64,
    pub p: f64,
    pub n_total: u32,
}

/// Computes γ for a tagged group of `n_tagged` nodes with ratio
/// `theta_tagged`, facing `k_nodes` contending nodes whose WLAN ratios sum
/// to `theta_contenders`.
pub fn local_gamma(
    n_tagged: u32,
    theta_tagged: f64,
    k_nodes: u32,
    theta_contenders: f64,
    params: &PhyMacParams,
) -> Result<LocalGamma> {
    let (y, point) = conditional_solve(n_tagged, k_nodes, params)?;
    let share = theta_tagged / (1.0 + theta_tagged + theta_contenders);
    let ctmc = params.mu() * params.payload_bits * share;
    let gamma_raw = 1.0 - y / ctmc;
    Ok(LocalGamma {
        y,
        gamma_raw,
        gamma: gamma_raw.clamp(0.0, 1.0),
        p: point.p,
        n_total: point.n_total,
    })
}

/// γ for `wlan` activating from `predecessor`.
pub fn gamma_factor(
    wlan: usize,
    predecessor: FeasibleState,
    scenario: &Scenario,
    space: &FeasibleStateSpace,
) -> Result<GammaRecord> {
    let contenders = contender_set(wlan, predecessor, space)?;
    let k_nodes: u32 = contenders.ids().map(|j| scenario.wlan(j).n_nodes).sum();
    let theta_k: f64 = contenders.ids().map(|j| scenario.theta(j)).sum();
    let local = local_gamma(
        scenario.wlan(wlan).n_nodes,
        scenario.theta(wlan),
        k_nodes,
        theta_k,
        scenario.params(),
    )?;
    Ok(GammaRecord {
        wlan,
        state: predecessor.with(wlan),
        predecessor,
        contenders,
        k_nodes,
        y: local.y,
        gamma_raw: local.gamma_raw,
        gamma: local.gamma,
        p: local.p,
    })
}

/// Throughput of every WLAN in `scenario` with collisions accounted for.
pub fn analyze(scenario: &Scenario, mode: Mode) -> Result<ThroughputReport> {
    analyze_with(
        scenario,
        AnalysisOptions {
            mode,
            collisions: true,
        },
    )
}

pub fn analyze_with(scenario: &Scenario, options: AnalysisOptions) -> Result<ThroughputReport> {
    let space = enumerate_states(scenario)?;
    let pi = stationary_product_form(&space, &scenario.thetas())?;

    let included: Vec<FeasibleState> = match options.mode {
        Mode::Full => space.states().to_vec(),
        Mode::DominantOnly => {
            let mut set = BTreeSet::new();
            for s in dominant_states(&space) {
                set.insert(s);
                for i in s.ids() {
                    set.insert(s.without(i));
                }
            }
            // Keep the canonical (size, mask) order.
            let mut v: Vec<_> = set.into_iter().collect();
            v.sort_by_key(|s| (s.len(), s.mask()));
            v
        }
    };
    let mass: f64 = included
        .iter()
        .map(|&s| pi.prob(&space, s).expect("state from this space"))
        .sum();

    let jobs: Vec<(usize, FeasibleState)> = included
        .iter()
        .flat_map(|&s| s.ids().map(move |i| (i, s)))
        .collect();
    let records = map_jobs(&jobs, |&(i, s)| gamma_factor(i, s.without(i), scenario, &space))?;

    let mu_l = scenario.params().mu() * scenario.params().payload_bits;
    let mut per_wlan = vec![0.0; scenario.len()];
    let mut contributions = Vec::with_capacity(records.len());
    for ((i, s), record) in jobs.into_iter().zip(records) {
        let p_s = pi.prob(&space, s).expect("state from this space");
        let gamma = if options.collisions { record.gamma } else { 0.0 };
        let term = p_s * (1.0 - gamma) * mu_l;
        per_wlan[i] += term;
        contributions.push(Contribution {
            wlan: i,
            state: s,
            pi: p_s,
            gamma,
            term,
            record,
        });
    }
    Ok(ThroughputReport {
        per_wlan,
        contributions,
        mode: options.mode,
        collisions: options.collisions,
        dominant_mass: mass,
    })
}

#[cfg(feature = "parallel")]
fn map_jobs<T: Sync, R: Send>(jobs: &[T], f: impl Fn(&T) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    use rayon::prelude::*;
    jobs.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_jobs<T, R>(jobs: &[T], f: impl Fn(&T) -> Result<R>) -> Result<Vec<R>> {
    jobs.iter().map(f).collect()
}

/// One point of the γ-versus-p relationship.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaCurvePoint {
    pub contender_nodes: u32,
    pub n_total: u32,
    pub p: f64,
    pub gamma_raw: f64,
    pub gamma: f64,
    pub y: f64,
}

/// γ and p for a tagged WLAN of `tagged_nodes` nodes facing
/// `0..=max_contenders` contending nodes, all sharing `params`.
pub fn gamma_curve(
    params: &PhyMacParams,
    tagged_nodes: u32,
    max_contenders: u32,
) -> Result<Vec<GammaCurvePoint>> {
    params.validate()?;
    if tagged_nodes == 0 {
        return Err(Error::invalid("tagged_nodes", "must be at least 1"));
    }
    let per_node = crate::scenario::theta_of(&Wlan { id: 0, n_nodes: 1 }, params)?;
    (0..=max_contenders)
        .map(|k| {
            let g = local_gamma(
                tagged_nodes,
                per_node * f64::from(tagged_nodes),
                k,
                per_node * f64::from(k),
                params,
            )?;
            Ok(GammaCurvePoint {
                contender_nodes: k,
                n_total: g.n_total,
                p: g.p,
                gamma_raw: g.gamma_raw,
                gamma: g.gamma,
                y: g.y,
            })
        })
        .collect()
}
