//! Slotted CSMA/CA simulator over the WLAN overlap graph.
//!
//! Every node is saturated and runs binary exponential backoff with no retry
//! limit. Counters freeze while anything in the node's sensing neighbourhood
//! (its own WLAN plus overlapping WLANs) is on the air. Transmission lengths
//! are rounded to whole slots.

mod engine;
pub mod rng;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::ctmc::FeasibleState;
use crate::error::{Error, Result};
use crate::scenario::{ConflictGraph, Scenario};
use engine::{Replication, Timing};

pub const DEFAULT_DURATION: f64 = 60.0;
pub const DEFAULT_WARMUP: f64 = 1.0;
pub const DEFAULT_REPLICATIONS: usize = 10;

/// What a frozen backoff counter does when the channel turns idle again.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackoffResume {
    /// The busy period counts as one backoff slot: waiting nodes decrement
    /// once on resumption (the slot-chain view of DCF).
    #[default]
    CountBusyPeriod,
    /// Counters resume exactly where they froze; only idle slots count.
    Frozen,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scenario: Scenario,
    /// Simulated seconds, warmup included.
    pub duration: f64,
    /// Leading seconds excluded from statistics.
    pub warmup: f64,
    pub seed: u64,
    pub replications: usize,
    /// Keep the per-transmission event log (all replications).
    pub record_events: bool,
    pub resume: BackoffResume,
}

impl SimConfig {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        Self {
            scenario,
            duration: DEFAULT_DURATION,
            warmup: DEFAULT_WARMUP,
            seed,
            replications: DEFAULT_REPLICATIONS,
            record_events: false,
            resume: BackoffResume::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.warmup.is_finite() && self.warmup >= 0.0) {
            return Err(Error::invalid("warmup", format!("must be >= 0, got {}", self.warmup)));
        }
        if !(self.duration.is_finite() && self.duration > self.warmup) {
            return Err(Error::invalid(
                "duration",
                format!("must exceed warmup ({}), got {}", self.warmup, self.duration),
            ));
        }
        if self.replications == 0 {
            return Err(Error::invalid("reps", "at least one replication is required"));
        }
        let timing = Timing::new(self);
        if timing.end_slot <= timing.warmup_slot {
            return Err(Error::invalid(
                "duration",
                "measurement window is shorter than one slot",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Success,
    Collision,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Success => "success",
            EventKind::Collision => "collision",
        })
    }
}

/// One transmission on the channel. `node` is the index within its WLAN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelEvent {
    pub start_slot: u64,
    pub wlan: usize,
    pub node: usize,
    pub kind: EventKind,
    pub duration_slots: u64,
}

impl ChannelEvent {
    pub fn end_slot(&self) -> u64 {
        self.start_slot + self.duration_slots
    }
}

/// Text form: `start_slot wlan node kind duration_slots`.
impl fmt::Display for ChannelEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.start_slot, self.wlan, self.node, self.kind, self.duration_slots
        )
    }
}

impl FromStr for ChannelEvent {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::invalid("event", format!("malformed event line `{line}`"));
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(bad());
        }
        let kind = match f[3] {
            "success" => EventKind::Success,
            "collision" => EventKind::Collision,
            _ => return Err(bad()),
        };
        Ok(ChannelEvent {
            start_slot: f[0].parse().map_err(|_| bad())?,
            wlan: f[1].parse().map_err(|_| bad())?,
            node: f[2].parse().map_err(|_| bad())?,
            kind,
            duration_slots: f[4].parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WlanSimStats {
    pub wlan: usize,
    /// Mean over replications, bits/s.
    pub throughput: f64,
    /// Standard error of the mean over replications, bits/s.
    pub stderr: f64,
    /// Totals over all replications.
    pub successes: u64,
    pub collisions: u64,
}

impl WlanSimStats {
    pub fn attempts(&self) -> u64 {
        self.successes + self.collisions
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub per_wlan: Vec<WlanSimStats>,
    /// Fraction of measured time spent with each set of WLANs on the air.
    /// Sets may be non-independent while a collision is in progress.
    pub airtime: Vec<(FeasibleState, f64)>,
    /// Per-replication throughput, `[replication][wlan]`, bits/s.
    pub replication_throughput: Vec<Vec<f64>>,
    pub measured_seconds: f64,
    #[serde(skip)]
    pub events: Vec<Vec<ChannelEvent>>,
}

impl SimulationResult {
    pub fn throughputs(&self) -> Vec<f64> {
        self.per_wlan.iter().map(|s| s.throughput).collect()
    }
}

fn run_all(config: &SimConfig) -> Result<Vec<Replication>> {
    config.validate()?;
    let timing = Timing::new(config);
    let one = |r: usize| {
        let mut rng = rng::replication_rng(config.seed, r);
        engine::run(&config.scenario, &timing, &mut rng, config.record_events)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..config.replications).into_par_iter().map(one).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..config.replications).map(one).collect())
    }
}

/// Runs every replication and aggregates per-WLAN throughput.
pub fn simulate(config: &SimConfig) -> Result<SimulationResult> {
    let reps = run_all(config)?;
    let w = config.scenario.len();
    let params = config.scenario.params();
    let measured_slots = reps[0].measured_slots;
    let seconds = measured_slots as f64 * params.slot_time;

    let replication_throughput: Vec<Vec<f64>> = reps
        .iter()
        .map(|r| {
            r.successes
                .iter()
                .map(|&s| s as f64 * params.payload_bits / seconds)
                .collect()
        })
        .collect();

    let n = reps.len() as f64;
    let per_wlan = (0..w)
        .map(|i| {
            let xs: Vec<f64> = replication_throughput.iter().map(|r| r[i]).collect();
            let mean = xs.iter().sum::<f64>() / n;
            let stderr = if reps.len() > 1 {
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            WlanSimStats {
                wlan: i,
                throughput: mean,
                stderr,
                successes: reps.iter().map(|r| r.successes[i]).sum(),
                collisions: reps.iter().map(|r| r.collisions[i]).sum(),
            }
        })
        .collect();

    let mut airtime: BTreeMap<u32, u64> = BTreeMap::new();
    for r in &reps {
        for (&mask, &slots) in &r.airtime {
            *airtime.entry(mask).or_insert(0) += slots;
        }
    }
    let total = measured_slots as f64 * n;
    let mut airtime: Vec<(FeasibleState, f64)> = airtime
        .into_iter()
        .map(|(m, s)| (FeasibleState::from_mask(m), s as f64 / total))
        .collect();
    airtime.sort_by_key(|(s, _)| (s.len(), s.mask()));

    Ok(SimulationResult {
        per_wlan,
        airtime,
        replication_throughput,
        measured_seconds: seconds,
        events: reps.into_iter().map(|r| r.events).collect(),
    })
}

/// Empirical outcome of attempts by `wlan` started while `predecessor` was
/// on the air.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub wlan: usize,
    pub predecessor: FeasibleState,
    pub attempts: u64,
    pub collisions: u64,
    /// Slots of successful airtime from these attempts.
    pub success_slots: u64,
    /// Share of measured time carrying these successful transmissions.
    pub success_share: f64,
}

impl ProbeRecord {
    pub fn collision_fraction(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.collisions as f64 / self.attempts as f64
        }
    }

    /// `1 − success_share / active_share`: the collision loss relative to a
    /// given CTMC occupancy of the state `predecessor ∪ {wlan}`.
    pub fn empirical_gamma(&self, active_share: f64) -> f64 {
        1.0 - self.success_share / active_share
    }
}

/// Classifies every attempt by the set of WLANs already on the air when it
/// started, summed over replications.
pub fn gamma_probe(config: &SimConfig) -> Result<Vec<ProbeRecord>> {
    let reps = run_all(config)?;
    let total_slots = reps.iter().map(|r| r.measured_slots).sum::<u64>() as f64;
    let mut merged: BTreeMap<(usize, u32), [u64; 3]> = BTreeMap::new();
    for r in &reps {
        for (&key, v) in &r.probe {
            let e = merged.entry(key).or_insert([0; 3]);
            for k in 0..3 {
                e[k] += v[k];
            }
        }
    }
    Ok(merged
        .into_iter()
        .map(|((wlan, mask), [attempts, collisions, success_slots])| ProbeRecord {
            wlan,
            predecessor: FeasibleState::from_mask(mask),
            attempts,
            collisions,
            success_slots,
            success_share: success_slots as f64 / total_slots,
        })
        .collect())
}

/// Pair of transmissions that overlapped in time between WLANs that sense
/// each other without having started in the same slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExclusionViolation {
    pub first: ChannelEvent,
    pub second: ChannelEvent,
}

/// Checks an event log for overlapping transmissions between WLANs that
/// sense each other (same WLAN or adjacent) that did not start together.
pub fn audit_mutual_exclusion(
    events: &[ChannelEvent],
    graph: &ConflictGraph,
) -> Vec<ExclusionViolation> {
    let mut sorted = events.to_vec();
    sorted.sort_by_key(|e| (e.start_slot, e.wlan, e.node));
    let mut open: Vec<ChannelEvent> = Vec::new();
    let mut violations = Vec::new();
    for e in sorted {
        open.retain(|o| o.end_slot() > e.start_slot);
        for o in &open {
            let senses = o.wlan == e.wlan || graph.adjacent(o.wlan, e.wlan);
            if senses && o.start_slot != e.start_slot {
                violations.push(ExclusionViolation { first: *o, second: e });
            }
        }
        open.push(e);
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{PhyMacParams, Wlan};

    fn lone(n: u32) -> Scenario {
        Scenario::new(vec![Wlan { id: 0, n_nodes: n }], &[], PhyMacParams::ieee80211ac()).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = SimConfig::new(lone(1), 1);
        c.warmup = 5.0;
        c.duration = 5.0;
        assert!(c.validate().is_err());
        c.duration = 6.0;
        c.replications = 0;
        assert!(c.validate().is_err());
        c.replications = 1;
        c.warmup = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn event_line_round_trip() {
        let e = ChannelEvent {
            start_slot: 12,
            wlan: 2,
            node: 5,
            kind: EventKind::Collision,
            duration_slots: 737,
        };
        assert_eq!(e.to_string(), "12 2 5 collision 737");
        assert_eq!(e.to_string().parse::<ChannelEvent>().unwrap(), e);
        assert!("1 2 3 nope 4".parse::<ChannelEvent>().is_err());
    }

    #[test]
    fn audit_flags_staggered_overlap() {
        let g = ConflictGraph::new(2, &[(0, 1)]).unwrap();
        let ev = |start, wlan| ChannelEvent {
            start_slot: start,
            wlan,
            node: 0,
            kind: EventKind::Success,
            duration_slots: 10,
        };
        assert!(audit_mutual_exclusion(&[ev(0, 0), ev(0, 1)], &g).is_empty());
        assert!(audit_mutual_exclusion(&[ev(0, 0), ev(10, 1)], &g).is_empty());
        assert_eq!(audit_mutual_exclusion(&[ev(0, 0), ev(5, 1)], &g).len(), 1);
        let free = ConflictGraph::new(2, &[]).unwrap();
        assert!(audit_mutual_exclusion(&[ev(0, 0), ev(5, 1)], &free).is_empty());
    }

    #[test]
    fn isolated_single_node_never_collides() {
        let mut c = SimConfig::new(lone(1), 3);
        c.duration = 5.0;
        c.replications = 2;
        let probe = gamma_probe(&c).unwrap();
        assert_eq!(probe.len(), 1);
        assert_eq!(probe[0].collisions, 0);
        assert_eq!(probe[0].collision_fraction(), 0.0);
    }

    #[test]
    fn counts_reproduce_throughput() {
        let mut c = SimConfig::new(Scenario::scenario_ii(4), 11);
        c.duration = 4.0;
        c.replications = 3;
        let r = simulate(&c).unwrap();
        let bits = c.scenario.params().payload_bits;
        for s in &r.per_wlan {
            let from_counts = s.successes as f64 * bits / (r.measured_seconds * 3.0);
            assert!((from_counts - s.throughput).abs() <= 1e-9 * s.throughput.max(1.0));
        }
        let share: f64 = r.airtime.iter().map(|(_, f)| f).sum();
        assert!((share - 1.0).abs() < 1e-12);
    }
}
