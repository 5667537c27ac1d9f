//! Parameter sweeps over a scenario: one row per (value, WLAN, mode).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::sim::{simulate, BackoffResume, SimConfig};
use crate::throughput::{analyze_with, AnalysisOptions, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    CwMin,
    NNodes,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cw-min" | "cw_min" => Ok(SweepParam::CwMin),
            "n-nodes" | "n_nodes" => Ok(SweepParam::NNodes),
            _ => Err(Error::invalid(
                "param",
                format!("expected cw-min or n-nodes, got `{s}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Full state space with collision correction.
    Full,
    /// Dominant states and predecessors with collision correction.
    Dominant,
    /// Full state space, γ = 0.
    Ctmc,
    Sim,
}

impl SweepMode {
    pub const ALL: [SweepMode; 4] = [
        SweepMode::Full,
        SweepMode::Dominant,
        SweepMode::Ctmc,
        SweepMode::Sim,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::Full => "full",
            SweepMode::Dominant => "dominant-only",
            SweepMode::Ctmc => "ctmc",
            SweepMode::Sim => "sim",
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(SweepMode::Full),
            "dominant" | "dominant-only" => Ok(SweepMode::Dominant),
            "ctmc" => Ok(SweepMode::Ctmc),
            "sim" => Ok(SweepMode::Sim),
            _ => Err(Error::invalid(
                "modes",
                format!("expected full, dominant, ctmc or sim, got `{s}`"),
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimSettings {
    pub seed: u64,
    pub duration: f64,
    pub warmup: f64,
    pub replications: usize,
    pub resume: BackoffResume,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            seed: 1,
            duration: crate::sim::DEFAULT_DURATION,
            warmup: crate::sim::DEFAULT_WARMUP,
            replications: crate::sim::DEFAULT_REPLICATIONS,
            resume: BackoffResume::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub param: SweepParam,
    pub values: Vec<u32>,
    pub modes: Vec<SweepMode>,
    /// When sweeping CW_min, keep CW_max at the base scenario's value instead
    /// of keeping `m` fixed.
    pub fix_cw_max: bool,
    pub sim: SimSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: u32,
    pub wlan: usize,
    pub mode: SweepMode,
    /// bits/s
    pub throughput: f64,
    /// Standard error over replications; simulation rows only.
    pub stderr: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::invalid("values", "at least one value is required"));
        }
        if self.modes.is_empty() {
            return Err(Error::invalid("modes", "at least one mode is required"));
        }
        for &v in &self.values {
            self.scenario_at(v)?;
        }
        Ok(())
    }

    /// The scenario with the swept parameter set to `value`.
    pub fn scenario_at(&self, value: u32) -> Result<Scenario> {
        match self.param {
            SweepParam::NNodes => {
                if value == 0 {
                    return Err(Error::invalid("values", "n_nodes must be at least 1"));
                }
                self.scenario.with_uniform_nodes(value)
            }
            SweepParam::CwMin => {
                let base = *self.scenario.params();
                let mut params = base.with_cw_min(value);
                if self.fix_cw_max {
                    let cw_max = base.cw_max().expect("validated scenario");
                    params.backoff_stages = if value >= cw_max {
                        0
                    } else {
                        (cw_max / value).ilog2()
                    };
                }
                self.scenario.with_params(params)
            }
        }
    }
}

fn run_point(spec: &SweepSpec, value: u32) -> Result<Vec<SweepRow>> {
    let scenario = spec.scenario_at(value)?;
    let mut rows = Vec::new();
    for &mode in &spec.modes {
        let per_wlan: Vec<(f64, Option<f64>)> = match mode {
            SweepMode::Sim => {
                let config = SimConfig {
                    scenario: scenario.clone(),
                    duration: spec.sim.duration,
                    warmup: spec.sim.warmup,
                    seed: spec.sim.seed,
                    replications: spec.sim.replications,
                    record_events: false,
                    resume: spec.sim.resume,
                };
                simulate(&config)?
                    .per_wlan
                    .iter()
                    .map(|s| (s.throughput, Some(s.stderr)))
                    .collect()
            }
            _ => {
                let options = match mode {
                    SweepMode::Full => AnalysisOptions {
                        mode: Mode::Full,
                        collisions: true,
                    },
                    SweepMode::Dominant => AnalysisOptions {
                        mode: Mode::DominantOnly,
                        collisions: true,
                    },
                    _ => AnalysisOptions {
                        mode: Mode::Full,
                        collisions: false,
                    },
                };
                analyze_with(&scenario, options)?
                    .per_wlan
                    .into_iter()
                    .map(|x| (x, None))
                    .collect()
            }
        };
        rows.extend(
            per_wlan
                .into_iter()
                .enumerate()
                .map(|(wlan, (throughput, stderr))| SweepRow {
                    value,
                    wlan,
                    mode,
                    throughput,
                    stderr,
                }),
        );
    }
    Ok(rows)
}

/// Runs every sweep point; rows come back in (value, mode, wlan) input order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    #[cfg(feature = "parallel")]
    let points: Vec<Result<Vec<SweepRow>>> = {
        use rayon::prelude::*;
        spec.values.par_iter().map(|&v| run_point(spec, v)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let points: Vec<Result<Vec<SweepRow>>> =
        spec.values.iter().map(|&v| run_point(spec, v)).collect();
    let mut rows = Vec::new();
    for p in points {
        rows.extend(p?);
    }
    Ok(rows)
}

/// CW_min grid used for the reference throughput curves: 4, 8, ..., 8192.
pub fn cw_min_grid() -> Vec<u32> {
    (2..=13).map(|k| 1u32 << k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(param: SweepParam, values: Vec<u32>) -> SweepSpec {
        SweepSpec {
            scenario: Scenario::scenario_ii(1),
            param,
            values,
            modes: vec![SweepMode::Full, SweepMode::Ctmc],
            fix_cw_max: false,
            sim: SimSettings::default(),
        }
    }

    #[test]
    fn grid_spans_reference_range() {
        let g = cw_min_grid();
        assert_eq!(g.first(), Some(&4));
        assert_eq!(g.last(), Some(&8192));
        assert_eq!(g.len(), 12);
    }

    #[test]
    fn rows_in_input_order() {
        let rows = run_sweep(&spec(SweepParam::CwMin, vec![64, 16])).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 3);
        assert_eq!(rows[0].value, 64);
        assert_eq!(rows[0].mode, SweepMode::Full);
        assert_eq!(rows[3].mode, SweepMode::Ctmc);
        assert_eq!(rows[6].value, 16);
    }

    #[test]
    fn stage_count_with_fixed_cw_max() {
        let mut s = spec(SweepParam::CwMin, vec![4]);
        assert_eq!(s.scenario_at(4).unwrap().params().backoff_stages, 5);
        s.fix_cw_max = true;
        // base CW_max = 32 * 2^5 = 1024
        assert_eq!(s.scenario_at(4).unwrap().params().backoff_stages, 8);
        assert_eq!(s.scenario_at(2048).unwrap().params().backoff_stages, 0);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(run_sweep(&spec(SweepParam::CwMin, vec![])).is_err());
        assert!(run_sweep(&spec(SweepParam::CwMin, vec![1])).is_err());
        assert!(run_sweep(&spec(SweepParam::NNodes, vec![0])).is_err());
        assert!("bogus".parse::<SweepMode>().is_err());
        assert_eq!("dominant".parse::<SweepMode>().unwrap(), SweepMode::Dominant);
    }
}
