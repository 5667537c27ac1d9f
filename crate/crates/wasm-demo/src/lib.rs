//! Browser bindings for the throughput model. Every export returns a JSON
//! string; `www/index.html` draws it on a canvas.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use wlan_ctmc::ctmc::{dominant_states, enumerate_states, stationary_product_form};
use wlan_ctmc::scenario::wlan_label;
use wlan_ctmc::sim::{simulate, SimConfig};
use wlan_ctmc::sweep::cw_min_grid;
use wlan_ctmc::throughput::{analyze, analyze_with, gamma_curve, AnalysisOptions, Mode};
use wlan_ctmc::{PhyMacParams, Result, Scenario};

/// `source` is either a builtin name (`i`, `ii`, `iii`) or scenario JSON.
fn resolve(source: &str, n_nodes: u32) -> Result<Scenario> {
    let source = source.trim();
    if source.starts_with('{') {
        return Scenario::from_json(source);
    }
    if n_nodes == 0 {
        return Err(wlan_ctmc::Error::InvalidParameter {
            field: "n_nodes",
            reason: "must be at least 1".into(),
        });
    }
    Scenario::builtin(source, n_nodes).ok_or_else(|| wlan_ctmc::Error::InvalidParameter {
        field: "scenario",
        reason: format!("unknown builtin `{source}`"),
    })
}

fn labels(s: &Scenario) -> Vec<String> {
    (0..s.len()).map(wlan_label).collect()
}

#[derive(Serialize)]
struct SweepPoint {
    cw_min: u32,
    full: Vec<f64>,
    ctmc: Vec<f64>,
    /// Empty when simulation is off.
    sim: Vec<f64>,
}

#[derive(Serialize)]
struct Sweep {
    wlans: Vec<String>,
    points: Vec<SweepPoint>,
}

pub fn sweep_json(scenario: &str, n_nodes: u32, sim_seconds: f64, seed: u64) -> Result<String> {
    let base = resolve(scenario, n_nodes)?;
    let mut points = Vec::new();
    for cw in cw_min_grid() {
        let s = base.with_params(base.params().with_cw_min(cw))?;
        let full = analyze(&s, Mode::Full)?.per_wlan;
        let ctmc = analyze_with(
            &s,
            AnalysisOptions {
                mode: Mode::Full,
                collisions: false,
            },
        )?
        .per_wlan;
        let sim = if sim_seconds > 0.0 {
            let config = SimConfig {
                duration: sim_seconds + 0.1 * sim_seconds,
                warmup: 0.1 * sim_seconds,
                replications: 1,
                ..SimConfig::new(s, seed)
            };
            simulate(&config)?.throughputs()
        } else {
            Vec::new()
        };
        points.push(SweepPoint {
            cw_min: cw,
            full,
            ctmc,
            sim,
        });
    }
    Ok(serde_json::to_string(&Sweep {
        wlans: labels(&base),
        points,
    })?)
}

pub fn gamma_curve_json(cw_min: u32, m: u32, tagged_nodes: u32, max_contenders: u32) -> Result<String> {
    let params = PhyMacParams {
        backoff_stages: m,
        ..PhyMacParams::ieee80211ac().with_cw_min(cw_min)
    };
    Ok(serde_json::to_string(&gamma_curve(&params, tagged_nodes, max_contenders)?)?)
}

#[derive(Serialize)]
struct StateRow {
    state: String,
    pi: f64,
    dominant: bool,
}

#[derive(Serialize)]
struct StateView {
    wlans: Vec<String>,
    edges: Vec<(usize, usize)>,
    states: Vec<StateRow>,
    dominant_mass: f64,
    throughput: Vec<f64>,
}

pub fn states_json(scenario: &str, n_nodes: u32, cw_min: u32) -> Result<String> {
    let base = resolve(scenario, n_nodes)?;
    let s = base.with_params(base.params().with_cw_min(cw_min))?;
    let space = enumerate_states(&s)?;
    let pi = stationary_product_form(&space, &s.thetas())?;
    let dom = dominant_states(&space);
    let states = space
        .states()
        .iter()
        .zip(pi.probs())
        .map(|(st, &p)| StateRow {
            state: st.label(),
            pi: p,
            dominant: dom.contains(st),
        })
        .collect();
    let report = analyze(&s, Mode::Full)?;
    Ok(serde_json::to_string(&StateView {
        wlans: labels(&s),
        edges: s.graph().edges(),
        states,
        dominant_mass: report.dominant_mass,
        throughput: report.per_wlan,
    })?)
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

/// Per-WLAN throughput for CW_min = 4..8192, with and without collisions,
/// plus a short simulation when `sim_seconds > 0`.
#[wasm_bindgen(js_name = throughputSweep)]
pub fn throughput_sweep(
    scenario: &str,
    n_nodes: u32,
    sim_seconds: f64,
    seed: u64,
) -> std::result::Result<String, JsError> {
    js(sweep_json(scenario, n_nodes, sim_seconds, seed))
}

/// γ and p as the number of contending nodes grows.
#[wasm_bindgen(js_name = gammaCurve)]
pub fn gamma_curve_js(
    cw_min: u32,
    m: u32,
    tagged_nodes: u32,
    max_contenders: u32,
) -> std::result::Result<String, JsError> {
    js(gamma_curve_json(cw_min, m, tagged_nodes, max_contenders))
}

/// Feasible states with their stationary probabilities.
#[wasm_bindgen(js_name = stateSpace)]
pub fn state_space(scenario: &str, n_nodes: u32, cw_min: u32) -> std::result::Result<String, JsError> {
    js(states_json(scenario, n_nodes, cw_min))
}
