use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::{Context, Result};
use wlan_ctmc::ctmc::{dominant_states, enumerate_states, stationary_product_form};
use wlan_ctmc::scenario::wlan_label;
use wlan_ctmc::sim::{gamma_probe, simulate as run_sim, SimConfig};
use wlan_ctmc::sweep::{cw_min_grid, run_sweep, SimSettings, SweepParam, SweepSpec};
use wlan_ctmc::throughput::{analyze_with, gamma_curve as curve, AnalysisOptions, Mode};
use wlan_ctmc::{bianchi, PhyMacParams, Scenario};

use crate::cli::{
    AnalysisMode, AnalyzeArgs, BianchiArgs, FormatArgs, GammaCurveArgs, ScenarioArgs, SimArgs,
    SimulateArgs, SweepArgs,
};
use crate::output::{csv_writer, ensure_dir, sig6, write_json};

fn load_scenario(args: &ScenarioArgs) -> Result<Scenario> {
    let mut scenario = match &args.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read scenario {}", path.display()))?;
            let s = Scenario::from_json(&text)?;
            match args.n_nodes {
                Some(n) => s.with_uniform_nodes(n)?,
                None => s,
            }
        }
        None => {
            let n = args.n_nodes.unwrap_or(16);
            if n == 0 {
                return Err(wlan_ctmc::Error::InvalidParameter {
                    field: "n_nodes",
                    reason: "must be at least 1".into(),
                }
                .into());
            }
            Scenario::builtin(args.builtin.name(), n).expect("known builtin")
        }
    };
    if args.cw_min.is_some() || args.m.is_some() {
        let mut params = *scenario.params();
        if let Some(cw) = args.cw_min {
            params = params.with_cw_min(cw);
        }
        if let Some(m) = args.m {
            params.backoff_stages = m;
        }
        scenario = scenario.with_params(params)?;
    }
    Ok(scenario)
}

fn sim_config(scenario: Scenario, args: &SimArgs) -> SimConfig {
    SimConfig {
        duration: args.duration,
        warmup: args.warmup,
        replications: args.reps,
        resume: args.resume.into(),
        ..SimConfig::new(scenario, args.seed)
    }
}

pub fn analyze(args: &AnalyzeArgs, fmt: &FormatArgs) -> Result<()> {
    let scenario = load_scenario(&args.scenario)?;
    let options = AnalysisOptions {
        mode: match args.mode {
            AnalysisMode::Full => Mode::Full,
            AnalysisMode::Dominant => Mode::DominantOnly,
        },
        collisions: !args.no_collisions,
    };
    let report = analyze_with(&scenario, options)?;
    let unit = if fmt.mbps { "Mbit/s" } else { "bit/s" };
    for (i, x) in report.per_wlan.iter().enumerate() {
        println!("{} {} {unit}", wlan_label(i), fmt.throughput(*x));
    }
    if options.mode == Mode::DominantOnly {
        println!("dominant mass {}", sig6(report.dominant_mass));
    }

    let Some(dir) = &args.out else {
        return Ok(());
    };
    ensure_dir(dir)?;
    let mut w = csv_writer(Some(&dir.join("throughput.csv")))?;
    w.write_record(["wlan_id", &fmt.unit_column("x"), "mode"])?;
    for (i, x) in report.per_wlan.iter().enumerate() {
        w.write_record([i.to_string(), fmt.throughput(*x), report.label().to_string()])?;
    }
    w.flush()?;

    let mut w = csv_writer(Some(&dir.join("detail.csv")))?;
    w.write_record([
        "wlan_id",
        "state",
        "pi",
        "gamma_raw",
        "gamma",
        "p",
        &fmt.unit_column("y"),
    ])?;
    for c in &report.contributions {
        w.write_record([
            c.wlan.to_string(),
            c.state.label(),
            sig6(c.pi),
            sig6(c.record.gamma_raw),
            sig6(c.record.gamma),
            sig6(c.record.p),
            fmt.throughput(c.record.y),
        ])?;
    }
    w.flush()?;
    write_json(&dir.join("report.json"), &report)
}

pub fn simulate(args: &SimulateArgs, fmt: &FormatArgs) -> Result<()> {
    let scenario = load_scenario(&args.scenario)?;
    let mut config = sim_config(scenario, &args.sim);
    config.record_events = args.event_log.is_some();
    let result = run_sim(&config)?;

    for s in &result.per_wlan {
        println!(
            "{} {} ± {} ({} ok, {} collided)",
            wlan_label(s.wlan),
            fmt.throughput(s.throughput),
            fmt.throughput(s.stderr),
            s.successes,
            s.collisions
        );
    }

    if let Some(path) = &args.event_log {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = BufWriter::new(file);
        for e in &result.events[0] {
            writeln!(out, "{e}")?;
        }
        out.flush()?;
    }

    let Some(dir) = &args.out else {
        return Ok(());
    };
    ensure_dir(dir)?;
    let mut w = csv_writer(Some(&dir.join("simulation.csv")))?;
    w.write_record([
        "wlan_id",
        &fmt.unit_column("x"),
        &fmt.unit_column("stderr"),
        "successes",
        "collisions",
    ])?;
    for s in &result.per_wlan {
        w.write_record([
            s.wlan.to_string(),
            fmt.throughput(s.throughput),
            fmt.throughput(s.stderr),
            s.successes.to_string(),
            s.collisions.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(Some(&dir.join("airtime.csv")))?;
    w.write_record(["state", "share"])?;
    for (state, share) in &result.airtime {
        w.write_record([state.label(), sig6(*share)])?;
    }
    w.flush()?;

    config.record_events = false;
    let probe = gamma_probe(&config)?;
    let mut w = csv_writer(Some(&dir.join("probe.csv")))?;
    w.write_record([
        "wlan_id",
        "predecessor",
        "attempts",
        "collisions",
        "collision_fraction",
        "success_share",
    ])?;
    for p in &probe {
        w.write_record([
            p.wlan.to_string(),
            p.predecessor.label(),
            p.attempts.to_string(),
            p.collisions.to_string(),
            sig6(p.collision_fraction()),
            sig6(p.success_share),
        ])?;
    }
    w.flush()?;
    write_json(&dir.join("report.json"), &result)
}

pub fn sweep(args: &SweepArgs, fmt: &FormatArgs) -> Result<()> {
    let scenario = load_scenario(&args.scenario)?;
    let param: SweepParam = args.param.parse()?;
    let values = if args.values.is_empty() && param == SweepParam::CwMin {
        cw_min_grid()
    } else {
        args.values.clone()
    };
    let modes = args
        .modes
        .iter()
        .map(|m| m.parse())
        .collect::<wlan_ctmc::Result<Vec<_>>>()?;
    let spec = SweepSpec {
        scenario,
        param,
        values,
        modes,
        fix_cw_max: args.fix_cw_max,
        sim: SimSettings {
            seed: args.sim.seed,
            duration: args.sim.duration,
            warmup: args.sim.warmup,
            replications: args.sim.reps,
            resume: args.sim.resume.into(),
        },
    };
    let rows = run_sweep(&spec)?;

    let mut w = csv_writer(args.out.as_deref())?;
    let column = match param {
        SweepParam::CwMin => "cw_min",
        SweepParam::NNodes => "n_nodes",
    };
    w.write_record([
        column,
        "wlan_id",
        "mode",
        &fmt.unit_column("x"),
        &fmt.unit_column("stderr"),
    ])?;
    for r in &rows {
        w.write_record([
            r.value.to_string(),
            r.wlan.to_string(),
            r.mode.to_string(),
            fmt.throughput(r.throughput),
            r.stderr.map(|s| fmt.throughput(s)).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn states(args: &ScenarioArgs, _fmt: &FormatArgs) -> Result<()> {
    let scenario = load_scenario(args)?;
    let space = enumerate_states(&scenario)?;
    let pi = stationary_product_form(&space, &scenario.thetas())?;
    let edges: Vec<String> = scenario
        .graph()
        .edges()
        .iter()
        .map(|&(a, b)| format!("{}-{}", wlan_label(a), wlan_label(b)))
        .collect();
    println!("wlans {}, edges {}", scenario.len(), edges.join(" "));
    let hist: Vec<String> = space.size_histogram().iter().map(|h| h.to_string()).collect();
    println!("feasible states {} (by size: {})", space.len(), hist.join(" "));
    for (s, p) in space.states().iter().zip(pi.probs()) {
        println!("  {:<8} pi {}", s.label(), sig6(*p));
    }
    let dom = dominant_states(&space);
    let mass: f64 = dom.iter().filter_map(|&s| pi.prob(&space, s)).sum();
    println!("dominant states {} (mass {})", dom.len(), sig6(mass));
    for s in &dom {
        println!("  {}", s.label());
    }
    Ok(())
}

pub fn bianchi(args: &BianchiArgs, _fmt: &FormatArgs) -> Result<()> {
    let pt = bianchi::solve_fixed_point(args.n_total, args.cw_min, args.m)?;
    println!("tau {}", sig6(pt.tau));
    println!("p {}", sig6(pt.p));
    println!("e_b {}", sig6(pt.e_b));
    Ok(())
}

pub fn gamma_curve(args: &GammaCurveArgs, fmt: &FormatArgs) -> Result<()> {
    let params = PhyMacParams {
        backoff_stages: args.m,
        ..PhyMacParams::ieee80211ac().with_cw_min(args.cw_min)
    };
    let points = curve(&params, args.tagged_nodes, args.max_contenders)?;
    let mut w = csv_writer(args.out.as_deref())?;
    w.write_record([
        "contender_nodes",
        "n_total",
        "p",
        "gamma_raw",
        "gamma",
        &fmt.unit_column("y"),
    ])?;
    for pt in &points {
        w.write_record([
            pt.contender_nodes.to_string(),
            pt.n_total.to_string(),
            sig6(pt.p),
            sig6(pt.gamma_raw),
            sig6(pt.gamma),
            fmt.throughput(pt.y),
        ])?;
    }
    w.flush()?;
    Ok(())
}
