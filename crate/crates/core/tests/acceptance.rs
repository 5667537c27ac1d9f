//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use wlan_ctmc::bianchi::solve_fixed_point;
use wlan_ctmc::ctmc::{
    dominant_states, enumerate_states, stationary_generator_solve, stationary_product_form,
    FeasibleState,
};
use wlan_ctmc::scenario::wlan_label;
use wlan_ctmc::sim::{audit_mutual_exclusion, simulate, SimConfig};
use wlan_ctmc::throughput::{analyze, analyze_with, local_gamma, AnalysisOptions, Mode};
use wlan_ctmc::{PhyMacParams, Scenario, Wlan};

const SEED: u64 = 20_180_601;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn at_cw(s: &Scenario, cw: u32) -> Scenario {
    s.with_params(PhyMacParams::ieee80211ac().with_cw_min(cw)).unwrap()
}

fn references(n: u32) -> [(&'static str, Scenario); 3] {
    [
        ("I", Scenario::scenario_i(n)),
        ("II", Scenario::scenario_ii(n)),
        ("III", Scenario::scenario_iii(n)),
    ]
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (_, s) in references(1) {
        let space = enumerate_states(&s).unwrap();
        let mu = s.params().mu();
        for theta in [0.1, 1.0, 47.5] {
            let thetas = vec![theta; s.len()];
            let lambdas = vec![theta * mu; s.len()];
            let pf = stationary_product_form(&space, &thetas).unwrap();
            let lu = stationary_generator_solve(&space, &lambdas, mu).unwrap();
            worst = worst.max(pf.max_abs_diff(&lu));
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("max |Δπ| = {worst:.2e} (≤ 1e-9), {elapsed:.2?} (< 1 s)"),
    )
}

fn c2_state_counts() -> Outcome {
    let ids = |v: &[&[usize]]| -> Vec<FeasibleState> {
        v.iter().map(|s| FeasibleState::from_ids(s.iter().copied())).collect()
    };
    let mut details = Vec::new();
    let mut pass = true;
    let mut check = |name: &str, ok: bool, what: String| {
        pass &= ok;
        details.push(format!("{name}: {what} {}", if ok { "ok" } else { "MISMATCH" }));
    };

    let i = enumerate_states(&Scenario::scenario_i(1)).unwrap();
    let dom = dominant_states(&i);
    check(
        "I",
        i.len() == 4 && dom.len() == 3,
        format!("{} states / {} dominant", i.len(), dom.len()),
    );

    let ii = enumerate_states(&Scenario::scenario_ii(1)).unwrap();
    let dom = dominant_states(&ii);
    check(
        "II",
        ii.states() == ids(&[&[], &[0], &[1], &[2], &[0, 2]]).as_slice()
            && dom == ids(&[&[1], &[0, 2]]),
        format!(
            "{} states {:?} / dominant {:?}",
            ii.len(),
            ii.states().iter().map(|s| s.label()).collect::<Vec<_>>(),
            dom.iter().map(|s| s.label()).collect::<Vec<_>>()
        ),
    );

    let iii = enumerate_states(&Scenario::scenario_iii(1)).unwrap();
    let dom = dominant_states(&iii);
    check(
        "III",
        iii.len() == 14 && dom.len() == 3 && iii.size_histogram() == [1, 5, 6, 2],
        format!(
            "{} states / {} dominant, histogram {:?}",
            iii.len(),
            dom.len(),
            iii.size_histogram()
        ),
    );
    let mut out = Outcome::new(pass, "I: 4/3, II: 5 states ∅ A B C AC with dominant B, AC, III: 14/3 (1,5,6,2)");
    out.details = details;
    out
}

/// Bisection on τ − 1/(E[B](p(τ)) + 1) with the rational backoff form.
fn bisection_oracle(n: u32, cw: u32, m: u32) -> f64 {
    let g = |tau: f64| {
        let p = 1.0 - (1.0 - tau).powi(n as i32 - 1);
        let w = f64::from(cw);
        let eb = if (1.0 - 2.0 * p).abs() < 1e-7 {
            (1.0 + 0.5 * f64::from(m)) * w / 2.0 - 0.5
        } else {
            (1.0 - p - p * (2.0 * p).powi(m as i32)) / (1.0 - 2.0 * p) * w / 2.0 - 0.5
        };
        tau - 1.0 / (eb + 1.0)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}

fn c3_bianchi() -> Outcome {
    let start = Instant::now();
    let (mut worst_res, mut worst_dev): (f64, f64) = (0.0, 0.0);
    let mut single_exact = true;
    for n in [1, 2, 4, 8, 16, 32, 48] {
        for cw in [4, 16, 32, 256, 8192] {
            for m in [0, 5] {
                let pt = solve_fixed_point(n, cw, m).unwrap();
                worst_res = worst_res.max((pt.tau - 1.0 / (pt.e_b + 1.0)).abs());
                worst_dev = worst_dev.max((pt.tau - bisection_oracle(n, cw, m)).abs());
                if n == 1 {
                    single_exact &= pt.p == 0.0 && pt.tau == 2.0 / (f64::from(cw) + 1.0);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst_res <= 1e-10 && worst_dev <= 1e-9 && single_exact && elapsed < Duration::from_secs(1),
        format!(
            "residual {worst_res:.1e} (≤ 1e-10), |τ − oracle| {worst_dev:.1e} (≤ 1e-9), n=1 exact: {single_exact}, {elapsed:.2?}"
        ),
    )
}

fn c4_gamma_identity() -> Outcome {
    let params = PhyMacParams::ieee80211ac();
    let theta = wlan_ctmc::scenario::theta_of(&Wlan { id: 0, n_nodes: 1 }, &params).unwrap();
    let g = local_gamma(1, theta, 0, 0.0, &params).unwrap();
    let closed = params.payload_bits
        / ((f64::from(params.cw_min) - 1.0) * params.slot_time / 2.0 + params.tx_time);
    Outcome::new(
        g.gamma_raw.abs() < 1e-9 && rel(g.y, closed) < 1e-12,
        format!("|γ_raw| = {:.1e} (< 1e-9), y = {:.6e} b/s", g.gamma_raw.abs(), g.y),
    )
}

fn c5_gamma_below_p() -> Outcome {
    let mut records = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut details = Vec::new();
    for n in [1, 16] {
        for (name, base) in references(n) {
            for k in 2..=13 {
                let s = at_cw(&base, 1 << k);
                let r = analyze(&s, Mode::Full).unwrap();
                for c in &r.contributions {
                    records += 1;
                    let excess = c.record.gamma_raw - c.record.p;
                    worst = worst.max(excess);
                    if excess > 1e-9 {
                        details.push(format!(
                            "{name} N={n} CW={}: {}|{} γ_raw {:.6} > p {:.6}",
                            1 << k,
                            wlan_label(c.wlan),
                            c.record.predecessor,
                            c.record.gamma_raw,
                            c.record.p
                        ));
                    }
                }
            }
        }
    }
    let mut out = Outcome::new(
        details.is_empty(),
        format!("{records} records, max(γ_raw − p) = {worst:.2e} (≤ 1e-9)"),
    );
    out.details = details;
    out
}

struct SimCase {
    name: &'static str,
    scenario: Scenario,
    n: u32,
    cw: u32,
    tolerance: f64,
}

fn simulated(s: &Scenario) -> Vec<f64> {
    simulate(&SimConfig::new(s.clone(), SEED)).unwrap().throughputs()
}

fn c6_model_vs_sim() -> Outcome {
    let mut cases = Vec::new();
    for n in [1, 16] {
        cases.push(SimCase {
            name: "I",
            scenario: at_cw(&Scenario::scenario_i(n), 32),
            n,
            cw: 32,
            tolerance: 0.10,
        });
    }
    for n in [1, 16] {
        for cw in [16, 32, 256, 8192] {
            cases.push(SimCase {
                name: "II",
                scenario: at_cw(&Scenario::scenario_ii(n), cw),
                n,
                cw,
                tolerance: 0.10,
            });
        }
    }
    for (cw, tolerance) in [(16, 0.10), (512, 0.15)] {
        cases.push(SimCase {
            name: "III",
            scenario: at_cw(&Scenario::scenario_iii(16), cw),
            n: 16,
            cw,
            tolerance,
        });
    }

    let start = Instant::now();
    let mut details = Vec::new();
    let (mut checked, mut failed) = (0, 0);
    for c in &cases {
        let model = analyze(&c.scenario, Mode::Full).unwrap().per_wlan;
        let sim = simulated(&c.scenario);
        for (i, (&x, &y)) in model.iter().zip(&sim).enumerate() {
            checked += 1;
            let err = (x - y) / y;
            let ok = err.abs() <= c.tolerance;
            if !ok {
                failed += 1;
            }
            details.push(format!(
                "{:<3} N={:<2} CW={:<4} {}: model {:.4e} sim {:.4e} {:+6.1}% (±{:.0}%) {}",
                c.name,
                c.n,
                c.cw,
                wlan_label(i),
                x,
                y,
                100.0 * err,
                100.0 * c.tolerance,
                if ok { "ok" } else { "FAIL" }
            ));
        }
    }
    let elapsed = start.elapsed();
    let mut out = Outcome::new(
        failed == 0 && elapsed < Duration::from_secs(600),
        format!("{} of {checked} WLAN points within tolerance, {elapsed:.1?} (< 10 min)", checked - failed),
    );
    out.details = details;
    out
}

fn c7_ctmc_inadequate() -> Outcome {
    let s = at_cw(&Scenario::scenario_ii(16), 4);
    let ctmc = analyze_with(
        &s,
        AnalysisOptions {
            mode: Mode::Full,
            collisions: false,
        },
    )
    .unwrap()
    .per_wlan;
    let model = analyze(&s, Mode::Full).unwrap().per_wlan;
    let sim = simulated(&s);
    let mut pass = true;
    let mut parts = Vec::new();
    for i in [0, 2] {
        let over = (ctmc[i] - sim[i]) / sim[i];
        let corrected = (model[i] - sim[i]) / sim[i];
        pass &= over > 0.20 && corrected.abs() <= 0.10;
        parts.push(format!(
            "{}: γ=0 {:+.1}% (> +20%), corrected {:+.1}% (±10%)",
            wlan_label(i),
            100.0 * over,
            100.0 * corrected
        ));
    }
    Outcome::new(pass, parts.join(", "))
}

fn c8_dominant_mode() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [1, 16] {
        for (_, s) in references(n) {
            let full = analyze(&s, Mode::Full).unwrap().per_wlan;
            let dom = analyze(&s, Mode::DominantOnly).unwrap().per_wlan;
            for (a, b) in dom.iter().zip(&full) {
                worst = worst.max(rel(*a, *b));
            }
        }
    }
    Outcome::new(worst <= 0.05, format!("max relative gap {:.3}% (≤ 5%)", 100.0 * worst))
}

fn c9_simulator_sanity() -> Outcome {
    let params = PhyMacParams::ieee80211ac();
    let lone = Scenario::new(vec![Wlan { id: 0, n_nodes: 1 }], &[], params).unwrap();
    let expect = params.payload_bits
        / ((f64::from(params.cw_min) - 1.0) / 2.0 * params.slot_time + params.tx_time);
    let got = simulated(&lone)[0];
    let lone_ok = rel(got, expect) < 0.01;

    let iii = Scenario::scenario_iii(16);
    let mut config = SimConfig::new(iii.clone(), SEED);
    config.replications = 1;
    config.record_events = true;
    let run = simulate(&config).unwrap();
    let violations = audit_mutual_exclusion(&run.events[0], iii.graph()).len();

    let mut config = SimConfig::new(iii, SEED);
    config.record_events = true;
    let a = simulate(&config).unwrap();
    let b = simulate(&config).unwrap();
    let exact = a == b && a.events == b.events;

    Outcome::new(
        lone_ok && violations == 0 && exact,
        format!(
            "isolated {:+.3}% (±1%), {} events audited with {violations} violations, reproducible: {exact}",
            100.0 * (got - expect) / expect,
            run.events[0].len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("state-space counts", c2_state_counts),
        ("DCF fixed point", c3_bianchi),
        ("γ identity", c4_gamma_identity),
        ("γ ≤ p", c5_gamma_below_p),
        ("model vs simulation", c6_model_vs_sim),
        ("γ = 0 inadequacy", c7_ctmc_inadequate),
        ("dominant-only mode", c8_dominant_mode),
        ("simulator sanity", c9_simulator_sanity),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        println!(
            "criterion {}: {} {name}: {}",
            k + 1,
            if out.pass { "PASS" } else { "FAIL" },
            out.summary
        );
        for d in &out.details {
            println!("    {d}");
        }
        if !out.pass {
            failures += 1;
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
