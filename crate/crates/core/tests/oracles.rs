//! Independent oracles checked against the library: brute-force subset
//! enumeration, bisection on the DCF fixed point, the rational backoff
//! expression and a Monte-Carlo run of the memoryless slot process.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wlan_ctmc::bianchi::{expected_backoff, slot_probabilities, solve_fixed_point};
use wlan_ctmc::ctmc::{dominant_states, enumerate_states, FeasibleState};
use wlan_ctmc::throughput::conditional_throughput;
use wlan_ctmc::{PhyMacParams, Scenario, Wlan};

/// Every subset of `0..w` with no two members adjacent.
fn brute_force_independent_sets(scenario: &Scenario) -> Vec<u32> {
    let w = scenario.len();
    let g = scenario.graph();
    (0u32..(1 << w))
        .filter(|&mask| {
            (0..w).all(|a| {
                (a + 1..w).all(|b| !(mask & (1 << a) != 0 && mask & (1 << b) != 0 && g.adjacent(a, b)))
            })
        })
        .collect()
}

fn brute_force_maximal(sets: &[u32], w: usize) -> Vec<u32> {
    sets.iter()
        .copied()
        .filter(|&s| (0..w).all(|i| s & (1 << i) != 0 || !sets.contains(&(s | (1 << i)))))
        .collect()
}

#[test]
fn enumeration_matches_brute_force() {
    for scenario in [
        Scenario::scenario_i(1),
        Scenario::scenario_ii(1),
        Scenario::scenario_iii(1),
    ] {
        let space = enumerate_states(&scenario).unwrap();
        let mut got: Vec<u32> = space.states().iter().map(|s| s.mask()).collect();
        let mut expected = brute_force_independent_sets(&scenario);
        got.sort_unstable();
        expected.sort_unstable();
        assert_eq!(got, expected);

        let mut dom: Vec<u32> = dominant_states(&space).iter().map(|s| s.mask()).collect();
        let mut want = brute_force_maximal(&expected, scenario.len());
        dom.sort_unstable();
        want.sort_unstable();
        assert_eq!(dom, want);
    }
}

#[test]
fn scenario_iii_maximal_sets() {
    let space = enumerate_states(&Scenario::scenario_iii(16)).unwrap();
    let dom = dominant_states(&space);
    assert_eq!(
        dom,
        vec![
            FeasibleState::from_ids([0, 2]),
            FeasibleState::from_ids([0, 3, 4]),
            FeasibleState::from_ids([1, 3, 4]),
        ]
    );
}

/// Rational backoff form; only valid away from p = 1/2.
fn rational_backoff(p: f64, cw_min: u32, m: u32) -> f64 {
    (1.0 - p - p * (2.0 * p).powi(m as i32)) / (1.0 - 2.0 * p) * f64::from(cw_min) / 2.0 - 0.5
}

/// 200-step bisection on g(τ) = τ − 1/(E[B](p(τ)) + 1), written against the
/// rational backoff form with the removable singularity patched by its limit.
fn bisection_tau(n: u32, cw_min: u32, m: u32) -> f64 {
    let g = |tau: f64| {
        let p = 1.0 - (1.0 - tau).powi(n as i32 - 1);
        let eb = if (1.0 - 2.0 * p).abs() < 1e-7 {
            (1.0 + 0.5 * f64::from(m)) * f64::from(cw_min) / 2.0 - 0.5
        } else {
            rational_backoff(p, cw_min, m)
        };
        tau - 1.0 / (eb + 1.0)
    };
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn fixed_point_matches_bisection_oracle() {
    for n in [1, 2, 3, 4, 8, 16, 32, 48, 64] {
        for cw in [4, 16, 32, 256, 8192] {
            for m in [0, 1, 3, 5, 7] {
                let pt = solve_fixed_point(n, cw, m).unwrap_or_else(|e| panic!("n={n} cw={cw} m={m}: {e}"));
                let oracle = bisection_tau(n, cw, m);
                assert!(
                    (pt.tau - oracle).abs() < 1e-9,
                    "n={n} cw={cw} m={m}: {} vs {oracle}",
                    pt.tau
                );
            }
        }
    }
}

#[test]
fn two_nodes_pinned_value() {
    // Frozen from a 40-digit bisection of the rational form.
    let pt = solve_fixed_point(2, 32, 5).unwrap();
    assert!((pt.tau - 0.057_044_320_719_817_74).abs() < 1e-12);
    assert!((pt.p - 0.057_044_320_719_817_74).abs() < 1e-12);
    assert!((pt.e_b - 16.530_228_905_900_364).abs() < 1e-9);
}

#[test]
fn stable_backoff_is_continuous_at_half() {
    let at = expected_backoff(0.5, 32, 5).unwrap();
    for eps in [1e-4, 1e-5, 1e-6] {
        let lo = rational_backoff(0.5 - eps, 32, 5);
        let hi = rational_backoff(0.5 + eps, 32, 5);
        assert!((lo - at).abs() < 1e3 * eps && (hi - at).abs() < 1e3 * eps);
    }
}

#[test]
fn conditional_throughput_matches_slot_monte_carlo() {
    // Tagged WLAN of 16 nodes against 32 contending nodes.
    let params = PhyMacParams::ieee80211ac();
    let tagged = Wlan { id: 0, n_nodes: 16 };
    let y = conditional_throughput(&tagged, 32, &params).unwrap();

    let pt = solve_fixed_point(48, params.cw_min, params.backoff_stages).unwrap();
    // Binomial(48, τ) CDF for the number of transmitters per slot.
    let n = 48usize;
    let mut pmf = vec![0.0; n + 1];
    let mut coeff = 1.0;
    for k in 0..=n {
        pmf[k] = coeff * pt.tau.powi(k as i32) * (1.0 - pt.tau).powi((n - k) as i32);
        coeff = coeff * (n - k) as f64 / (k + 1) as f64;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5107);
    let (mut bits, mut time) = (0.0, 0.0);
    for _ in 0..4_000_000 {
        let mut u: f64 = rng.random();
        let mut k = 0;
        while k < n && u >= pmf[k] {
            u -= pmf[k];
            k += 1;
        }
        match k {
            0 => time += params.slot_time,
            1 => {
                time += params.tx_time;
                if rng.random_range(0..48) < 16 {
                    bits += params.payload_bits;
                }
            }
            _ => time += params.collision_time,
        }
    }
    let mc = bits / time;
    assert!((mc - y).abs() / y < 0.005, "monte carlo {mc} vs model {y}");

    let s = slot_probabilities(&pt, 16).unwrap();
    assert!((s.d / s.b - 1.0 / 3.0).abs() < 1e-15);
}
