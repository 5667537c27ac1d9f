use std::path::Path;

use wlan_ctmc::{PhyMacParams, Scenario};

fn load(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name);
    Scenario::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bundled_files_match_builtins() {
    assert_eq!(load("scenario_i.json"), Scenario::scenario_i(16));
    assert_eq!(load("scenario_ii.json"), Scenario::scenario_ii(16));
    assert_eq!(load("scenario_iii.json"), Scenario::scenario_iii(16));
}

#[test]
fn bundled_files_use_reference_parameters() {
    for name in ["scenario_i.json", "scenario_ii.json", "scenario_iii.json"] {
        let s = load(name);
        let p = s.params();
        assert_eq!(*p, PhyMacParams::ieee80211ac());
        assert_eq!(p.payload_bits, 768_000.0);
        assert_eq!(p.tx_time, 6.63e-3);
        assert_eq!(p.collision_time, p.tx_time);
        assert_eq!((p.cw_min, p.backoff_stages), (32, 5));
        assert!(s.wlans().iter().all(|w| w.n_nodes == 16));
    }
    let iii = load("scenario_iii.json");
    assert_eq!(iii.graph().edges(), vec![(0, 1), (1, 2), (2, 3), (2, 4)]);
}

#[test]
fn json_round_trip() {
    for s in [Scenario::scenario_i(3), Scenario::scenario_iii(7)] {
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }
}
