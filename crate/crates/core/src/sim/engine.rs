use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{BackoffResume, ChannelEvent, EventKind, SimConfig};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy)]
struct Node {
    wlan: usize,
    counter: u64,
    stage: u32,
    fresh: bool,
}

/// Raw counts from one replication, restricted to the measurement window
/// unless noted.
#[derive(Debug, Clone, Default)]
pub(crate) struct Replication {
    pub successes: Vec<u64>,
    pub collisions: Vec<u64>,
    /// Slots spent in each set of simultaneously transmitting WLANs.
    pub airtime: BTreeMap<u32, u64>,
    /// `(wlan, active set at attempt) -> [attempts, collisions, success slots]`.
    pub probe: BTreeMap<(usize, u32), [u64; 3]>,
    pub measured_slots: u64,
    /// Every transmission, warmup included.
    pub events: Vec<ChannelEvent>,
}

pub(crate) struct Timing {
    pub success_slots: u64,
    pub collision_slots: u64,
    pub warmup_slot: u64,
    pub end_slot: u64,
    pub resume: BackoffResume,
}

impl Timing {
    pub fn new(config: &SimConfig) -> Self {
        let p = config.scenario.params();
        let slots = |secs: f64| (secs / p.slot_time).round() as u64;
        Self {
            success_slots: slots(p.tx_time).max(1),
            collision_slots: slots(p.collision_time).max(1),
            warmup_slot: slots(config.warmup),
            end_slot: slots(config.duration),
            resume: config.resume,
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, cw_min: u32, stage: u32) -> u64 {
    let cw = u64::from(cw_min) << stage;
    rng.random_range(0..cw)
}

/// Runs one replication of the slotted process.
///
/// At each slot boundary, a WLAN is free when nothing in its closed
/// neighbourhood is transmitting. Nodes of free WLANs whose counter is zero
/// transmit; a transmission succeeds when it is the only one started in the
/// transmitter's closed neighbourhood that slot. Free WLANs that sense no new
/// transmission see an idle slot and decrement. Between events, time jumps
/// straight to the next counter expiry or transmission end. How a busy
/// period affects waiting counters follows `timing.resume`.
pub(crate) fn run(
    scenario: &Scenario,
    timing: &Timing,
    rng: &mut ChaCha8Rng,
    record_events: bool,
) -> Replication {
    let w = scenario.len();
    let graph = scenario.graph();
    let params = scenario.params();
    let (cw_min, max_stage) = (params.cw_min, params.backoff_stages);

    let mut nodes: Vec<Node> = Vec::new();
    for wlan in scenario.wlans() {
        for _ in 0..wlan.n_nodes {
            nodes.push(Node {
                wlan: wlan.id,
                counter: 0,
                stage: 0,
                fresh: false,
            });
        }
    }
    for n in nodes.iter_mut() {
        n.counter = draw(rng, cw_min, 0);
    }
    let first_node: Vec<usize> = {
        let mut v = vec![usize::MAX; w];
        for (k, n) in nodes.iter().enumerate().rev() {
            v[n.wlan] = k;
        }
        v
    };

    let mut out = Replication {
        successes: vec![0; w],
        collisions: vec![0; w],
        measured_slots: timing.end_slot.saturating_sub(timing.warmup_slot),
        ..Default::default()
    };
    let mut tx_end = vec![0u64; w];
    let mut transmitters: Vec<usize> = Vec::new();
    let mut now = 0u64;
    // WLANs that counted down through the previous interval.
    let mut was_free: u32 = u32::MAX;

    while now < timing.end_slot {
        let active: u32 = (0..w)
            .filter(|&i| tx_end[i] > now)
            .fold(0, |m, i| m | (1 << i));
        let free = |i: usize| graph.closed_neighbors(i) & active == 0;
        let resumed = (0..w)
            .filter(|&i| free(i) && was_free & (1 << i) == 0)
            .fold(0u32, |m, i| m | (1 << i));
        if timing.resume == BackoffResume::CountBusyPeriod && resumed != 0 {
            // The busy period just sensed is one backoff slot for every
            // waiting node; nodes that drew a fresh counter when they
            // transmitted do not count their own transmission.
            for n in nodes.iter_mut() {
                if resumed & (1 << n.wlan) != 0 {
                    if !n.fresh && n.counter > 0 {
                        n.counter -= 1;
                    }
                    n.fresh = false;
                }
            }
        }

        transmitters.clear();
        transmitters.extend(
            nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| n.counter == 0 && free(n.wlan))
                .map(|(k, _)| k),
        );

        let mut started: u32 = 0;
        if !transmitters.is_empty() {
            let mut per_wlan = vec![0u32; w];
            for &k in &transmitters {
                per_wlan[nodes[k].wlan] += 1;
                started |= 1 << nodes[k].wlan;
            }
            let sensed = |i: usize| -> u32 {
                let mut rest = graph.closed_neighbors(i) & started;
                let mut count = 0;
                while rest != 0 {
                    count += per_wlan[rest.trailing_zeros() as usize];
                    rest &= rest - 1;
                }
                count
            };
            let measuring = now >= timing.warmup_slot;
            let mut wlan_collided = vec![false; w];
            for &k in &transmitters {
                let i = nodes[k].wlan;
                let collided = sensed(i) > 1;
                wlan_collided[i] |= collided;
                let node = &mut nodes[k];
                node.stage = if collided {
                    (node.stage + 1).min(max_stage)
                } else {
                    0
                };
                node.counter = draw(rng, cw_min, node.stage);
                node.fresh = true;

                let duration = if collided {
                    timing.collision_slots
                } else {
                    timing.success_slots
                };
                if measuring {
                    let entry = out.probe.entry((i, active)).or_insert([0; 3]);
                    entry[0] += 1;
                    if collided {
                        out.collisions[i] += 1;
                        entry[1] += 1;
                    } else {
                        out.successes[i] += 1;
                        entry[2] += duration;
                    }
                }
                if record_events {
                    out.events.push(ChannelEvent {
                        start_slot: now,
                        wlan: i,
                        node: k - first_node[i],
                        kind: if collided {
                            EventKind::Collision
                        } else {
                            EventKind::Success
                        },
                        duration_slots: duration,
                    });
                }
            }
            for i in 0..w {
                if started & (1 << i) != 0 {
                    let d = if wlan_collided[i] {
                        timing.collision_slots
                    } else {
                        timing.success_slots
                    };
                    tx_end[i] = now + d;
                }
            }
        }

        // Sense state for the slots that follow.
        let active = active | started;
        let free_mask: u32 = (0..w)
            .filter(|&i| graph.closed_neighbors(i) & active == 0)
            .fold(0, |m, i| m | (1 << i));

        let mut step = timing.end_slot - now;
        for i in 0..w {
            if active & (1 << i) != 0 {
                step = step.min(tx_end[i] - now);
            }
        }
        for n in &nodes {
            if free_mask & (1 << n.wlan) != 0 {
                step = step.min(n.counter);
            }
        }
        was_free = free_mask;
        debug_assert!(step >= 1, "time must advance");
        let step = step.max(1);

        for n in nodes.iter_mut() {
            if free_mask & (1 << n.wlan) != 0 {
                n.counter -= step;
            }
        }
        let lo = now.max(timing.warmup_slot);
        let hi = (now + step).min(timing.end_slot);
        if hi > lo {
            *out.airtime.entry(active).or_insert(0) += hi - lo;
        }
        now += step;
    }
    out
}
