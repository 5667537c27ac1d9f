//! Input domain: WLANs, the WLAN-level overlap graph and PHY/MAC parameters.
//!
//! Overlap is declared per WLAN pair. When two WLANs overlap, every node of
//! one senses (and can collide with) every node of the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of WLANs; states are subsets stored as `u32` masks
/// and the feasible-state family is enumerated exhaustively.
pub const MAX_WLANS: usize = 24;

/// Default empty backoff slot duration (802.11ac, 9 µs).
pub const DEFAULT_SLOT_TIME: f64 = 9e-6;

/// PHY/MAC timing and contention parameters shared by all WLANs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhyMacParams {
    /// Empty backoff slot duration, seconds.
    pub slot_time: f64,
    /// Expected duration of a successful transmission, seconds (1/μ).
    pub tx_time: f64,
    /// Expected duration of a collision, seconds.
    pub collision_time: f64,
    /// Minimum contention window, slots.
    pub cw_min: u32,
    /// Number of backoff stages, `log2(CW_max / CW_min)`.
    pub backoff_stages: u32,
    /// Bits delivered per successful channel access.
    pub payload_bits: f64,
}

impl PhyMacParams {
    /// IEEE 802.11ac parameters used for the reference scenarios: 40 MHz,
    /// 64-QAM 3/4, 64-packet A-MPDUs of 12000 bits, no RTS/CTS.
    pub fn ieee80211ac() -> Self {
        Self {
            slot_time: DEFAULT_SLOT_TIME,
            tx_time: 6.63e-3,
            collision_time: 6.63e-3,
            cw_min: 32,
            backoff_stages: 5,
            payload_bits: 768_000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("t_e_s", self.slot_time)?;
        positive("e_t_s", self.tx_time)?;
        positive("e_tc_s", self.collision_time)?;
        positive("l_bits", self.payload_bits)?;
        if self.cw_min < 2 {
            return Err(Error::invalid(
                "cw_min",
                format!("must be at least 2, got {}", self.cw_min),
            ));
        }
        if self.cw_max().is_none() {
            return Err(Error::invalid(
                "m",
                format!(
                    "CW_max = 2^{} * {} is not representable",
                    self.backoff_stages, self.cw_min
                ),
            ));
        }
        Ok(())
    }

    /// `CW_min * 2^m`, or `None` on overflow.
    pub fn cw_max(&self) -> Option<u32> {
        1u32.checked_shl(self.backoff_stages)
            .filter(|_| self.backoff_stages < 32)
            .and_then(|f| f.checked_mul(self.cw_min))
    }

    /// Transmission completion rate μ = 1/E[T].
    pub fn mu(&self) -> f64 {
        1.0 / self.tx_time
    }

    pub fn with_cw_min(mut self, cw_min: u32) -> Self {
        self.cw_min = cw_min;
        self
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wlan {
    pub id: usize,
    /// AP plus associated stations.
    pub n_nodes: u32,
}

/// Undirected, irreflexive overlap graph over dense WLAN ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    adjacency: Vec<u32>,
}

impl ConflictGraph {
    pub fn new(wlans: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if wlans > MAX_WLANS {
            return Err(Error::StateSpaceTooLarge {
                wlans,
                limit: MAX_WLANS,
            });
        }
        let mut adjacency = vec![0u32; wlans];
        for &(a, b) in edges {
            if a >= wlans || b >= wlans {
                return Err(Error::invalid(
                    "edges",
                    format!("edge [{a}, {b}] references an unknown WLAN id"),
                ));
            }
            if a == b {
                return Err(Error::invalid("edges", format!("self-edge on WLAN {a}")));
            }
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        }
        Ok(Self { adjacency })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a] & (1 << b) != 0
    }

    /// Neighbour mask of `wlan` (excluding itself).
    pub fn neighbors(&self, wlan: usize) -> u32 {
        self.adjacency[wlan]
    }

    /// Neighbour mask of `wlan` including itself: everything it senses.
    pub fn closed_neighbors(&self, wlan: usize) -> u32 {
        self.adjacency[wlan] | (1 << wlan)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in (a + 1)..self.len() {
                if self.adjacent(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// True if no two members of `mask` overlap.
    pub fn is_independent(&self, mask: u32) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            if self.adjacency[i] & mask != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }
}

/// A validated deployment: WLANs, their overlap graph and shared parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    wlans: Vec<Wlan>,
    graph: ConflictGraph,
    params: PhyMacParams,
}

impl Scenario {
    pub fn new(wlans: Vec<Wlan>, edges: &[(usize, usize)], params: PhyMacParams) -> Result<Self> {
        if wlans.is_empty() {
            return Err(Error::invalid("wlans", "at least one WLAN is required"));
        }
        if wlans.len() > MAX_WLANS {
            return Err(Error::StateSpaceTooLarge {
                wlans: wlans.len(),
                limit: MAX_WLANS,
            });
        }
        let mut wlans = wlans;
        wlans.sort_by_key(|w| w.id);
        for (expected, w) in wlans.iter().enumerate() {
            if w.id != expected {
                return Err(Error::invalid(
                    "wlans",
                    format!("ids must be dense 0..{} without duplicates", wlans.len()),
                ));
            }
            if w.n_nodes == 0 {
                return Err(Error::invalid(
                    "n_nodes",
                    format!("WLAN {} must have at least one node", w.id),
                ));
            }
        }
        params.validate()?;
        let graph = ConflictGraph::new(wlans.len(), edges)?;
        Ok(Self {
            wlans,
            graph,
            params,
        })
    }

    /// Three mutually overlapping WLANs (triangle).
    pub fn scenario_i(n_nodes: u32) -> Self {
        Self::uniform(3, &[(0, 1), (0, 2), (1, 2)], n_nodes)
    }

    /// Three WLANs in a line, B in the middle (path A–B–C).
    pub fn scenario_ii(n_nodes: u32) -> Self {
        Self::uniform(3, &[(0, 1), (1, 2)], n_nodes)
    }

    /// Path A–B–C plus D and E both overlapping C only.
    pub fn scenario_iii(n_nodes: u32) -> Self {
        Self::uniform(5, &[(0, 1), (1, 2), (2, 3), (2, 4)], n_nodes)
    }

    /// Look up a reference scenario by name (`i`/`ii`/`iii`, case-insensitive,
    /// optionally prefixed with `scenario-`).
    pub fn builtin(name: &str, n_nodes: u32) -> Option<Self> {
        let key = name.to_ascii_lowercase();
        let key = key
            .strip_prefix("scenario")
            .map(|k| k.trim_start_matches(['-', '_']))
            .unwrap_or(&key);
        match key {
            "i" | "1" => Some(Self::scenario_i(n_nodes)),
            "ii" | "2" => Some(Self::scenario_ii(n_nodes)),
            "iii" | "3" => Some(Self::scenario_iii(n_nodes)),
            _ => None,
        }
    }

    fn uniform(count: usize, edges: &[(usize, usize)], n_nodes: u32) -> Self {
        let wlans = (0..count).map(|id| Wlan { id, n_nodes }).collect();
        Self::new(wlans, edges, PhyMacParams::ieee80211ac())
            .expect("reference scenario parameters are valid")
    }

    pub fn wlans(&self) -> &[Wlan] {
        &self.wlans
    }

    pub fn wlan(&self, id: usize) -> &Wlan {
        &self.wlans[id]
    }

    pub fn len(&self) -> usize {
        self.wlans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wlans.is_empty()
    }

    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }

    pub fn params(&self) -> &PhyMacParams {
        &self.params
    }

    /// Same topology with different parameters.
    pub fn with_params(&self, params: PhyMacParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            ..self.clone()
        })
    }

    /// Same topology with every WLAN resized to `n_nodes`.
    pub fn with_uniform_nodes(&self, n_nodes: u32) -> Result<Self> {
        let wlans = self
            .wlans
            .iter()
            .map(|w| Wlan { id: w.id, n_nodes })
            .collect();
        Self::new(wlans, &self.graph.edges(), self.params)
    }

    /// Same parameters and node counts, different overlap edges.
    pub fn with_edges(&self, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(self.wlans.clone(), edges, self.params)
    }

    pub fn lambda(&self, wlan: usize) -> f64 {
        lambda_of(&self.wlans[wlan], &self.params).expect("validated at construction")
    }

    pub fn theta(&self, wlan: usize) -> f64 {
        theta_of(&self.wlans[wlan], &self.params).expect("validated at construction")
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.theta(i)).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.lambda(i)).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from(self)).expect("plain data serializes")
    }
}

/// Aggregate channel-access rate of a WLAN's nodes while counting down:
/// `N_i * 2 / ((CW_min - 1) * T_e)`.
pub fn lambda_of(wlan: &Wlan, params: &PhyMacParams) -> Result<f64> {
    if params.cw_min < 2 {
        return Err(Error::invalid(
            "cw_min",
            format!("must be at least 2, got {}", params.cw_min),
        ));
    }
    positive("t_e_s", params.slot_time)?;
    Ok(f64::from(wlan.n_nodes) * 2.0 / (f64::from(params.cw_min - 1) * params.slot_time))
}

/// Access-to-service ratio θ = λ/μ.
pub fn theta_of(wlan: &Wlan, params: &PhyMacParams) -> Result<f64> {
    params.validate()?;
    Ok(lambda_of(wlan, params)? / params.mu())
}

/// Display label for a WLAN id: `A`, `B`, ... then numeric.
pub fn wlan_label(id: usize) -> String {
    if id < 26 {
        char::from(b'A' + id as u8).to_string()
    } else {
        format!("W{id}")
    }
}

/// On-disk JSON layout of a scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub wlans: Vec<Wlan>,
    pub edges: Vec<[usize; 2]>,
    pub params: ParamsFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(default = "default_slot_time")]
    pub t_e_s: f64,
    pub e_t_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_tc_s: Option<f64>,
    pub cw_min: u32,
    pub m: u32,
    pub l_bits: f64,
}

fn default_slot_time() -> f64 {
    DEFAULT_SLOT_TIME
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(file: ScenarioFile) -> Result<Self> {
        let p = &file.params;
        let params = PhyMacParams {
            slot_time: p.t_e_s,
            tx_time: p.e_t_s,
            collision_time: p.e_tc_s.unwrap_or(p.e_t_s),
            cw_min: p.cw_min,
            backoff_stages: p.m,
            payload_bits: p.l_bits,
        };
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|&[a, b]| (a, b)).collect();
        Scenario::new(file.wlans, &edges, params)
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let p = s.params();
        ScenarioFile {
            wlans: s.wlans().to_vec(),
            edges: s.graph().edges().into_iter().map(|(a, b)| [a, b]).collect(),
            params: ParamsFile {
                t_e_s: p.slot_time,
                e_t_s: p.tx_time,
                e_tc_s: Some(p.collision_time),
                cw_min: p.cw_min,
                m: p.backoff_stages,
                l_bits: p.payload_bits,
            },
        }
    }
}
