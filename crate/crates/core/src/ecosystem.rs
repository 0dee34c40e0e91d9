//! Ecosystem state and the organization value model.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, Graph};
use crate::params::{ModelParams, SynergyCountMode};

/// Organization id, 1-based. Row 0 of the employment matrix is the
/// unemployed pool; organization `i` occupies row `i` and graph node `i - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrgId(pub u32);

impl OrgId {
    pub fn from_node(node: usize) -> Self {
        OrgId(node as u32 + 1)
    }

    /// Graph node index.
    pub fn node(self) -> usize {
        self.0 as usize - 1
    }

    /// Employment matrix row.
    pub fn row(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for OrgId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense profile index in `0..profile_count`.
pub type ProfileIndex = usize;

pub const DEFAULT_PROFILE_NAMES: [&str; 3] = ["red", "blue", "green"];

/// Headcounts per (row, profile); row 0 holds the unemployed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmploymentMatrix {
    profiles: usize,
    counts: Vec<u64>,
}

impl EmploymentMatrix {
    pub fn new(organizations: usize, profiles: usize) -> Self {
        Self {
            profiles,
            counts: vec![0; (organizations + 1) * profiles],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let profiles = rows.first().map_or(0, Vec::len);
        if profiles == 0 || rows.iter().any(|r| r.len() != profiles) {
            return Err(Error::Domain("employment rows must be non-empty and of equal length"));
        }
        Ok(Self {
            profiles,
            counts: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.counts.len() / self.profiles
    }

    pub fn organizations(&self) -> usize {
        self.rows() - 1
    }

    pub fn profiles(&self) -> usize {
        self.profiles
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.counts[row * self.profiles..(row + 1) * self.profiles]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [u64] {
        &mut self.counts[row * self.profiles..(row + 1) * self.profiles]
    }

    pub fn get(&self, row: usize, profile: ProfileIndex) -> u64 {
        self.counts[row * self.profiles + profile]
    }

    pub fn unemployed(&self) -> &[u64] {
        self.row(0)
    }

    pub fn row_total(&self, row: usize) -> u64 {
        self.row(row).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn column_totals(&self) -> Vec<u64> {
        let mut totals = vec![0; self.profiles];
        for row in self.counts.chunks(self.profiles) {
            for (t, c) in totals.iter_mut().zip(row) {
                *t += c;
            }
        }
        totals
    }

    /// Moves one person of `profile` from row `from` to row `to`.
    pub fn transfer(&mut self, from: usize, to: usize, profile: ProfileIndex) -> Result<()> {
        if from >= self.rows() || to >= self.rows() || profile >= self.profiles {
            return Err(Error::Bounds("employment transfer outside the matrix"));
        }
        let src = from * self.profiles + profile;
        if self.counts[src] == 0 {
            return Err(Error::Domain("transfer from an empty cell"));
        }
        self.counts[src] -= 1;
        self.counts[to * self.profiles + profile] += 1;
        Ok(())
    }

    /// Predominant profile of a row; ties and empty rows resolve to the lowest index.
    pub fn predominant_profile(&self, row: usize) -> ProfileIndex {
        let mut best = 0;
        for (p, &c) in self.row(row).iter().enumerate() {
            if c > self.row(row)[best] {
                best = p;
            }
        }
        best
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.profiles).map(<[u64]>::to_vec).collect()
    }
}

/// A temporary coalition of organizations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollaborativeNetwork {
    #[serde(rename = "start")]
    pub start_time: u64,
    pub duration: u32,
    /// Sorted, distinct, at least two.
    pub members: Vec<OrgId>,
}

impl CollaborativeNetwork {
    pub fn new(start_time: u64, duration: u32, mut members: Vec<OrgId>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.len() < 2 {
            return Err(Error::Domain("a collaborative network needs at least two members"));
        }
        if duration == 0 {
            return Err(Error::Domain("collaborative network duration must be positive"));
        }
        Ok(Self {
            start_time,
            duration,
            members,
        })
    }

    /// Last step at which the network is active.
    pub fn end(&self) -> u64 {
        self.start_time + self.duration as u64
    }

    pub fn is_active(&self, t: u64) -> bool {
        self.start_time <= t && t <= self.end()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (OrgId, OrgId)> + '_ {
        self.members
            .iter()
            .enumerate()
            .flat_map(move |(a, &i)| self.members[a + 1..].iter().map(move |&j| (i, j)))
    }
}

/// Per-pair collaboration memory: the number of active networks shared by
/// the pair and the step at which the last shared one dissolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCollaborationState {
    n: usize,
    shared: Vec<u32>,
    last_end: Vec<u64>,
}

impl PairCollaborationState {
    pub fn new(organizations: usize) -> Self {
        Self {
            n: organizations,
            shared: vec![0; organizations * organizations],
            last_end: vec![0; organizations * organizations],
        }
    }

    fn idx(&self, i: OrgId, j: OrgId) -> (usize, usize) {
        (i.node() * self.n + j.node(), j.node() * self.n + i.node())
    }

    pub fn shared_active(&self, i: OrgId, j: OrgId) -> u32 {
        self.shared[self.idx(i, j).0]
    }

    pub fn last_collab_end(&self, i: OrgId, j: OrgId) -> u64 {
        self.last_end[self.idx(i, j).0]
    }

    pub fn set_last_collab_end(&mut self, i: OrgId, j: OrgId, t: u64) {
        let (a, b) = self.idx(i, j);
        self.last_end[a] = t;
        self.last_end[b] = t;
    }

    fn increment(&mut self, i: OrgId, j: OrgId) {
        let (a, b) = self.idx(i, j);
        self.shared[a] += 1;
        self.shared[b] += 1;
    }

    /// Returns the remaining shared count.
    fn decrement(&mut self, i: OrgId, j: OrgId) -> u32 {
        let (a, b) = self.idx(i, j);
        self.shared[a] -= 1;
        self.shared[b] -= 1;
        self.shared[a]
    }
}

/// Value of a pair sharing `count` active networks: `1 + ln(count)`.
pub fn active_synergy(count: u32) -> f64 {
    1.0 + libm::log(count as f64)
}

/// Synergy of a pair whose last collaboration ended at `last_end`, at step `t`.
///
/// Logistic decay centred `fade_duration / 2` steps after the collaboration
/// ended: `1 - 1 / (1 + exp(slope * (duration / 2 + last_end - t)))`.
pub fn fading_synergy(fade_slope: f64, fade_duration: f64, last_end: f64, t: f64) -> f64 {
    let x = fade_slope * (fade_duration / 2.0 + last_end - t);
    1.0 / (1.0 + libm::exp(-x))
}

/// Seed network family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    #[serde(rename = "er")]
    ErdosRenyi,
    #[serde(rename = "ba")]
    BarabasiAlbert,
    /// Erdős–Rényi on even replicate indices, Barabási–Albert on odd ones.
    #[serde(rename = "mixed")]
    Mixed,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::ErdosRenyi => "er",
            Generator::BarabasiAlbert => "ba",
            Generator::Mixed => "mixed",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "er" => Ok(Generator::ErdosRenyi),
            "ba" => Ok(Generator::BarabasiAlbert),
            "mixed" => Ok(Generator::Mixed),
            other => Err(Error::config(
                "generator",
                format!("unknown generator `{other}` (expected er, ba or mixed)"),
            )),
        }
    }

    pub fn for_replicate(self, replicate: u64) -> Self {
        match self {
            Generator::Mixed if replicate.is_multiple_of(2) => Generator::ErdosRenyi,
            Generator::Mixed => Generator::BarabasiAlbert,
            g => g,
        }
    }
}

/// Everything needed to build the initial ecosystem.
#[derive(Debug, Clone, PartialEq)]
pub struct EcosystemConfig {
    pub generator: Generator,
    pub n_orgs: usize,
    pub n_links: usize,
    pub ba_m_per_node: usize,
    pub ba_seed_size: usize,
    pub profile_names: Vec<String>,
    pub staffing_sd: f64,
    pub unemployment_rate: f64,
}

impl Default for EcosystemConfig {
    fn default() -> Self {
        Self {
            generator: Generator::Mixed,
            n_orgs: 100,
            n_links: 197,
            ba_m_per_node: 2,
            ba_seed_size: 3,
            profile_names: DEFAULT_PROFILE_NAMES.iter().map(|s| String::from(*s)).collect(),
            staffing_sd: 70.0,
            unemployment_rate: 0.03,
        }
    }
}

/// Splits `total` as evenly as possible over `parts`, remainder to the lowest indices.
pub fn split_evenly(total: u64, parts: usize) -> Vec<u64> {
    let base = total / parts as u64;
    let rem = (total % parts as u64) as usize;
    (0..parts).map(|p| base + u64::from(p < rem)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EcosystemState {
    pub graph: Graph,
    pub employment: EmploymentMatrix,
    pub active_cns: Vec<CollaborativeNetwork>,
    pub pairs: PairCollaborationState,
    /// Active networks per organization, by graph node.
    own_cns: Vec<u32>,
    pub clock: u64,
    pub profile_names: Vec<String>,
}

impl EcosystemState {
    pub fn new(graph: Graph, employment: EmploymentMatrix) -> Result<Self> {
        let n = graph.node_count();
        if employment.organizations() != n {
            return Err(Error::Domain("employment rows do not match the organization count"));
        }
        let profile_names = (0..employment.profiles())
            .map(|p| match DEFAULT_PROFILE_NAMES.get(p) {
                Some(name) => String::from(*name),
                None => format!("profile{p}"),
            })
            .collect();
        Ok(Self {
            graph,
            employment,
            active_cns: Vec::new(),
            pairs: PairCollaborationState::new(n),
            own_cns: vec![0; n],
            clock: 0,
            profile_names,
        })
    }

    pub fn organization_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn organizations(&self) -> impl Iterator<Item = OrgId> {
        (1..=self.organization_count() as u32).map(OrgId)
    }

    fn check_org(&self, org: OrgId) -> Result<()> {
        if org.0 >= 1 && org.node() < self.organization_count() {
            Ok(())
        } else {
            Err(Error::Bounds("organization id out of range"))
        }
    }

    pub fn organization_profile(&self, org: OrgId) -> Result<ProfileIndex> {
        self.check_org(org)?;
        Ok(self.employment.predominant_profile(org.row()))
    }

    /// Profiles of all organizations, indexed by graph node.
    pub fn profiles(&self) -> Vec<ProfileIndex> {
        self.organizations()
            .map(|o| self.employment.predominant_profile(o.row()))
            .collect()
    }

    pub fn headcount(&self, org: OrgId) -> u64 {
        self.employment.row_total(org.row())
    }

    /// Number of active networks `org` takes part in.
    pub fn active_cn_count(&self, org: OrgId) -> u32 {
        self.own_cns[org.node()]
    }

    /// Value created by employees: same-profile staff count 1, others `rho`.
    pub fn employee_value(&self, org: OrgId, params: &ModelParams) -> Result<f64> {
        let profile = self.organization_profile(org)?;
        Ok(employee_value_of_row(
            self.employment.row(org.row()),
            profile,
            params.rho,
        ))
    }

    pub fn pair_synergy(&self, i: OrgId, j: OrgId, t: u64, params: &ModelParams) -> Result<f64> {
        self.check_org(i)?;
        self.check_org(j)?;
        if i == j {
            return Err(Error::Domain("pair synergy of an organization with itself"));
        }
        Ok(self.pair_synergy_unchecked(i, j, t, params))
    }

    fn pair_synergy_unchecked(&self, i: OrgId, j: OrgId, t: u64, params: &ModelParams) -> f64 {
        let shared = self.pairs.shared_active(i, j);
        if shared > 0 {
            match params.synergy_count_mode {
                SynergyCountMode::Shared => active_synergy(shared),
                SynergyCountMode::Own => active_synergy(self.own_cns[i.node()]),
            }
        } else {
            fading_synergy(
                params.fade_slope,
                params.fade_duration,
                self.pairs.last_collab_end(i, j) as f64,
                t as f64,
            )
        }
    }

    fn synergy_with_profiles(&self, org: OrgId, t: u64, params: &ModelParams, profiles: &[ProfileIndex]) -> f64 {
        let own = profiles[org.node()];
        self.graph
            .neighbors(org.node())
            .iter()
            .map(|&j| {
                let partner = OrgId::from_node(j);
                let v = self.pair_synergy_unchecked(org, partner, t, params);
                if profiles[j] == own {
                    params.theta_same * v
                } else {
                    v
                }
            })
            .sum()
    }

    /// Synergy summed over all linked partners; same-profile partners are
    /// discounted by `theta_same`.
    pub fn synergy_value(&self, org: OrgId, t: u64, params: &ModelParams) -> Result<f64> {
        self.check_org(org)?;
        Ok(self.synergy_with_profiles(org, t, params, &self.profiles()))
    }

    pub fn organization_value(&self, org: OrgId, t: u64, params: &ModelParams) -> Result<f64> {
        Ok(self.employee_value(org, params)? + params.alpha * self.synergy_value(org, t, params)?)
    }

    /// Values of every organization at step `t`, indexed by graph node.
    pub fn organization_values(&self, t: u64, params: &ModelParams) -> Vec<f64> {
        let profiles = self.profiles();
        self.organizations()
            .map(|o| {
                let ve = employee_value_of_row(self.employment.row(o.row()), profiles[o.node()], params.rho);
                ve + params.alpha * self.synergy_with_profiles(o, t, params, &profiles)
            })
            .collect()
    }

    /// Removes faded links whose synergy has dropped below the threshold.
    /// Links backed by an active shared network are never removed.
    pub fn prune_links(&mut self, t: u64, params: &ModelParams) -> Vec<(OrgId, OrgId)> {
        let doomed: Vec<(OrgId, OrgId)> = self
            .graph
            .edges()
            .map(|(a, b)| (OrgId::from_node(a), OrgId::from_node(b)))
            .filter(|&(i, j)| {
                self.pairs.shared_active(i, j) == 0
                    && fading_synergy(
                        params.fade_slope,
                        params.fade_duration,
                        self.pairs.last_collab_end(i, j) as f64,
                        t as f64,
                    ) < params.fade_threshold
            })
            .collect();
        for &(i, j) in &doomed {
            self.graph
                .remove_link(i.node(), j.node())
                .expect("edge endpoints are valid");
        }
        doomed
    }

    /// Registers a new active network: links every member pair and bumps
    /// the shared counters.
    pub fn activate_cn(&mut self, cn: CollaborativeNetwork) -> Result<()> {
        for &m in &cn.members {
            self.check_org(m)?;
        }
        for (i, j) in cn.pairs() {
            self.graph.add_link(i.node(), j.node())?;
            self.pairs.increment(i, j);
        }
        for &m in &cn.members {
            self.own_cns[m.node()] += 1;
        }
        self.active_cns.push(cn);
        Ok(())
    }

    /// Removes every network whose activity window ended before `t`. Pairs
    /// left without any shared active network start fading at `t`.
    pub fn dissolve_expired(&mut self, t: u64) -> Vec<CollaborativeNetwork> {
        let (expired, active): (Vec<_>, Vec<_>) = core::mem::take(&mut self.active_cns)
            .into_iter()
            .partition(|cn| t > cn.end());
        self.active_cns = active;
        for cn in &expired {
            for (i, j) in cn.pairs() {
                if self.pairs.decrement(i, j) == 0 {
                    self.pairs.set_last_collab_end(i, j, t);
                }
            }
            for &m in &cn.members {
                self.own_cns[m.node()] -= 1;
            }
        }
        expired
    }

    /// Organization-id edge list with `src < dst`.
    pub fn org_edges(&self) -> impl Iterator<Item = (OrgId, OrgId)> + '_ {
        self.graph
            .edges()
            .map(|(a, b)| (OrgId::from_node(a), OrgId::from_node(b)))
    }

    pub fn snapshot(&self) -> Snapshot {
        let mut t_omega = BTreeMap::new();
        let n = self.organization_count();
        for a in 0..n {
            for b in (a + 1)..n {
                let (i, j) = (OrgId::from_node(a), OrgId::from_node(b));
                let t = self.pairs.last_collab_end(i, j);
                if t != 0 {
                    t_omega.insert(format!("{i},{j}"), t);
                }
            }
        }
        Snapshot {
            clock: self.clock,
            edges: self.org_edges().map(|(i, j)| [i, j]).collect(),
            employment: self.employment.to_rows(),
            active_cns: self.active_cns.clone(),
            t_omega,
        }
    }
}

pub(crate) fn employee_value_of_row(row: &[u64], profile: ProfileIndex, rho: f64) -> f64 {
    row.iter()
        .enumerate()
        .map(|(p, &c)| if p == profile { c as f64 } else { rho * c as f64 })
        .sum()
}

/// Serializable view of the state, used for debugging dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub clock: u64,
    pub edges: Vec<[OrgId; 2]>,
    pub employment: Vec<Vec<u64>>,
    pub active_cns: Vec<CollaborativeNetwork>,
    /// `"i,j"` → step at which the pair's last shared network dissolved.
    pub t_omega: BTreeMap<String, u64>,
}

impl EcosystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_orgs < 2 {
            return Err(Error::config("n_orgs", "at least two organizations are required"));
        }
        if self.profile_names.is_empty() {
            return Err(Error::config("n_profiles", "at least one profile is required"));
        }
        if !(self.staffing_sd.is_finite() && self.staffing_sd >= 0.0) {
            return Err(Error::config("staffing_sd", "must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.unemployment_rate) {
            return Err(Error::config("unemployment_rate", "must lie in [0, 1]"));
        }
        let max_links = self.n_orgs * (self.n_orgs - 1) / 2;
        if self.n_links > max_links {
            return Err(Error::config(
                "n_links",
                format!("{} exceeds the {} possible links", self.n_links, max_links),
            ));
        }
        if matches!(self.generator, Generator::BarabasiAlbert | Generator::Mixed) {
            let (m, s) = (self.ba_m_per_node, self.ba_seed_size);
            if m == 0 || s < m || self.n_orgs < s {
                return Err(Error::config(
                    "ba_seed_size",
                    "requires ba_seed_size >= ba_m_per_node >= 1 and n_orgs >= ba_seed_size",
                ));
            }
            let ba_links = s * (s - 1) / 2 + (self.n_orgs - s) * m;
            if ba_links != self.n_links {
                return Err(Error::config(
                    "n_links",
                    format!(
                        "{} differs from the {ba_links} links a Barabási–Albert start produces",
                        self.n_links
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Builds the starting ecosystem: seed network, half-normal staffing and an
/// unemployed pool sized as a share of the initial workforce.
pub fn init_ecosystem<R: Rng + ?Sized>(config: &EcosystemConfig, rng: &mut R) -> Result<EcosystemState> {
    config.validate()?;
    let graph = match config.generator {
        Generator::ErdosRenyi => graph::erdos_renyi(config.n_orgs, config.n_links, rng)?,
        Generator::BarabasiAlbert => {
            graph::barabasi_albert(config.n_orgs, config.ba_m_per_node, config.ba_seed_size, rng)?
        }
        Generator::Mixed => {
            return Err(Error::config(
                "generator",
                "`mixed` must be resolved to er or ba per replicate",
            ))
        }
    };
    let profiles = config.profile_names.len();
    let mut employment = EmploymentMatrix::new(config.n_orgs, profiles);
    let normal =
        Normal::new(0.0, config.staffing_sd).map_err(|_| Error::config("staffing_sd", "invalid standard deviation"))?;
    for row in 1..=config.n_orgs {
        for cell in employment.row_mut(row) {
            *cell = libm::floor(libm::fabs(normal.sample(rng))) as u64;
        }
    }
    let employed = employment.total();
    let unemployed = libm::round(config.unemployment_rate * employed as f64) as u64;
    employment
        .row_mut(0)
        .copy_from_slice(&split_evenly(unemployed, profiles));

    let mut state = EcosystemState::new(graph, employment)?;
    state.profile_names = config.profile_names.clone();
    Ok(state)
}
