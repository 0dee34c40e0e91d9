//! Per-step evolution: collaborative-network lifecycle and worker mobility.
//!
//! A step runs in a fixed order: advance the clock, dissolve expired
//! networks, let each organization (ascending id) try to create a network,
//! prune faded links, then run hire/fire/quit for each organization. The
//! random stream is consumed in exactly that order.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ecosystem::{CollaborativeNetwork, EcosystemState, OrgId, ProfileIndex};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Guard against division by a zero organization value.
pub const VALUE_EPSILON: f64 = 1e-9;

/// One quit move, with the context needed to audit destination choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuitEvent {
    pub source: OrgId,
    pub destination: OrgId,
    pub profile: ProfileIndex,
    pub destination_profile: ProfileIndex,
    /// The worker drew the local preference and the source had neighbors.
    pub local_applied: bool,
    /// The worker drew the profile preference and a matching candidate existed.
    pub profile_applied: bool,
    pub local_drawn: bool,
    pub profile_drawn: bool,
    pub destination_is_neighbor: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub t: u64,
    pub created_cns: u32,
    pub dissolved_cns: u32,
    /// Per profile.
    pub hires: Vec<u64>,
    pub fires: Vec<u64>,
    pub quits: Vec<u64>,
    pub pruned_links: u32,
    pub edges: usize,
    pub active_cns: usize,
    pub quit_events: Vec<QuitEvent>,
}

impl StepReport {
    fn new(t: u64, profiles: usize) -> Self {
        Self {
            t,
            hires: vec![0; profiles],
            fires: vec![0; profiles],
            quits: vec![0; profiles],
            ..Self::default()
        }
    }

    pub fn total_hires(&self) -> u64 {
        self.hires.iter().sum()
    }

    pub fn total_fires(&self) -> u64 {
        self.fires.iter().sum()
    }

    pub fn total_quits(&self) -> u64 {
        self.quits.iter().sum()
    }
}

fn clamp_unit(p: f64) -> f64 {
    if p.is_nan() {
        0.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

pub fn hire_rate(kappa: f64, value: f64, headcount: u64) -> f64 {
    clamp_unit(kappa * value / (headcount as f64 + 1.0))
}

pub fn fire_rate(kappa: f64, value: f64, headcount: u64) -> f64 {
    clamp_unit(kappa * headcount as f64 / value.max(VALUE_EPSILON))
}

/// `None` neighbor mean means the organization has no neighbors.
pub fn quit_rate(kappa: f64, value: f64, neighbor_mean: Option<f64>) -> f64 {
    match neighbor_mean {
        None => 0.0,
        Some(mean) => clamp_unit(kappa * mean / value.max(VALUE_EPSILON)),
    }
}

pub fn hire_probability(state: &EcosystemState, org: OrgId, params: &ModelParams) -> Result<f64> {
    let v = state.organization_value(org, state.clock, params)?;
    Ok(hire_rate(params.kappa_hire, v, state.headcount(org)))
}

pub fn fire_probability(state: &EcosystemState, org: OrgId, params: &ModelParams) -> Result<f64> {
    let v = state.organization_value(org, state.clock, params)?;
    Ok(fire_rate(params.kappa_fire, v, state.headcount(org)))
}

fn neighbor_mean(state: &EcosystemState, org: OrgId, values: &[f64]) -> Option<f64> {
    let nb = state.graph.neighbors(org.node());
    if nb.is_empty() {
        None
    } else {
        Some(nb.iter().map(|&j| values[j]).sum::<f64>() / nb.len() as f64)
    }
}

pub fn quit_probability(state: &EcosystemState, org: OrgId, params: &ModelParams) -> Result<f64> {
    state.organization_profile(org)?;
    let values = state.organization_values(state.clock, params);
    Ok(quit_rate(
        params.kappa_quit,
        values[org.node()],
        neighbor_mean(state, org, &values),
    ))
}

/// Removes up to `k` uniformly chosen elements from `pool`.
fn draw<R: Rng + ?Sized>(rng: &mut R, pool: &mut Vec<usize>, k: usize, out: &mut Vec<usize>) -> usize {
    let take = k.min(pool.len());
    for _ in 0..take {
        let i = rng.random_range(0..pool.len());
        out.push(pool.swap_remove(i));
    }
    k - take
}

/// Picks the members of a new network created by `creator`.
///
/// Candidates are the creator's order-2 neighborhood plus organizations
/// admitted independently with probability `pi_random`. A share `pi_same`
/// of the invited slots goes to same-profile candidates, the rest to
/// different-profile ones; an exhausted stratum borrows from the other,
/// and any remaining shortfall is drawn from all organizations.
pub fn select_cn_members<R: Rng + ?Sized>(
    state: &EcosystemState,
    creator: OrgId,
    target_size: usize,
    params: &ModelParams,
    rng: &mut R,
) -> Result<Vec<OrgId>> {
    if target_size < 2 {
        return Err(Error::Domain("a collaborative network needs at least two members"));
    }
    let n = state.organization_count();
    let c = creator.node();
    let profiles = state.profiles();
    let mut in_pool = vec![false; n];
    for v in state.graph.neighbors_within(c, 2)? {
        in_pool[v] = true;
    }
    for (v, flag) in in_pool.iter_mut().enumerate() {
        if v != c && !*flag && rng.random_bool(params.pi_random) {
            *flag = true;
        }
    }
    let (mut same, mut diff): (Vec<usize>, Vec<usize>) = (0..n)
        .filter(|&v| in_pool[v])
        .partition(|&v| profiles[v] == profiles[c]);

    let slots = target_size.min(n) - 1;
    let want_same = (libm::round(params.pi_same * slots as f64) as usize).min(slots);
    let want_diff = slots - want_same;

    let mut chosen = Vec::with_capacity(slots + 1);
    let short_same = draw(rng, &mut same, want_same, &mut chosen);
    let short_diff = draw(rng, &mut diff, want_diff, &mut chosen);
    let mut short = draw(rng, &mut diff, short_same, &mut chosen);
    short += draw(rng, &mut same, short_diff, &mut chosen);
    if short > 0 {
        chosen.push(c);
        let mut rest: Vec<usize> = (0..n).filter(|v| !chosen.contains(v)).collect();
        chosen.pop();
        draw(rng, &mut rest, short, &mut chosen);
    }
    chosen.push(c);
    let mut members: Vec<OrgId> = chosen.into_iter().map(OrgId::from_node).collect();
    members.sort_unstable();
    Ok(members)
}

/// With probability `pi_cn`, creates and activates a network led by `creator`.
pub fn maybe_create_cn<R: Rng + ?Sized>(
    state: &mut EcosystemState,
    creator: OrgId,
    params: &ModelParams,
    rng: &mut R,
) -> Result<Option<CollaborativeNetwork>> {
    state.organization_profile(creator)?;
    if !rng.random_bool(params.pi_cn) {
        return Ok(None);
    }
    let duration = rng.random_range(params.cn_duration_min..=params.cn_duration_max);
    let size = rng.random_range(params.cn_members_min..=params.cn_members_max) as usize;
    let members = select_cn_members(state, creator, size, params, rng)?;
    let cn = CollaborativeNetwork::new(state.clock, duration, members)?;
    state.activate_cn(cn.clone())?;
    Ok(Some(cn))
}

pub fn dissolve_expired(state: &mut EcosystemState, t: u64) -> Vec<CollaborativeNetwork> {
    state.dissolve_expired(t)
}

fn destination_with_context<R: Rng + ?Sized>(
    state: &EcosystemState,
    source: OrgId,
    worker_profile: ProfileIndex,
    profiles: &[ProfileIndex],
    params: &ModelParams,
    rng: &mut R,
) -> Result<QuitEvent> {
    let n = state.organization_count();
    if n < 2 {
        return Err(Error::Domain("no other organization to move to"));
    }
    let src = source.node();
    let local_drawn = rng.random_bool(params.pi_local);
    let profile_drawn = rng.random_bool(params.pi_profile);

    let neighbors = state.graph.neighbors(src);
    let local_applied = local_drawn && !neighbors.is_empty();
    let base: Vec<usize> = if local_applied {
        neighbors.to_vec()
    } else {
        (0..n).filter(|&v| v != src).collect()
    };
    let matching: Vec<usize> = if profile_drawn {
        base.iter()
            .copied()
            .filter(|&v| profiles[v] == worker_profile)
            .collect()
    } else {
        Vec::new()
    };
    let profile_applied = !matching.is_empty();
    let candidates = if profile_applied { &matching } else { &base };
    let dest = candidates[rng.random_range(0..candidates.len())];
    Ok(QuitEvent {
        source,
        destination: OrgId::from_node(dest),
        profile: worker_profile,
        destination_profile: profiles[dest],
        local_applied,
        profile_applied,
        local_drawn,
        profile_drawn,
        destination_is_neighbor: state.graph.has_link(src, dest),
    })
}

/// Destination of a quitting worker.
///
/// Two independent coins decide whether the search is restricted to the
/// source's neighbors (`pi_local`) and to the worker's profile
/// (`pi_profile`). Empty restrictions are relaxed profile first, then
/// locality.
pub fn choose_destination<R: Rng + ?Sized>(
    state: &EcosystemState,
    source: OrgId,
    worker_profile: ProfileIndex,
    params: &ModelParams,
    rng: &mut R,
) -> Result<OrgId> {
    state.organization_profile(source)?;
    let profiles = state.profiles();
    Ok(destination_with_context(state, source, worker_profile, &profiles, params, rng)?.destination)
}

/// Profile of a uniformly drawn member of `row`; the row must be non-empty.
fn proportional_profile<R: Rng + ?Sized>(row: &[u64], rng: &mut R) -> ProfileIndex {
    let total: u64 = row.iter().sum();
    let mut r = rng.random_range(0..total);
    for (p, &c) in row.iter().enumerate() {
        if r < c {
            return p;
        }
        r -= c;
    }
    unreachable!("draw below the row total")
}

fn hire_profile(unemployed: &[u64], preferred: ProfileIndex) -> ProfileIndex {
    if unemployed[preferred] > 0 {
        return preferred;
    }
    let mut best = 0;
    for (p, &c) in unemployed.iter().enumerate() {
        if c > unemployed[best] {
            best = p;
        }
    }
    best
}

/// Hire, fire and quit for every organization in ascending id order, at
/// most one event per channel. Rates use the organization values at the
/// start of the pass.
pub fn mobility_step<R: Rng + ?Sized>(
    state: &mut EcosystemState,
    params: &ModelParams,
    rng: &mut R,
    report: &mut StepReport,
) -> Result<()> {
    let values = state.organization_values(state.clock, params);
    let orgs: Vec<OrgId> = state.organizations().collect();
    for org in orgs {
        let row = org.row();
        let value = values[org.node()];

        if state.employment.row_total(0) > 0 {
            let p = hire_rate(params.kappa_hire, value, state.headcount(org));
            if rng.random_bool(p) {
                let own = state.employment.predominant_profile(row);
                let profile = hire_profile(state.employment.unemployed(), own);
                state.employment.transfer(0, row, profile)?;
                report.hires[profile] += 1;
            }
        }

        let headcount = state.headcount(org);
        if headcount > 0 && rng.random_bool(fire_rate(params.kappa_fire, value, headcount)) {
            let profile = proportional_profile(state.employment.row(row), rng);
            state.employment.transfer(row, 0, profile)?;
            report.fires[profile] += 1;
        }

        if state.headcount(org) > 0 {
            let p = quit_rate(params.kappa_quit, value, neighbor_mean(state, org, &values));
            if p > 0.0 && rng.random_bool(p) {
                let profile = proportional_profile(state.employment.row(row), rng);
                let profiles = state.profiles();
                let event = destination_with_context(state, org, profile, &profiles, params, rng)?;
                state.employment.transfer(row, event.destination.row(), profile)?;
                report.quits[profile] += 1;
                report.quit_events.push(event);
            }
        }
    }
    Ok(())
}

/// Advances the ecosystem by one step.
pub fn step<R: Rng + ?Sized>(state: &mut EcosystemState, params: &ModelParams, rng: &mut R) -> Result<StepReport> {
    state.clock += 1;
    let t = state.clock;
    let mut report = StepReport::new(t, state.employment.profiles());
    report.dissolved_cns = dissolve_expired(state, t).len() as u32;
    let orgs: Vec<OrgId> = state.organizations().collect();
    for org in orgs {
        if maybe_create_cn(state, org, params, rng)?.is_some() {
            report.created_cns += 1;
        }
    }
    report.pruned_links = state.prune_links(t, params).len() as u32;
    mobility_step(state, params, rng, &mut report)?;
    report.edges = state.graph.edge_count();
    report.active_cns = state.active_cns.len();
    Ok(report)
}
