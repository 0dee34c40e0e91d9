//! Replicated runs over parameter grids and their aggregation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{step, StepReport};
use crate::ecosystem::{init_ecosystem, EcosystemConfig, EcosystemState, Generator, DEFAULT_PROFILE_NAMES};
use crate::error::{Error, Result};
use crate::params::{ModelParams, NUMERIC_PARAMS};
use crate::stats::{geometric_mean, Summary};
use crate::SimRng;

/// One swept parameter and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub generator: Generator,
    pub n_orgs: usize,
    pub n_links: usize,
    pub ba_m_per_node: usize,
    pub ba_seed_size: usize,
    pub n_profiles: usize,
    /// Empty means red, blue, green, then `profileN`.
    pub profile_names: Vec<String>,
    pub staffing_sd: f64,
    pub unemployment_rate: f64,
    pub replicates: u32,
    pub steps: u32,
    pub base_seed: u64,
    pub sweep: Vec<SweepAxis>,
    /// Also measure every `k` steps (diagnostics).
    pub measure_every: Option<u32>,
    pub histogram_bin_width: f64,
    /// Keep the per-step trace of every replicate.
    pub trace: bool,
    /// Keep the final state of every replicate.
    pub export_states: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let eco = EcosystemConfig::default();
        Self {
            model: ModelParams::default(),
            generator: eco.generator,
            n_orgs: eco.n_orgs,
            n_links: eco.n_links,
            ba_m_per_node: eco.ba_m_per_node,
            ba_seed_size: eco.ba_seed_size,
            n_profiles: 3,
            profile_names: Vec::new(),
            staffing_sd: eco.staffing_sd,
            unemployment_rate: eco.unemployment_rate,
            replicates: 25,
            steps: 500,
            base_seed: 1,
            sweep: Vec::new(),
            measure_every: None,
            histogram_bin_width: 10.0,
            trace: false,
            export_states: false,
        }
    }
}

/// One cell of the sweep grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub assignments: Vec<(String, f64)>,
}

impl ExperimentConfig {
    pub fn profile_names(&self) -> Vec<String> {
        if !self.profile_names.is_empty() {
            return self.profile_names.clone();
        }
        (0..self.n_profiles)
            .map(|p| match DEFAULT_PROFILE_NAMES.get(p) {
                Some(name) => (*name).to_string(),
                None => format!("profile{p}"),
            })
            .collect()
    }

    pub fn ecosystem(&self, replicate: u64) -> EcosystemConfig {
        EcosystemConfig {
            generator: self.generator.for_replicate(replicate),
            n_orgs: self.n_orgs,
            n_links: self.n_links,
            ba_m_per_node: self.ba_m_per_node,
            ba_seed_size: self.ba_seed_size,
            profile_names: self.profile_names(),
            staffing_sd: self.staffing_sd,
            unemployment_rate: self.unemployment_rate,
        }
    }

    /// Full validation, including every sweep point's parameter set.
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be >= 1"));
        }
        if self.steps == 0 {
            return Err(Error::config("steps", "must be >= 1"));
        }
        self.validate_structure()
    }

    fn validate_structure(&self) -> Result<()> {
        if self.n_profiles == 0 {
            return Err(Error::config("n_profiles", "must be >= 1"));
        }
        if !self.profile_names.is_empty() && self.profile_names.len() != self.n_profiles {
            return Err(Error::config(
                "profile_names",
                format!(
                    "{} names given for {} profiles",
                    self.profile_names.len(),
                    self.n_profiles
                ),
            ));
        }
        if !(self.histogram_bin_width.is_finite() && self.histogram_bin_width > 0.0) {
            return Err(Error::config("histogram_bin_width", "must be finite and > 0"));
        }
        if self.measure_every == Some(0) {
            return Err(Error::config("measure_every", "must be >= 1"));
        }
        self.ecosystem(0).validate()?;
        for axis in &self.sweep {
            if !NUMERIC_PARAMS.contains(&axis.param.as_str()) {
                return Err(Error::config(
                    "sweep",
                    format!("`{}` is not a numeric model parameter", axis.param),
                ));
            }
            if axis.values.is_empty() {
                return Err(Error::config("sweep", format!("`{}` has no values", axis.param)));
            }
        }
        self.model.validate()?;
        for point in self.sweep_points() {
            self.model_at(&point)?;
        }
        Ok(())
    }

    /// Cartesian product of the sweep axes; the first axis varies slowest.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let mut cells: Vec<Vec<(String, f64)>> = vec![Vec::new()];
        for axis in &self.sweep {
            cells = cells
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut cell = prefix.clone();
                        cell.push((axis.param.clone(), v));
                        cell
                    })
                })
                .collect();
        }
        cells
            .into_iter()
            .enumerate()
            .map(|(index, assignments)| SweepPoint { index, assignments })
            .collect()
    }

    /// Model parameters at a sweep point.
    pub fn model_at(&self, point: &SweepPoint) -> Result<ModelParams> {
        let mut model = self.model.clone();
        for (name, value) in &point.assignments {
            model.set(name, *value)?;
        }
        model.validate()?;
        Ok(model)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one replicate, keyed by position rather than execution order.
pub fn replicate_seed(base_seed: u64, sweep_point: usize, replicate: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ sweep_point as u64) ^ replicate)
}

/// Dependent variables of one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub sweep_point: usize,
    pub replicate: u64,
    pub seed: u64,
    pub generator: Generator,
    pub t: u64,
    pub clustering: f64,
    /// `None` when the network has no links.
    pub avg_path_length: Option<f64>,
    pub employees: Summary,
    pub values: Summary,
    pub unemployed: u64,
}

/// Measures the dependent variables on `state` at its current clock.
pub fn measure(
    state: &EcosystemState,
    params: &ModelParams,
    bin_width: f64,
    sweep_point: usize,
    replicate: u64,
    seed: u64,
    generator: Generator,
) -> MetricsRecord {
    let headcounts: Vec<f64> = state.organizations().map(|o| state.headcount(o) as f64).collect();
    let values = state.organization_values(state.clock, params);
    MetricsRecord {
        sweep_point,
        replicate,
        seed,
        generator,
        t: state.clock,
        clustering: state.graph.clustering_coefficient(),
        avg_path_length: state.graph.average_path_length().ok(),
        employees: Summary::of(&headcounts, bin_width),
        values: Summary::of(&values, bin_width),
        unemployed: state.employment.row_total(0),
    }
}

/// Everything one replicate produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub record: MetricsRecord,
    /// Periodic measurements, when enabled.
    pub periodic: Vec<MetricsRecord>,
    /// Per-step reports, when tracing is enabled (quit events stripped).
    pub trace: Vec<StepReport>,
    pub final_state: Option<EcosystemState>,
    /// Headcount (employed plus unemployed) of the initial ecosystem.
    pub initial_people: u64,
}

/// Builds, steps and measures one replicate of one sweep point.
pub fn run_replicate(config: &ExperimentConfig, point: &SweepPoint, replicate: u64) -> Result<ReplicateOutcome> {
    config.validate_structure()?;
    let params = config.model_at(point)?;
    let seed = replicate_seed(config.base_seed, point.index, replicate);
    let mut rng = SimRng::seed_from_u64(seed);
    let eco = config.ecosystem(replicate);
    let mut state = init_ecosystem(&eco, &mut rng)?;
    let initial_people = state.employment.total();
    let width = config.histogram_bin_width;
    let mut periodic = Vec::new();
    let mut trace = Vec::new();
    for _ in 0..config.steps {
        let mut report = step(&mut state, &params, &mut rng)?;
        if config.trace {
            report.quit_events.clear();
            trace.push(report);
        }
        if let Some(k) = config.measure_every {
            if state.clock % k as u64 == 0 {
                periodic.push(measure(
                    &state,
                    &params,
                    width,
                    point.index,
                    replicate,
                    seed,
                    eco.generator,
                ));
            }
        }
    }
    let record = measure(&state, &params, width, point.index, replicate, seed, eco.generator);
    Ok(ReplicateOutcome {
        record,
        periodic,
        trace,
        final_state: config.export_states.then_some(state),
        initial_people,
    })
}

/// Geometric means of one sweep point's scalar metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub sweep_point: usize,
    pub params: BTreeMap<String, f64>,
    pub generator: String,
    pub replicates: usize,
    pub clustering: f64,
    pub avg_path_length: Option<f64>,
    pub emp_mean: f64,
    pub emp_median: f64,
    pub emp_max: f64,
    pub val_mean: f64,
    pub val_median: f64,
    pub val_max: f64,
    pub unemployed: f64,
}

pub fn aggregate(point: &SweepPoint, generator: Generator, records: &[MetricsRecord]) -> Result<AggregateRecord> {
    let gm = |f: &dyn Fn(&MetricsRecord) -> f64| -> Result<f64> {
        geometric_mean(&records.iter().map(f).collect::<Vec<_>>())
    };
    let apls: Vec<f64> = records.iter().filter_map(|r| r.avg_path_length).collect();
    Ok(AggregateRecord {
        sweep_point: point.index,
        params: point.assignments.iter().cloned().collect(),
        generator: generator.name().to_string(),
        replicates: records.len(),
        clustering: gm(&|r| r.clustering)?,
        avg_path_length: if apls.is_empty() {
            None
        } else {
            Some(geometric_mean(&apls)?)
        },
        emp_mean: gm(&|r| r.employees.mean)?,
        emp_median: gm(&|r| r.employees.median)?,
        emp_max: gm(&|r| r.employees.max)?,
        val_mean: gm(&|r| r.values.mean)?,
        val_median: gm(&|r| r.values.median)?,
        val_max: gm(&|r| r.values.max)?,
        unemployed: gm(&|r| r.unemployed as f64)?,
    })
}

/// Pooled histogram of one sweep point: bin → (employee count, value count).
pub fn pooled_histogram(records: &[MetricsRecord]) -> BTreeMap<u64, (u64, u64)> {
    let mut out: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for r in records {
        for (&bin, &c) in &r.employees.histogram {
            out.entry(bin).or_default().0 += c;
        }
        for (&bin, &c) in &r.values.histogram {
            out.entry(bin).or_default().1 += c;
        }
    }
    out
}

/// Outcomes of a full experiment, ordered by (sweep point, replicate).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResults {
    pub points: Vec<SweepPoint>,
    pub outcomes: Vec<ReplicateOutcome>,
    pub aggregates: Vec<AggregateRecord>,
}

impl ExperimentResults {
    /// Sorts outcomes and aggregates each sweep point. Outcomes may arrive
    /// in any order.
    pub fn collect(config: &ExperimentConfig, mut outcomes: Vec<ReplicateOutcome>) -> Result<Self> {
        outcomes.sort_by_key(|o| (o.record.sweep_point, o.record.replicate));
        let points = config.sweep_points();
        let mut aggregates = Vec::with_capacity(points.len());
        for point in &points {
            let records: Vec<MetricsRecord> = outcomes
                .iter()
                .filter(|o| o.record.sweep_point == point.index)
                .map(|o| o.record.clone())
                .collect();
            aggregates.push(aggregate(point, config.generator, &records)?);
        }
        Ok(Self {
            points,
            outcomes,
            aggregates,
        })
    }

    pub fn records(&self, sweep_point: usize) -> Vec<MetricsRecord> {
        self.outcomes
            .iter()
            .filter(|o| o.record.sweep_point == sweep_point)
            .map(|o| o.record.clone())
            .collect()
    }
}

/// Every (sweep point, replicate) job of a configuration.
pub fn jobs(config: &ExperimentConfig) -> Vec<(SweepPoint, u64)> {
    config
        .sweep_points()
        .into_iter()
        .flat_map(|p| (0..config.replicates as u64).map(move |r| (p.clone(), r)))
        .collect()
}

/// Sequential driver; the std companion crate offers a parallel one.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    config.validate()?;
    let outcomes = jobs(config)
        .iter()
        .map(|(p, r)| run_replicate(config, p, *r))
        .collect::<Result<Vec<_>>>()?;
    ExperimentResults::collect(config, outcomes)
}
