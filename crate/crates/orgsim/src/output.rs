//! Result files. Everything is staged in a temporary directory inside the
//! output directory and renamed into place only once every file is written.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use orgsim_core::dynamics::StepReport;
use orgsim_core::experiment::pooled_histogram;
use orgsim_core::{EcosystemState, ExperimentConfig, ExperimentResults, MetricsRecord};

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub const REPLICATE_HEADER: [&str; 12] = [
    "sweep_point",
    "replicate",
    "seed",
    "clustering",
    "apl",
    "emp_mean",
    "emp_median",
    "emp_max",
    "val_mean",
    "val_median",
    "val_max",
    "unemployed",
];

pub const TRACE_HEADER: [&str; 9] = [
    "t",
    "created_cns",
    "dissolved_cns",
    "hires",
    "fires",
    "quits",
    "pruned_links",
    "edges",
    "active_cns",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn replicate_row(r: &MetricsRecord) -> [String; 12] {
    [
        r.sweep_point.to_string(),
        r.replicate.to_string(),
        r.seed.to_string(),
        r.clustering.to_string(),
        opt(r.avg_path_length),
        r.employees.mean.to_string(),
        r.employees.median.to_string(),
        r.employees.max.to_string(),
        r.values.mean.to_string(),
        r.values.median.to_string(),
        r.values.max.to_string(),
        r.unemployed.to_string(),
    ]
}

/// Per-replicate metrics CSV.
pub fn write_replicates<W: Write>(w: W, records: &[MetricsRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(REPLICATE_HEADER)?;
    for r in records {
        out.write_record(replicate_row(r))?;
    }
    out.flush()?;
    Ok(())
}

/// Periodic measurements: the replicate columns plus the step.
pub fn write_periodic<W: Write>(w: W, records: &[MetricsRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t"];
    header.extend(REPLICATE_HEADER);
    out.write_record(&header)?;
    for r in records {
        let mut row = vec![r.t.to_string()];
        row.extend(replicate_row(r));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Pooled histogram of one sweep point: `bin,employee_count,value_count`.
pub fn write_histogram<W: Write>(w: W, records: &[MetricsRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["bin", "employee_count", "value_count"])?;
    for (bin, (emp, val)) in pooled_histogram(records) {
        out.write_record([bin.to_string(), emp.to_string(), val.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Per-step trace of one replicate.
pub fn write_trace<W: Write>(w: W, reports: &[StepReport]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRACE_HEADER)?;
    for r in reports {
        out.write_record([
            r.t.to_string(),
            r.created_cns.to_string(),
            r.dissolved_cns.to_string(),
            r.total_hires().to_string(),
            r.total_fires().to_string(),
            r.total_quits().to_string(),
            r.pruned_links.to_string(),
            r.edges.to_string(),
            r.active_cns.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Undirected edge list `src,dst` with `src < dst`.
pub fn write_edge_list<W: Write, I: IntoIterator<Item = (u64, u64)>>(w: W, edges: I) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["src", "dst"])?;
    for (a, b) in edges {
        let (src, dst) = if a < b { (a, b) } else { (b, a) };
        out.write_record([src.to_string(), dst.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Edge list of an ecosystem's network, in organization ids.
pub fn write_ecosystem_edges<W: Write>(w: W, state: &EcosystemState) -> csv::Result<()> {
    write_edge_list(w, state.org_edges().map(|(i, j)| (i.0 as u64, j.0 as u64)))
}

/// Pretty JSON state dump.
pub fn snapshot_json(state: &EcosystemState) -> String {
    serde_json::to_string_pretty(&state.snapshot()).expect("snapshot serializes")
}

struct Staging {
    dir: tempfile::TempDir,
    files: Vec<String>,
}

impl Staging {
    fn csv<F>(&mut self, name: String, f: F) -> Result<(), OutputError>
    where
        F: FnOnce(fs::File) -> csv::Result<()>,
    {
        let path = self.dir.path().join(&name);
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        f(file).map_err(|source| OutputError::Csv { path, source })?;
        self.files.push(name);
        Ok(())
    }

    fn text(&mut self, name: String, text: &str) -> Result<(), OutputError> {
        let path = self.dir.path().join(&name);
        fs::write(&path, text).map_err(io_err(&path))?;
        self.files.push(name);
        Ok(())
    }
}

/// Writes every result file into `out_dir`, creating it if needed.
/// Returns the final paths. On error no result file is left behind.
pub fn write_outputs(
    config: &ExperimentConfig,
    results: &ExperimentResults,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let dir = tempfile::Builder::new()
        .prefix(".orgsim-staging-")
        .tempdir_in(out_dir)
        .map_err(io_err(out_dir))?;
    let mut staging = Staging { dir, files: Vec::new() };

    let records: Vec<MetricsRecord> = results.outcomes.iter().map(|o| o.record.clone()).collect();
    staging.csv("replicates.csv".into(), |f| write_replicates(f, &records))?;
    let aggregate = serde_json::to_string_pretty(&results.aggregates).expect("aggregates serialize");
    staging.text("aggregate.json".into(), &(aggregate + "\n"))?;
    for point in &results.points {
        let recs = results.records(point.index);
        staging.csv(format!("histogram_point{}.csv", point.index), |f| {
            write_histogram(f, &recs)
        })?;
    }
    if config.measure_every.is_some() {
        let periodic: Vec<MetricsRecord> = results.outcomes.iter().flat_map(|o| o.periodic.clone()).collect();
        staging.csv("periodic.csv".into(), |f| write_periodic(f, &periodic))?;
    }
    for o in &results.outcomes {
        let tag = format!("point{}_rep{}", o.record.sweep_point, o.record.replicate);
        if config.trace {
            staging.csv(format!("trace_{tag}.csv"), |f| write_trace(f, &o.trace))?;
        }
        if let Some(state) = &o.final_state {
            staging.text(format!("state_{tag}.json"), &(snapshot_json(state) + "\n"))?;
            staging.csv(format!("edges_{tag}.csv"), |f| write_ecosystem_edges(f, state))?;
        }
    }
    let resolved = serde_json::to_string_pretty(config).expect("config serializes");
    staging.text("config.json".into(), &(resolved + "\n"))?;

    let mut done: Vec<PathBuf> = Vec::with_capacity(staging.files.len());
    for name in &staging.files {
        let from = staging.dir.path().join(name);
        let to = out_dir.join(name);
        if let Err(source) = fs::rename(&from, &to) {
            for p in &done {
                let _ = fs::remove_file(p);
            }
            return Err(OutputError::Io { path: to, source });
        }
        done.push(to);
    }
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use orgsim_core::Graph;

    #[test]
    fn edge_list_format() {
        let g = Graph::from_edges(4, &[(2, 0), (1, 3)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, g.edges().map(|(a, b)| (a as u64, b as u64))).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "src,dst\n0,2\n1,3\n");
        let mut buf = Vec::new();
        write_edge_list(&mut buf, [(5, 1)]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "src,dst\n1,5\n");
    }

    #[test]
    fn trace_header() {
        let mut buf = Vec::new();
        write_trace(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,created_cns,dissolved_cns,hires,fires,quits,pruned_links,edges,active_cns\n"
        );
    }
}
