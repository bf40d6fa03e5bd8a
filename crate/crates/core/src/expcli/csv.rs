use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::RunSpec;
use crate::error::{Error, Result};
use crate::metrics::{RunSummary, StepMetricsRow};

pub const RUN_CSV_HEADER: &str = "run_id,algorithm,iteration,step,n_susceptible,n_exposed,n_infected,msp,mrd,mc,n_contents,n_fake_contents,n_interactions_step";

pub const SUMMARY_CSV_HEADER: &str = "algorithm,iteration,mean_msp,mean_mrd,mean_mc";

/// Six decimals, `.` separator, and no negative zero.
pub fn format_real(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_run_csv(path: &Path, spec: &RunSpec, rows: &[StepMetricsRow]) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = create(path)?;
    writeln!(w, "{RUN_CSV_HEADER}").map_err(io)?;
    let run_id = spec.run_id();
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            run_id,
            spec.algorithm,
            spec.iteration,
            r.step,
            r.n_susceptible,
            r.n_exposed,
            r.n_infected,
            format_real(r.msp),
            format_real(r.mrd),
            format_real(r.mc),
            r.n_contents,
            r.n_fake_contents,
            r.n_interactions_step
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Per-run rows, then `<algorithm>,ALL,...` averages, then
/// `<algorithm>,RANK,<rank_msp>,<rank_mrd>,<rank_mc>` rows.
pub fn write_summary_csv(path: &Path, runs: &[RunSummary], aggregates: &[RunSummary]) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = create(path)?;
    writeln!(w, "{SUMMARY_CSV_HEADER}").map_err(io)?;
    for s in runs {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.algorithm,
            s.iteration,
            format_real(s.mean_msp),
            format_real(s.mean_mrd),
            format_real(s.mean_mc)
        )
        .map_err(io)?;
    }
    for s in aggregates {
        writeln!(
            w,
            "{},ALL,{},{},{}",
            s.algorithm,
            format_real(s.mean_msp),
            format_real(s.mean_mrd),
            format_real(s.mean_mc)
        )
        .map_err(io)?;
    }
    for s in aggregates {
        let rank = |r: Option<usize>| r.map_or_else(String::new, |r| r.to_string());
        writeln!(
            w,
            "{},RANK,{},{},{}",
            s.algorithm,
            rank(s.rank_msp),
            rank(s.rank_mrd),
            rank(s.rank_mc)
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}
