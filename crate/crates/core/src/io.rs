//! File formats.
//!
//! Every CSV starts with a header row and prints numbers with 12
//! significant digits, so identical runs give byte-identical files.
//! Summaries are JSON, written with full precision so they can be read
//! back for bound checks.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundReport, FactorBound, Outcome};
use crate::dynamics::{IntegratorOptions, Trajectory};
use crate::error::{Error, Result};
use crate::experiments::{QuasistaticRow, SweepTable};
use crate::model::{Protocol, SystemParams};
use crate::oracle::DeviationReport;
use crate::thermo::{self, ResetSummary};

/// Version stamped into summaries and required in config documents.
pub const SCHEMA_VERSION: u32 = 1;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const BOUNDS_FILE: &str = "bounds.csv";
pub const FIG2A_FILE: &str = "fig2a.csv";
pub const FIG2B_FILE: &str = "fig2b.csv";
pub const FIG3_FILE: &str = "fig3.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const QUASISTATIC_FILE: &str = "quasistatic.csv";
pub const ORACLE_FILE: &str = "oracle.csv";

/// `x` with 12 significant digits, `%.12g` style: fixed notation for
/// exponents in [-4, 12), scientific otherwise, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        trim_zeros(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::config(format!("malformed CSV: {other:?}")),
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

/// Create `dir` if needed and fail early if it cannot hold files.
pub fn ensure_output_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| {
        Error::config(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })?;
    let probe = dir.join(".write-probe");
    File::create(&probe)
        .and_then(|_| std::fs::remove_file(&probe))
        .map_err(|e| {
            Error::config(format!(
                "output directory {} is not writable: {e}",
                dir.display()
            ))
        })
}

/// Open `dir/name`, hand a buffered writer to `body`, flush.
pub fn write_file<F>(dir: &Path, name: &str, body: F) -> Result<PathBuf>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(path)
}

/// Columns: t, [p_0 .. p_N], epsilon, zeta, heat_acc, ep_acc,
/// activity_integral.
pub fn write_trajectory_csv(w: &mut dyn Write, traj: &Trajectory, emit_states: bool) -> Result<()> {
    let mut out = writer(w);
    let mut header = vec!["t".to_string()];
    if emit_states {
        header.extend((0..=traj.n_qubits).map(|n| format!("p_{n}")));
    }
    header.extend(["epsilon", "zeta", "heat_acc", "ep_acc", "activity_integral"].map(String::from));
    out.write_record(&header).map_err(csv_err)?;
    for k in 0..traj.len() {
        let s = &traj.states[k];
        let mut rec = vec![fmt_num(traj.times[k])];
        if emit_states {
            rec.extend(s.probs().iter().map(|&p| fmt_num(p)));
        }
        rec.extend([
            fmt_num(thermo::error_probability(s)),
            fmt_num(thermo::zeta(s)),
            fmt_num(traj.heat_acc[k]),
            fmt_num(traj.ep_acc[k]),
            fmt_num(traj.activity_integral[k]),
        ]);
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// The columns of a trajectory file needed to re-check bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampledSeries {
    pub times: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub zeta: Vec<f64>,
}

pub fn read_trajectory_csv(path: &Path) -> Result<SampledSeries> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::config(format!("{}: missing column {name}", path.display())))
    };
    let (it, ie, iz) = (col("t")?, col("epsilon")?, col("zeta")?);
    let mut series = SampledSeries::default();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i).and_then(|v| v.parse().ok()).ok_or_else(|| {
                Error::config(format!(
                    "{}: bad number on data row {}",
                    path.display(),
                    line + 1
                ))
            })
        };
        series.times.push(num(it)?);
        series.epsilon.push(num(ie)?);
        series.zeta.push(num(iz)?);
    }
    Ok(series)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub schema_version: u32,
    pub generator: String,
    pub params: SystemParams,
    pub protocol: Protocol,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub samples: usize,
}

impl RunMetadata {
    pub fn new(
        params: &SystemParams,
        protocol: &Protocol,
        opts: &IntegratorOptions,
        traj: &Trajectory,
    ) -> Self {
        RunMetadata {
            schema_version: SCHEMA_VERSION,
            generator: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).into(),
            params: *params,
            protocol: protocol.clone(),
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            accepted_steps: traj.stats.accepted,
            rejected_steps: traj.stats.rejected,
            samples: traj.len(),
        }
    }
}

/// The seven summary values at top level plus a `metadata` object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    #[serde(flatten)]
    pub summary: ResetSummary,
    pub metadata: RunMetadata,
}

pub fn write_summary_json(w: &mut dyn Write, doc: &SummaryDocument) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, doc).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    writeln!(w)?;
    Ok(())
}

pub fn read_summary_json(path: &Path) -> Result<SummaryDocument> {
    let text = std::fs::read_to_string(path)?;
    let doc: SummaryDocument = serde_json::from_str(&text)
        .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
    if doc.metadata.schema_version != SCHEMA_VERSION {
        return Err(Error::config(format!(
            "{}: schema_version {} is not supported (expected {SCHEMA_VERSION})",
            path.display(),
            doc.metadata.schema_version
        )));
    }
    Ok(doc)
}

fn outcome_cell(o: &Outcome) -> &'static str {
    match o {
        Outcome::Pass => "true",
        Outcome::Fail => "false",
        Outcome::NotApplicable(_) => "n/a",
    }
}

/// Columns: name, N, protocol, lhs, rhs, margin, satisfied.
pub fn write_bounds_csv<'a, I>(w: &mut dyn Write, reports: I) -> Result<()>
where
    I: IntoIterator<Item = &'a BoundReport>,
{
    let mut out = writer(w);
    out.write_record(["name", "N", "protocol", "lhs", "rhs", "margin", "satisfied"])
        .map_err(csv_err)?;
    for r in reports {
        out.write_record([
            r.name.to_string(),
            r.context.n_qubits.to_string(),
            r.context.protocol.clone(),
            fmt_num(r.lhs),
            fmt_num(r.rhs),
            fmt_num(r.margin),
            outcome_cell(&r.outcome).to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Columns: N, protocol, epsilon.
pub fn write_fig2a_csv(w: &mut dyn Write, table: &SweepTable) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["N", "protocol", "epsilon"])
        .map_err(csv_err)?;
    for row in &table.rows {
        if let Some(s) = row.summary() {
            out.write_record([
                row.n_qubits.to_string(),
                row.protocol.clone(),
                fmt_num(s.epsilon_final),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Columns: N, protocol, heat_per_qubit, landauer_per_qubit.
pub fn write_fig2b_csv(w: &mut dyn Write, table: &SweepTable) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["N", "protocol", "heat_per_qubit", "landauer_per_qubit"])
        .map_err(csv_err)?;
    for row in &table.rows {
        if let Some(s) = row.summary() {
            out.write_record([
                row.n_qubits.to_string(),
                row.protocol.clone(),
                fmt_num(s.heat_per_qubit),
                fmt_num(bounds::landauer_per_qubit(&row.params)),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Columns: N, protocol, F, bound_N, bound_1. F is `nan` when undefined.
pub fn write_fig3_csv(w: &mut dyn Write, table: &SweepTable) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["N", "protocol", "F", "bound_N", "bound_1"])
        .map_err(csv_err)?;
    for row in &table.rows {
        if let Some(s) = row.summary() {
            out.write_record([
                row.n_qubits.to_string(),
                row.protocol.clone(),
                fmt_num(s.reset_factor.unwrap_or(f64::NAN)),
                fmt_num(bounds::reset_factor_bound(
                    &row.params,
                    FactorBound::Collective,
                )),
                fmt_num(bounds::reset_factor_bound(
                    &row.params,
                    FactorBound::SingleQubit,
                )),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Every sweep row with its full summary; failed rows carry the error.
pub fn write_sweep_csv(w: &mut dyn Write, table: &SweepTable) -> Result<()> {
    let mut out = writer(w);
    out.write_record([
        "N",
        "protocol",
        "epsilon",
        "heat_total",
        "heat_per_qubit",
        "distance",
        "avg_activity",
        "entropy_production",
        "F",
        "status",
    ])
    .map_err(csv_err)?;
    for row in &table.rows {
        let mut rec = vec![row.n_qubits.to_string(), row.protocol.clone()];
        match &row.result {
            Ok(r) => {
                let s = &r.summary;
                rec.extend(
                    [
                        s.epsilon_final,
                        s.heat_total,
                        s.heat_per_qubit,
                        s.distance,
                        s.avg_activity,
                        s.entropy_production,
                        s.reset_factor.unwrap_or(f64::NAN),
                    ]
                    .map(fmt_num),
                );
                rec.push("ok".into());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n("nan".to_string(), 7));
                rec.push(e.to_string());
            }
        }
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Columns: tau, heat_total, landauer, relative_excess, epsilon_final,
/// perfect_reset.
pub fn write_quasistatic_csv(w: &mut dyn Write, rows: &[QuasistaticRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record([
        "tau",
        "heat_total",
        "landauer",
        "relative_excess",
        "epsilon_final",
        "perfect_reset",
    ])
    .map_err(csv_err)?;
    for r in rows {
        out.write_record([
            fmt_num(r.tau),
            fmt_num(r.heat_total),
            fmt_num(r.landauer),
            fmt_num(r.relative_excess),
            fmt_num(r.epsilon_final),
            r.perfect_reset.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Columns: N, protocol, max_population_deviation, heat_deviation,
/// max_leakage.
pub fn write_oracle_csv(w: &mut dyn Write, rows: &[(String, DeviationReport)]) -> Result<()> {
    let mut out = writer(w);
    out.write_record([
        "N",
        "protocol",
        "max_population_deviation",
        "heat_deviation",
        "max_leakage",
    ])
    .map_err(csv_err)?;
    for (protocol, r) in rows {
        out.write_record([
            r.n_qubits.to_string(),
            protocol.clone(),
            fmt_num(r.max_population_deviation),
            fmt_num(r.heat_deviation),
            fmt_num(r.max_leakage),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(1024.0), "1024");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(1.5e-9), "1.5e-9");
        assert_eq!(fmt_num(2.5e-5), "2.5e-5");
        assert_eq!(fmt_num(2.5e-4), "0.00025");
        assert_eq!(fmt_num(0.99999999999999), "1");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn formatted_values_round_trip_to_twelve_digits() {
        for x in [std::f64::consts::PI, 1e-7 / 3.0, 6.02214076e23, -0.146056] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-12, "{x}");
        }
    }

    #[test]
    fn trajectory_csv_layout() {
        let p = SystemParams::unit(2).unwrap();
        let opts = IntegratorOptions::default().with_grid(vec![0.0, 0.5, 1.0]);
        let traj = integrate(&p, &Protocol::benchmark_quench(&p), &opts).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "t,p_0,p_1,p_2,epsilon,zeta,heat_acc,ep_acc,activity_integral"
        );
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0.333333333333,"));

        let mut bare = Vec::new();
        write_trajectory_csv(&mut bare, &traj, false).unwrap();
        assert!(String::from_utf8(bare)
            .unwrap()
            .starts_with("t,epsilon,zeta,heat_acc,ep_acc,activity_integral\n"));
    }

    #[test]
    fn summary_round_trip() {
        let p = SystemParams::unit(1).unwrap();
        let prot = Protocol::benchmark_quench(&p);
        let opts = IntegratorOptions::default();
        let traj = integrate(&p, &prot, &opts).unwrap();
        let doc = SummaryDocument {
            summary: thermo::summarize(&traj, &p).unwrap(),
            metadata: RunMetadata::new(&p, &prot, &opts, &traj),
        };
        let mut buf = Vec::new();
        write_summary_json(&mut buf, &doc).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        for key in [
            "epsilon_final",
            "heat_total",
            "heat_per_qubit",
            "distance",
            "avg_activity",
            "entropy_production",
            "reset_factor",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["metadata"]["protocol"]["kind"], "quench");
        let back: SummaryDocument = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn undefined_reset_factor_is_null() {
        let p = SystemParams::unit(2).unwrap();
        let prot = Protocol::idle(1.0).unwrap();
        let opts = IntegratorOptions::default();
        let traj = integrate(&p, &prot, &opts).unwrap();
        let doc = SummaryDocument {
            summary: thermo::summarize(&traj, &p).unwrap(),
            metadata: RunMetadata::new(&p, &prot, &opts, &traj),
        };
        let mut buf = Vec::new();
        write_summary_json(&mut buf, &doc).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(v["reset_factor"].is_null());
        let back: SummaryDocument = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back.summary.reset_factor, None);
    }
}
