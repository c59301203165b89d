//! TOML documents read by the command line.
//!
//! A run config:
//!
//! ```toml
//! schema_version = 1
//!
//! [params]
//! n_qubits = 4
//! beta = 1.0
//! gamma0 = 1.0
//! tau = 1.0
//!
//! [protocol]
//! kind = "linear"     # quench | linear | exponential | idle | tabulated
//! rate_coeff = 1.0    # omitted parameters take the benchmark values
//!
//! [integrator]
//! rel_tol = 1e-8
//! abs_tol = 1e-12
//! max_steps = 500000
//! samples = 101       # uniform output grid; omit to record every step
//!
//! [output]
//! path = "out"
//! emit_states = true
//! ```
//!
//! Every section and key is optional except `schema_version`. A protocol
//! file holds `schema_version` and a `[protocol]` table only. A sweep spec
//! replaces `[protocol]` by an array of `[[protocols]]` tables and adds
//! `n_values = [...]`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dynamics::IntegratorOptions;
use crate::error::{Error, Result};
use crate::io::SCHEMA_VERSION;
use crate::model::{Protocol, ProtocolKind, SystemParams};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub n_qubits: Option<usize>,
    pub beta: Option<f64>,
    pub gamma0: Option<f64>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub kind: String,
    pub omega: Option<f64>,
    pub rate_coeff: Option<f64>,
    pub scale: Option<f64>,
    pub rate: Option<f64>,
    pub points: Option<Vec<(f64, f64)>>,
    pub duration: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_steps: Option<usize>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub emit_states: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDocument {
    pub schema_version: u32,
    #[serde(default)]
    pub params: ParamsSection,
    pub protocol: Option<ProtocolSection>,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolDocument {
    pub schema_version: u32,
    pub protocol: ProtocolSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDocument {
    pub schema_version: u32,
    pub n_values: Option<Vec<usize>>,
    #[serde(default)]
    pub params: ParamsSection,
    pub protocols: Option<Vec<ProtocolSection>>,
    #[serde(default)]
    pub integrator: IntegratorSection,
}

/// Fully resolved single-run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub protocol: Protocol,
    pub integrator: IntegratorOptions,
    pub output_path: PathBuf,
    pub emit_states: bool,
}

fn check_version(found: u32, origin: &Path) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "{}: schema_version {found} is not supported (expected {SCHEMA_VERSION})",
            origin.display()
        )));
    }
    Ok(())
}

fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str, origin: &Path) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", origin.display())))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_run_document(text: &str, origin: &Path) -> Result<RunDocument> {
    let doc: RunDocument = parse_toml(text, origin)?;
    check_version(doc.schema_version, origin)?;
    Ok(doc)
}

pub fn load_run_document(path: &Path) -> Result<RunDocument> {
    parse_run_document(&read(path)?, path)
}

pub fn load_sweep_document(path: &Path) -> Result<SweepDocument> {
    let doc: SweepDocument = parse_toml(&read(path)?, path)?;
    check_version(doc.schema_version, path)?;
    Ok(doc)
}

/// A `.csv` file is read as `t,omega` rows of a tabulated schedule; any
/// other file as a TOML protocol document.
pub fn load_protocol_file(path: &Path, params: &SystemParams) -> Result<Protocol> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let points = read_points_csv(path)?;
        return Protocol::tabulated(points, params.tau);
    }
    let doc: ProtocolDocument = parse_toml(&read(path)?, path)?;
    check_version(doc.schema_version, path)?;
    doc.protocol.resolve(params)
}

fn read_points_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let bad = |what: String| Error::Config(format!("{}: {what}", path.display()));
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "omega" {
        return Err(bad("expected header `t,omega`".into()));
    }
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| bad(format!("not a number: {:?}", &rec[i])))
        };
        points.push((num(0)?, num(1)?));
    }
    Ok(points)
}

impl ParamsSection {
    /// Fill unset fields from `fallback`.
    pub fn or(&self, fallback: &ParamsSection) -> ParamsSection {
        ParamsSection {
            n_qubits: self.n_qubits.or(fallback.n_qubits),
            beta: self.beta.or(fallback.beta),
            gamma0: self.gamma0.or(fallback.gamma0),
            tau: self.tau.or(fallback.tau),
        }
    }

    /// Unset fields default to N = 1, beta = gamma0 = tau = 1.
    pub fn resolve(&self) -> Result<SystemParams> {
        SystemParams::new(
            self.n_qubits.unwrap_or(1),
            self.beta.unwrap_or(1.0),
            self.gamma0.unwrap_or(1.0),
            self.tau.unwrap_or(1.0),
        )
    }
}

impl IntegratorSection {
    pub fn or(&self, fallback: &IntegratorSection) -> IntegratorSection {
        IntegratorSection {
            rel_tol: self.rel_tol.or(fallback.rel_tol),
            abs_tol: self.abs_tol.or(fallback.abs_tol),
            max_steps: self.max_steps.or(fallback.max_steps),
            samples: self.samples.or(fallback.samples),
        }
    }

    pub fn resolve(&self, tau: f64) -> Result<IntegratorOptions> {
        let mut opts = IntegratorOptions::default();
        opts.rel_tol = self.rel_tol.unwrap_or(opts.rel_tol);
        opts.abs_tol = self.abs_tol.unwrap_or(opts.abs_tol);
        opts.max_steps = self.max_steps.unwrap_or(opts.max_steps);
        if let Some(k) = self.samples {
            if k < 2 {
                return Err(Error::config("samples must be at least 2"));
            }
            opts.output_grid = Some(IntegratorOptions::uniform_grid(0.0, tau, k));
        }
        opts.validate(0.0, tau)?;
        Ok(opts)
    }
}

impl ProtocolSection {
    pub fn named(kind: &str) -> Self {
        ProtocolSection {
            kind: kind.to_string(),
            ..Default::default()
        }
    }

    /// Build the schedule. Missing shape parameters take the benchmark
    /// values for `params`; parameters of another kind are an error.
    pub fn resolve(&self, params: &SystemParams) -> Result<Protocol> {
        let duration = self.duration.unwrap_or(params.tau);
        let given = [
            ("omega", self.omega.is_some()),
            ("rate_coeff", self.rate_coeff.is_some()),
            ("scale", self.scale.is_some()),
            ("rate", self.rate.is_some()),
            ("points", self.points.is_some()),
        ];
        let allowed: &[&str] = match self.kind.as_str() {
            "quench" => &["omega"],
            "linear" => &["rate_coeff"],
            "exponential" => &["scale", "rate"],
            "tabulated" => &["points"],
            "idle" => &[],
            other => {
                return Err(Error::Config(format!(
                    "unknown protocol kind {other:?} (expected quench, linear, exponential, idle or tabulated)"
                )))
            }
        };
        if let Some((key, _)) = given.iter().find(|(k, set)| *set && !allowed.contains(k)) {
            return Err(Error::Config(format!(
                "`{key}` does not apply to a {} protocol",
                self.kind
            )));
        }
        let inv_beta = 1.0 / params.beta;
        let kind = match self.kind.as_str() {
            "quench" => ProtocolKind::Quench {
                omega: self.omega.unwrap_or(inv_beta),
            },
            "linear" => ProtocolKind::Linear {
                rate_coeff: self.rate_coeff.unwrap_or(params.gamma0 * inv_beta),
            },
            "exponential" => ProtocolKind::Exponential {
                scale: self.scale.unwrap_or(inv_beta),
                rate: self.rate.unwrap_or(params.gamma0),
            },
            "idle" => ProtocolKind::Quench { omega: 0.0 },
            _ => ProtocolKind::Tabulated {
                points: self
                    .points
                    .clone()
                    .ok_or_else(|| Error::config("tabulated protocol needs `points`"))?,
            },
        };
        Protocol::new(kind, duration)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> &'static Path {
        Path::new("test.toml")
    }

    #[test]
    fn full_document_parses() {
        let doc = parse_run_document(
            r#"
            schema_version = 1
            [params]
            n_qubits = 4
            beta = 2.0
            [protocol]
            kind = "exponential"
            rate = 3.0
            [integrator]
            samples = 11
            [output]
            emit_states = true
            "#,
            origin(),
        )
        .unwrap();
        let params = doc.params.resolve().unwrap();
        assert_eq!(params, SystemParams::new(4, 2.0, 1.0, 1.0).unwrap());
        let prot = doc.protocol.unwrap().resolve(&params).unwrap();
        assert_eq!(
            prot.kind,
            ProtocolKind::Exponential {
                scale: 0.5,
                rate: 3.0
            }
        );
        let opts = doc.integrator.resolve(params.tau).unwrap();
        assert_eq!(opts.output_grid.unwrap().len(), 11);
        assert_eq!(doc.output.emit_states, Some(true));
    }

    #[test]
    fn schema_version_required_and_checked() {
        assert!(parse_run_document("[params]\nn_qubits = 2\n", origin()).is_err());
        assert!(matches!(
            parse_run_document("schema_version = 7\n", origin()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = parse_run_document("schema_version = 1\n[params]\nqubits = 3\n", origin());
        assert!(matches!(e, Err(Error::Config(_))));
    }

    #[test]
    fn protocol_kind_errors() {
        let p = SystemParams::unit(2).unwrap();
        assert!(ProtocolSection::named("sawtooth").resolve(&p).is_err());
        let mut s = ProtocolSection::named("quench");
        s.rate_coeff = Some(1.0);
        assert!(s.resolve(&p).is_err());
        assert!(ProtocolSection::named("tabulated").resolve(&p).is_err());
        let idle = ProtocolSection::named("idle").resolve(&p).unwrap();
        assert_eq!(idle, Protocol::idle(1.0).unwrap());
    }

    #[test]
    fn benchmark_defaults() {
        let p = SystemParams::new(3, 2.0, 0.5, 1.0).unwrap();
        for (name, want) in [
            ("quench", Protocol::benchmark_quench(&p)),
            ("linear", Protocol::benchmark_linear(&p)),
            ("exponential", Protocol::benchmark_exponential(&p)),
        ] {
            assert_eq!(ProtocolSection::named(name).resolve(&p).unwrap(), want);
        }
    }
}
