//! Experiment configuration: CLI flags layered over an optional JSON
//! config file, with per-experiment defaults underneath.

use serde::Deserialize;
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Table1,
    Table2,
    Table3,
    Fig1,
    Fig2,
    TiltedStable,
    SampleExact,
    SampleApprox,
    TauDist,
    Functional,
}

impl Experiment {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "table1" => Experiment::Table1,
            "table2" => Experiment::Table2,
            "table3" => Experiment::Table3,
            "fig1" => Experiment::Fig1,
            "fig2" => Experiment::Fig2,
            "tilted-stable" => Experiment::TiltedStable,
            "sample-exact" => Experiment::SampleExact,
            "sample-approx" => Experiment::SampleApprox,
            "tau-dist" => Experiment::TauDist,
            "functional" => Experiment::Functional,
            _ => return None,
        })
    }

    pub const ALL: &'static [&'static str] = &[
        "table1",
        "table2",
        "table3",
        "fig1",
        "fig2",
        "tilted-stable",
        "sample-exact",
        "sample-approx",
        "tau-dist",
        "functional",
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    F12,
    F13,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Approx,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub alpha: f64,
    pub thetas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub which: Which,
    pub method: Method,
    pub bins: Option<usize>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Number-or-list fields in the JSON config.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// JSON config file; every field optional, flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    alpha: Option<f64>,
    theta: Option<OneOrMany>,
    eps: Option<OneOrMany>,
    n: Option<usize>,
    seed: Option<u64>,
    out: Option<String>,
    format: Option<String>,
    which: Option<String>,
    method: Option<String>,
    bins: Option<usize>,
}

/// Flag values before defaulting.
#[derive(Debug, Default)]
struct Pending {
    alpha: Option<f64>,
    thetas: Option<Vec<f64>>,
    epsilons: Option<Vec<f64>>,
    replications: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    which: Option<Which>,
    method: Option<Method>,
    bins: Option<usize>,
}

fn parse_list(raw: &str, flag: &str) -> Result<Vec<f64>, ConfigError> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| err(format!("{flag}: `{tok}` is not a number")))
        })
        .collect()
}

fn parse_format(raw: &str) -> Result<OutputFormat, ConfigError> {
    match raw {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(err(format!("--format must be csv or json, got `{other}`"))),
    }
}

fn parse_which(raw: &str) -> Result<Which, ConfigError> {
    match raw {
        "F12" | "f12" => Ok(Which::F12),
        "F13" | "f13" => Ok(Which::F13),
        "mean" => Ok(Which::Mean),
        other => Err(err(format!("--which must be F12, F13 or mean, got `{other}`"))),
    }
}

fn parse_method(raw: &str) -> Result<Method, ConfigError> {
    match raw {
        "exact" => Ok(Method::Exact),
        "approx" => Ok(Method::Approx),
        other => Err(err(format!("--method must be exact or approx, got `{other}`"))),
    }
}

/// Parses `epspy <experiment> [flags]`. Flags override the `--config`
/// file, which overrides per-experiment defaults.
pub fn parse_args<I: IntoIterator<Item = String>>(args: I) -> Result<ExperimentConfig, ConfigError> {
    let mut it = args.into_iter();
    let experiment = match it.next() {
        Some(name) => Experiment::parse(&name)
            .ok_or_else(|| err(format!("unknown experiment `{name}`; expected one of {}",
                Experiment::ALL.join(", "))))?,
        None => return Err(err("missing experiment name")),
    };

    let mut pending = Pending::default();
    let mut config_path: Option<PathBuf> = None;
    while let Some(flag) = it.next() {
        let mut value = |flag_name: &str| {
            it.next()
                .ok_or_else(|| err(format!("missing value for {flag_name}")))
        };
        match flag.as_str() {
            "--alpha" => {
                let raw = value("--alpha")?;
                pending.alpha =
                    Some(raw.parse().map_err(|_| err(format!("--alpha: bad number `{raw}`")))?);
            }
            "--theta" => pending.thetas = Some(parse_list(&value("--theta")?, "--theta")?),
            "--eps" => pending.epsilons = Some(parse_list(&value("--eps")?, "--eps")?),
            "--n" => {
                let raw = value("--n")?;
                pending.replications =
                    Some(raw.parse().map_err(|_| err(format!("--n: bad count `{raw}`")))?);
            }
            "--seed" => {
                let raw = value("--seed")?;
                pending.seed =
                    Some(raw.parse().map_err(|_| err(format!("--seed: bad integer `{raw}`")))?);
            }
            "--out" => pending.out = Some(PathBuf::from(value("--out")?)),
            "--format" => pending.format = Some(parse_format(&value("--format")?)?),
            "--which" => pending.which = Some(parse_which(&value("--which")?)?),
            "--method" => pending.method = Some(parse_method(&value("--method")?)?),
            "--bins" => {
                let raw = value("--bins")?;
                pending.bins =
                    Some(raw.parse().map_err(|_| err(format!("--bins: bad count `{raw}`")))?);
            }
            "--config" => config_path = Some(PathBuf::from(value("--config")?)),
            other => return Err(err(format!("unknown flag `{other}`"))),
        }
    }

    if let Some(path) = config_path {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| err(format!("cannot read config {}: {e}", path.display())))?;
        let file: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| err(format!("bad config {}: {e}", path.display())))?;
        // Flags win over the file.
        pending.alpha = pending.alpha.or(file.alpha);
        pending.thetas = pending.thetas.or(file.theta.map(OneOrMany::into_vec));
        pending.epsilons = pending.epsilons.or(file.eps.map(OneOrMany::into_vec));
        pending.replications = pending.replications.or(file.n);
        pending.seed = pending.seed.or(file.seed);
        pending.out = pending.out.or(file.out.map(PathBuf::from));
        if pending.format.is_none() {
            pending.format = file.format.as_deref().map(parse_format).transpose()?;
        }
        if pending.which.is_none() {
            pending.which = file.which.as_deref().map(parse_which).transpose()?;
        }
        if pending.method.is_none() {
            pending.method = file.method.as_deref().map(parse_method).transpose()?;
        }
        pending.bins = pending.bins.or(file.bins);
    }

    resolve(experiment, pending)
}

fn resolve(experiment: Experiment, p: Pending) -> Result<ExperimentConfig, ConfigError> {
    use Experiment::*;
    let table_grid = matches!(experiment, Table1 | Table2 | Table3);
    let thetas = p.thetas.unwrap_or_else(|| match experiment {
        Table1 | Table2 | Table3 => vec![0.0, 1.0, 10.0],
        Fig2 => vec![0.0, 10.0],
        _ => vec![1.0],
    });
    let epsilons = p.epsilons.unwrap_or_else(|| {
        if table_grid || experiment == Fig2 {
            vec![0.10, 0.05, 0.01]
        } else {
            vec![0.01]
        }
    });
    let replications = p.replications.unwrap_or(match experiment {
        SampleExact | SampleApprox => 1,
        _ => 10_000,
    });
    let cfg = ExperimentConfig {
        experiment,
        alpha: p.alpha.unwrap_or(0.5),
        thetas,
        epsilons,
        replications,
        seed: p.seed.unwrap_or(42),
        out: p.out,
        format: p.format.unwrap_or(OutputFormat::Csv),
        which: p.which.unwrap_or(Which::Mean),
        method: p.method.unwrap_or(Method::Exact),
        bins: p.bins,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    if cfg.replications < 1 {
        return Err(err("--n must be at least 1"));
    }
    if cfg.thetas.is_empty() || cfg.epsilons.is_empty() {
        return Err(err("parameter lists must be nonempty"));
    }
    if !(0.0..1.0).contains(&cfg.alpha) {
        return Err(err(format!(
            "--alpha must satisfy 0 <= alpha < 1, got {}",
            cfg.alpha
        )));
    }
    for &theta in &cfg.thetas {
        for &eps in &cfg.epsilons {
            epspy_core::PYParams::new(cfg.alpha, theta, eps)
                .map_err(|e| err(format!("invalid configuration cell: {e}")))?;
        }
    }
    if cfg.experiment == Experiment::Table2 && cfg.alpha != 0.5 {
        return Err(err(
            "table2 requires alpha = 0.5: its reference law is only available there",
        ));
    }
    if matches!(cfg.experiment, Experiment::TiltedStable | Experiment::TauDist)
        && cfg.alpha == 0.0
    {
        return Err(err(format!(
            "{} requires alpha > 0; the alpha = 0 stopping law is served by sample-exact",
            if cfg.experiment == Experiment::TiltedStable {
                "tilted-stable"
            } else {
                "tau-dist"
            }
        )));
    }
    if let Some(bins) = cfg.bins {
        if bins < 1 {
            return Err(err("--bins must be at least 1"));
        }
    }
    Ok(())
}
