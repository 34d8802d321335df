use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use entdiss::evolution::PropagatorSign;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Concurrence oscillation under the coupling Hamiltonian.
    Fig1,
    /// Bell-state concurrence under pure dephasing of the 01/10 coherence.
    Fig2,
    /// Decay of concurrence without feedback, one block per y.
    #[value(name = "fig-nogo")]
    FigNogo,
    /// Steady-state concurrence on a logarithmic (m, f) grid.
    Fig4,
    /// Feedback dynamics from a Bell state.
    Evolve,
    /// Steady state by every available method.
    Steady,
    /// Numerical steady-state concurrence on a linear (m, f) grid.
    Sweep,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "entdiss",
    version,
    about = "Two-qubit entanglement under dissipation and feedback"
)]
pub struct Args {
    pub scenario: Scenario,
    /// Environment rate (Lindblad coefficient of sqrt(gamma) Z; Gamma_23 for fig2)
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Measurement strength
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Feedback strength
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Qubit splitting on the 01/10 subspace
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Exchange coupling
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Heisenberg coefficient; defaults to y/2
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long = "t-max", allow_hyphen_values = true)]
    pub t_max: Option<String>,
    /// Number of time intervals; steps + 1 rows are written
    #[arg(long, allow_hyphen_values = true)]
    pub steps: Option<String>,
    #[arg(long = "m-max", allow_hyphen_values = true)]
    pub m_max: Option<String>,
    #[arg(long = "f-max", allow_hyphen_values = true)]
    pub f_max: Option<String>,
    /// Grid points per axis
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    /// Plain-text `key = value` file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<String>,
    /// Sign s of the propagator exp(s i t H)
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<String>,
}

const KEYS: [&str; 16] = [
    "gamma", "m", "f", "mu", "y", "a", "b", "c", "t_max", "steps", "m_max", "f_max", "points",
    "out", "sign", "scenario",
];

/// Fully merged configuration. Scenario-dependent defaults stay `None`
/// and are filled in when the scenario runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub gamma: f64,
    pub m: f64,
    pub f: f64,
    pub mu: f64,
    pub y: Option<f64>,
    pub a: f64,
    pub b: f64,
    pub c: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub m_max: f64,
    pub f_max: f64,
    pub points: Option<usize>,
    pub output: Option<PathBuf>,
    pub sign: PropagatorSign,
}

/// Parses `argv` (including the program name) and the optional config file
/// it names. Flags override file keys, which override defaults.
pub fn parse_args<I, T>(argv: I) -> Result<ScenarioConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv)?;
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    parse_config(&args, file)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "config line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!(
                "config line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    Ok(out)
}

struct Merged {
    values: BTreeMap<String, String>,
}

impl Merged {
    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Config(format!("invalid value `{v}` for {key}: {e}")))
            })
            .transpose()
    }

    fn real(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.parse::<f64>(key)? {
            Some(v) if !v.is_finite() => {
                Err(CliError::Config(format!("{key} must be finite, got {v}")))
            }
            other => Ok(other),
        }
    }

    fn rate(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.real(key)? {
            Some(v) if v < 0.0 => Err(CliError::Config(format!(
                "{key} is a rate and must be nonnegative, got {v}"
            ))),
            other => Ok(other),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.real(key)? {
            Some(v) if v <= 0.0 => {
                Err(CliError::Config(format!("{key} must be positive, got {v}")))
            }
            other => Ok(other),
        }
    }
}

fn flag_values(args: &Args) -> [(&'static str, Option<&String>); 15] {
    [
        ("gamma", args.gamma.as_ref()),
        ("m", args.m.as_ref()),
        ("f", args.f.as_ref()),
        ("mu", args.mu.as_ref()),
        ("y", args.y.as_ref()),
        ("a", args.a.as_ref()),
        ("b", args.b.as_ref()),
        ("c", args.c.as_ref()),
        ("t_max", args.t_max.as_ref()),
        ("steps", args.steps.as_ref()),
        ("m_max", args.m_max.as_ref()),
        ("f_max", args.f_max.as_ref()),
        ("points", args.points.as_ref()),
        ("out", args.out.as_ref()),
        ("sign", args.sign.as_ref()),
    ]
}

fn parse_sign(v: &str) -> Result<PropagatorSign, CliError> {
    match v {
        "+1" | "1" | "+" => Ok(PropagatorSign::Plus),
        "-1" | "-" => Ok(PropagatorSign::Minus),
        _ => Err(CliError::Config(format!(
            "invalid value `{v}` for sign: expected +1 or -1"
        ))),
    }
}

pub fn parse_config(
    args: &Args,
    file: BTreeMap<String, String>,
) -> Result<ScenarioConfig, CliError> {
    if let Some(s) = file.get("scenario") {
        let named = Scenario::from_str(s, true)
            .map_err(|_| CliError::Config(format!("invalid value `{s}` for scenario")))?;
        if named != args.scenario {
            return Err(CliError::Config(format!(
                "config file names scenario {named} but {} was requested",
                args.scenario
            )));
        }
    }
    let mut values = file;
    for (key, flag) in flag_values(args) {
        if let Some(v) = flag {
            values.insert(key.to_string(), v.clone());
        }
    }
    let merged = Merged { values };

    let count = |key: &str, min: usize| -> Result<Option<usize>, CliError> {
        match merged.parse::<usize>(key)? {
            Some(n) if n < min => Err(CliError::Config(format!(
                "{key} must be at least {min}, got {n}"
            ))),
            other => Ok(other),
        }
    };

    Ok(ScenarioConfig {
        scenario: args.scenario,
        gamma: merged.rate("gamma")?.unwrap_or(1.0),
        m: merged.rate("m")?.unwrap_or(0.0),
        f: merged.rate("f")?.unwrap_or(0.0),
        mu: merged.real("mu")?.unwrap_or(0.0),
        y: merged.real("y")?,
        a: merged.real("a")?.unwrap_or(0.0),
        b: merged.real("b")?.unwrap_or(0.0),
        c: merged.real("c")?,
        t_max: merged.positive("t_max")?,
        steps: count("steps", 1)?,
        m_max: merged.positive("m_max")?.unwrap_or(200.0),
        f_max: merged.positive("f_max")?.unwrap_or(200.0),
        points: count("points", 2)?,
        output: merged.raw("out").map(PathBuf::from),
        sign: merged
            .raw("sign")
            .map(parse_sign)
            .transpose()?
            .unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> Result<ScenarioConfig, CliError> {
        parse_args(std::iter::once("entdiss").chain(argv.iter().copied()))
    }

    #[test]
    fn flags_map_to_parameters() {
        let cfg = parse(&["steady", "--gamma", "1", "--m", "100", "--f", "100"]).unwrap();
        assert_eq!(
            (cfg.m, cfg.f, cfg.gamma, cfg.mu, cfg.y),
            (100.0, 100.0, 1.0, 0.0, None)
        );
    }

    #[test]
    fn negative_rate_is_rejected() {
        let err = parse(&["steady", "--m", "-1"]).unwrap_err();
        assert!(err.to_string().contains("m is a rate"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn negative_energies_are_accepted() {
        let cfg = parse(&["fig1", "--mu", "-2.5", "--y", "-1", "--sign", "-1"]).unwrap();
        assert_eq!(cfg.mu, -2.5);
        assert_eq!(cfg.y, Some(-1.0));
        assert_eq!(cfg.sign, PropagatorSign::Minus);
    }

    #[test]
    fn config_text_grammar() {
        let map = parse_config_text("# header\nm = 1 # trailing\n\nt-max=2\n").unwrap();
        assert_eq!(map.get("m").map(String::as_str), Some("1"));
        assert_eq!(map.get("t_max").map(String::as_str), Some("2"));
        assert!(parse_config_text("bogus = 1")
            .unwrap_err()
            .to_string()
            .contains("bogus"));
        assert!(parse_config_text("m 1").is_err());
        assert!(parse_config_text("m = 1\nm = 2").is_err());
    }

    #[test]
    fn flag_beats_file() {
        let args = Args::try_parse_from(["entdiss", "steady", "--m", "2"]).unwrap();
        let file = parse_config_text("m = 1\nf = 3").unwrap();
        let cfg = parse_config(&args, file).unwrap();
        assert_eq!((cfg.m, cfg.f), (2.0, 3.0));
    }

    #[test]
    fn invalid_counts_and_signs() {
        assert!(parse(&["fig1", "--steps", "0"]).is_err());
        assert!(parse(&["fig4", "--points", "1"]).is_err());
        assert!(parse(&["fig1", "--sign", "2"]).is_err());
        assert!(parse(&["fig1", "--t-max", "nan"]).is_err());
        assert!(parse(&["nonsense"]).is_err());
    }
}
