//! `key = value` configuration files.
//!
//! Keys before the first `[section]` header apply to every command. A
//! `[command-name]` section applies only when that command runs and overrides
//! the global keys. `#` and `;` start comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown configuration key `{key}` (line {line})")]
    UnknownKey { key: String, line: usize },

    #[error("unknown configuration key `{key}` on the command line")]
    UnknownOverride { key: String },

    #[error("unknown section `[{name}]` (line {line}); sections are command names")]
    UnknownSection { name: String, line: usize },

    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("key `{key}` given twice in the same scope (line {line})")]
    Duplicate { key: String, line: usize },

    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    BadValue {
        key: String,
        value: String,
        expected: &'static str,
    },

    #[error("key `{key}` = {value} is out of range: {reason}")]
    OutOfRange {
        key: String,
        value: String,
        reason: &'static str,
    },

    #[error("no command given; set `command = <name>` or pass it on the command line")]
    MissingCommand,

    #[error("cannot read config {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    MetricShow,
    MetricCheck,
    CurvatureSweep,
    BarrierVerify,
    StabilityThreshold,
    Rayleigh,
    Eigen,
    AreaminSolve,
    AreaminScan,
    Kprime,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::MetricShow,
        Command::MetricCheck,
        Command::CurvatureSweep,
        Command::BarrierVerify,
        Command::StabilityThreshold,
        Command::Rayleigh,
        Command::Eigen,
        Command::AreaminSolve,
        Command::AreaminScan,
        Command::Kprime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::MetricShow => "metric-show",
            Command::MetricCheck => "metric-check",
            Command::CurvatureSweep => "curvature-sweep",
            Command::BarrierVerify => "barrier-verify",
            Command::StabilityThreshold => "stability-threshold",
            Command::Rayleigh => "rayleigh",
            Command::Eigen => "eigen",
            Command::AreaminSolve => "areamin-solve",
            Command::AreaminScan => "areamin-scan",
            Command::Kprime => "kprime",
        }
    }
}

impl FromStr for Command {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or(())
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Cone,
    CappedCone,
    Positive,
    Table,
    Flat,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Cone => "cone",
            MetricKind::CappedCone => "capped_cone",
            MetricKind::Positive => "positive",
            MetricKind::Table => "table",
            MetricKind::Flat => "flat",
        }
    }
}

impl FromStr for MetricKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "cone" => Ok(MetricKind::Cone),
            "capped_cone" => Ok(MetricKind::CappedCone),
            "positive" => Ok(MetricKind::Positive),
            "table" => Ok(MetricKind::Table),
            "flat" => Ok(MetricKind::Flat),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridChoice {
    Geometric,
    Uniform,
}

/// One documented configuration key.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec { name, default, help }
}

/// Every accepted key with its default. An empty default means "unset".
pub const KEYS: &[KeySpec] = &[
    key("command", "", "operation to run"),
    key("kind", "cone", "metric: cone | capped_cone | positive | table | flat"),
    key("n", "7", "hypersurface dimension n >= 2 (ambient n+1)"),
    key("kappa", "0.9", "cone angle parameter in (0, 1]"),
    key("table", "", "path of a rho,lambda table (kind = table)"),
    key("slope_hint", "", "asymptotic slope of the table profile"),
    key("r_min", "1e-2", "smallest radius of sweeps and the barrier grid"),
    key("r_max", "1e2", "largest radius of sweeps and the barrier grid"),
    key("samples", "200", "radii in sweeps"),
    key("barrier_c", "1", "barrier constant C > 0"),
    key("theta_points", "201", "theta nodes of the barrier grid"),
    key("r_points", "200", "radius nodes of the barrier grid"),
    key("alternate", "true", "also check the x_{n+1} w^{p-1} barrier"),
    key("fields", "100", "random fields in the operator crosscheck"),
    key("epsilon", "1e-4", "inner radius of the truncated cone, in (0, 1)"),
    key("k", "3", "highest eigenmode (eigen)"),
    key("grid_points", "10000", "finite-difference nodes (eigen)"),
    key("basis", "200", "finite-element basis size (rayleigh)"),
    key("b2", "0", "|B|^2 of the link"),
    key("kappa_min", "", "first kappa of a sweep; default kappa* - 0.1"),
    key("kappa_max", "", "last kappa of a sweep; default min(1, kappa* + 0.1)"),
    key("kappa_step", "0.01", "kappa sweep step"),
    key("w_outer", "1", "outer radius W of the area problem"),
    key("grid_size", "256", "nodes of the area problem"),
    key("grid", "geometric", "area grid: geometric | uniform"),
    key(
        "axis_ratio",
        "1e-8",
        "first interior node of the geometric grid, over W",
    ),
    key("amplitude", "0.05", "seed amplitude over W"),
    key("max_iter", "20000", "descent iteration cap"),
    key("grad_tol", "1e-8", "converged when sup|grad A| < grad_tol (1 + |A|)"),
    key("verdict_tol", "1e-12", "relative area gain required to beat the plane"),
    key("out", "", "path for machine-readable tables"),
    key("seed", "0", "seed of randomized suites"),
    key("verbose", "false", "print tables to standard output too"),
];

fn spec_of(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

/// Parsed file contents: global keys and per-command sections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub global: BTreeMap<String, String>,
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut file = ConfigFile::default();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split(['#', ';']).next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
                let name = name.trim();
                if name.parse::<Command>().is_err() {
                    return Err(ConfigError::UnknownSection {
                        name: name.to_string(),
                        line,
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((k, v)) = body.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: raw.trim().to_string(),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    text: raw.trim().to_string(),
                });
            }
            if spec_of(k).is_none() {
                return Err(ConfigError::UnknownKey {
                    key: k.to_string(),
                    line,
                });
            }
            let scope = match &section {
                None => &mut file.global,
                Some(s) => file.sections.entry(s.clone()).or_default(),
            };
            if scope.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Duplicate {
                    key: k.to_string(),
                    line,
                });
            }
        }
        Ok(file)
    }

    pub fn read(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub kind: MetricKind,
    pub n: usize,
    pub kappa: f64,
    pub table: Option<PathBuf>,
    pub slope_hint: Option<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    pub barrier_c: f64,
    pub theta_points: usize,
    pub r_points: usize,
    pub alternate: bool,
    pub fields: usize,
    pub epsilon: f64,
    pub k: usize,
    pub grid_points: usize,
    pub basis: usize,
    pub b2: f64,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub kappa_step: f64,
    pub w_outer: f64,
    pub grid_size: usize,
    pub grid: GridChoice,
    pub axis_ratio: f64,
    pub amplitude: f64,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub verdict_tol: f64,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub verbose: bool,
}

struct Values(BTreeMap<String, String>);

impl Values {
    fn raw(&self, key: &str) -> &str {
        self.0
            .get(key)
            .map(String::as_str)
            .or_else(|| spec_of(key).map(|s| s.default))
            .unwrap_or("")
    }

    fn parsed<T: FromStr>(&self, key: &str, expected: &'static str) -> Result<T, ConfigError> {
        let v = self.raw(key);
        v.parse().map_err(|_| ConfigError::BadValue {
            key: key.to_string(),
            value: v.to_string(),
            expected,
        })
    }

    fn optional<T: FromStr>(&self, key: &str, expected: &'static str) -> Result<Option<T>, ConfigError> {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.parsed(key, expected).map(Some)
        }
    }

    fn real(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.parsed(key, "a real number")?;
        if !v.is_finite() {
            return Err(out_of_range(key, v, "must be finite"));
        }
        Ok(v)
    }

    fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.real(key)?;
        if !(v > 0.0) {
            return Err(out_of_range(key, v, "must be positive"));
        }
        Ok(v)
    }

    fn count(&self, key: &str, min: usize, reason: &'static str) -> Result<usize, ConfigError> {
        let v: usize = self.parsed(key, "a non-negative integer")?;
        if v < min {
            return Err(out_of_range(key, v, reason));
        }
        Ok(v)
    }

    fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.raw(key) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => Err(ConfigError::BadValue {
                key: key.to_string(),
                value: v.to_string(),
                expected: "true or false",
            }),
        }
    }
}

fn out_of_range(key: &str, value: impl fmt::Display, reason: &'static str) -> ConfigError {
    ConfigError::OutOfRange {
        key: key.to_string(),
        value: value.to_string(),
        reason,
    }
}

impl RunConfig {
    /// Merges file scopes and overrides (in increasing priority) and
    /// validates every value. `command` may come from any layer.
    pub fn resolve(
        file: &ConfigFile,
        command: Option<Command>,
        overrides: &[(String, String)],
    ) -> Result<Self, ConfigError> {
        for (k, _) in overrides {
            if spec_of(k).is_none() {
                return Err(ConfigError::UnknownOverride { key: k.clone() });
            }
        }
        let mut merged = file.global.clone();
        let from_overrides = overrides
            .iter()
            .rev()
            .find(|(k, _)| k == "command")
            .map(|(_, v)| v.clone());
        let name = command
            .map(|c| c.name().to_string())
            .or(from_overrides)
            .or_else(|| merged.get("command").cloned())
            .filter(|s| !s.is_empty())
            .ok_or(ConfigError::MissingCommand)?;
        let command: Command = name.parse().map_err(|_| ConfigError::BadValue {
            key: "command".into(),
            value: name.clone(),
            expected: "a command name",
        })?;
        if let Some(section) = file.sections.get(command.name()) {
            merged.extend(section.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        merged.extend(overrides.iter().cloned());
        merged.insert("command".into(), name);
        Self::from_values(command, Values(merged))
    }

    fn from_values(command: Command, v: Values) -> Result<Self, ConfigError> {
        let kind: MetricKind = v.parsed("kind", "cone, capped_cone, positive, table or flat")?;
        let n = v.count("n", 2, "n must be at least 2")?;
        let kappa = v.positive("kappa")?;
        let r_min = v.positive("r_min")?;
        let r_max = v.positive("r_max")?;
        if r_max <= r_min {
            return Err(out_of_range("r_max", r_max, "must exceed r_min"));
        }
        let epsilon = v.positive("epsilon")?;
        if epsilon >= 1.0 {
            return Err(out_of_range("epsilon", epsilon, "must lie in (0, 1)"));
        }
        let b2 = v.real("b2")?;
        if b2 < 0.0 {
            return Err(out_of_range("b2", b2, "must be non-negative"));
        }
        let kappa_min = v.optional::<f64>("kappa_min", "a real number")?;
        let kappa_max = v.optional::<f64>("kappa_max", "a real number")?;
        for (name, val) in [("kappa_min", kappa_min), ("kappa_max", kappa_max)] {
            if let Some(x) = val {
                if !(x > 0.0 && x <= 1.0) {
                    return Err(out_of_range(name, x, "must lie in (0, 1]"));
                }
            }
        }
        if let (Some(a), Some(b)) = (kappa_min, kappa_max) {
            if b < a {
                return Err(out_of_range("kappa_max", b, "must not be below kappa_min"));
            }
        }
        let grid = match v.raw("grid") {
            "geometric" => GridChoice::Geometric,
            "uniform" => GridChoice::Uniform,
            other => {
                return Err(ConfigError::BadValue {
                    key: "grid".into(),
                    value: other.to_string(),
                    expected: "geometric or uniform",
                })
            }
        };
        let axis_ratio = v.positive("axis_ratio")?;
        if axis_ratio >= 1.0 {
            return Err(out_of_range("axis_ratio", axis_ratio, "must lie in (0, 1)"));
        }
        let seed: u64 = v.parsed("seed", "a non-negative integer")?;
        Ok(Self {
            command,
            kind,
            n,
            kappa,
            table: v.optional::<PathBuf>("table", "a path")?,
            slope_hint: v.optional::<f64>("slope_hint", "a real number")?,
            r_min,
            r_max,
            samples: v.count("samples", 2, "need at least 2 samples")?,
            barrier_c: v.positive("barrier_c")?,
            theta_points: v.count("theta_points", 2, "need at least 2 nodes")?,
            r_points: v.count("r_points", 2, "need at least 2 nodes")?,
            alternate: v.flag("alternate")?,
            fields: v.count("fields", 0, "")?,
            epsilon,
            k: v.count("k", 1, "modes are numbered from 1")?,
            grid_points: v.count("grid_points", 64, "need at least 64 nodes")?,
            basis: v.count("basis", 8, "need at least 8 basis functions")?,
            b2,
            kappa_min,
            kappa_max,
            kappa_step: v.positive("kappa_step")?,
            w_outer: v.positive("w_outer")?,
            grid_size: v.count("grid_size", 8, "need at least 8 nodes")?,
            grid,
            axis_ratio,
            amplitude: v.real("amplitude")?,
            max_iter: v.count("max_iter", 1, "need at least one iteration")?,
            grad_tol: v.positive("grad_tol")?,
            verdict_tol: v.positive("verdict_tol")?,
            out: v.optional::<PathBuf>("out", "a path")?,
            seed,
            verbose: v.flag("verbose")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_and_kind_suffice() {
        let f = ConfigFile::parse("command = kprime\nkind = capped_cone\n").unwrap();
        let c = RunConfig::resolve(&f, None, &[]).unwrap();
        assert_eq!(c.command, Command::Kprime);
        assert_eq!(c.kind, MetricKind::CappedCone);
        assert_eq!(c.n, 7);
    }

    #[test]
    fn sections_and_overrides_layer() {
        let text = "command = eigen\nn = 4\n# note\n[eigen]\nn = 5 ; inline\n[rayleigh]\nn = 9\n";
        let f = ConfigFile::parse(text).unwrap();
        assert_eq!(RunConfig::resolve(&f, None, &[]).unwrap().n, 5);
        assert_eq!(RunConfig::resolve(&f, Some(Command::Rayleigh), &[]).unwrap().n, 9);
        let o = vec![("n".to_string(), "3".to_string())];
        assert_eq!(RunConfig::resolve(&f, None, &o).unwrap().n, 3);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = ConfigFile::parse("command = eigen\nkapa = 0.5\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::UnknownKey {
                key: "kapa".into(),
                line: 2
            }
        );
        assert!(e.to_string().contains("kapa"));
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let f = ConfigFile::parse("command = eigen\nepsilon = 2\n").unwrap();
        let e = RunConfig::resolve(&f, None, &[]).unwrap_err();
        assert!(matches!(e, ConfigError::OutOfRange { ref key, .. } if key == "epsilon"));
        let f = ConfigFile::parse("command = eigen\nn = 1\n").unwrap();
        assert!(RunConfig::resolve(&f, None, &[]).is_err());
    }

    #[test]
    fn every_default_parses() {
        for c in Command::ALL {
            RunConfig::resolve(&ConfigFile::default(), Some(c), &[]).unwrap();
        }
    }

    #[test]
    fn missing_command_and_bad_section() {
        assert_eq!(
            RunConfig::resolve(&ConfigFile::default(), None, &[]).unwrap_err(),
            ConfigError::MissingCommand
        );
        assert!(matches!(
            ConfigFile::parse("[plot]\n"),
            Err(ConfigError::UnknownSection { .. })
        ));
    }
}
