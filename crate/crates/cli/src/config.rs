//! TOML experiment configs and their validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use cstk::forms::QuadratureSpec;

use crate::catalog::{self, Category};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CsAction,
    GaugeDefect,
    FlatSearch,
    AbForm,
    MomentMap,
    EquivariantCheck,
    Prequantum,
    Pillowcase,
    HighDegreeFlatness,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::CsAction,
        ExperimentKind::GaugeDefect,
        ExperimentKind::FlatSearch,
        ExperimentKind::AbForm,
        ExperimentKind::MomentMap,
        ExperimentKind::EquivariantCheck,
        ExperimentKind::Prequantum,
        ExperimentKind::Pillowcase,
        ExperimentKind::HighDegreeFlatness,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::CsAction => "cs-action",
            ExperimentKind::GaugeDefect => "gauge-defect",
            ExperimentKind::FlatSearch => "flat-search",
            ExperimentKind::AbForm => "ab-form",
            ExperimentKind::MomentMap => "moment-map",
            ExperimentKind::EquivariantCheck => "equivariant-check",
            ExperimentKind::Prequantum => "prequantum",
            ExperimentKind::Pillowcase => "pillowcase",
            ExperimentKind::HighDegreeFlatness => "high-degree-flatness",
        }
    }
}

/// One `[[experiment]]` table. Unset fields take per-kind defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    /// Complex normalization `[re, im]` replacing the polynomial's default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_success: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corruption: Option<f64>,
    /// `[x, y, side]` of a square loop.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(id: impl Into<String>, kind: ExperimentKind) -> Self {
        Self {
            id: id.into(),
            kind,
            group: None,
            polynomial: None,
            normalization: None,
            chart: None,
            cycle: None,
            family: None,
            winding: None,
            bundle: None,
            genus: None,
            trials: None,
            min_success: None,
            samples: None,
            params: None,
            corruption: None,
            square: None,
            quadrature_order: None,
            fd_step: None,
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Also write one CSV per experiment kind.
    #[serde(default)]
    pub csv: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config does not parse: {0}")]
    Parse(String),
    #[error("experiment '{id}': {msg}")]
    Invalid { id: String, msg: String },
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub quadrature_order: Option<usize>,
    pub fd_step: Option<f64>,
    pub tolerance: Option<f64>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.out {
            self.output.dir = Some(d.clone());
        }
        for e in &mut self.experiments {
            if o.quadrature_order.is_some() {
                e.quadrature_order = o.quadrature_order;
            }
            if o.fd_step.is_some() {
                e.fd_step = o.fd_step;
            }
            if o.tolerance.is_some() {
                e.tolerance = o.tolerance;
            }
        }
        self.quadrature_order = o.quadrature_order.or(self.quadrature_order);
        self.fd_step = o.fd_step.or(self.fd_step);
        self.tolerance = o.tolerance.or(self.tolerance);
    }

    /// Every referenced name resolves, every tolerance and step is positive,
    /// ids are unique.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let top = ExperimentConfig::new("<top level>", ExperimentKind::Prequantum);
        check_numbers(&top.id, self.quadrature_order, self.fd_step, self.tolerance)?;
        for (i, e) in self.experiments.iter().enumerate() {
            let bad = |msg: String| ConfigError::Invalid { id: e.id.clone(), msg };
            if e.id.trim().is_empty() {
                return Err(bad("empty id".into()));
            }
            if self.experiments[..i].iter().any(|f| f.id == e.id) {
                return Err(bad("duplicate id".into()));
            }
            check_numbers(&e.id, e.quadrature_order, e.fd_step, e.tolerance)?;
            let names = [
                (Category::Group, &e.group),
                (Category::Polynomial, &e.polynomial),
                (Category::Chart, &e.chart),
                (Category::Cycle, &e.cycle),
                (Category::Family, &e.family),
                (Category::WindingMap, &e.winding),
                (Category::ToyBundle, &e.bundle),
            ];
            for (cat, name) in names {
                let Some(name) = name else { continue };
                let ok = match cat {
                    Category::Group => catalog::parse_group(name).is_some(),
                    Category::Chart => catalog::parse_chart(name).is_some(),
                    Category::Polynomial => catalog::parse_polynomial(name).is_some(),
                    _ => catalog::contains(cat, name),
                };
                if !ok {
                    return Err(bad(format!("unknown {} '{name}'", cat.label())));
                }
            }
            if let Some(n) = e.normalization {
                if !(n[0].is_finite() && n[1].is_finite()) || n == [0.0, 0.0] {
                    return Err(bad("normalization must be finite and nonzero".into()));
                }
            }
            if let Some(m) = e.min_success {
                if !(m > 0.0 && m <= 1.0) {
                    return Err(bad("min_success must lie in (0, 1]".into()));
                }
            }
            if e.trials == Some(0) || e.samples == Some(0) || e.genus == Some(0) {
                return Err(bad("trials, samples and genus must be positive".into()));
            }
            if e.params.as_ref().is_some_and(|p| p.iter().any(|v| !v.is_finite())) {
                return Err(bad("params must be finite".into()));
            }
            if e.corruption.is_some_and(|c| !c.is_finite()) {
                return Err(bad("corruption must be finite".into()));
            }
            if let Some(s) = e.square {
                if s.iter().any(|v| !v.is_finite()) || s[2] <= 0.0 {
                    return Err(bad("square needs a finite corner and positive side".into()));
                }
            }
        }
        Ok(())
    }
}

fn check_numbers(id: &str, order: Option<usize>, h: Option<f64>, tol: Option<f64>) -> Result<(), ConfigError> {
    let bad = |msg: &str| Err(ConfigError::Invalid { id: id.to_string(), msg: msg.to_string() });
    if h.is_some_and(|h| !(h > 0.0 && h.is_finite())) {
        return bad("fd_step must be positive");
    }
    let d = QuadratureSpec::default();
    if let Err(e) = QuadratureSpec::new(order.unwrap_or(d.order()), h.unwrap_or(d.fd_step())) {
        return bad(&e.to_string());
    }
    if tol.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
        return bad("tolerance must be positive");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c = Config::from_toml("seed = 3\n[[experiment]]\nid = \"a\"\nkind = \"gauge-defect\"\nwinding = \"cubes3.winding(2)\"\n").unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.experiments[0].kind, ExperimentKind::GaugeDefect);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_unknown_fields_and_names() {
        assert!(Config::from_toml("[[experiment]]\nid = \"a\"\nkind = \"pillowcase\"\nfoo = 1\n").is_err());
        let c = Config::from_toml("[[experiment]]\nid = \"a\"\nkind = \"cs-action\"\nfamily = \"nope\"\n").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        for t in ["0.0", "-1e-3"] {
            let c = Config::from_toml(&format!("[[experiment]]\nid = \"a\"\nkind = \"pillowcase\"\ntolerance = {t}\n")).unwrap();
            assert!(c.validate().is_err());
        }
        let c = Config::from_toml("tolerance = 0.0\n").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn overrides_reach_every_experiment() {
        let mut c = Config::from_toml("[[experiment]]\nid = \"a\"\nkind = \"pillowcase\"\n[[experiment]]\nid = \"b\"\nkind = \"prequantum\"\n").unwrap();
        c.apply(&Overrides { tolerance: Some(0.5), quadrature_order: Some(4), seed: Some(9), ..Default::default() });
        assert_eq!(c.seed, 9);
        assert!(c.experiments.iter().all(|e| e.tolerance == Some(0.5) && e.quadrature_order == Some(4)));
    }
}
