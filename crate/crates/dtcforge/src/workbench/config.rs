//! Experiment configuration: one strictly-parsed TOML file per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::WorkbenchError;
use crate::dicke::Branch;
use crate::optimizer::{ChainOptimizeConfig, DickeOptimizeConfig};
use crate::spectral::ClassifierTolerances;

/// Which experiment a config file drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    DickeOptimize,
    DickeSweep,
    ChainOptimize,
    ChainSpectrum,
    Classify,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::DickeOptimize => "dicke-optimize",
            ExperimentKind::DickeSweep => "dicke-sweep",
            ExperimentKind::ChainOptimize => "chain-optimize",
            ExperimentKind::ChainSpectrum => "chain-spectrum",
            ExperimentKind::Classify => "classify",
        }
    }
}

/// Settings for classifying driven trajectories (shared by the optimize and
/// sweep drivers).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySettings {
    pub tolerances: ClassifierTolerances,
    /// Periods discarded before the classification window.
    pub burn_in_periods: usize,
    /// Stroboscopic periods in the classification window.
    pub analysis_periods: usize,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        Self {
            tolerances: ClassifierTolerances::default(),
            burn_in_periods: 200,
            analysis_periods: 64,
        }
    }
}

/// Settings for sweeping a fixed pulse over detunings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    /// Detuning values; the output table is sorted regardless of order here.
    pub epsilons: Vec<f64>,
    /// Preparation coupling; defaults to the swept pulse's on-window mean.
    pub lambda_init: Option<f64>,
    pub branch: Branch,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { epsilons: vec![0.04, 0.05, 0.06, 0.10], lambda_init: None, branch: Branch::Plus }
    }
}

/// The complete description of one experiment run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Output directory; CLI `--out` overrides it.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub dicke: DickeOptimizeConfig,
    #[serde(default)]
    pub chain: ChainOptimizeConfig,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default)]
    pub classify: ClassifySettings,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            out_dir: None,
            dicke: DickeOptimizeConfig::default(),
            chain: ChainOptimizeConfig::default(),
            sweep: SweepSettings::default(),
            classify: ClassifySettings::default(),
        }
    }

    /// Parses a TOML string strictly: unknown keys are errors with key
    /// context, and every numeric field is range-checked afterwards.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self, WorkbenchError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| WorkbenchError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, WorkbenchError> {
        let text = std::fs::read_to_string(path).map_err(super::io_err(path))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), WorkbenchError> {
        match self.kind {
            ExperimentKind::DickeOptimize => self.dicke.validate()?,
            ExperimentKind::ChainOptimize | ExperimentKind::ChainSpectrum => {
                self.chain.validate()?
            }
            ExperimentKind::DickeSweep => {
                self.dicke.params.validate()?;
                for &e in &self.sweep.epsilons {
                    if !e.is_finite() || e.abs() >= 1.0 {
                        return Err(WorkbenchError::Config(format!(
                            "sweep epsilon {e} violates |epsilon| < 1 (omega, omega0 > 0)"
                        )));
                    }
                }
            }
            ExperimentKind::Classify => {}
        }
        let c = &self.classify;
        if c.analysis_periods < 8 {
            return Err(WorkbenchError::Config(format!(
                "classify.analysis_periods = {} violates the classifier minimum of 8 strobes",
                c.analysis_periods
            )));
        }
        if !(c.tolerances.tol_fix > 0.0 && c.tolerances.tol_flip > 0.0) {
            return Err(WorkbenchError::Config(
                "classifier tolerances must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&c.tolerances.conc_min) {
            return Err(WorkbenchError::Config(format!(
                "classify.tolerances.conc_min = {} must lie in [0, 1]",
                c.tolerances.conc_min
            )));
        }
        Ok(())
    }

    /// Directory artifacts land in: `--out` flag beats `out_dir` in the file,
    /// which beats `runs/<kind>`.
    pub fn resolve_out_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("runs").join(self.kind.as_str()))
    }
}

/// Parses an epsilon list given either as `start:stop:step` or as a
/// comma-separated list.
pub fn parse_epsilons(spec: &str) -> Result<Vec<f64>, WorkbenchError> {
    let bad = |msg: String| WorkbenchError::Config(msg);
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("bad epsilon range {spec:?}: {e}")))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0 && step.is_finite() && stop >= start) {
            return Err(bad(format!(
                "epsilon range {spec:?} needs stop >= start and step > 0"
            )));
        }
        let n = ((stop - start) / step).round() as usize;
        return Ok((0..=n).map(|k| start + k as f64 * step).filter(|e| *e <= stop + 1e-12).collect());
    }
    if parts.len() != 1 {
        return Err(bad(format!("epsilon spec {spec:?} must be start:stop:step or a,b,c")));
    }
    spec.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("bad epsilon value {p:?}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_and_round_trips() {
        let cfg =
            ExperimentConfig::from_toml_str("kind = \"dicke-optimize\"\n", Path::new("test.toml"))
                .unwrap();
        assert_eq!(cfg.kind, ExperimentKind::DickeOptimize);

        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text, Path::new("round.toml")).unwrap();
        assert_eq!(back.dicke.budget, cfg.dicke.budget);
        assert_eq!(back.chain.sites, cfg.chain.sites);
        assert_eq!(back.sweep, cfg.sweep);
        assert_eq!(back.classify, cfg.classify);
        // second serialization is byte-identical: the format is stable
        assert_eq!(text, back.to_toml_string());
    }

    #[test]
    fn unknown_key_is_an_error_naming_the_key() {
        let err = ExperimentConfig::from_toml_str(
            "kind = \"dicke-sweep\"\n[dicke]\nepsilonn = 0.05\n",
            Path::new("bad.toml"),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("epsilonn"), "message was: {msg}");
    }

    #[test]
    fn out_of_range_values_cite_the_invariant() {
        let err = ExperimentConfig::from_toml_str(
            "kind = \"chain-optimize\"\n[chain.params]\nlength = 0\ng = 1.5707963267948966\nperiod = 2.0\nt1 = 1.0\nopen_boundary = true\n",
            Path::new("bad.toml"),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("L >= 2"), "message was: {msg}");

        let err = ExperimentConfig::from_toml_str(
            "kind = \"dicke-sweep\"\n[sweep]\nepsilons = [2.0]\n",
            Path::new("bad.toml"),
        )
        .unwrap_err();
        assert!(err.to_string().contains("|epsilon| < 1"));
    }

    #[test]
    fn epsilon_specs() {
        assert_eq!(parse_epsilons("0.04,0.05,0.1").unwrap(), vec![0.04, 0.05, 0.1]);
        let r = parse_epsilons("0.01:0.03:0.01").unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[2] - 0.03).abs() < 1e-12);
        assert!(parse_epsilons("0.1:0.0:0.01").is_err());
        assert!(parse_epsilons("a:b").is_err());
    }

    #[test]
    fn out_dir_resolution_order() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::DickeOptimize);
        assert_eq!(cfg.resolve_out_dir(None), PathBuf::from("runs/dicke-optimize"));
        cfg.out_dir = Some(PathBuf::from("from-file"));
        assert_eq!(cfg.resolve_out_dir(None), PathBuf::from("from-file"));
        assert_eq!(
            cfg.resolve_out_dir(Some(Path::new("from-flag"))),
            PathBuf::from("from-flag")
        );
    }
}
