use std::path::{Path, PathBuf};

use pdwg::mesh::BoundarySegmentSpec;
use pdwg::problems::{CaseConfig, ManufacturedSolution, DEFAULT_SEED};
use serde::{Deserialize, Serialize};

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "PDWG_OUTPUT_DIR";
pub const DEFAULT_OUTPUT: &str = "pdwg-out";

/// Settings as read from a config file or flags; every field optional so
/// the two sources can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<String>,
    pub case: Option<String>,
    /// Explicit boundary segments; used instead of `case` when given.
    pub segments: Option<Vec<BoundarySegmentSpec>>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub amplitude: Option<f64>,
    pub amplitudes: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub diagnostics: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed config {}: {e}", path.display()))
    }

    /// Fields set in `flags` win over `self`.
    pub fn overridden_by(self, flags: RunConfig) -> Self {
        Self {
            problem: flags.problem.or(self.problem),
            case: flags.case.or(self.case),
            segments: flags.segments.or(self.segments),
            n: flags.n.or(self.n),
            n_list: flags.n_list.or(self.n_list),
            amplitude: flags.amplitude.or(self.amplitude),
            amplitudes: flags.amplitudes.or(self.amplitudes),
            seed: flags.seed.or(self.seed),
            output: flags.output.or(self.output),
            diagnostics: flags.diagnostics.or(self.diagnostics),
        }
    }

    pub fn problem(&self) -> Result<ManufacturedSolution, String> {
        let name = self.problem.as_deref().unwrap_or("sinsin");
        ManufacturedSolution::by_name(name).map_err(|e| e.to_string())
    }

    pub fn case(&self) -> Result<CaseConfig, String> {
        if let Some(segments) = &self.segments {
            return Ok(CaseConfig { name: self.case.clone().unwrap_or_else(|| "custom".into()), segments: segments.clone() });
        }
        CaseConfig::by_name(self.case.as_deref().unwrap_or("case1")).map_err(|e| e.to_string())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("invalid list entry {p:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig { problem: Some("quad".into()), n: Some(4), seed: Some(1), ..Default::default() };
        let flags = RunConfig { n: Some(8), ..Default::default() };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.problem.as_deref(), Some("quad"));
        assert_eq!(merged.n, Some(8));
        assert_eq!(merged.seed(), 1);
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<usize>("1, 2,4").unwrap(), vec![1, 2, 4]);
        assert!(parse_list::<f64>("0,x").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"problme": "quad"}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"problem": "quad", "n_list": [1, 2]}"#).unwrap();
        assert_eq!(c.n_list, Some(vec![1, 2]));
    }
}
