use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use qcomm::amplamp::NoiseModel;
use qcomm::boolfn::{gadget_by_name, load_function, symmetric_by_name, BooleanFunction, Gadget, SymmetricSpec};
use qcomm::params::Constants;
use serde::Deserialize;

/// `perfect`, `phase:<eps>` or `phases:<eps>`; `eps` is the level-one error
/// `ε_1`, which fixes the schedule base as `1/(4 ε_1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    Perfect,
    Phase(f64),
    Phases(f64),
}

impl FromStr for NoiseSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let eps = |v: &str| -> std::result::Result<f64, String> {
            let e: f64 = v.parse().map_err(|_| format!("bad eps `{v}`"))?;
            if !(e > 0.0 && e < 0.25) {
                return Err(format!("eps must lie in (0, 1/4), got {e}"));
            }
            Ok(e)
        };
        match s.split_once(':') {
            None if s == "perfect" => Ok(NoiseSpec::Perfect),
            Some(("phase", v)) => Ok(NoiseSpec::Phase(eps(v)?)),
            Some(("phases", v)) => Ok(NoiseSpec::Phases(eps(v)?)),
            _ => Err(format!("unknown noise `{s}` (perfect | phase:<eps> | phases:<eps>)")),
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::Perfect => write!(f, "perfect"),
            NoiseSpec::Phase(e) => write!(f, "phase:{e}"),
            NoiseSpec::Phases(e) => write!(f, "phases:{e}"),
        }
    }
}

impl NoiseSpec {
    pub fn model(&self, seed: u64) -> NoiseModel {
        match self {
            NoiseSpec::Perfect => NoiseModel::Perfect,
            NoiseSpec::Phase(_) => NoiseModel::PhaseOnComplement { seed },
            NoiseSpec::Phases(_) => NoiseModel::RandomPhases { seed },
        }
    }

    /// Schedule base implied by the level-one error.
    pub fn eps_base(&self) -> Option<f64> {
        match self {
            NoiseSpec::Perfect => None,
            NoiseSpec::Phase(e) | NoiseSpec::Phases(e) => Some(1.0 / (4.0 * e)),
        }
    }
}

/// Constant overrides read from a TOML file.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConstantsFile {
    pub eps_base: Option<f64>,
    pub reflect_slope: Option<f64>,
    pub reflect_offset: Option<u64>,
    pub unknown_reps: Option<usize>,
    pub part2_budget: Option<f64>,
    pub part2_success: Option<f64>,
    pub part1_miss: Option<f64>,
    pub part1_error: Option<f64>,
    pub baseline_c: Option<f64>,
    pub step_budget: Option<u64>,
}

impl ConstantsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Applies `other` on top of `self`, field by field.
    fn overlay(mut self, other: &ConstantsFile) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            eps_base,
            reflect_slope,
            reflect_offset,
            unknown_reps,
            part2_budget,
            part2_success,
            part1_miss,
            part1_error,
            baseline_c,
            step_budget
        );
        self
    }

    fn apply(&self, c: &mut Constants) {
        if let Some(v) = self.eps_base {
            c.schedule.base = v;
        }
        if let Some(v) = self.reflect_slope {
            c.reflection.slope = v;
        }
        if let Some(v) = self.reflect_offset {
            c.reflection.offset = v;
        }
        if let Some(v) = self.unknown_reps {
            c.unknown_reps = v;
        }
        if let Some(v) = self.part2_budget {
            c.part2_budget = v;
        }
        if let Some(v) = self.part2_success {
            c.part2_success = v;
        }
        if let Some(v) = self.part1_miss {
            c.part1_miss = v;
        }
        if let Some(v) = self.part1_error {
            c.part1_error = v;
        }
        if let Some(v) = self.baseline_c {
            c.baseline_c = v;
        }
        if let Some(v) = self.step_budget {
            c.step_budget = v;
        }
    }
}

/// Flags shared by every experiment.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Problem sizes; a comma-separated list spans a grid.
    #[arg(long, value_delimiter = ',', default_value = "64")]
    pub n: Vec<usize>,
    /// Solution-count guesses or thresholds.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub t: Vec<usize>,
    /// Planted solution counts; defaults to `t` (or `t/2` for counting).
    #[arg(long, value_delimiter = ',')]
    pub z: Vec<usize>,
    /// and2 | xor2 | ip:<m> | addr:<n>.
    #[arg(long, default_value = "and2")]
    pub gadget: String,
    /// Communication cost q of one gadget evaluation.
    #[arg(long)]
    pub q: Option<u64>,
    /// parity | or | nor | maj | custom:<file>.
    #[arg(long = "fn", default_value = "parity")]
    pub function: String,
    /// perfect | phase:<eps> | phases:<eps>.
    #[arg(long, default_value = "phases:0.0025")]
    pub noise: NoiseSpec,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV output path (stdout when absent).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON-lines mirror of the CSV rows.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
    /// TOML file with constant overrides.
    #[arg(long)]
    pub constants: Option<PathBuf>,
    #[arg(long)]
    pub eps_base: Option<f64>,
    #[arg(long)]
    pub part2_budget: Option<f64>,
    #[arg(long)]
    pub reflect_slope: Option<f64>,
    #[arg(long)]
    pub reflect_offset: Option<u64>,
    #[arg(long)]
    pub unknown_reps: Option<usize>,
}

impl Common {
    fn flag_overrides(&self) -> ConstantsFile {
        ConstantsFile {
            eps_base: self.eps_base,
            reflect_slope: self.reflect_slope,
            reflect_offset: self.reflect_offset,
            unknown_reps: self.unknown_reps,
            part2_budget: self.part2_budget,
            ..ConstantsFile::default()
        }
    }

    /// Defaults, then the constants file, then the noise level, then flags.
    pub fn resolve_constants(&self) -> Result<Constants> {
        let mut layered = match &self.constants {
            Some(path) => ConstantsFile::load(path)?,
            None => ConstantsFile::default(),
        };
        if let Some(base) = self.noise.eps_base() {
            if let Some(explicit) = self.eps_base.or(layered.eps_base) {
                if (explicit - base).abs() > 1e-9 * base {
                    bail!("--noise {} implies eps base {base}, but {explicit} was also given", self.noise);
                }
            }
            layered.eps_base = Some(base);
        }
        let layered = layered.overlay(&self.flag_overrides());
        let mut c = Constants::default();
        layered.apply(&mut c);
        if !(c.schedule.base > 0.0) {
            bail!("eps base must be positive");
        }
        Ok(c)
    }

    pub fn gadget(&self) -> Result<Gadget> {
        Ok(gadget_by_name(&self.gadget, Some(self.q.unwrap_or(1)))?)
    }

    /// The gadget, with `addr`/`ip` sized by `n` when no size is given.
    pub fn gadget_sized(&self, n: usize) -> Result<Gadget> {
        let spec = match self.gadget.as_str() {
            "addr" | "ip" => format!("{}:{n}", self.gadget),
            other => other.to_string(),
        };
        Ok(gadget_by_name(&spec, Some(self.q.unwrap_or(1)))?)
    }

    pub fn function(&self, n: usize) -> Result<BooleanFunction> {
        if let Some(path) = self.function.strip_prefix("custom:") {
            let f = load_function(Path::new(path))?;
            if f.n() != n {
                bail!("{path} has arity {}, expected {n}", f.n());
            }
            return Ok(f);
        }
        Ok(symmetric_by_name(&self.function, n)?.to_function()?)
    }

    pub fn symmetric(&self, n: usize) -> Result<SymmetricSpec> {
        if self.function.starts_with("custom:") {
            let f = self.function(n)?;
            return f
                .as_symmetric()
                .with_context(|| format!("{} is not symmetric", self.function));
        }
        if let Some(w) = self.function.strip_prefix("threshold:") {
            return Ok(SymmetricSpec::threshold(n, w.parse().context("threshold weight")?)?);
        }
        Ok(symmetric_by_name(&self.function, n)?)
    }

    /// Compact echo of every constant for the CSV rows.
    pub fn constants_echo(&self, c: &Constants) -> String {
        format!(
            "eps_base={};reflect={}x+{};unknown_reps={};part2_budget={};part1_miss={};part1_error={};baseline_c={}",
            c.schedule.base,
            c.reflection.slope,
            c.reflection.offset,
            c.unknown_reps,
            c.part2_budget,
            c.part1_miss,
            c.part1_error,
            c.baseline_c
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct Wrap {
        #[command(flatten)]
        common: Common,
    }

    fn parse(args: &[&str]) -> Common {
        Wrap::parse_from(std::iter::once("x").chain(args.iter().copied())).common
    }

    #[test]
    fn noise_specs() {
        assert_eq!("perfect".parse::<NoiseSpec>().unwrap(), NoiseSpec::Perfect);
        assert_eq!("phases:0.0025".parse::<NoiseSpec>().unwrap(), NoiseSpec::Phases(0.0025));
        assert!("phase:2".parse::<NoiseSpec>().is_err());
        assert!("loud".parse::<NoiseSpec>().is_err());
        assert!((NoiseSpec::Phase(0.0025).eps_base().unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn grid_and_constants() {
        let c = parse(&["--n", "64,256", "--noise", "phases:0.025", "--unknown-reps", "5"]);
        assert_eq!(c.n, vec![64, 256]);
        let k = c.resolve_constants().unwrap();
        assert!((k.schedule.base - 10.0).abs() < 1e-9);
        assert_eq!(k.unknown_reps, 5);
        let clash = parse(&["--noise", "phases:0.0025", "--eps-base", "10"]);
        assert!(clash.resolve_constants().is_err());
    }

    #[test]
    fn constants_file_layering() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "part2_budget = 50.0\nunknown_reps = 7\n").unwrap();
        let c = parse(&["--constants", path.to_str().unwrap(), "--unknown-reps", "9", "--noise", "perfect"]);
        let k = c.resolve_constants().unwrap();
        assert_eq!(k.part2_budget, 50.0);
        assert_eq!(k.unknown_reps, 9);
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(c.resolve_constants().is_err());
    }
}
