use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{AlgoConfig, AlgorithmName, Variation};
use crate::error::{Error, Result};
use crate::problems::{list_problems, ProblemId, Suite};
use crate::transforms::{RotationMatrix, TransformSpec};

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "MOINST_OUT";

/// Default Beta-CDF parameter values, used for both α and β.
pub const DEFAULT_GRID: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];

/// An experiment as written in a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Problem selectors: `zdt1-d2`, `zdt`, `zdt-d2`, `all`, `all-d2`.
    pub problems: Vec<String>,
    #[serde(default = "identity_only")]
    pub search_transforms: Vec<TransformEntry>,
    #[serde(default = "identity_only")]
    pub objective_transforms: Vec<TransformEntry>,
    /// Pair every search transform with every objective transform instead of
    /// varying one space at a time.
    #[serde(default)]
    pub combined_grid: bool,
    pub algorithms: Vec<AlgorithmEntry>,
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub parallelism: Option<usize>,
    /// Also write every evaluation of every run to `logs/`.
    #[serde(default)]
    pub write_logs: bool,
}

fn identity_only() -> Vec<TransformEntry> {
    vec![TransformEntry::Identity]
}

fn default_grid() -> Vec<f64> {
    DEFAULT_GRID.to_vec()
}

/// One entry of a transform list; grids and seed lists expand to several
/// transforms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformEntry {
    Identity,
    BetaCdf {
        alpha: f64,
        beta: f64,
    },
    BetaCdfGrid {
        #[serde(default = "default_grid")]
        values: Vec<f64>,
    },
    SpheredRotation(RotationEntry),
}

/// Rotation entry. Exactly one of `seed`, `seeds`, `angle` or `matrix`.
/// With `dim` (or a matrix) the entry only applies to problems of that
/// dimension; angles only apply to two-dimensional problems.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
}

impl TransformEntry {
    /// Transforms this entry yields for a problem of dimension `dim`.
    pub fn expand(&self, dim: usize) -> Result<Vec<TransformSpec>> {
        match self {
            TransformEntry::Identity => Ok(vec![TransformSpec::Identity]),
            TransformEntry::BetaCdf { alpha, beta } => Ok(vec![TransformSpec::beta_cdf(*alpha, *beta)?]),
            TransformEntry::BetaCdfGrid { values } => {
                if values.is_empty() {
                    return Err(Error::Config("beta_cdf_grid needs at least one value".into()));
                }
                let mut out = Vec::with_capacity(values.len() * values.len());
                for &a in values {
                    for &b in values {
                        out.push(TransformSpec::beta_cdf(a, b)?);
                    }
                }
                Ok(out)
            }
            TransformEntry::SpheredRotation(r) => r.expand(dim),
        }
    }
}

impl RotationEntry {
    fn expand(&self, dim: usize) -> Result<Vec<TransformSpec>> {
        let given = [
            self.seed.is_some(),
            self.seeds.is_some(),
            self.angle.is_some(),
            self.matrix.is_some(),
        ];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(Error::Config(
                "sphered_rotation needs exactly one of seed, seeds, angle, matrix".into(),
            ));
        }
        if let Some(rows) = &self.matrix {
            let m = RotationMatrix::from_rows(rows)?;
            if self.dim.is_some_and(|d| d != m.dim()) {
                return Err(Error::Config("rotation dim disagrees with its matrix".into()));
            }
            return Ok(if m.dim() == dim {
                vec![TransformSpec::rotation_matrix(m)]
            } else {
                vec![]
            });
        }
        if self.dim.is_some_and(|d| d != dim) {
            return Ok(vec![]);
        }
        if let Some(a) = self.angle {
            return Ok(if dim == 2 {
                vec![TransformSpec::rotation_angle(a)?]
            } else {
                vec![]
            });
        }
        let seeds = self.seeds.clone().unwrap_or_else(|| self.seed.into_iter().collect());
        seeds
            .into_iter()
            .map(|s| TransformSpec::rotation_seed(dim, s))
            .collect()
    }
}

/// Untagged helper so `population = 100` and `population = [10, 100]` both
/// parse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<usize> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmEntry {
    pub name: AlgorithmName,
    pub population: OneOrMany,
    pub budget: usize,
    #[serde(default)]
    pub variation: Variation,
}

impl AlgorithmEntry {
    /// One template per population size; seeds are filled in per job.
    pub fn templates(&self) -> Vec<AlgoConfig> {
        self.population
            .values()
            .into_iter()
            .map(|population| AlgoConfig {
                name: self.name,
                population,
                budget: self.budget,
                seed: 0,
                variation: self.variation,
            })
            .collect()
    }
}

/// Resolves one selector to problems in the stable listing order.
pub fn select_problems(selector: &str) -> Result<Vec<ProblemId>> {
    let selector = selector.trim();
    if let Ok(id) = selector.parse::<ProblemId>() {
        return Ok(vec![id]);
    }
    let unknown = || Error::Config(format!("invalid problem selector {selector:?}"));
    let (head, dim) = match selector.rsplit_once("-d") {
        Some((head, d)) => (head, Some(d.parse::<usize>().map_err(|_| unknown())?)),
        None => (selector, None),
    };
    let suite = match head {
        "all" => None,
        name => Some(name.parse::<Suite>().map_err(|_| unknown())?),
    };
    let found: Vec<ProblemId> = list_problems()
        .into_iter()
        .filter(|p| suite.is_none_or(|s| p.suite() == s) && dim.is_none_or(|d| p.dim() == d))
        .collect();
    if found.is_empty() {
        return Err(unknown());
    }
    Ok(found)
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() {
            return Err(Error::Config("no problems selected".into()));
        }
        if self.search_transforms.is_empty() || self.objective_transforms.is_empty() {
            return Err(Error::Config("transform lists must not be empty".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms configured".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.parallelism == Some(0) {
            return Err(Error::Config("parallelism must be at least 1".into()));
        }
        for a in &self.algorithms {
            if a.population.values().is_empty() {
                return Err(Error::Config(format!("{} has no population size", a.name)));
            }
            for t in a.templates() {
                t.validate().map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        self.problems()?;
        Ok(())
    }

    /// Selected problems, deduplicated, in selector order.
    pub fn problems(&self) -> Result<Vec<ProblemId>> {
        let mut out: Vec<ProblemId> = Vec::new();
        for s in &self.problems {
            for p in select_problems(s)? {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    /// Output directory: the config's, else `$MOINST_OUT`, else `moinst-out`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("moinst-out"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
problems = ["zdt1-d2", "dtlz-d2"]
repetitions = 3
base_seed = 7

[[search_transforms]]
kind = "beta_cdf_grid"

[[search_transforms]]
kind = "sphered_rotation"
seeds = [1, 2]

[[objective_transforms]]
kind = "beta_cdf"
alpha = 0.5
beta = 2.0

[[algorithms]]
name = "nsga2"
population = [10, 100]
budget = 500

[[algorithms]]
name = "random_search"
population = 100
budget = 500
"#;

    #[test]
    fn parses_and_roundtrips() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.problems().unwrap().len(), 8);
        assert_eq!(cfg.algorithms[0].templates().len(), 2);
        assert_eq!(cfg.search_transforms[0].expand(2).unwrap().len(), 25);
        assert_eq!(cfg.search_transforms[1].expand(10).unwrap().len(), 2);
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn selectors() {
        assert_eq!(select_problems("all").unwrap().len(), 30);
        assert_eq!(select_problems("all-d2").unwrap().len(), 18);
        assert_eq!(select_problems("zdt").unwrap().len(), 10);
        assert_eq!(select_problems("mmf-d2").unwrap().len(), 6);
        assert_eq!(select_problems("dtlz3-d10").unwrap()[0].to_string(), "dtlz3-d10");
        for bad in ["zdt5-d2", "mmf-d10", "foo", "all-dx", ""] {
            assert!(select_problems(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_errors() {
        let broken = [
            SAMPLE.replace("repetitions = 3", "repetitions = 0"),
            SAMPLE.replace("\"zdt1-d2\", \"dtlz-d2\"", "\"zdt9-d2\""),
            SAMPLE.replace("budget = 500\n\n[[algorithms]]", "budget = 5\n\n[[algorithms]]"),
            SAMPLE.replace("name = \"nsga2\"", "name = \"nsga3\""),
            SAMPLE.replace("base_seed = 7", "base_seed = 7\nsurprise = 1"),
            format!("search_transforms = []\n{SAMPLE}").replace(
                "[[search_transforms]]\nkind = \"beta_cdf_grid\"\n\n[[search_transforms]]\nkind = \"sphered_rotation\"\nseeds = [1, 2]\n",
                "",
            ),
        ];
        for text in &broken {
            let err = ExperimentConfig::from_toml_str(text).unwrap_err();
            assert!(err.is_config(), "{err}");
        }
    }

    #[test]
    fn rotation_entries() {
        let r = |e: RotationEntry, d| TransformEntry::SpheredRotation(e).expand(d);
        let angle = RotationEntry {
            angle: Some(0.5),
            ..Default::default()
        };
        assert_eq!(r(angle.clone(), 2).unwrap().len(), 1);
        assert!(r(angle, 10).unwrap().is_empty());
        let pinned = RotationEntry {
            dim: Some(10),
            seed: Some(3),
            ..Default::default()
        };
        assert!(r(pinned.clone(), 2).unwrap().is_empty());
        assert_eq!(r(pinned, 10).unwrap()[0].dim(), Some(10));
        let both = RotationEntry {
            seed: Some(1),
            angle: Some(1.0),
            ..Default::default()
        };
        assert!(r(both, 2).is_err());
        let m = RotationEntry {
            matrix: Some(vec![vec![0.0, -1.0], vec![1.0, 0.0]]),
            ..Default::default()
        };
        assert_eq!(r(m.clone(), 2).unwrap().len(), 1);
        assert!(r(m, 10).unwrap().is_empty());
    }
}
