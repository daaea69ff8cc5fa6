//! Experiment configuration: the TOML file format, the two built-in examples,
//! and validation into a ready-to-run [`Experiment`].

use mislab_core::{
    Family, GaussianParams, MixtureSpec, MomentFunction, ProposalSet, Scheme, SearchMode,
    StudentTParams, TargetSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const DEFAULT_RUNS: usize = 5000;
pub const DEFAULT_SEED: u64 = 20_170_305;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Gaussian,
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Moment {
    #[default]
    Identity,
    Square,
}

impl From<Moment> for MomentFunction {
    fn from(m: Moment) -> Self {
        match m {
            Moment::Identity => MomentFunction::Identity,
            Moment::Square => MomentFunction::Square,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Search {
    #[default]
    Auto,
    Exhaustive,
}

impl From<Search> for SearchMode {
    fn from(s: Search) -> Self {
        match s {
            Search::Auto => SearchMode::Auto,
            Search::Exhaustive => SearchMode::Exhaustive,
        }
    }
}

/// One target mixture component. `scale_sq` is the variance for Gaussians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub weight: f64,
    pub family: FamilyKind,
    pub location: f64,
    pub scale_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    #[serde(default = "one")]
    pub normalizing_constant: f64,
    /// Overrides the mixture mean as the ground truth for the MSE.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_mean: Option<f64>,
    pub components: Vec<ComponentConfig>,
}

fn one() -> f64 {
    1.0
}

/// `count` proposals of one family with locations equidistant on `interval`,
/// both endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProposalGrid {
    pub family: FamilyKind,
    pub count: usize,
    pub interval: [f64; 2],
    pub scale_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub schemes: Vec<String>,
    /// Numbers of subsets tried by the partial schemes.
    pub p_values: Vec<usize>,
    pub alpha: f64,
    /// Samples drawn per proposal.
    pub k_values: Vec<usize>,
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    #[serde(default)]
    pub moment: Moment,
    #[serde(default)]
    pub search: Search,
    pub target: TargetConfig,
    pub proposals: ProposalGrid,
}

fn default_runs() -> usize {
    DEFAULT_RUNS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn all_scheme_names() -> Vec<String> {
    Scheme::ALL.iter().map(|s| s.name().to_owned()).collect()
}

/// Two-Gaussian target with 32 Gaussian proposals on `[-8, 8]`.
pub fn builtin_example1() -> ExperimentConfig {
    let gauss = |location| ComponentConfig {
        weight: 0.5,
        family: FamilyKind::Gaussian,
        location,
        scale_sq: 1.0,
        dof: None,
    };
    ExperimentConfig {
        name: "example1".into(),
        schemes: all_scheme_names(),
        p_values: vec![16],
        alpha: 1.0,
        k_values: vec![1, 2, 3, 4, 5],
        n_runs: DEFAULT_RUNS,
        base_seed: DEFAULT_SEED,
        moment: Moment::Identity,
        search: Search::Auto,
        target: TargetConfig {
            normalizing_constant: 1.0,
            reference_mean: None,
            components: vec![gauss(-3.0), gauss(5.0)],
        },
        proposals: ProposalGrid {
            family: FamilyKind::Gaussian,
            count: 32,
            interval: [-8.0, 8.0],
            scale_sq: 3.0,
            dof: None,
        },
    }
}

/// Five-component Student-t target with 32 Student-t proposals on `[-8, 8]`.
pub fn builtin_example2() -> ExperimentConfig {
    let t = |location| ComponentConfig {
        weight: 0.2,
        family: FamilyKind::StudentT,
        location,
        scale_sq: 1.0,
        dof: Some(5.0),
    };
    ExperimentConfig {
        name: "example2".into(),
        schemes: vec!["p-dm".into(), "h-dm".into()],
        p_values: vec![1, 2, 4, 8, 16, 32],
        alpha: 0.1,
        k_values: vec![1],
        n_runs: DEFAULT_RUNS,
        base_seed: DEFAULT_SEED,
        moment: Moment::Identity,
        search: Search::Auto,
        target: TargetConfig {
            normalizing_constant: 1.0,
            reference_mean: None,
            components: [-3.0, -1.0, 0.0, 3.0, 4.0].into_iter().map(t).collect(),
        },
        proposals: ProposalGrid {
            family: FamilyKind::StudentT,
            count: 32,
            interval: [-8.0, 8.0],
            scale_sq: 3.0,
            dof: Some(4.0),
        },
    }
}

pub fn builtin_example(which: u8) -> Result<ExperimentConfig> {
    match which {
        1 => Ok(builtin_example1()),
        2 => Ok(builtin_example2()),
        other => Err(HarnessError::Config(format!("unknown example {other}; expected 1 or 2"))),
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

fn family(kind: FamilyKind, location: f64, scale_sq: f64, dof: Option<f64>) -> Result<Family> {
    Ok(match kind {
        FamilyKind::Gaussian => {
            if dof.is_some() {
                return Err(HarnessError::Config("gaussian entries take no dof".into()));
            }
            GaussianParams::new(location, scale_sq)?.into()
        }
        FamilyKind::StudentT => {
            let dof = dof.ok_or_else(|| HarnessError::Config("student-t entries need dof".into()))?;
            StudentTParams::new(location, scale_sq, dof)?.into()
        }
    })
}

/// Equidistant locations on `[lo, hi]` including both ends.
pub fn grid_locations(count: usize, [lo, hi]: [f64; 2]) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// A validated configuration with its densities built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    /// Canonical order: s-mis, dm, p-dm, h-dm.
    pub schemes: Vec<Scheme>,
    pub p_values: Vec<usize>,
    pub alpha: f64,
    pub k_values: Vec<usize>,
    pub n_runs: usize,
    pub base_seed: u64,
    pub moment: MomentFunction,
    pub search: SearchMode,
    pub target: TargetSpec,
    pub proposals: ProposalSet,
}

impl Experiment {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_owned()));
        let mut schemes = Vec::new();
        for name in &cfg.schemes {
            let s = Scheme::from_name(name)
                .ok_or_else(|| HarnessError::Config(format!("unknown scheme {name:?}")))?;
            if !schemes.contains(&s) {
                schemes.push(s);
            }
        }
        schemes.sort();
        if schemes.is_empty() {
            return bad("at least one scheme is required");
        }
        if cfg.n_runs == 0 {
            return bad("n_runs must be at least 1");
        }
        if cfg.k_values.is_empty() || cfg.k_values.contains(&0) {
            return bad("k_values must be a non-empty list of positive integers");
        }
        if !(0.0..=1.0).contains(&cfg.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        let grid = &cfg.proposals;
        if grid.count == 0 {
            return bad("proposal count must be positive");
        }
        if !(grid.interval[0] < grid.interval[1]) {
            return bad("proposal interval lower bound must be below the upper bound");
        }
        let n = grid.count;
        if schemes.iter().any(Scheme::uses_subsets) {
            if cfg.p_values.is_empty() {
                return bad("p_values is required for p-dm and h-dm");
            }
            if let Some(p) = cfg.p_values.iter().find(|&&p| p == 0 || !n.is_multiple_of(p)) {
                return Err(HarnessError::Config(format!(
                    "P = {p} does not divide the {n} proposals"
                )));
            }
        }
        let mut p_values = cfg.p_values.clone();
        p_values.sort_unstable();
        p_values.dedup();
        let mut k_values = cfg.k_values.clone();
        k_values.sort_unstable();
        k_values.dedup();

        let proposals = ProposalSet::new(
            grid_locations(n, grid.interval)
                .into_iter()
                .map(|m| family(grid.family, m, grid.scale_sq, grid.dof))
                .collect::<Result<_>>()?,
        )?;
        let components = cfg
            .target
            .components
            .iter()
            .map(|c| Ok((c.weight, family(c.family, c.location, c.scale_sq, c.dof)?)))
            .collect::<Result<Vec<_>>>()?;
        let mixture = MixtureSpec::new(components)?;
        let target = match cfg.target.reference_mean {
            Some(m) => {
                TargetSpec::with_reference_mean(mixture, cfg.target.normalizing_constant, m)?
            }
            None => TargetSpec::new(mixture, cfg.target.normalizing_constant)?,
        };

        Ok(Self {
            name: cfg.name.clone(),
            schemes,
            p_values,
            alpha: cfg.alpha,
            k_values,
            n_runs: cfg.n_runs,
            base_seed: cfg.base_seed,
            moment: cfg.moment.into(),
            search: cfg.search.into(),
            target,
            proposals,
        })
    }

    /// `(scheme, P, k)` cells in output order. Standard MIS and full DM get
    /// one cell per `k`, with `P = N` and `P = 1` respectively.
    pub fn cells(&self) -> Vec<(Scheme, usize, usize)> {
        let n = self.proposals.len();
        let mut out = Vec::new();
        for &scheme in &self.schemes {
            let ps: Vec<usize> = if scheme.uses_subsets() {
                self.p_values.clone()
            } else {
                vec![scheme.effective_subsets(0, n)]
            };
            for p in ps {
                for &k in &self.k_values {
                    out.push((scheme, p, k));
                }
            }
        }
        out
    }
}
