//! Experiment configuration files.
//!
//! A config is a JSON object. Unknown fields are rejected everywhere so that
//! typos surface as schema errors instead of silently taking defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use okounkov::adelic::GapConfig;
use okounkov::filt::MultiplicativeFiltration;
use okounkov::norm::{Metric, MetricKind};
use okounkov::poly::Polynomial;
use okounkov::ratgeom::{self, Point};
use okounkov::rational::{self, Rational};
use okounkov::series::{GradedSeries, Model, Section};
use okounkov::{adelic, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Body,
    Transform,
    Measure,
    Adelic,
    Envelope,
    Compare,
    Acceptance,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Body => "body",
            Pipeline::Transform => "transform",
            Pipeline::Measure => "measure",
            Pipeline::Adelic => "adelic",
            Pipeline::Envelope => "envelope",
            Pipeline::Compare => "compare",
            Pipeline::Acceptance => "acceptance",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// When present it must match the subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Pipeline>,
    pub seed: u64,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub series: SeriesSpec,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default)]
    pub filtration: FiltrationSpec,
    #[serde(default)]
    pub metric: MetricSpec,
    /// Degrees for per-degree pipelines; defaults to `1..=k_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_range: Option<Vec<usize>>,
    #[serde(default)]
    pub caps: Caps,
    /// Number of grid intervals for plot data and comparisons.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Number of level intervals of the distribution table.
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Truncation degrees `p` of the Fujita table; empty skips it.
    #[serde(default)]
    pub p_list: Vec<usize>,
    #[serde(default = "default_slope_bound")]
    pub slope_bound: f64,
    #[serde(default = "default_gap_bound")]
    pub gap_bound: f64,
    /// Subset of acceptance criteria; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<u8>>,
}

fn default_k_max() -> usize {
    4
}
fn default_grid() -> usize {
    100
}
fn default_levels() -> usize {
    20
}
fn default_slope_bound() -> f64 {
    10.0
}
fn default_gap_bound() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    /// `O(degree)` on ℙⁿ valued at the affine point `point` (default origin).
    Projective {
        n: usize,
        #[serde(default = "one")]
        degree: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<Vec<String>>,
    },
    /// Lattice polytope given by rational vertex strings.
    Toric { vertices: Vec<Vec<String>> },
}

fn one() -> u32 {
    1
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Projective {
            n: 1,
            degree: 1,
            point: None,
        }
    }
}

/// Homogeneous polynomial as `{"2,0": "1", "1,1": "-3/2"}`.
pub type PolySpec = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub degree: usize,
    pub poly: PolySpec,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeriesSpec {
    #[default]
    Complete,
    Generated {
        generators: Vec<SectionSpec>,
    },
    /// `bases[i]` is a basis of `V_{i+1}`.
    Explicit {
        bases: Vec<Vec<PolySpec>>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FiltrationSpec {
    /// Monomial weights, one per variable.
    Weight { weights: Vec<String> },
    #[default]
    Trivial,
    /// Minima of the configured metric.
    Minima,
    /// Heights for the configured metric.
    Height,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub kind: MetricKind,
    #[serde(default)]
    pub scale: f64,
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec {
            kind: MetricKind::FsSup,
            scale: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Largest coefficient box enumerated for small sections.
    #[serde(default = "default_enumeration")]
    pub enumeration: u64,
    /// Refinement depth of norm enclosures.
    #[serde(default = "default_depth")]
    pub depth: u32,
    /// Monte-Carlo samples for Euler characteristics.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_enumeration() -> u64 {
    10_000_000
}
fn default_depth() -> u32 {
    3
}
fn default_samples() -> usize {
    100_000
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: default_enumeration(),
            depth: default_depth(),
            samples: default_samples(),
        }
    }
}

/// Scalar overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub k_max: Option<usize>,
    pub grid: Option<usize>,
    pub levels: Option<usize>,
    pub samples: Option<usize>,
    pub depth: Option<u32>,
    pub enumeration: Option<u64>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.k_max {
            self.k_max = v;
        }
        if let Some(v) = o.grid {
            self.grid = v;
        }
        if let Some(v) = o.levels {
            self.levels = v;
        }
        if let Some(v) = o.samples {
            self.caps.samples = v;
        }
        if let Some(v) = o.depth {
            self.caps.depth = v;
        }
        if let Some(v) = o.enumeration {
            self.caps.enumeration = v;
        }
    }

    /// SHA-256 of the canonical serialization (sorted keys, defaults filled).
    pub fn sha256(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    pub fn metric(&self) -> Metric {
        Metric::scaled(self.metric.kind, self.metric.scale)
    }

    pub fn model(&self) -> Result<Model> {
        match &self.model {
            ModelSpec::Projective { n, degree, point } => {
                let point = match point {
                    Some(p) => p
                        .iter()
                        .map(|s| rational::parse(s))
                        .collect::<Result<Vec<_>>>()?,
                    None => vec![Rational::from_integer(0.into()); *n],
                };
                Model::projective(*n, *degree, point)
            }
            ModelSpec::Toric { vertices } => {
                let pts = vertices
                    .iter()
                    .map(|v| {
                        v.iter()
                            .map(|s| rational::parse(s))
                            .collect::<Result<Point>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Model::toric(ratgeom::convex_hull(&pts)?)
            }
        }
    }

    pub fn series(&self) -> Result<GradedSeries> {
        let model = self.model()?;
        let nv = model.nvars();
        match &self.series {
            SeriesSpec::Complete => Ok(GradedSeries::complete(model, self.k_max)),
            SeriesSpec::Generated { generators } => {
                let gens = generators
                    .iter()
                    .map(|g| Ok(Section::new(g.degree, parse_poly(nv, &g.poly)?)))
                    .collect::<Result<Vec<_>>>()?;
                GradedSeries::generated(model, &gens, self.k_max)
            }
            SeriesSpec::Explicit { bases } => {
                if bases.len() < self.k_max {
                    return Err(Error::Invalid(format!(
                        "explicit series lists {} degrees, k_max is {}",
                        bases.len(),
                        self.k_max
                    )));
                }
                let mut polys = vec![Vec::new()];
                for b in &bases[..self.k_max] {
                    polys.push(
                        b.iter()
                            .map(|p| parse_poly(nv, p))
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                GradedSeries::explicit(model, polys)
            }
        }
    }

    pub fn filtration(&self, series: &GradedSeries) -> Result<MultiplicativeFiltration> {
        match &self.filtration {
            FiltrationSpec::Weight { weights } => {
                let w = weights
                    .iter()
                    .map(|s| rational::parse(s))
                    .collect::<Result<Vec<_>>>()?;
                MultiplicativeFiltration::weight(series, &w)
            }
            FiltrationSpec::Trivial => MultiplicativeFiltration::trivial(series),
            FiltrationSpec::Minima => adelic::minima_filtration(series, self.metric()),
            FiltrationSpec::Height => adelic::height_filtration(series, self.metric()),
        }
    }

    pub fn k_range(&self) -> Vec<usize> {
        self.k_range
            .clone()
            .unwrap_or_else(|| (1..=self.k_max).collect())
    }

    pub fn gap_config(&self) -> GapConfig {
        GapConfig {
            cap: self.caps.enumeration,
            depth: self.caps.depth,
            samples: self.caps.samples,
            seed: self.seed,
            bound: self.gap_bound,
        }
    }
}

/// Parses `{"a,b,…": "coefficient"}` into a polynomial in `nvars` variables.
pub fn parse_poly(nvars: usize, spec: &PolySpec) -> Result<Polynomial> {
    let mut terms = Vec::new();
    for (exp, coeff) in spec {
        let e = exp
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad exponent {exp:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if e.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: e.len(),
            });
        }
        terms.push((e, rational::parse(coeff)?));
    }
    Ok(Polynomial::from_terms(nvars, terms))
}
