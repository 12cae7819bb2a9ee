//! Adelically normed section lattices over ℚ at desk scale.
//!
//! Over ℚ the finite places reduce to the content of an integer vector, so an
//! adelic lattice is `ℤ^N` (monomial coordinates of `H⁰(ℙⁿ, O(kd))`) with one
//! archimedean norm. Every metric shipped here is torus-invariant, which
//! gives `|c_a| · ‖X^a‖ ≤ ‖s‖` and drives both pruning and box bounds.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filt::{FilteredSpace, FiltrationKind, MultiplicativeFiltration};
use crate::norm::{self, decide_at_most, Decision, Enclosure, Metric, MetricKind, MonomialNorms};
use crate::poly::{monomials_of_degree, Exponent, Polynomial};
use crate::rational::{self, Rational};
use crate::series::{GradedSeries, Model};
use crate::transform;

/// Floating tolerance on log-norm comparisons between monomials.
const LOG_TOL: f64 = 1e-12;

/// Section lattice `ℤ^N ⊂ H⁰(ℙⁿ, O(kd))` in monomial coordinates.
#[derive(Debug, Clone)]
pub struct AdelicLattice {
    n: usize,
    k: usize,
    norms: MonomialNorms,
    log_norms: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Minima {
    /// `λ_1 ≤ … ≤ λ_N`.
    pub lambdas: Vec<f64>,
    /// `e_j = −log λ_j`, descending.
    pub e: Vec<f64>,
    /// Achieving vectors in monomial coordinates.
    pub vectors: Vec<Vec<i64>>,
    pub certified: bool,
    /// Candidate vectors examined.
    pub visited: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmallSections {
    /// `#Ê`, zero included.
    pub count: u64,
    /// Vectors left undecided after refinement; not counted.
    pub ambiguous: u64,
    /// `ĥ⁰ = log #Ê` over certified small vectors.
    pub hat_dim: f64,
    /// `log` of the count with every undecided vector included.
    pub hat_dim_upper: f64,
    pub box_size: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiMethod {
    ExactLowdim,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerCharacteristic {
    pub method: ChiMethod,
    pub value: f64,
    /// Standard error of the log-volume; zero for closed forms.
    pub std_err: f64,
    pub samples: usize,
}

impl AdelicLattice {
    /// Lattice of `H⁰(ℙⁿ, O(d))^{⊗k}` with monomial basis.
    pub fn new(n: usize, line_degree: u32, k: usize, metric: Metric) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        let monomials = monomials_of_degree(n + 1, line_degree * k as u32);
        let log_norms = monomials
            .iter()
            .map(|a| metric.log_monomial(a, k))
            .collect();
        Ok(AdelicLattice {
            n,
            k,
            norms: MonomialNorms::new(metric, monomials),
            log_norms,
        })
    }

    /// Lattice of `V_k` for a complete projective series.
    pub fn for_series(series: &GradedSeries, k: usize, metric: Metric) -> Result<Self> {
        let Model::Projective { n, degree, .. } = series.model() else {
            return Err(Error::Unsupported(
                "adelic lattices are built on projective models".into(),
            ));
        };
        let lat = Self::new(*n, *degree, k, metric)?;
        let basis = series.basis(k)?;
        let complete = basis.len() == lat.dim()
            && basis
                .iter()
                .zip(lat.monomials())
                .all(|(s, a)| s.poly.terms().len() == 1 && s.poly.coefficient(a).is_one());
        if !complete {
            return Err(Error::Unsupported(
                "adelic lattices require the complete series".into(),
            ));
        }
        Ok(lat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.norms.monomials.len()
    }

    pub fn metric(&self) -> Metric {
        self.norms.metric
    }

    pub fn monomials(&self) -> &[Exponent] {
        &self.norms.monomials
    }

    /// `log ‖X^a‖` per basis vector, scaling included.
    pub fn log_norms(&self) -> &[f64] {
        &self.log_norms
    }

    /// Scaled radius of the unit ball in unscaled norms: `e^{kc}`.
    fn bound(&self) -> f64 {
        (self.k as f64 * self.metric().scale).exp()
    }

    fn coords(&self, poly: &Polynomial) -> Result<Vec<Rational>> {
        if poly.nvars() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                found: poly.nvars(),
            });
        }
        let mut c = vec![Rational::zero(); self.dim()];
        for (e, v) in poly.terms() {
            let i = self
                .monomials()
                .binary_search(e)
                .map_err(|_| Error::NotHomogeneous(self.k))?;
            c[i] = v.clone();
        }
        Ok(c)
    }

    /// Enclosure of the scaled norm of a section.
    pub fn norm(&self, poly: &Polynomial, depth: u32) -> Result<Enclosure> {
        let c: Vec<f64> = self.coords(poly)?.iter().map(rational::to_f64).collect();
        let e = norm::base_norm(&self.norms, &c, depth)?;
        let s = 1.0 / self.bound();
        Ok(Enclosure {
            lo: e.lo * s,
            hi: e.hi * s,
        })
    }

    /// `h(x) = log ‖x‖ − log content(x)`, as an enclosure.
    pub fn height(&self, poly: &Polynomial, depth: u32) -> Result<Enclosure> {
        let c = self.coords(poly)?;
        let content = content(&c).ok_or(Error::ZeroSection)?;
        let prim: Vec<f64> = c
            .iter()
            .map(|x| rational::to_f64(&(x / &content)))
            .collect();
        let e = norm::base_norm(&self.norms, &prim, depth)?;
        let shift = self.bound().ln();
        Ok(Enclosure {
            lo: e.lo.ln() - shift,
            hi: e.hi.ln() - shift,
        })
    }

    /// Decides `‖v‖ ≤ 1` for an integer vector (scaled norm).
    pub fn decide_small(&self, v: &[i64], depth: u32) -> Result<Decision> {
        decide_at_most(&self.norms, v, self.k, depth)
    }

    /// `λ_1 … λ_N` with achieving vectors.
    ///
    /// A vector of norm `< r` is supported on monomials with `‖X^a‖ < r`, so
    /// at step `j` every vector shorter than the next candidate monomial lies
    /// in the span of those of smaller norm. When they are already chosen the
    /// monomial is a `j`-th minimum; otherwise the step is not certified.
    pub fn successive_minima(&self) -> Result<Minima> {
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| {
            self.log_norms[i]
                .total_cmp(&self.log_norms[j])
                .then(i.cmp(&j))
        });
        let mut chosen = vec![false; self.dim()];
        let mut out = Minima {
            lambdas: vec![],
            e: vec![],
            vectors: vec![],
            certified: true,
            visited: 0,
        };
        for &i in &order {
            let u = self.log_norms[i];
            out.visited += 1;
            let covered =
                (0..self.dim()).all(|j| chosen[j] || j == i || self.log_norms[j] >= u - LOG_TOL);
            if !covered {
                out.certified = false;
            }
            chosen[i] = true;
            out.lambdas.push(u.exp());
            out.e.push(0.0 - u);
            let mut v = vec![0; self.dim()];
            v[i] = 1;
            out.vectors.push(v);
        }
        if !out.certified {
            return Err(Error::Unsupported(
                "successive minima pruning certificate failed".into(),
            ));
        }
        Ok(out)
    }

    /// Coefficient bounds `|c_a| ≤ ⌊e^{kc} / ‖X^a‖⌋` of the unit ball.
    pub fn box_radii(&self) -> Vec<i64> {
        let exact = self.metric().scale == 0.0;
        (0..self.dim())
            .map(|i| {
                if exact {
                    // Largest m with m² ‖X^a‖² ≤ 1.
                    let inv = Rational::one() / &self.norms.w_sq[i];
                    let fl = inv.floor().to_integer();
                    fl.sqrt().to_i64().unwrap_or(i64::MAX)
                } else {
                    (self.bound() / self.norms.w[i] * (1.0 + 1e-12)).floor() as i64
                }
            })
            .collect()
    }

    /// Number of integer points in the coefficient box, saturating.
    pub fn box_size(&self) -> u64 {
        self.box_radii()
            .iter()
            .fold(1u64, |acc, &r| acc.saturating_mul(2 * r as u64 + 1))
    }

    /// `Ê = {v ∈ ℤ^N : ‖v‖ ≤ 1}` by exhaustive box enumeration.
    pub fn small_sections(&self, cap: u64, depth: u32) -> Result<SmallSections> {
        let radii = self.box_radii();
        let box_size = self.box_size();
        if box_size > cap {
            let lower = 1 + 2 * radii.iter().filter(|&&r| r > 0).count() as u64;
            return Err(Error::Budget {
                visited: box_size,
                cap,
                partial: format!(
                    "box of {box_size} points; at least {lower} small sections (0 and ±monomials)"
                ),
            });
        }
        let mut count = 0;
        let mut ambiguous = 0;
        let mut v: Vec<i64> = radii.iter().map(|r| -r).collect();
        loop {
            match self.decide_small(&v, depth)? {
                Decision::Small => count += 1,
                Decision::Large => {}
                Decision::Ambiguous => ambiguous += 1,
            }
            if !odometer(&mut v, &radii) {
                break;
            }
        }
        Ok(SmallSections {
            count,
            ambiguous,
            hat_dim: (count as f64).ln(),
            hat_dim_upper: ((count + ambiguous) as f64).ln(),
            box_size,
        })
    }

    /// `χ = log vol{x ∈ ℝ^N : ‖x‖ ≤ 1}` in lattice coordinates.
    pub fn euler_characteristic(
        &self,
        method: ChiMethod,
        samples: usize,
        seed: u64,
    ) -> Result<EulerCharacteristic> {
        let nn = self.dim();
        if nn > 10 {
            return Err(Error::Unsupported(format!("χ for N = {nn} > 10")));
        }
        let shift = nn as f64 * self.bound().ln();
        if method == ChiMethod::ExactLowdim {
            let v = self.closed_form_log_volume().ok_or_else(|| {
                Error::Unsupported("no closed-form unit ball for this lattice".into())
            })?;
            return Ok(EulerCharacteristic {
                method,
                value: v + shift,
                std_err: 0.0,
                samples: 0,
            });
        }
        let fs = self.metric().kind == MetricKind::FsSup;
        if fs && self.n > 1 {
            return Err(Error::Unsupported(
                "sup norm of a non-monomial section on ℙⁿ with n ≥ 2".into(),
            ));
        }
        if samples == 0 {
            return Err(Error::Invalid(
                "Monte-Carlo needs at least one sample".into(),
            ));
        }
        // Sample the unscaled ball inside ∏ [−1/w_a, 1/w_a].
        let w = &self.norms.w;
        let log_box: f64 = w.iter().map(|wi| (2.0 / wi).ln()).sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut by_power = vec![0.0; nn];
        let mut hits = 0usize;
        for _ in 0..samples {
            let x: Vec<f64> = w
                .iter()
                .map(|wi| rng.random_range(-1.0..=1.0) / wi)
                .collect();
            let abs: Vec<f64> = x.iter().zip(w).map(|(c, wi)| c.abs() * wi).collect();
            let inside = if !fs {
                abs.iter().map(|a| a * a).sum::<f64>() <= 1.0
            } else if abs.iter().sum::<f64>() <= 1.0 {
                true
            } else if abs.iter().any(|&a| a > 1.0) {
                false
            } else {
                for (a, c) in self.monomials().iter().zip(&x) {
                    by_power[a[0] as usize] = *c;
                }
                let coarse = norm::fs_p1_bounds(&by_power, 0);
                if coarse.hi <= 1.0 {
                    true
                } else if coarse.lo > 1.0 {
                    false
                } else {
                    norm::fs_p1_estimate(&by_power) <= 1.0
                }
            };
            hits += inside as usize;
        }
        if hits == 0 {
            return Err(Error::Budget {
                visited: samples as u64,
                cap: samples as u64,
                partial: "no Monte-Carlo hits".into(),
            });
        }
        let p = hits as f64 / samples as f64;
        Ok(EulerCharacteristic {
            method: ChiMethod::MonteCarlo,
            value: log_box + p.ln() + shift,
            std_err: ((1.0 - p) / (samples as f64 * p)).sqrt(),
            samples,
        })
    }

    /// Closed form when available, Monte-Carlo otherwise.
    pub fn euler_characteristic_auto(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<EulerCharacteristic> {
        match self.euler_characteristic(ChiMethod::ExactLowdim, 0, 0) {
            Err(Error::Unsupported(_)) => {
                self.euler_characteristic(ChiMethod::MonteCarlo, samples, seed)
            }
            r => r,
        }
    }

    /// Log-volume of the unscaled unit ball where it has a closed form:
    /// ellipsoids (L², trivial, linear FS) and the ℙ¹ quadratic FS ball.
    fn closed_form_log_volume(&self) -> Option<f64> {
        let nn = self.dim();
        let degree: u32 = self.monomials()[0].iter().sum();
        let ellipsoid = match self.metric().kind {
            MetricKind::Trivial | MetricKind::L2Invariant => true,
            MetricKind::FsSup => degree <= 1,
        };
        if ellipsoid {
            let half = nn as f64 / 2.0;
            let log_unit = half * PI.ln() - ln_gamma_half_integer(nn + 2);
            return Some(log_unit - self.norms.w.iter().map(|w| w.ln()).sum::<f64>());
        }
        if self.n == 1 && degree == 2 {
            // |p| + √(q² + r²) ≤ 1 in (p, q, r) has volume 2π/3; the
            // coordinate change to (c₀, c₁, c₂) has Jacobian 4.
            return Some((8.0 * PI / 3.0).ln());
        }
        None
    }

    /// Filtered space of the minima: basis in minima order, values `e_j`.
    pub fn filtered_space(&self) -> Result<FilteredSpace> {
        let m = self.successive_minima()?;
        let basis = m
            .vectors
            .iter()
            .map(|v| {
                let i = v.iter().position(|&c| c != 0).expect("unit vector");
                Polynomial::monomial(self.monomials()[i].clone(), Rational::one())
            })
            .collect::<Vec<_>>();
        FilteredSpace::new(basis, m.e)
    }
}

/// `ln Γ(m/2)` for a positive integer `m`.
fn ln_gamma_half_integer(m: usize) -> f64 {
    if m % 2 == 0 {
        (1..m / 2).map(|i| (i as f64).ln()).sum()
    } else {
        // Γ(j + 1/2) = √π ∏_{i<j} (i + 1/2).
        0.5 * PI.ln() + (0..m / 2).map(|i| (i as f64 + 0.5).ln()).sum::<f64>()
    }
}

/// Positive rational `c` with `v / c` a primitive integer vector.
fn content(v: &[Rational]) -> Option<Rational> {
    let nz: Vec<&Rational> = v.iter().filter(|x| !x.is_zero()).collect();
    if nz.is_empty() {
        return None;
    }
    let num = nz.iter().fold(BigInt::zero(), |g, x| g.gcd(x.numer()));
    let den = nz.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    Some(Rational::new(num.abs(), den))
}

/// Advances `v` through `∏ [−r_i, r_i]`; false after the last point.
fn odometer(v: &mut [i64], radii: &[i64]) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] < radii[i] {
            v[i] += 1;
            return true;
        }
        v[i] = -radii[i];
    }
    false
}

fn filtration(
    series: &GradedSeries,
    metric: Metric,
    kind: FiltrationKind,
) -> Result<MultiplicativeFiltration> {
    // ‖X‖² = 1/3 but ‖X²‖² = 1/6 on ℙ²: the L² norm is not submultiplicative.
    if metric.kind == MetricKind::L2Invariant {
        return Err(Error::Unsupported("the L² norm is not submultiplicative, so its minima are not a multiplicative filtration".into()));
    }
    let spaces = (0..=series.k_max())
        .map(|k| AdelicLattice::for_series(series, k, metric)?.filtered_space())
        .collect::<Result<_>>()?;
    Ok(MultiplicativeFiltration::from_spaces(
        kind,
        series.model().dim(),
        spaces,
    ))
}

/// Filtration by minima: `F_t V_k` is spanned by lattice vectors with
/// `‖v‖ ≤ e^{−t}`.
pub fn minima_filtration(
    series: &GradedSeries,
    metric: Metric,
) -> Result<MultiplicativeFiltration> {
    filtration(series, metric, FiltrationKind::Minima)
}

/// Filtration by height `h(x) = log ‖x / content(x)‖`. Over ℚ a vector and
/// its primitive part span the same line and the primitive part is no
/// longer, so the greedy minimal-height basis realizes the minima.
pub fn height_filtration(
    series: &GradedSeries,
    metric: Metric,
) -> Result<MultiplicativeFiltration> {
    filtration(series, metric, FiltrationKind::Height)
}

#[derive(Debug, Clone, Copy)]
pub struct GapConfig {
    pub cap: u64,
    pub depth: u32,
    pub samples: usize,
    pub seed: u64,
    pub bound: f64,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig {
            cap: 10_000_000,
            depth: 3,
            samples: 100_000,
            seed: 0,
            bound: 5.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub k: usize,
    pub n_dim: usize,
    pub mass: f64,
    pub hat_h0: f64,
    pub hat_h0_upper: f64,
    pub small_count: u64,
    pub ambiguous: u64,
    pub chi: f64,
    pub chi_std_err: f64,
    pub sum_e_minima: f64,
    pub sum_e_height: f64,
    pub gs_gap: f64,
    pub minkowski_gap: f64,
    pub siegel_gap: f64,
    pub gs_ratio: Option<f64>,
    pub minkowski_ratio: Option<f64>,
    pub siegel_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    pub max_ratio: f64,
    pub bound: f64,
    pub bounded: bool,
}

/// Gillet–Soulé, Minkowski and Siegel gaps per degree, normalized by `N log N`.
pub fn gap_report(
    series: &GradedSeries,
    metric: Metric,
    ks: &[usize],
    cfg: &GapConfig,
) -> Result<GapReport> {
    let mut rows = Vec::new();
    for &k in ks {
        let lat = AdelicLattice::for_series(series, k, metric)?;
        let nn = lat.dim();
        let minima = lat.successive_minima()?;
        let height = lat.filtered_space()?;
        let small = lat.small_sections(cfg.cap, cfg.depth)?;
        let chi = lat.euler_characteristic_auto(cfg.samples, cfg.seed.wrapping_add(k as u64))?;
        let mass: f64 = minima.e.iter().sum();
        let sum_h = height.mass();
        let norm = nn as f64 * (nn as f64).ln();
        let ratio = |g: f64| (nn > 1).then(|| g.abs() / norm);
        let gs = mass - small.hat_dim;
        let mk = chi.value - mass;
        let sg = chi.value - sum_h;
        rows.push(GapRow {
            k,
            n_dim: nn,
            mass,
            hat_h0: small.hat_dim,
            hat_h0_upper: small.hat_dim_upper,
            small_count: small.count,
            ambiguous: small.ambiguous,
            chi: chi.value,
            chi_std_err: chi.std_err,
            sum_e_minima: mass,
            sum_e_height: sum_h,
            gs_gap: gs,
            minkowski_gap: mk,
            siegel_gap: sg,
            // Worst case over the bracket left by undecided vectors.
            gs_ratio: ratio(gs.abs().max((mass - small.hat_dim_upper).abs())),
            minkowski_ratio: ratio(mk),
            siegel_ratio: ratio(sg),
        });
    }
    let max_ratio = rows
        .iter()
        .flat_map(|r| [r.gs_ratio, r.minkowski_ratio, r.siegel_ratio])
        .flatten()
        .fold(0.0, f64::max);
    Ok(GapReport {
        rows,
        max_ratio,
        bound: cfg.bound,
        bounded: max_ratio <= cfg.bound,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityRow {
    pub k: usize,
    /// `k^{-(n+1)} Σ_j e_j(V_k, F̃)`.
    pub chi_slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityReport {
    pub rows: Vec<CapacityRow>,
    /// `exp(−(n+1)! · last entry)`.
    pub capacity: f64,
    /// `∫ G̃ dλ` of the height transform at `k_max`.
    pub integral_g: f64,
    pub slope_bound: f64,
}

/// Sectional capacity estimate from the height filtration.
pub fn sectional_capacity(
    series: &GradedSeries,
    metric: Metric,
    k_max: usize,
    slope_bound: f64,
) -> Result<CapacityReport> {
    if k_max == 0 || k_max > series.k_max() {
        return Err(Error::DegreeOutOfRange {
            k: k_max,
            k_max: series.k_max(),
        });
    }
    let f = height_filtration(series, metric)?;
    let slopes = f.asymptotic_slopes(k_max)?;
    for r in &slopes.rows {
        for s in [r.e_max_over_k, r.e_min_over_k] {
            match s {
                Some(x) if x.is_finite() && x.abs() <= slope_bound => {}
                _ => {
                    return Err(Error::Unbounded(format!(
                        "height filtration not linearly bounded at k = {} (slope {s:?}, bound {slope_bound})",
                        r.k
                    )))
                }
            }
        }
    }
    let n = series.model().dim();
    let rows: Vec<CapacityRow> = (1..=k_max)
        .map(|k| {
            Ok(CapacityRow {
                k,
                chi_slope: f.space(k)?.mass() / (k as f64).powi(n as i32 + 1),
            })
        })
        .collect::<Result<_>>()?;
    let fact: f64 = (1..=n + 1).map(|i| i as f64).product();
    let last = rows.last().map_or(0.0, |r| r.chi_slope);
    let g = transform::concave_transform(series, &f, k_max)?;
    Ok(CapacityReport {
        rows,
        capacity: (-fact * last).exp(),
        integral_g: rational::to_f64(&g.integral()),
        slope_bound,
    })
}
