//! Filtered finite-dimensional spaces and multiplicative filtrations of graded
//! series: jumping values, mass, sublevel spaces, jump measures and slopes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{Exponent, Polynomial};
use crate::rational::{self, Rational};
use crate::series::{GradedSeries, Staircase};

/// Tolerance for comparisons of binary64 filtration values.
pub const VALUE_TOL: f64 = 1e-12;

/// A flag filtration given by an adapted basis and one value per vector:
/// `F_t = span{b_i : value_i ≥ t}`. Basis vectors are kept sorted by value,
/// descending.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSpace {
    basis: Vec<Polynomial>,
    values: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl FilteredSpace {
    pub fn new(basis: Vec<Polynomial>, values: Vec<f64>) -> Result<Self> {
        if basis.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "filtration value {v} is not finite"
            )));
        }
        let mut pairs: Vec<(Polynomial, f64)> = basis.into_iter().zip(values).collect();
        pairs.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (basis, values) = pairs.into_iter().unzip();
        Ok(FilteredSpace {
            basis,
            values,
            exact: None,
        })
    }

    /// Values known exactly; the binary64 values are their nearest doubles.
    pub fn new_exact(basis: Vec<Polynomial>, values: Vec<Rational>) -> Result<Self> {
        if basis.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: values.len(),
            });
        }
        let mut pairs: Vec<(Polynomial, Rational)> = basis.into_iter().zip(values).collect();
        pairs.sort_by(|a, b| b.1.cmp(&a.1));
        let (basis, exact): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let values = exact.iter().map(rational::to_f64).collect();
        Ok(FilteredSpace {
            basis,
            values,
            exact: Some(exact),
        })
    }

    /// An abstract space `ℚ^N` with the standard basis carrying `values`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                Polynomial::monomial(e, Rational::one())
            })
            .collect();
        Self::new(basis, values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact_values(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    /// `e_1 ≥ … ≥ e_N`.
    pub fn jumping_values(&self) -> Vec<f64> {
        self.values.clone()
    }

    /// Sum of the positive jumping values.
    pub fn mass(&self) -> f64 {
        self.values.iter().filter(|&&e| e > 0.0).sum()
    }

    pub fn exact_mass(&self) -> Option<Rational> {
        self.exact
            .as_ref()
            .map(|ex| ex.iter().filter(|e| **e > Rational::zero()).sum())
    }

    pub fn e_max(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn e_min(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// `dim F_t`.
    pub fn dim_at(&self, t: f64) -> usize {
        self.values.partition_point(|&v| v >= t)
    }

    /// Basis of `F_t`.
    pub fn sublevel(&self, t: f64) -> Vec<Polynomial> {
        self.basis[..self.dim_at(t)].to_vec()
    }

    /// Index `i` such that `v ∈ F_{e_i}` minimally, i.e. the value of `v` is
    /// `e_i`; `None` when `v` is outside the space or zero.
    fn level_of(&self, v: &Polynomial) -> Option<usize> {
        if v.is_zero() {
            return None;
        }
        let mut stair = Staircase::new();
        let mut i = 0;
        while i < self.dim() {
            let mut j = i;
            while j < self.dim() && self.values[j] == self.values[i] {
                stair.insert(&self.basis[j]);
                j += 1;
            }
            if stair.contains(v) {
                return Some(i);
            }
            i = j;
        }
        None
    }

    /// `sup{t : v ∈ F_t}`.
    pub fn value_of(&self, v: &Polynomial) -> Option<f64> {
        self.level_of(v).map(|i| self.values[i])
    }

    pub fn exact_value_of(&self, v: &Polynomial) -> Option<Rational> {
        let ex = self.exact.as_ref()?;
        self.level_of(v).map(|i| ex[i].clone())
    }

    /// Induced filtration `F_t ∩ W` on the subspace `W = span(sub)`.
    pub fn induced(&self, sub: &[Polynomial]) -> Result<FilteredSpace> {
        let index: BTreeMap<&Exponent, usize> = self
            .basis
            .iter()
            .flat_map(|p| p.terms().keys())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, e)| (e, i))
            .collect();
        let vec_of = |p: &Polynomial| -> Option<Vec<Rational>> {
            let mut v = vec![Rational::zero(); index.len()];
            for (e, c) in p.terms() {
                v[*index.get(e)?] = c.clone();
            }
            Some(v)
        };
        let cols: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|b| vec_of(b).expect("own terms"))
            .collect();
        // Pivot on the last nonzero coordinate: the basis is sorted by value,
        // so that coordinate carries the value of the combination.
        let mut rows: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
        for w in sub {
            let outside = || Error::Invalid("vector outside the filtered space".into());
            let mut c = vec_of(w)
                .and_then(|v| linalg::coordinates(&cols, &v))
                .ok_or_else(outside)?;
            loop {
                let Some(p) = c.iter().rposition(|x| !x.is_zero()) else {
                    return Err(Error::Invalid(
                        "subspace basis is linearly dependent".into(),
                    ));
                };
                match rows.get(&p) {
                    Some(row) => {
                        let f = c[p].clone();
                        for (x, y) in c.iter_mut().zip(row) {
                            *x -= &f * y;
                        }
                    }
                    None => {
                        let inv = Rational::one() / &c[p];
                        rows.insert(p, c.iter().map(|x| x * &inv).collect());
                        break;
                    }
                }
            }
        }
        let nv = self.basis.first().map_or(0, |b| b.nvars());
        let mut polys = Vec::new();
        let mut pivots = Vec::new();
        for (p, c) in rows {
            let mut poly = Polynomial::zero(nv);
            for (ci, b) in c.iter().zip(&self.basis) {
                if !ci.is_zero() {
                    poly = poly.add(&b.scale(ci));
                }
            }
            polys.push(poly);
            pivots.push(p);
        }
        match &self.exact {
            Some(ex) => {
                FilteredSpace::new_exact(polys, pivots.iter().map(|&p| ex[p].clone()).collect())
            }
            None => FilteredSpace::new(polys, pivots.iter().map(|&p| self.values[p]).collect()),
        }
    }

    /// Same filtration with one value replaced (negative controls).
    pub fn with_value(&self, index: usize, value: f64) -> Result<Self> {
        let mut values = self.values.clone();
        *values
            .get_mut(index)
            .ok_or(Error::Invalid(format!("no basis vector {index}")))? = value;
        Self::new(self.basis.clone(), values)
    }
}

/// Induced filtration of the monomial weight filtration on `span(basis)`:
/// the value of a vector is the least weight in its support. Elimination uses
/// the order (weight, then lex), so each row's value is the weight of its pivot.
pub fn induced_weight_space(
    basis: &[Polynomial],
    weight: impl Fn(&Exponent) -> Rational,
) -> Result<FilteredSpace> {
    type Key = (Rational, Exponent);
    let keyed = |p: &Polynomial| -> BTreeMap<Key, Rational> {
        p.terms()
            .iter()
            .map(|(e, c)| ((weight(e), e.clone()), c.clone()))
            .collect()
    };
    let mut rows: BTreeMap<Key, BTreeMap<Key, Rational>> = BTreeMap::new();
    for p in basis {
        let mut v = keyed(p);
        loop {
            let Some((lead, c)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
                return Err(Error::Invalid("basis is linearly dependent".into()));
            };
            match rows.get(&lead) {
                Some(row) => {
                    for (k, x) in row {
                        let e = v.entry(k.clone()).or_insert_with(Rational::zero);
                        *e -= &c * x;
                        if e.is_zero() {
                            v.remove(k);
                        }
                    }
                }
                None => {
                    let inv = Rational::one() / &c;
                    rows.insert(lead, v.into_iter().map(|(k, x)| (k, x * &inv)).collect());
                    break;
                }
            }
        }
    }
    let nv = basis.first().map_or(0, |p| p.nvars());
    let (polys, values): (Vec<_>, Vec<_>) = rows
        .into_iter()
        .map(|((w, _), row)| {
            (
                Polynomial::from_terms(nv, row.into_iter().map(|((_, e), c)| (e, c))),
                w,
            )
        })
        .unzip();
    FilteredSpace::new_exact(polys, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FiltrationKind {
    Weight,
    Minima,
    Height,
}

/// Per-degree filtered spaces of a graded series.
#[derive(Debug, Clone)]
pub struct MultiplicativeFiltration {
    kind: FiltrationKind,
    n: usize,
    spaces: Vec<FilteredSpace>,
    weights: Option<Vec<Rational>>,
}

impl MultiplicativeFiltration {
    /// Weight filtration: the monomial `X^e` (or character `χ^e`) has weight
    /// `Σ w_i e_i`, and `F_t V_k` is spanned by elements whose support has
    /// weight at least `t`.
    pub fn weight(series: &GradedSeries, weights: &[Rational]) -> Result<Self> {
        let nv = series.model().nvars();
        if weights.len() != nv {
            return Err(Error::DimensionMismatch {
                expected: nv,
                found: weights.len(),
            });
        }
        let w = |e: &Exponent| -> Rational {
            e.iter()
                .zip(weights)
                .map(|(&a, wi)| wi * rational::int(a as i64))
                .sum()
        };
        let spaces = (0..=series.k_max())
            .map(|k| {
                let basis: Vec<Polynomial> =
                    series.basis(k)?.iter().map(|s| s.poly.clone()).collect();
                induced_weight_space(&basis, w)
            })
            .collect::<Result<_>>()?;
        Ok(MultiplicativeFiltration {
            kind: FiltrationKind::Weight,
            n: series.model().dim(),
            spaces,
            weights: Some(weights.to_vec()),
        })
    }

    /// All values zero.
    pub fn trivial(series: &GradedSeries) -> Result<Self> {
        Self::weight(series, &vec![Rational::zero(); series.model().nvars()])
    }

    /// Filtration assembled from precomputed degree-`0..=k_max` spaces.
    pub fn from_spaces(kind: FiltrationKind, n: usize, spaces: Vec<FilteredSpace>) -> Self {
        MultiplicativeFiltration {
            kind,
            n,
            spaces,
            weights: None,
        }
    }

    pub fn kind(&self) -> FiltrationKind {
        self.kind
    }

    /// Dimension of the underlying variety.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.spaces.len() - 1
    }

    pub fn weights(&self) -> Option<&[Rational]> {
        self.weights.as_deref()
    }

    pub fn space(&self, k: usize) -> Result<&FilteredSpace> {
        self.spaces.get(k).ok_or(Error::DegreeOutOfRange {
            k,
            k_max: self.k_max(),
        })
    }

    /// Replaces one value in degree `k` (negative controls).
    pub fn with_override(&self, k: usize, index: usize, value: f64) -> Result<Self> {
        let mut out = self.clone();
        out.spaces[k] = self.space(k)?.with_value(index, value)?;
        Ok(out)
    }

    /// `V_k^t = F_{kt} V_k` is the scaled convention; this returns `F_t V_k`.
    pub fn sublevel_space(&self, k: usize, t: f64) -> Result<Vec<Polynomial>> {
        Ok(self.space(k)?.sublevel(t))
    }

    pub fn jump_measure(&self, k: usize) -> Result<JumpMeasure> {
        let sp = self.space(k)?;
        if k == 0 {
            return Err(Error::Invalid("jump measures are defined for k ≥ 1".into()));
        }
        let kf = k as f64;
        Ok(JumpMeasure {
            k,
            n: self.n,
            atoms: sp.values().iter().map(|e| e / kf).collect(),
            weight: kf.powi(-(self.n as i32)),
        })
    }

    pub fn asymptotic_slopes(&self, k_max: usize) -> Result<SlopeTable> {
        let mut rows = Vec::new();
        let mut sup = f64::NEG_INFINITY;
        let mut inf = f64::INFINITY;
        let mut emax = vec![None; k_max + 1];
        for (k, slot) in emax.iter_mut().enumerate().skip(1) {
            let sp = self.space(k)?;
            let (Some(hi), Some(lo)) = (sp.e_max(), sp.e_min()) else {
                rows.push(SlopeRow {
                    k,
                    e_max_over_k: None,
                    running_sup: finite(sup),
                    e_min_over_k: None,
                    running_inf: finite(inf),
                });
                continue;
            };
            *slot = Some(hi);
            let kf = k as f64;
            sup = sup.max(hi / kf);
            inf = inf.min(lo / kf);
            rows.push(SlopeRow {
                k,
                e_max_over_k: Some(hi / kf),
                running_sup: Some(sup),
                e_min_over_k: Some(lo / kf),
                running_inf: Some(inf),
            });
        }
        let mut violations = Vec::new();
        for k in 1..=k_max {
            for m in k..=k_max - k {
                if let (Some(a), Some(b), Some(c)) = (emax[k], emax[m], emax[k + m]) {
                    if c < a + b - VALUE_TOL {
                        violations.push((k, m));
                    }
                }
            }
        }
        Ok(SlopeTable {
            rows,
            e_max_estimate: finite(sup),
            e_min_estimate: finite(inf),
            superadditivity_violations: violations,
        })
    }

    /// Certifies `(F_s V_k)(F_t V_m) ⊆ F_{s+t} V_{k+m}` on pairs of adapted
    /// basis vectors, which span every `F_s V_k`. When the number of pairs
    /// exceeds `samples`, a seeded subset is checked.
    pub fn check_multiplicative(
        &self,
        samples: usize,
        seed: u64,
    ) -> Result<MultiplicativityReport> {
        let mut cases = Vec::new();
        for k in 1..=self.k_max() {
            for m in k..=self.k_max() - k {
                let (a, b) = (self.space(k)?.dim(), self.space(m)?.dim());
                for i in 0..a {
                    for j in 0..b {
                        cases.push((k, m, i, j));
                    }
                }
            }
        }
        let total = cases.len();
        if total > samples {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<usize> = index::sample(&mut rng, total, samples).into_vec();
            picked.sort_unstable();
            cases = picked.into_iter().map(|i| cases[i]).collect();
        }
        let mut checked = 0;
        for (k, m, i, j) in cases {
            let (u, v, w) = (self.space(k)?, self.space(m)?, self.space(k + m)?);
            let prod = u.basis()[i].mul(&v.basis()[j]);
            let ok = match (u.exact_values(), v.exact_values(), w.exact_value_of(&prod)) {
                (Some(eu), Some(ev), Some(ew)) => ew >= &eu[i] + &ev[j],
                _ => match w.value_of(&prod) {
                    Some(ew) => ew >= u.values()[i] + v.values()[j] - VALUE_TOL,
                    None => return Err(Error::ClosureViolation { k, m }),
                },
            };
            checked += 1;
            if !ok {
                return Ok(MultiplicativityReport {
                    pass: false,
                    checked,
                    total,
                    witness: Some(Witness {
                        k,
                        m,
                        s: u.values()[i],
                        t: v.values()[j],
                        product_value: w.value_of(&prod).unwrap_or(f64::NAN),
                    }),
                });
            }
        }
        Ok(MultiplicativityReport {
            pass: true,
            checked,
            total,
            witness: None,
        })
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeRow {
    pub k: usize,
    pub e_max_over_k: Option<f64>,
    pub running_sup: Option<f64>,
    pub e_min_over_k: Option<f64>,
    pub running_inf: Option<f64>,
}

/// Finite-degree slope estimates; the limits themselves are never extrapolated.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeTable {
    pub rows: Vec<SlopeRow>,
    pub e_max_estimate: Option<f64>,
    pub e_min_estimate: Option<f64>,
    /// Pairs `(k, m)` with `e_max(V_{k+m}) < e_max(V_k) + e_max(V_m)`; warnings only.
    pub superadditivity_violations: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub k: usize,
    pub m: usize,
    pub s: f64,
    pub t: f64,
    /// Value of the product in degree `k + m`, smaller than `s + t`.
    pub product_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicativityReport {
    pub pass: bool,
    pub checked: usize,
    pub total: usize,
    pub witness: Option<Witness>,
}

/// `μ_k`: atoms `e_j / k`, each of mass `k⁻ⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpMeasure {
    pub k: usize,
    pub n: usize,
    /// Sorted descending.
    pub atoms: Vec<f64>,
    pub weight: f64,
}

impl JumpMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weight * self.atoms.len() as f64
    }

    /// Rows `(k, atom, weight)`, atoms descending.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,atom,weight\n");
        for a in &self.atoms {
            let _ = writeln!(
                s,
                "{},{},{}",
                self.k,
                rational::fmt_f64(*a),
                rational::fmt_f64(self.weight)
            );
        }
        s
    }
}
