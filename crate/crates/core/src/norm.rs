//! Archimedean norm oracles on `H⁰(ℙⁿ, O(d))`.
//!
//! All three metrics are invariant under the compact torus, so for every
//! section `s = Σ c_a X^a` each coefficient obeys `|c_a| · ‖X^a‖ ≤ ‖s‖`.
//! This gives a certified lower bound in closed form; the triangle
//! inequality gives the matching upper bound `Σ |c_a| ‖X^a‖`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{binomial_row, Exponent, Polynomial};
use crate::rational::{self, Rational};
use crate::sturm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Fubini–Study sup norm `sup |s| / ‖·‖^d` over `ℙⁿ(ℂ)`.
    FsSup,
    /// Unitarily invariant L² norm; monomials are orthogonal.
    L2Invariant,
    /// Unit ℓ² norm on monomial coefficients.
    Trivial,
}

/// A metric on `O(1)` together with a constant scaling `e^{-c}` per factor:
/// degree-`k` norms are multiplied by `e^{-kc}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub kind: MetricKind,
    #[serde(default)]
    pub scale: f64,
}

impl Metric {
    pub fn new(kind: MetricKind) -> Self {
        Metric { kind, scale: 0.0 }
    }

    pub fn scaled(kind: MetricKind, scale: f64) -> Self {
        Metric { kind, scale }
    }

    pub fn fs() -> Self {
        Self::new(MetricKind::FsSup)
    }

    /// `log ‖X^a‖` for a monomial of total degree `Σ a_i`, before scaling.
    pub fn base_log_monomial(&self, a: &[u32]) -> f64 {
        let d: u32 = a.iter().sum();
        let xlx = |x: u32| {
            if x == 0 {
                0.0
            } else {
                x as f64 * (x as f64).ln()
            }
        };
        match self.kind {
            MetricKind::FsSup => 0.5 * (a.iter().map(|&x| xlx(x)).sum::<f64>() - xlx(d)),
            MetricKind::L2Invariant => {
                let n = a.len() - 1;
                0.5 * (a.iter().map(|&x| ln_factorial(x)).sum::<f64>() + ln_factorial(n as u32)
                    - ln_factorial(d + n as u32))
            }
            MetricKind::Trivial => 0.0,
        }
    }

    /// `‖X^a‖²` before scaling, exactly.
    pub fn base_monomial_norm_sq(&self, a: &[u32]) -> Rational {
        let d: u32 = a.iter().sum();
        let pow = |x: u32| Rational::from_integer(num_traits::pow(BigInt::from(x), x as usize));
        let fact = |x: u32| Rational::from_integer((1..=x).map(BigInt::from).product::<BigInt>());
        match self.kind {
            MetricKind::FsSup => a.iter().map(|&x| pow(x)).product::<Rational>() / pow(d),
            MetricKind::L2Invariant => {
                let n = a.len() as u32 - 1;
                a.iter().map(|&x| fact(x)).product::<Rational>() * fact(n) / fact(d + n)
            }
            MetricKind::Trivial => Rational::one(),
        }
    }

    /// `log ‖X^a‖` in degree `k`, scaling included.
    pub fn log_monomial(&self, a: &[u32], k: usize) -> f64 {
        self.base_log_monomial(a) - k as f64 * self.scale
    }
}

fn ln_factorial(x: u32) -> f64 {
    (2..=x).map(|i| (i as f64).ln()).sum()
}

/// Unscaled monomial norms of a fixed degree, in binary64 and squared exactly.
#[derive(Debug, Clone)]
pub struct MonomialNorms {
    pub metric: Metric,
    pub monomials: Vec<Exponent>,
    pub w: Vec<f64>,
    pub w_sq: Vec<Rational>,
}

impl MonomialNorms {
    pub fn new(metric: Metric, monomials: Vec<Exponent>) -> Self {
        let w = monomials
            .iter()
            .map(|a| metric.base_log_monomial(a).exp())
            .collect();
        let w_sq = monomials
            .iter()
            .map(|a| metric.base_monomial_norm_sq(a))
            .collect();
        MonomialNorms {
            metric,
            monomials,
            w,
            w_sq,
        }
    }

    fn is_p1(&self) -> bool {
        self.monomials.first().is_some_and(|a| a.len() == 2)
    }

    fn degree(&self) -> usize {
        self.monomials
            .first()
            .map_or(0, |a| a.iter().sum::<u32>() as usize)
    }

    /// Coefficients re-indexed by the power of the first variable (ℙ¹ only).
    fn by_power<T: Copy + Default>(&self, c: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.degree() + 1];
        for (a, &x) in self.monomials.iter().zip(c) {
            out[a[0] as usize] = x;
        }
        out
    }
}

/// Certified enclosure `[lo, hi]` of a norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn exact(x: f64) -> Self {
        Enclosure { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Relative padding absorbing binary64 rounding in the numeric paths.
const PAD: f64 = 1e-12;

/// `‖s‖` of a section given as monomial coefficients, before scaling.
///
/// Closed forms: monomials, the L² and trivial metrics on every section,
/// and powers of linear forms on ℙ¹ for the sup norm. Other sup norms on ℙ¹
/// use a torus grid with a Bernstein-inequality bound; on ℙⁿ with `n ≥ 2`
/// they are unsupported.
pub fn base_norm(t: &MonomialNorms, coeffs: &[f64], depth: u32) -> Result<Enclosure> {
    let support: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] != 0.0).collect();
    if support.is_empty() {
        return Err(Error::ZeroSection);
    }
    match t.metric.kind {
        MetricKind::Trivial | MetricKind::L2Invariant => {
            let s: f64 = support.iter().map(|&i| (coeffs[i] * t.w[i]).powi(2)).sum();
            Ok(Enclosure::exact(s.sqrt()))
        }
        MetricKind::FsSup => {
            if support.len() == 1 {
                let i = support[0];
                return Ok(Enclosure::exact(coeffs[i].abs() * t.w[i]));
            }
            if t.degree() == 1 {
                return Ok(Enclosure::exact(
                    coeffs.iter().map(|c| c * c).sum::<f64>().sqrt(),
                ));
            }
            if !t.is_p1() {
                return Err(Error::Unsupported(
                    "sup norm of a non-monomial section on ℙⁿ with n ≥ 2".into(),
                ));
            }
            let c = t.by_power(coeffs);
            if c.len() == 3 {
                return Ok(Enclosure::exact(quadratic_norm(&c)));
            }
            if let Some(v) = linear_power_norm(&c) {
                return Ok(Enclosure::exact(v));
            }
            Ok(fs_p1_enclosure(&c, depth))
        }
    }
}

/// Sup norm of `c₀Y² + c₁XY + c₂X²`: the spectral norm of the symmetric
/// matrix of the form, since `sup_{|v|=1} |vᵀMv| = max |λ(M)|` over `ℂ²`.
pub fn quadratic_norm(c: &[f64]) -> f64 {
    let (a, b, cc) = (c[2], c[1], c[0]);
    let p = 0.5 * (a + cc);
    let r = (0.25 * (a - cc).powi(2) + 0.25 * b * b).sqrt();
    p.abs() + r
}

/// If `Σ c_a x^a y^{k-a} = λ (x + r y)^k`-type power with both ends present,
/// returns its sup norm `|λ| (1 + r²)^{k/2}`.
fn linear_power_norm(c: &[f64]) -> Option<f64> {
    let k = c.len() - 1;
    if c[0] == 0.0 || c[k] == 0.0 {
        return None;
    }
    // c_a = c_0 C(k,a) r^a with r = c_1 / (k c_0).
    let r = c[1] / (k as f64 * c[0]);
    let binom = binomial_row(k as u32);
    for (a, ca) in c.iter().enumerate() {
        let b: f64 = binom[a].to_string().parse().unwrap_or(f64::NAN);
        let expect = c[0] * b * r.powi(a as i32);
        if (ca - expect).abs() > 1e-13 * (1.0 + expect.abs()) {
            return None;
        }
    }
    Some(c[0].abs() * (1.0 + r * r).powf(k as f64 / 2.0))
}

/// `|s(cos θ e^{iφ}, sin θ)|²` for `c` indexed by the power of `x`.
fn fs_p1_value(c: &[f64], theta: f64, phi: f64) -> f64 {
    let k = c.len() - 1;
    let (ct, st) = (theta.cos(), theta.sin());
    let (mut re, mut im) = (0.0, 0.0);
    for (a, &ca) in c.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        let m = ca * ct.powi(a as i32) * st.powi((k - a) as i32);
        let ang = a as f64 * phi;
        re += m * ang.cos();
        im += m * ang.sin();
    }
    re * re + im * im
}

/// Grid maximum of `|s|²` over `θ ∈ [0, π/2]`, `φ ∈ [0, 2π)` with `n2`
/// φ-nodes (spacing `2δ`, `δ = π/n2`) and `n2/2` θ-intervals (spacing `δ`).
/// Every point lies within `δ/2` in θ and `δ` in φ of a node, and `|s|²` has
/// frequencies at most `2k` in θ and `k` in φ, so Bernstein's inequality
/// bounds the true maximum by `gridmax / (1 - 2k²δ²)`.
fn fs_p1_grid(c: &[f64], n2: usize) -> (f64, f64, f64) {
    let k = c.len() - 1;
    let n1 = n2 / 2;
    let support: Vec<usize> = (0..=k).filter(|&a| c[a] != 0.0).collect();
    // Phase tables e^{iaφ_j} for the support.
    let phases: Vec<Vec<(f64, f64)>> = (0..n2)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / n2 as f64;
            support
                .iter()
                .map(|&a| ((a as f64 * phi).cos(), (a as f64 * phi).sin()))
                .collect()
        })
        .collect();
    let mut best = (-1.0, 0.0, 0.0);
    let mut m = vec![0.0; support.len()];
    for i in 0..=n1 {
        let theta = PI / 2.0 * i as f64 / n1 as f64;
        let (ct, st) = (theta.cos(), theta.sin());
        for (mi, &a) in m.iter_mut().zip(&support) {
            *mi = c[a] * ct.powi(a as i32) * st.powi((k - a) as i32);
        }
        for (j, ph) in phases.iter().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (mi, (co, si)) in m.iter().zip(ph) {
                re += mi * co;
                im += mi * si;
            }
            let v = re * re + im * im;
            if v > best.0 {
                best = (v, theta, 2.0 * PI * j as f64 / n2 as f64);
            }
        }
    }
    best
}

/// Coordinate ascent by golden-section search from a grid maximiser.
fn fs_p1_refine(c: &[f64], mut theta: f64, mut phi: f64, radius: f64) -> f64 {
    let golden = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> f64 {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..60 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = f(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = f(x1);
            }
        }
        0.5 * (a + b)
    };
    let mut r = radius;
    for _ in 0..6 {
        theta = golden(&|t| fs_p1_value(c, t, phi), theta - r, theta + r);
        phi = golden(&|p| fs_p1_value(c, theta, p), phi - r, phi + r);
        r *= 0.5;
    }
    fs_p1_value(c, theta, phi)
}

/// Enclosure of the ℙ¹ Fubini–Study sup norm. `depth` doubles the grid.
pub fn fs_p1_enclosure(c: &[f64], depth: u32) -> Enclosure {
    let (e, theta, phi, delta) = grid_bounds(c, depth);
    let refined = fs_p1_refine(c, theta, phi, 2.0 * delta);
    let lo = e.lo.max(refined.sqrt() * (1.0 - PAD));
    Enclosure {
        lo,
        hi: e.hi.max(lo),
    }
}

/// Grid-only enclosure, without local refinement of the lower bound.
pub fn fs_p1_bounds(c: &[f64], depth: u32) -> Enclosure {
    grid_bounds(c, depth).0
}

fn grid_bounds(c: &[f64], depth: u32) -> (Enclosure, f64, f64, f64) {
    let k = c.len() - 1;
    // Keep 2k²δ² ≤ 1/8 at depth 0.
    let mut n2 = 16usize;
    while 2.0 * (k * k) as f64 * (PI / n2 as f64).powi(2) > 0.125 {
        n2 *= 2;
    }
    n2 <<= depth;
    let delta = PI / n2 as f64;
    let (gmax, theta, phi) = fs_p1_grid(c, n2);
    let hi = (gmax / (1.0 - 2.0 * (k * k) as f64 * delta * delta)).sqrt() * (1.0 + PAD);
    let lo = gmax.sqrt() * (1.0 - PAD);
    (Enclosure { lo, hi }, theta, phi, delta)
}

/// Accurate (non-certified) estimate of the ℙ¹ sup norm, for sampling.
pub fn fs_p1_estimate(c: &[f64]) -> f64 {
    let k = c.len() - 1;
    let n2 = (8 * k).next_power_of_two().max(16);
    let (_, theta, phi) = fs_p1_grid(c, n2);
    fs_p1_refine(c, theta, phi, 2.0 * PI / n2 as f64).sqrt()
}

/// Whether some `φ` makes every `sign(c_a) e^{iaφ}` equal. Then the sup
/// over `φ` is `Σ |c_a| cos^a θ sin^{k-a} θ` for every θ.
fn phases_align(c: &[i64]) -> bool {
    let support: Vec<usize> = (0..c.len()).filter(|&a| c[a] != 0).collect();
    for g in 1..=c.len().max(1) {
        // φ = mπ/g; angles measured in units of π/g, modulo 2g.
        for m in 0..2 * g {
            let ang = |a: usize| (a * m + if c[a] < 0 { g } else { 0 }) % (2 * g);
            let a0 = ang(support[0]);
            if support.iter().all(|&a| ang(a) == a0) {
                return true;
            }
        }
    }
    false
}

/// Exact decision of `‖s‖_FS ≤ 1` on ℙ¹ for integer coefficients. With
/// `t = tan θ`, the phase-free majorant gives the sufficient condition
/// `(Σ |c_a| t^{k-a})² ≤ (1 + t²)^k` for all `t ≥ 0`, which is also
/// necessary when the phases align. `None` when it fails without alignment.
fn fs_p1_exact_decision(c: &[i64]) -> Option<bool> {
    let k = c.len() - 1;
    let p: Vec<Rational> = (0..=k).map(|j| rational::int(c[k - j].abs())).collect();
    let one_t2: Vec<Rational> = vec![Rational::one(), Rational::zero(), Rational::one()];
    let mut lhs = vec![Rational::one()];
    for _ in 0..k {
        lhs = sturm::mul(&lhs, &one_t2);
    }
    let r = sturm::sub(&lhs, &sturm::mul(&p, &p));
    if sturm::nonnegative_on_halfline(&r) {
        Some(true)
    } else if phases_align(c) {
        Some(false)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Small,
    Large,
    Ambiguous,
}

/// Decides `‖s‖ ≤ bound`, where `‖·‖` is the unscaled norm and
/// `bound = e^{kc}` absorbs the scaling. Exact when `c = 0` for every
/// closed form and for ℙ¹ sup norms passing the phase-free Sturm test;
/// otherwise by enclosures, deepening up to `max_depth`. A norm equal to
/// the bound is only ever decided exactly, so unaligned ties come back
/// `Ambiguous`.
pub fn decide_at_most(t: &MonomialNorms, c: &[i64], k: usize, max_depth: u32) -> Result<Decision> {
    if c.iter().all(|&x| x == 0) {
        return Ok(Decision::Small);
    }
    let metric = &t.metric;
    let exact_threshold = metric.scale == 0.0;
    let support: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0).collect();
    if exact_threshold {
        let sq = |i: usize| rational::int(c[i] * c[i]) * &t.w_sq[i];
        match metric.kind {
            MetricKind::Trivial | MetricKind::L2Invariant => {
                let s: Rational = support.iter().map(|&i| sq(i)).sum();
                return Ok(if s <= Rational::one() {
                    Decision::Small
                } else {
                    Decision::Large
                });
            }
            MetricKind::FsSup => {
                if support.iter().any(|&i| sq(i) > Rational::one()) {
                    return Ok(Decision::Large);
                }
                if support.len() == 1 {
                    return Ok(Decision::Small);
                }
                if t.degree() == 1 {
                    let s: i64 = c.iter().map(|x| x * x).sum();
                    return Ok(if s <= 1 {
                        Decision::Small
                    } else {
                        Decision::Large
                    });
                }
            }
        }
    }
    let bound = (k as f64 * metric.scale).exp();
    let cf: Vec<f64> = c.iter().map(|&x| x as f64).collect();
    let fourier = support
        .iter()
        .map(|&i| cf[i].abs() * t.w[i])
        .fold(0.0, f64::max);
    if fourier > bound * (1.0 + PAD) {
        return Ok(Decision::Large);
    }
    let triangle: f64 = support.iter().map(|&i| cf[i].abs() * t.w[i]).sum();
    if triangle <= bound * (1.0 - PAD) {
        return Ok(Decision::Small);
    }
    if metric.kind == MetricKind::FsSup && t.is_p1() && t.degree() > 2 {
        let e = fs_p1_bounds(&t.by_power(&cf), 0);
        if e.hi <= bound * (1.0 - PAD) {
            return Ok(Decision::Small);
        }
        if e.lo > bound * (1.0 + PAD) {
            return Ok(Decision::Large);
        }
    }
    if exact_threshold && metric.kind == MetricKind::FsSup && t.is_p1() {
        if let Some(ok) = fs_p1_exact_decision(&t.by_power(c)) {
            return Ok(if ok { Decision::Small } else { Decision::Large });
        }
    }
    for depth in 0..=max_depth {
        let e = base_norm(t, &cf, depth)?;
        if e.hi <= bound * (1.0 - PAD) {
            return Ok(Decision::Small);
        }
        if e.lo > bound * (1.0 + PAD) {
            return Ok(Decision::Large);
        }
        if e.width() == 0.0 {
            break;
        }
    }
    Ok(Decision::Ambiguous)
}

/// Closed-form sup norm `‖ℓ‖^k` of the `k`-th power of a linear form on ℙⁿ.
pub fn fs_linear_power_norm(linear: &[Rational], k: u32) -> f64 {
    let sq: f64 = linear.iter().map(|c| rational::to_f64(c).powi(2)).sum();
    sq.powf(k as f64 / 2.0)
}

/// Sup-norm enclosure of an exact section.
pub fn fs_sup_norm(s: &Polynomial, depth: u32) -> Result<Enclosure> {
    if s.is_zero() {
        return Err(Error::ZeroSection);
    }
    if s.homogeneous_degree().is_none() {
        return Err(Error::NotHomogeneous(0));
    }
    let (monos, coeffs): (Vec<Exponent>, Vec<f64>) = s
        .terms()
        .iter()
        .map(|(e, c)| (e.clone(), rational::to_f64(c)))
        .unzip();
    let exact_monomial = |e: &Exponent, c: &Rational| {
        let sq = Metric::fs().base_monomial_norm_sq(e) * c * c;
        rational::to_f64(&sq).sqrt()
    };
    if monos.len() == 1 {
        let (e, c) = s.terms().iter().next().unwrap();
        return Ok(Enclosure::exact(exact_monomial(e, c)));
    }
    base_norm(&MonomialNorms::new(Metric::fs(), monos), &coeffs, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::monomials_of_degree;
    use crate::rational::int;

    #[test]
    fn closed_forms() {
        let xy = Polynomial::from_int_terms(2, &[(&[1, 1], 1)]);
        assert!((fs_sup_norm(&xy, 0).unwrap().hi - 0.5).abs() < 1e-15);
        let l = Polynomial::from_int_terms(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        let e = fs_sup_norm(&l, 0).unwrap();
        assert_eq!((e.lo, e.hi), (2f64.sqrt(), 2f64.sqrt()));
        let x5 = Polynomial::from_int_terms(2, &[(&[5, 0], 1)]);
        assert_eq!(fs_sup_norm(&x5, 0).unwrap().hi, 1.0);
        let cube = l.pow(3);
        assert!((fs_sup_norm(&cube, 0).unwrap().hi - 2f64.powf(1.5)).abs() < 1e-12);
        assert!((fs_linear_power_norm(&[int(1), int(-2)], 2) - 5.0).abs() < 1e-12);
        assert_eq!(
            fs_sup_norm(&Polynomial::zero(2), 0),
            Err(Error::ZeroSection)
        );
    }

    #[test]
    fn enclosure_brackets_a_known_value() {
        // X² - Y² has sup norm exactly 1 (attained at [1:0]).
        let e = fs_p1_enclosure(&[-1.0, 0.0, 1.0], 0);
        assert!(e.lo <= 1.0 && 1.0 <= e.hi && e.width() < 0.1);
        // X² + XY + Y²: compare with a dense independent scan.
        let c = [1.0, 1.0, 1.0];
        let mut best: f64 = 0.0;
        for i in 0..=2000 {
            for j in 0..200 {
                let t = PI / 2.0 * i as f64 / 2000.0;
                let p = 2.0 * PI * j as f64 / 200.0;
                best = best.max(fs_p1_value(&c, t, p));
            }
        }
        let e = fs_p1_enclosure(&c, 2);
        assert!(e.lo <= best.sqrt() + 1e-9 && best.sqrt() <= e.hi);
        assert!((fs_p1_estimate(&c) - best.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn exact_threshold_decisions() {
        let m2 = MonomialNorms::new(Metric::fs(), monomials_of_degree(2, 2));
        // Order is [Y², XY, X²].
        assert_eq!(
            decide_at_most(&m2, &[-1, 0, 1], 2, 4).unwrap(),
            Decision::Small
        );
        assert_eq!(
            decide_at_most(&m2, &[1, 0, 1], 2, 4).unwrap(),
            Decision::Small
        );
        assert_eq!(
            decide_at_most(&m2, &[1, 1, 1], 2, 4).unwrap(),
            Decision::Large
        );
        assert_eq!(
            decide_at_most(&m2, &[0, 2, 0], 2, 4).unwrap(),
            Decision::Small
        );
        assert_eq!(
            decide_at_most(&m2, &[0, 3, 0], 2, 4).unwrap(),
            Decision::Large
        );
        let m1 = MonomialNorms::new(Metric::fs(), monomials_of_degree(2, 1));
        assert_eq!(decide_at_most(&m1, &[1, 1], 1, 4).unwrap(), Decision::Large);
        assert_eq!(
            decide_at_most(&m1, &[0, -1], 1, 4).unwrap(),
            Decision::Small
        );
    }

    #[test]
    fn quadratic_closed_form_matches_grid() {
        for c in [
            [1.0, 1.0, 1.0],
            [2.0, -3.0, 0.5],
            [0.0, 1.0, -1.0],
            [1.0, 0.0, 1.0],
        ] {
            let e = fs_p1_enclosure(&c, 3);
            let q = quadratic_norm(&c);
            assert!(e.lo <= q + 1e-9 && q <= e.hi + 1e-9, "{c:?}: {e:?} vs {q}");
        }
    }

    #[test]
    fn phase_alignment() {
        assert!(phases_align(&[1, 0, -1]));
        assert!(phases_align(&[1, 1, 1]));
        // X Y² - X² Y aligns at φ = π.
        assert!(phases_align(&[0, 1, -1, 0]));
        // Y³ + X Y² - X³ needs 3φ ≡ φ + π and 0 ≡ φ: impossible.
        assert!(!phases_align(&[1, 1, 0, -1]));
    }

    #[test]
    fn monomial_norms() {
        let fs = Metric::fs();
        assert!((fs.base_log_monomial(&[1, 1]) - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(
            fs.base_monomial_norm_sq(&[1, 1]),
            crate::rational::frac(1, 4)
        );
        let l2 = Metric::new(MetricKind::L2Invariant);
        assert_eq!(
            l2.base_monomial_norm_sq(&[1, 1]),
            crate::rational::frac(1, 6)
        );
        assert!((l2.base_log_monomial(&[1, 1]) - (1.0f64 / 6.0).sqrt().ln()).abs() < 1e-15);
        let s = Metric::scaled(MetricKind::Trivial, 0.25);
        assert_eq!(s.log_monomial(&[2, 0], 2), -0.5);
    }
}
