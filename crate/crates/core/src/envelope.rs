//! Yuan's graded-piece degrees, their concave envelope, the toric Legendre
//! transform, and comparisons with the concave transform of the minima.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norm::{self, Metric, MetricKind, MonomialNorms};
use crate::poly::{binomial_row, monomials_of_degree};
use crate::ratgeom::{self, Membership, Point, Polytope};
use crate::rational::{self, Rational};
use crate::series::{GradedSeries, Model};
use crate::transform::PiecewiseConcave;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PieceDegree {
    pub value: f64,
    /// Closed form rather than numeric coset minimisation.
    pub exact: bool,
    /// The numeric minimisation hit its budget before converging.
    pub approximate: bool,
}

/// Affine point `[p:q]` of ℙ¹ in lowest terms, `q > 0`.
fn p1_point(model: &Model) -> Option<(i64, i64)> {
    match model {
        Model::Projective { n: 1, point, .. } => {
            Some((point[0].numer().to_i64()?, point[0].denom().to_i64()?))
        }
        _ => None,
    }
}

fn total_degree(model: &Model, k: usize) -> Result<u32> {
    match model {
        Model::Projective { degree, .. } => Ok(degree * k as u32),
        Model::Toric { .. } => Err(Error::Unsupported(
            "graded-piece degrees need a projective model".into(),
        )),
    }
}

/// `h(k, α) = −log` of the quotient norm of the rank-one piece
/// `{ord ≥ α} / {ord > α}` of the section lattice.
///
/// On ℙ¹ at a primitive `[p:q]` the piece is generated by
/// `(qX − pY)^α M` with `M(p, q) = 1`. The FS and L² norms are invariant
/// under `U(2)`; rotating `qX − pY` to `√(p²+q²) X` gives the closed form
/// `h = −log ‖X^α Y^{d−α}‖ + (d/2 − α) log(p² + q²)`. At the origin of any
/// ℙⁿ the piece is the monomial line itself.
pub fn graded_piece_degree(
    series: &GradedSeries,
    metric: Metric,
    k: usize,
    alpha: &[u32],
) -> Result<PieceDegree> {
    let model = series.model();
    let d = total_degree(model, k)?;
    if !series.semigroup_slice(k)?.contains(alpha) {
        return Err(Error::NotInSemigroup {
            k,
            alpha: alpha.to_vec(),
        });
    }
    let shift = k as f64 * metric.scale;
    let Model::Projective { n, point, .. } = model else {
        unreachable!()
    };
    if point.iter().all(|c| c.is_zero()) {
        // ord is the exponent of X_0..X_{n-1}; X_n takes the rest.
        let mut e: Vec<u32> = alpha.to_vec();
        e.push(d - alpha.iter().sum::<u32>());
        return Ok(PieceDegree {
            value: shift - metric.base_log_monomial(&e),
            exact: true,
            approximate: false,
        });
    }
    if *n != 1 {
        return Err(Error::Unsupported(
            "graded pieces away from the origin on ℙⁿ with n ≥ 2".into(),
        ));
    }
    let (p, q) =
        p1_point(model).ok_or_else(|| Error::Unsupported("point too large for i64".into()))?;
    let a = alpha[0];
    match metric.kind {
        MetricKind::FsSup | MetricKind::L2Invariant => {
            let r = ((p * p + q * q) as f64).ln();
            let value =
                shift - metric.base_log_monomial(&[a, d - a]) + (d as f64 / 2.0 - a as f64) * r;
            Ok(PieceDegree {
                value,
                exact: true,
                approximate: false,
            })
        }
        MetricKind::Trivial => {
            let (v, converged) = coset_minimum(metric, p, q, d, a, 400);
            Ok(PieceDegree {
                value: shift - v.ln(),
                exact: false,
                approximate: !converged,
            })
        }
    }
}

/// `min ‖(qX − pY)^α M‖` over real `M` of degree `d − α` with `M(p, q) = 1`,
/// by cyclic golden-section descent on a convex objective. Returns the
/// minimum and whether the sweep budget sufficed.
pub fn coset_minimum(
    metric: Metric,
    p: i64,
    q: i64,
    d: u32,
    alpha: u32,
    sweeps: usize,
) -> (f64, bool) {
    let table = MonomialNorms::new(metric, monomials_of_degree(2, d));
    let rest = (d - alpha) as usize;
    // Base representative: Y^rest / q^rest, or X^rest / p^rest when q = 0.
    // Free directions: (qX − pY) X^i Y^{rest-1-i}.
    let lin_pow = |e: u32| -> Vec<f64> {
        // (qX − pY)^e indexed by the power of X.
        let b = binomial_row(e);
        (0..=e as usize)
            .map(|i| {
                let c = b[i].to_f64().unwrap_or(f64::NAN);
                c * (q as f64).powi(i as i32) * (-(p as f64)).powi(e as i32 - i as i32)
            })
            .collect()
    };
    let mul = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let head = lin_pow(alpha);
    let mut base = vec![0.0; rest + 1];
    if q != 0 {
        base[0] = (q as f64).powi(-(rest as i32));
    } else {
        base[rest] = (p as f64).powi(-(rest as i32));
    }
    let dirs: Vec<Vec<f64>> = (0..rest)
        .map(|i| {
            let mut m = vec![0.0; rest];
            m[i] = 1.0;
            mul(&lin_pow(1), &m)
        })
        .collect();
    // Lattice order is lex on [a, d−a], i.e. ascending power of Y; convert.
    let eval = |x: &[f64]| -> f64 {
        let mut m = base.clone();
        for (t, dir) in x.iter().zip(&dirs) {
            for (mi, di) in m.iter_mut().zip(dir) {
                *mi += t * di;
            }
        }
        let s = mul(&head, &m);
        let coeffs: Vec<f64> = table.monomials.iter().map(|e| s[e[0] as usize]).collect();
        norm::base_norm(&table, &coeffs, 0)
            .map(|e| e.hi)
            .unwrap_or(f64::INFINITY)
    };
    let mut x = vec![0.0; rest];
    let mut best = eval(&x);
    if rest == 0 {
        return (best, true);
    }
    let mut step = 1.0;
    for _ in 0..sweeps {
        let before = best;
        for i in 0..rest {
            let f = |t: f64| {
                let mut y = x.clone();
                y[i] = t;
                eval(&y)
            };
            let t = golden_min(&f, x[i] - step, x[i] + step);
            let v = f(t);
            if v < best {
                best = v;
                x[i] = t;
            }
        }
        if before - best < 1e-14 * before {
            if step < 1e-9 {
                return (best, true);
            }
            step *= 0.5;
        }
    }
    (best, false)
}

fn golden_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 > f2 {
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
}

#[derive(Debug, Clone, Serialize)]
pub struct HRecord {
    pub k: usize,
    pub alpha: Vec<u32>,
    pub h: f64,
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct YuanEnvelope {
    pub values: Vec<HRecord>,
    /// `H`: upper concave hull of `(α/k, h(k,α)/k)`.
    pub hull: PiecewiseConcave,
    /// Empirical `max h / (k + |α|)` and `min h / (k + |α|)`.
    pub upper_c: f64,
    pub lower_c: f64,
    pub approximate: bool,
}

pub fn yuan_envelope(series: &GradedSeries, metric: Metric, k_max: usize) -> Result<YuanEnvelope> {
    let mut values = Vec::new();
    let mut graph = Vec::new();
    let (mut upper_c, mut lower_c) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut approximate = false;
    for k in 1..=k_max {
        let kr = rational::int(k as i64);
        for alpha in &series.semigroup_slice(k)?.exponents {
            let h = graded_piece_degree(series, metric, k, alpha)?;
            approximate |= h.approximate;
            let size = k as f64 + alpha.iter().sum::<u32>() as f64;
            upper_c = upper_c.max(h.value / size);
            lower_c = lower_c.min(h.value / size);
            let x: Point = alpha
                .iter()
                .map(|&a| rational::int(a as i64) / &kr)
                .collect();
            graph.push((x, rational::from_f64(h.value)? / &kr));
            values.push(HRecord {
                k,
                alpha: alpha.clone(),
                h: h.value,
                exact: h.exact,
            });
        }
    }
    if graph.is_empty() {
        return Err(Error::EmptyBody);
    }
    Ok(YuanEnvelope {
        values,
        hull: PiecewiseConcave::from_graph(graph)?,
        upper_c,
        lower_c,
        approximate,
    })
}

/// Largest `|s|` probed when bracketing the Legendre supremum.
const LEGENDRE_CAP: f64 = 1e3;

/// `−g*(t) = inf_s (g(s) − s t)` on `grid + 1` equally spaced points of a
/// segment `Δ`. `g` must be convex; a sampled midpoint check rejects
/// obviously non-convex input.
pub fn toric_legendre(
    g: &dyn Fn(f64) -> f64,
    domain: &Polytope,
    grid: usize,
) -> Result<PiecewiseConcave> {
    if domain.dim() != 1 {
        return Err(Error::UnsupportedDimension(domain.dim()));
    }
    if domain.is_empty() || grid == 0 {
        return Err(Error::EmptyBody);
    }
    for i in -200..200 {
        let s = i as f64 * 0.05;
        let (a, b, c) = (g(s - 0.05), g(s), g(s + 0.05));
        if a + c < 2.0 * b - 1e-9 * (1.0 + b.abs()) {
            return Err(Error::Invalid(format!(
                "metric weight is not convex near s = {s}"
            )));
        }
    }
    let v = domain.vertices();
    let (lo, hi) = (v[0][0].clone(), v[v.len() - 1][0].clone());
    let steps = rational::int(grid as i64);
    let points: Vec<Point> = (0..=grid)
        .map(|i| vec![&lo + (&hi - &lo) * rational::int(i as i64) / &steps])
        .collect();
    let graph = points
        .iter()
        .map(|t| {
            Ok((
                t.clone(),
                rational::from_f64(minus_conjugate(g, domain, &t[0])?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewiseConcave::from_graph(graph)
}

/// `−g*(t)` at one point; `Domain` error outside `Δ`.
pub fn minus_conjugate(g: &dyn Fn(f64) -> f64, domain: &Polytope, t: &Rational) -> Result<f64> {
    if !ratgeom::membership(
        domain,
        std::slice::from_ref(t),
        Membership::BoundaryInclusive,
    )? {
        return Err(Error::Domain(format!(
            "t = {} lies outside Δ; the supremum is unbounded",
            rational::fmt(t)
        )));
    }
    let tf = rational::to_f64(t);
    let phi = |s: f64| g(s) - s * tf;
    // Walk downhill from 0 with doubling steps to bracket the minimiser.
    let dir = if phi(1e-3) < phi(-1e-3) { 1.0 } else { -1.0 };
    let (mut a, mut b) = (-dir, 0.0);
    let mut step = 1.0;
    while phi(b + dir * step) < phi(b) && step < LEGENDRE_CAP {
        a = b;
        b += dir * step;
        step *= 2.0;
    }
    let far = (b + dir * step).clamp(-LEGENDRE_CAP, LEGENDRE_CAP);
    let (l, r) = if a < far { (a, far) } else { (far, a) };
    let s = golden_min(&phi, l, r);
    Ok([phi(s), phi(l), phi(r)]
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// FS weight on ℙ¹: `½ log(1 + e^{2s})`, evaluated without overflow.
pub fn fs_weight(s: f64) -> f64 {
    let x = 2.0 * s;
    0.5 * (x.max(0.0) + (-x.abs()).exp().ln_1p())
}

/// `½(−t ln t − (1−t) ln(1−t))` with `0 ln 0 = 0`.
pub fn fs_minus_gstar(t: f64) -> f64 {
    let xlx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    -0.5 * (xlx(t) + xlx(1.0 - t))
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareVerdict {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub grid: usize,
    #[serde(rename = "inf_G")]
    pub inf_g: f64,
    #[serde(rename = "inf_H")]
    pub inf_h: f64,
    pub inf_minus_gstar: f64,
    pub sup_gap_g_vs_gstar: f64,
    pub max_g_minus_gstar: f64,
    pub sup_gap_h_vs_gstar: f64,
    pub sup_gap_g_vs_h: f64,
    pub verdicts: Vec<CompareVerdict>,
}

#[derive(Debug, Clone, Copy)]
pub struct CompareTolerances {
    /// Slack in `G ≤ −g*`.
    pub upper: f64,
    /// Agreement band for `H ≈ −g*`.
    pub agree: f64,
}

impl Default for CompareTolerances {
    fn default() -> Self {
        CompareTolerances {
            upper: 1e-9,
            agree: 0.05,
        }
    }
}

/// Compares `G`, `H` and `−g*` on `grid + 1` points of the common segment.
pub fn compare_transforms(
    g: &PiecewiseConcave,
    h: &PiecewiseConcave,
    minus_gstar: &PiecewiseConcave,
    grid: usize,
    tol: CompareTolerances,
) -> Result<Comparison> {
    if [g.dim(), h.dim(), minus_gstar.dim()]
        .iter()
        .any(|&d| d != 1)
    {
        return Err(Error::UnsupportedDimension(
            g.dim().max(h.dim()).max(minus_gstar.dim()),
        ));
    }
    let bounds = |f: &PiecewiseConcave| {
        let v = f.domain().vertices();
        (v[0][0].clone(), v[v.len() - 1][0].clone())
    };
    let (mut lo, mut hi) = bounds(g);
    for f in [h, minus_gstar] {
        let (a, b) = bounds(f);
        lo = lo.max(a);
        hi = hi.min(b);
    }
    if lo > hi || grid == 0 {
        return Err(Error::EmptyBody);
    }
    let steps = rational::int(grid as i64);
    let mut c = Comparison {
        grid,
        inf_g: f64::INFINITY,
        inf_h: f64::INFINITY,
        inf_minus_gstar: f64::INFINITY,
        sup_gap_g_vs_gstar: 0.0,
        max_g_minus_gstar: f64::NEG_INFINITY,
        sup_gap_h_vs_gstar: 0.0,
        sup_gap_g_vs_h: 0.0,
        verdicts: Vec::new(),
    };
    for i in 0..=grid {
        let x = vec![&lo + (&hi - &lo) * rational::int(i as i64) / &steps];
        let val = |f: &PiecewiseConcave| {
            f.eval(&x)
                .map(|v| rational::to_f64(&v))
                .ok_or(Error::EmptyBody)
        };
        let (gv, hv, sv) = (val(g)?, val(h)?, val(minus_gstar)?);
        c.inf_g = c.inf_g.min(gv);
        c.inf_h = c.inf_h.min(hv);
        c.inf_minus_gstar = c.inf_minus_gstar.min(sv);
        c.sup_gap_g_vs_gstar = c.sup_gap_g_vs_gstar.max((gv - sv).abs());
        c.max_g_minus_gstar = c.max_g_minus_gstar.max(gv - sv);
        c.sup_gap_h_vs_gstar = c.sup_gap_h_vs_gstar.max((hv - sv).abs());
        c.sup_gap_g_vs_h = c.sup_gap_g_vs_h.max((gv - hv).abs());
    }
    c.verdicts = vec![
        CompareVerdict {
            name: "inf H < 0 <= inf G (G and H differ)".into(),
            pass: c.inf_h < 0.0 && c.inf_g >= 0.0,
        },
        CompareVerdict {
            name: format!("G <= -g* + {:e}", tol.upper),
            pass: c.max_g_minus_gstar <= tol.upper,
        },
        CompareVerdict {
            name: format!("|H - (-g*)| <= {}", tol.agree),
            pass: c.sup_gap_h_vs_gstar <= tol.agree,
        },
    ];
    Ok(c)
}

/// `−g*` for the FS metric on ℙ¹ sampled on `[0, 1]`.
pub fn fs_minus_gstar_transform(grid: usize) -> Result<PiecewiseConcave> {
    let seg = ratgeom::convex_hull(&[vec![Rational::zero()], vec![rational::int(1)]])?;
    toric_legendre(&fs_weight, &seg, grid)
}
