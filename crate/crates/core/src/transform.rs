//! The concave transform `G`, filtered Okounkov bodies and their volumes,
//! Lévy distances to jump measures, and Fujita approximation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filt::{FilteredSpace, JumpMeasure, MultiplicativeFiltration};
use crate::linalg::dot;
use crate::poly::Exponent;
use crate::ratgeom::{self, Membership, Point, Polytope};
use crate::rational::{self, Rational};
use crate::series::{GradedSeries, Staircase};

/// One affine piece `x ↦ grad·x + c` over a segment (n = 1) or a convex
/// polygon listed counter-clockwise (n = 2).
#[derive(Debug, Clone, PartialEq)]
struct Piece {
    vertices: Vec<Point>,
    grad: Vec<Rational>,
    c: Rational,
}

impl Piece {
    fn at(&self, x: &[Rational]) -> Rational {
        dot(&self.grad, x) + &self.c
    }
}

/// Upper concave envelope of finitely many graph points over their convex hull.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConcave {
    domain: Polytope,
    graph: Vec<(Point, Rational)>,
    pieces: Vec<Piece>,
    /// Binary64 copy of the one-dimensional chain for fast superlevel queries.
    chain_f64: Vec<(f64, f64)>,
}

impl PiecewiseConcave {
    /// Envelope of `graph`; repeated abscissae keep the largest value.
    pub fn from_graph(graph: Vec<(Point, Rational)>) -> Result<Self> {
        let Some(first) = graph.first() else {
            return Err(Error::EmptyBody);
        };
        let n = first.0.len();
        let mut best: BTreeMap<Point, Rational> = BTreeMap::new();
        for (x, v) in graph {
            if x.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x.len(),
                });
            }
            match best.get_mut(&x) {
                Some(cur) if *cur >= v => {}
                Some(cur) => *cur = v,
                None => {
                    best.insert(x, v);
                }
            }
        }
        let graph: Vec<(Point, Rational)> = best.into_iter().collect();
        let xs: Vec<Point> = graph.iter().map(|(x, _)| x.clone()).collect();
        let domain = ratgeom::convex_hull(&xs)?;
        let pieces = match n {
            1 => upper_chain(&graph),
            2 => upper_facets(&graph, &domain)?,
            _ => return Err(Error::UnsupportedDimension(n)),
        };
        let chain_f64 = if n == 1 {
            let mut pts: Vec<(f64, f64)> = Vec::new();
            for p in &pieces {
                for v in &p.vertices {
                    let pt = (rational::to_f64(&v[0]), rational::to_f64(&p.at(v)));
                    if pts.last().map(|l| l.0) != Some(pt.0) {
                        pts.push(pt);
                    }
                }
            }
            pts
        } else {
            Vec::new()
        };
        Ok(PiecewiseConcave {
            domain,
            graph,
            pieces,
            chain_f64,
        })
    }

    /// Samples `f` on `points` and takes the envelope.
    pub fn from_fn(points: &[Point], f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let graph = points
            .iter()
            .map(|x| {
                let xf: Vec<f64> = x.iter().map(rational::to_f64).collect();
                Ok((x.clone(), rational::from_f64(f(&xf))?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_graph(graph)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Polytope {
        &self.domain
    }

    pub fn graph(&self) -> &[(Point, Rational)] {
        &self.graph
    }

    /// Exact value; `None` outside the domain.
    pub fn eval(&self, x: &[Rational]) -> Option<Rational> {
        if !ratgeom::membership(&self.domain, x, Membership::BoundaryInclusive).ok()? {
            return None;
        }
        self.pieces.iter().map(|p| p.at(x)).min()
    }

    pub fn eval_f64(&self, x: &[f64]) -> Option<f64> {
        let xr: Vec<Rational> = x
            .iter()
            .map(|&c| rational::from_f64(c))
            .collect::<Result<_>>()
            .ok()?;
        self.eval(&xr).map(|v| rational::to_f64(&v))
    }

    pub fn max_value(&self) -> Rational {
        self.graph
            .iter()
            .map(|(_, v)| v.clone())
            .max()
            .expect("nonempty graph")
    }

    pub fn min_graph_value(&self) -> Rational {
        self.graph
            .iter()
            .map(|(_, v)| v.clone())
            .min()
            .expect("nonempty graph")
    }

    /// Vertices of the upper envelope (the graph points that are not strictly below it).
    pub fn hull_points(&self) -> Vec<(Point, Rational)> {
        self.graph
            .iter()
            .filter(|(x, v)| self.eval(x).as_ref() == Some(v))
            .cloned()
            .collect()
    }

    /// `∫ max(G, 0) dλ` over the domain, exactly.
    pub fn positive_integral(&self) -> Rational {
        if !self.domain.is_full_dimensional() {
            return Rational::zero();
        }
        self.pieces
            .iter()
            .map(|p| integrate_clipped(p, &Rational::zero(), true))
            .sum()
    }

    /// `∫ G dλ` over the domain, exactly.
    pub fn integral(&self) -> Rational {
        if !self.domain.is_full_dimensional() {
            return Rational::zero();
        }
        self.pieces
            .iter()
            .map(|p| integrate_clipped(p, &Rational::zero(), false))
            .sum()
    }

    /// `h(t) = vol{G ≥ t}`, exactly.
    pub fn superlevel_volume(&self, t: &Rational) -> Rational {
        if !self.domain.is_full_dimensional() {
            return Rational::zero();
        }
        self.pieces.iter().map(|p| clipped_measure(p, t)).sum()
    }

    pub fn superlevel_volume_f64(&self, t: f64) -> f64 {
        if self.dim() == 1 {
            let mut len = 0.0;
            for w in self.chain_f64.windows(2) {
                let ((x0, v0), (x1, v1)) = (w[0], w[1]);
                len += if v0 >= t && v1 >= t {
                    x1 - x0
                } else if v0 < t && v1 < t {
                    0.0
                } else {
                    let s = (t - v0) / (v1 - v0);
                    if v0 >= t {
                        s * (x1 - x0)
                    } else {
                        (1.0 - s) * (x1 - x0)
                    }
                };
            }
            return len;
        }
        match rational::from_f64(t) {
            Ok(tr) => rational::to_f64(&self.superlevel_volume(&tr)),
            Err(_) => f64::NAN,
        }
    }

    /// `λ{G > t}`: equals `h(t)` except on the flat top `top = max G`.
    fn strict_superlevel_f64(&self, t: f64, top: f64) -> f64 {
        if t >= top {
            0.0
        } else {
            self.superlevel_volume_f64(t)
        }
    }

    pub fn domain_volume(&self) -> Rational {
        ratgeom::volume(&self.domain).unwrap_or_else(|_| Rational::zero())
    }

    /// `(x, G(x))` on an equally spaced grid of the bounding box, kept where defined.
    pub fn plot_data(&self, steps: usize) -> Vec<(Vec<f64>, f64)> {
        let steps = steps.max(1);
        let n = self.dim();
        let lo: Vec<Rational> = (0..n)
            .map(|j| {
                self.domain
                    .vertices()
                    .iter()
                    .map(|v| v[j].clone())
                    .min()
                    .unwrap()
            })
            .collect();
        let hi: Vec<Rational> = (0..n)
            .map(|j| {
                self.domain
                    .vertices()
                    .iter()
                    .map(|v| v[j].clone())
                    .max()
                    .unwrap()
            })
            .collect();
        let s = rational::int(steps as i64);
        let coord = |j: usize, i: usize| &lo[j] + (&hi[j] - &lo[j]) * rational::int(i as i64) / &s;
        let mut out = Vec::new();
        let mut push = |x: Point| {
            if let Some(v) = self.eval(&x) {
                out.push((
                    x.iter().map(rational::to_f64).collect(),
                    rational::to_f64(&v),
                ));
            }
        };
        match n {
            1 => (0..=steps).for_each(|i| push(vec![coord(0, i)])),
            _ => {
                for i in 0..=steps {
                    for j in 0..=steps {
                        push(vec![coord(0, i), coord(1, j)]);
                    }
                }
            }
        }
        out
    }

    pub fn plot_csv(&self, steps: usize) -> String {
        let mut s = String::new();
        let n = self.dim();
        let head: Vec<String> = (0..n).map(|j| format!("x{j}")).collect();
        let _ = writeln!(s, "{},value", head.join(","));
        for (x, v) in self.plot_data(steps) {
            let xs: Vec<String> = x.iter().map(|c| rational::fmt_f64(*c)).collect();
            let _ = writeln!(s, "{},{}", xs.join(","), rational::fmt_f64(v));
        }
        s
    }
}

fn upper_chain(graph: &[(Point, Rational)]) -> Vec<Piece> {
    // Graph is sorted by abscissa.
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for (x, v) in graph {
        let p = (x[0].clone(), v.clone());
        while hull.len() >= 2 {
            let (o, a) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            let cr = (&a.0 - &o.0) * (&p.1 - &o.1) - (&a.1 - &o.1) * (&p.0 - &o.0);
            if cr >= Rational::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    if hull.len() == 1 {
        let (x, v) = hull.pop().unwrap();
        return vec![Piece {
            vertices: vec![vec![x]],
            grad: vec![Rational::zero()],
            c: v,
        }];
    }
    hull.windows(2)
        .map(|w| {
            let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            let c = &w[0].1 - &slope * &w[0].0;
            Piece {
                vertices: vec![vec![w[0].0.clone()], vec![w[1].0.clone()]],
                grad: vec![slope],
                c,
            }
        })
        .collect()
}

fn upper_facets(graph: &[(Point, Rational)], domain: &Polytope) -> Result<Vec<Piece>> {
    if !domain.is_full_dimensional() {
        return Err(Error::Unsupported(
            "concave envelope over a lower-dimensional planar domain".into(),
        ));
    }
    let floor = graph.iter().map(|(_, v)| v.clone()).min().unwrap() - rational::one();
    let mut lifted: Vec<Point> = graph
        .iter()
        .map(|(x, v)| vec![x[0].clone(), x[1].clone(), v.clone()])
        .collect();
    lifted.extend(
        domain
            .vertices()
            .iter()
            .map(|x| vec![x[0].clone(), x[1].clone(), floor.clone()]),
    );
    let hull = ratgeom::convex_hull(&lifted)?;
    let mut pieces = Vec::new();
    for h in hull.facets().iter().filter(|h| h.normal[2].is_positive()) {
        let a2 = &h.normal[2];
        let grad = vec![-&h.normal[0] / a2, -&h.normal[1] / a2];
        let c = &h.offset / a2;
        let on: Vec<Point> = hull
            .vertices()
            .iter()
            .filter(|p| dot(&h.normal, p) == h.offset)
            .map(|p| vec![p[0].clone(), p[1].clone()])
            .collect();
        let poly = ratgeom::convex_hull(&on)?;
        if !poly.is_full_dimensional() {
            continue;
        }
        pieces.push(Piece {
            vertices: ccw(poly.vertices()),
            grad,
            c,
        });
    }
    Ok(pieces)
}

/// Orders the vertices of a convex polygon counter-clockwise around the first (lex-least) one.
fn ccw(vs: &[Point]) -> Vec<Point> {
    let o = vs[0].clone();
    let mut rest: Vec<Point> = vs[1..].to_vec();
    rest.sort_by(|a, b| {
        let cr = (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0]);
        Rational::zero().cmp(&cr)
    });
    let mut out = vec![o];
    out.extend(rest);
    out
}

/// The part of a piece where `f ≥ t`.
fn clip(piece: &Piece, t: &Rational) -> Vec<Point> {
    let f = |x: &Point| piece.at(x) - t;
    let vs = &piece.vertices;
    if vs.len() == 1 {
        return if f(&vs[0]) >= Rational::zero() {
            vs.clone()
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    let m = vs.len();
    let edges = if m == 2 { 1 } else { m };
    for i in 0..edges {
        let (p, q) = (&vs[i], &vs[(i + 1) % m]);
        let (fp, fq) = (f(p), f(q));
        if fp >= Rational::zero() {
            out.push(p.clone());
        }
        if (fp.is_negative() && fq.is_positive()) || (fp.is_positive() && fq.is_negative()) {
            let s = &fp / (&fp - &fq);
            out.push(p.iter().zip(q).map(|(a, b)| a + (b - a) * &s).collect());
        }
    }
    if m == 2 && f(&vs[1]) >= Rational::zero() {
        out.push(vs[1].clone());
    }
    out.dedup();
    out
}

fn simplex_measure(a: &Point, b: &Point, c: Option<&Point>) -> Rational {
    match c {
        None => (&b[0] - &a[0]).abs(),
        Some(c) => {
            let cr = (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0]);
            cr.abs() / rational::int(2)
        }
    }
}

/// Fan decomposition of a clipped segment or polygon into simplices.
fn simplices(vs: &[Point]) -> Vec<(Point, Point, Option<Point>)> {
    match vs.len() {
        0 | 1 => Vec::new(),
        2 if vs[0].len() == 1 => vec![(vs[0].clone(), vs[1].clone(), None)],
        _ if vs[0].len() == 1 => {
            let lo = vs.iter().min().unwrap().clone();
            let hi = vs.iter().max().unwrap().clone();
            vec![(lo, hi, None)]
        }
        _ => (1..vs.len() - 1)
            .map(|i| (vs[0].clone(), vs[i].clone(), Some(vs[i + 1].clone())))
            .collect(),
    }
}

fn clipped_measure(piece: &Piece, t: &Rational) -> Rational {
    simplices(&clip(piece, t))
        .iter()
        .map(|(a, b, c)| simplex_measure(a, b, c.as_ref()))
        .sum()
}

/// Integral of the piece's affine function over the piece, restricted to
/// `f ≥ t` when `positive_part` is set.
fn integrate_clipped(piece: &Piece, t: &Rational, positive_part: bool) -> Rational {
    let region = if positive_part {
        clip(piece, t)
    } else {
        piece.vertices.clone()
    };
    simplices(&region)
        .iter()
        .map(|(a, b, c)| {
            let vol = simplex_measure(a, b, c.as_ref());
            let (sum, cnt) = match c {
                None => (piece.at(a) + piece.at(b), 2),
                Some(c) => (piece.at(a) + piece.at(b) + piece.at(c), 3),
            };
            vol * sum / rational::int(cnt)
        })
        .sum()
}

/// `g(k, α)` for every `α ∈ Γ_k`: basis vectors enter a lex staircase in order
/// of decreasing value, and each newly created staircase exponent receives
/// the value of the vector that created it.
pub fn graph_values(
    series: &GradedSeries,
    f: &MultiplicativeFiltration,
    k: usize,
) -> Result<BTreeMap<Exponent, GValue>> {
    let sp = f.space(k)?;
    let mut stair = Staircase::new();
    let mut out = BTreeMap::new();
    for (i, b) in sp.basis().iter().enumerate() {
        if let Some(alpha) = stair.insert(&series.model().expansion(b)) {
            let exact = sp.exact_values().map(|e| e[i].clone());
            out.insert(
                alpha,
                GValue {
                    value: sp.values()[i],
                    exact,
                },
            );
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GValue {
    pub value: f64,
    pub exact: Option<Rational>,
}

impl GValue {
    /// Exact rational, or the exact dyadic value of the binary64.
    pub fn to_rational(&self) -> Result<Rational> {
        match &self.exact {
            Some(q) => Ok(q.clone()),
            None => rational::from_f64(self.value),
        }
    }
}

/// `sup{t : α = ord(s) for some s ∈ F_t V_k}`.
pub fn g_value(
    series: &GradedSeries,
    f: &MultiplicativeFiltration,
    k: usize,
    alpha: &[u32],
) -> Result<GValue> {
    graph_values(series, f, k)?
        .remove(alpha)
        .ok_or_else(|| Error::NotInSemigroup {
            k,
            alpha: alpha.to_vec(),
        })
}

fn scaled_point(alpha: &[u32], k: usize) -> Point {
    let kr = rational::int(k as i64);
    alpha
        .iter()
        .map(|&a| rational::int(a as i64) / &kr)
        .collect()
}

/// Upper concave hull of `{(α/k, g(k,α)/k) : 1 ≤ k ≤ k_max, α ∈ Γ_k}`.
pub fn concave_transform(
    series: &GradedSeries,
    f: &MultiplicativeFiltration,
    k_max: usize,
) -> Result<PiecewiseConcave> {
    let mut graph = Vec::new();
    for k in 1..=k_max {
        let kr = rational::int(k as i64);
        for (alpha, g) in graph_values(series, f, k)? {
            graph.push((scaled_point(&alpha, k), g.to_rational()? / &kr));
        }
    }
    if graph.is_empty() {
        return Err(Error::EmptyBody);
    }
    PiecewiseConcave::from_graph(graph)
}

/// Hull of `{α/k : g(k,α) ≥ k t}`; empty above the top value.
pub fn sublevel_body(
    series: &GradedSeries,
    f: &MultiplicativeFiltration,
    k_max: usize,
    t: &Rational,
) -> Result<Polytope> {
    let mut pts = Vec::new();
    for k in 1..=k_max {
        let kt = t * rational::int(k as i64);
        for (alpha, g) in graph_values(series, f, k)? {
            if g.to_rational()? >= kt {
                pts.push(scaled_point(&alpha, k));
            }
        }
    }
    if pts.is_empty() {
        return Ok(Polytope::empty(series.model().dim()));
    }
    ratgeom::convex_hull(&pts)
}

/// `h(t) = vol{G ≥ t}` on a level grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub levels: Vec<Rational>,
    pub h: Vec<Rational>,
}

impl DistributionTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,h_t\n");
        for (t, h) in self.levels.iter().zip(&self.h) {
            let _ = writeln!(s, "{},{}", rational::fmt(t), rational::fmt(h));
        }
        s
    }

    /// Trapezoid rule for `∫ h` over the nonnegative part of the grid.
    pub fn quadrature_from_zero(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .levels
            .iter()
            .zip(&self.h)
            .filter(|(t, _)| !t.is_negative())
            .map(|(t, h)| (rational::to_f64(t), rational::to_f64(h)))
            .collect();
        pts.windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }
}

impl Serialize for DistributionTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DistributionTable", 2)?;
        st.serialize_field(
            "levels",
            &self.levels.iter().map(rational::fmt).collect::<Vec<_>>(),
        )?;
        st.serialize_field("h", &self.h.iter().map(rational::fmt).collect::<Vec<_>>())?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FilteredVolume {
    #[serde(with = "rational::serde_rational")]
    pub volume: Rational,
    pub volume_f64: f64,
    pub distribution: DistributionTable,
    /// Trapezoid value of `∫₀^∞ h(t) dt` on the level grid.
    pub layer_cake: f64,
}

/// `vol Δ̂ = ∫ max(G, 0)`, with the distribution table on `levels`. The grid
/// is extended by 0 and the top value so that the layer-cake quadrature
/// covers `[0, max G]`.
pub fn filtered_body_volume(g: &PiecewiseConcave, levels: &[Rational]) -> FilteredVolume {
    let volume = g.positive_integral();
    let mut grid: Vec<Rational> = levels.to_vec();
    grid.push(Rational::zero());
    let top = g.max_value();
    if top.is_positive() {
        grid.push(top);
    }
    grid.sort();
    grid.dedup();
    let h: Vec<Rational> = grid.iter().map(|t| g.superlevel_volume(t)).collect();
    let distribution = DistributionTable { levels: grid, h };
    let layer_cake = distribution.quadrature_from_zero();
    FilteredVolume {
        volume_f64: rational::to_f64(&volume),
        volume,
        distribution,
        layer_cake,
    }
}

/// `n + 1` equally spaced levels across `[lo, hi]`.
pub fn level_grid(lo: &Rational, hi: &Rational, steps: usize) -> Vec<Rational> {
    let s = rational::int(steps.max(1) as i64);
    (0..=steps.max(1))
        .map(|i| lo + (hi - lo) * rational::int(i as i64) / &s)
        .collect()
}

/// Lévy distance between the cumulative functions of `μ_k` and of `G_*λ`
/// (neither normalised), found by bisection on `ε`.
pub fn levy_distance(mu: &JumpMeasure, g: &PiecewiseConcave) -> f64 {
    let vol = rational::to_f64(&g.domain_volume());
    let mut atoms = mu.atoms.clone();
    atoms.sort_by(f64::total_cmp);
    let w = mu.weight;
    let total = w * atoms.len() as f64;
    // F_G(x) = vol − λ{G > x};  F_G(x−) = vol − h(x).
    let top = rational::to_f64(&g.max_value());
    let cdf_g = |x: f64| vol - g.strict_superlevel_f64(x, top);
    let cdf_g_left = |x: f64| vol - g.superlevel_volume_f64(x);
    let ok = |eps: f64| -> bool {
        if (total - vol).abs() > eps {
            return false;
        }
        for (i, &a) in atoms.iter().enumerate() {
            // Right end of each step of F_μ: the cumulative mass after a_i.
            let f_after = w * (i + 1) as f64;
            if f_after - eps > cdf_g(a + eps) + 1e-15 {
                return false;
            }
        }
        // Steps of x ↦ F_μ(x + ε): value j·w on [a_j − ε, a_{j+1} − ε).
        let mut j = 0;
        while j < atoms.len() {
            let end = atoms[j] - eps;
            let f_before = w * j as f64;
            if cdf_g_left(end) > f_before + eps + 1e-15 {
                return false;
            }
            // Skip ties.
            let a = atoms[j];
            while j < atoms.len() && atoms[j] == a {
                j += 1;
            }
        }
        true
    };
    let mut lo = 0.0;
    let mut hi = 1.0f64.max(total).max(vol) + atoms.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    hi += rational::to_f64(&g.max_value()).abs() + rational::to_f64(&g.min_graph_value()).abs();
    if ok(0.0) {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    hi
}

/// Restriction of each degree of `f` to a subseries of the same model.
pub fn restrict(
    f: &MultiplicativeFiltration,
    sub: &GradedSeries,
) -> Result<MultiplicativeFiltration> {
    let spaces = (0..=sub.k_max())
        .map(|k| {
            let basis: Vec<_> = sub.basis(k)?.iter().map(|s| s.poly.clone()).collect();
            f.space(k)?.induced(&basis)
        })
        .collect::<Result<Vec<FilteredSpace>>>()?;
    Ok(MultiplicativeFiltration::from_spaces(
        f.kind(),
        f.n(),
        spaces,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct FujitaRow {
    pub p: usize,
    #[serde(with = "rational::serde_rational")]
    pub volume: Rational,
    pub volume_f64: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FujitaTable {
    pub k_max: usize,
    #[serde(with = "rational::serde_rational")]
    pub full_volume: Rational,
    pub rows: Vec<FujitaRow>,
}

/// `vol Δ̂(S•V_{≤p}, F)` at level `k_max` for each `p`, next to the full volume.
pub fn fujita_approx(
    series: &GradedSeries,
    f: &MultiplicativeFiltration,
    p_list: &[usize],
    k_max: usize,
) -> Result<FujitaTable> {
    let vol_of = |s: &GradedSeries, f: &MultiplicativeFiltration| -> Result<Rational> {
        match concave_transform(s, f, k_max) {
            Ok(g) => Ok(g.positive_integral()),
            Err(Error::EmptyBody) => Ok(Rational::zero()),
            Err(e) => Err(e),
        }
    };
    let full_volume = vol_of(series, f)?;
    let mut rows = Vec::new();
    for &p in p_list {
        let sub = series.truncate_subalgebra(p, k_max)?;
        let fs = restrict(f, &sub)?;
        let volume = vol_of(&sub, &fs)?;
        rows.push(FujitaRow {
            p,
            volume_f64: rational::to_f64(&volume),
            volume,
        });
    }
    Ok(FujitaTable {
        k_max,
        full_volume,
        rows,
    })
}

#[derive(Serialize, Deserialize)]
struct PiecewiseJson {
    domain: Polytope,
    graph: Vec<Vec<String>>,
}

impl Serialize for PiecewiseConcave {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PiecewiseJson {
            domain: self.domain.clone(),
            graph: self
                .graph
                .iter()
                .map(|(x, v)| {
                    x.iter()
                        .chain(std::iter::once(v))
                        .map(rational::fmt)
                        .collect()
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PiecewiseConcave {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PiecewiseJson::deserialize(d)?;
        let graph = raw
            .graph
            .iter()
            .map(|row| {
                let vals = row
                    .iter()
                    .map(|s| rational::parse(s))
                    .collect::<Result<Vec<_>>>()?;
                let (v, x) = vals
                    .split_last()
                    .ok_or(Error::Parse("empty graph row".into()))?;
                Ok((x.to_vec(), v.clone()))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let g = PiecewiseConcave::from_graph(graph).map_err(D::Error::custom)?;
        if g.domain != raw.domain {
            return Err(D::Error::custom("domain does not match the graph"));
        }
        Ok(g)
    }
}
