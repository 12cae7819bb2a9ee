//! Exact rational convex geometry in dimension at most 3.
//!
//! A [`Polytope`] is stored by its irredundant, lexicographically sorted vertex
//! set together with a derived halfspace description used for membership.
//! Lower-dimensional bodies are legal: they carry affine equalities and have
//! volume zero.

use std::collections::HashSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cross, det3, dot, sub};
use crate::rational::{self, Rational};

pub type Point = Vec<Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    BoundaryInclusive,
    Interior,
}

/// `a · x <= b` (or `= b` for equalities).
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    equalities: Vec<Halfspace>,
    facets: Vec<Halfspace>,
    affine_dim: Option<usize>,
    volume: Rational,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl Polytope {
    pub fn empty(dim: usize) -> Self {
        Polytope {
            dim,
            vertices: Vec::new(),
            equalities: Vec::new(),
            facets: Vec::new(),
            affine_dim: None,
            volume: Rational::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the affine hull; `None` for the empty body.
    pub fn affine_dim(&self) -> Option<usize> {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == Some(self.dim)
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn equalities(&self) -> &[Halfspace] {
        &self.equalities
    }

    /// The standard simplex `conv{0, e_1, ..., e_n}`.
    pub fn standard_simplex(n: usize) -> Result<Self> {
        let mut pts = vec![vec![Rational::zero(); n]];
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = rational::one();
            pts.push(e);
        }
        convex_hull(&pts)
    }

    pub fn scale(&self, t: &Rational) -> Result<Self> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        convex_hull(
            &self
                .vertices
                .iter()
                .map(|v| linalg::scale(v, t))
                .collect::<Vec<_>>(),
        )
    }

    pub fn translate(&self, by: &[Rational]) -> Result<Self> {
        check_dim(self.dim, by.len())?;
        if self.is_empty() {
            return Ok(self.clone());
        }
        convex_hull(
            &self
                .vertices
                .iter()
                .map(|v| linalg::add(v, by))
                .collect::<Vec<_>>(),
        )
    }

    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .map(|v| v.iter().map(rational::to_f64).collect())
            .collect()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Irredundant convex hull of a finite point set in ℝⁿ, `n ∈ {1, 2, 3}`.
pub fn convex_hull(points: &[Point]) -> Result<Polytope> {
    let Some(first) = points.first() else {
        return Err(Error::EmptyBody);
    };
    let n = first.len();
    for p in points {
        check_dim(n, p.len())?;
    }
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();

    // Affine hull: base point plus echelon directions.
    let base = pts[0].clone();
    let dirs: Vec<Vec<Rational>> = pts[1..].iter().map(|p| sub(p, &base)).collect();
    let (echelon, pivots) = linalg::rref(&dirs);
    let d = pivots.len();

    let mut equalities = Vec::new();
    if d < n {
        for a in linalg::nullspace(&echelon, n) {
            let b = dot(&a, &base);
            equalities.push(Halfspace {
                normal: a,
                offset: b,
            });
        }
    }

    // Coordinates on the affine hull: restriction to pivot columns is injective there.
    let proj: Vec<Point> = pts
        .iter()
        .map(|p| pivots.iter().map(|&c| p[c].clone()).collect())
        .collect();
    let (extreme, facets_proj, volume) = match d {
        0 => (vec![0], Vec::new(), Rational::zero()),
        1 => hull_1d(&proj),
        2 => hull_2d(&proj),
        3 => hull_3d(&proj),
        _ => unreachable!(),
    };
    let volume = if d == n { volume } else { Rational::zero() };

    let facets = facets_proj
        .into_iter()
        .map(|h| {
            let mut normal = vec![Rational::zero(); n];
            for (a, &c) in h.normal.into_iter().zip(&pivots) {
                normal[c] = a;
            }
            Halfspace {
                normal,
                offset: h.offset,
            }
        })
        .collect();

    let mut vertices: Vec<Point> = extreme.into_iter().map(|i| pts[i].clone()).collect();
    vertices.sort();
    vertices.dedup();
    Ok(Polytope {
        dim: n,
        vertices,
        equalities,
        facets,
        affine_dim: Some(d),
        volume,
    })
}

type HullParts = (Vec<usize>, Vec<Halfspace>, Rational);

fn hull_1d(pts: &[Point]) -> HullParts {
    let (mut lo, mut hi) = (0, 0);
    for (i, p) in pts.iter().enumerate() {
        if p[0] < pts[lo][0] {
            lo = i;
        }
        if p[0] > pts[hi][0] {
            hi = i;
        }
    }
    let facets = vec![
        Halfspace {
            normal: vec![rational::int(-1)],
            offset: -pts[lo][0].clone(),
        },
        Halfspace {
            normal: vec![rational::one()],
            offset: pts[hi][0].clone(),
        },
    ];
    let len = &pts[hi][0] - &pts[lo][0];
    (vec![lo, hi], facets, len)
}

fn cross2(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Andrew's monotone chain; returns counter-clockwise indices with collinear points dropped.
fn monotone_chain(pts: &[Point], idx: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
    order.dedup_by(|a, b| pts[*a] == pts[*b]);
    if order.len() < 3 {
        return order;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * order.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in seq {
            while hull.len() >= start + 2
                && cross2(
                    &pts[hull[hull.len() - 2]],
                    &pts[hull[hull.len() - 1]],
                    &pts[i],
                ) <= Rational::zero()
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

fn hull_2d(pts: &[Point]) -> HullParts {
    let idx: Vec<usize> = (0..pts.len()).collect();
    let h = monotone_chain(pts, &idx);
    let mut facets = Vec::with_capacity(h.len());
    let mut twice_area = Rational::zero();
    for w in 0..h.len() {
        let p = &pts[h[w]];
        let q = &pts[h[(w + 1) % h.len()]];
        let normal = vec![&q[1] - &p[1], &p[0] - &q[0]];
        let offset = dot(&normal, p);
        facets.push(Halfspace { normal, offset });
        twice_area += &p[0] * &q[1] - &q[0] * &p[1];
    }
    (h, facets, twice_area / rational::int(2))
}

fn canonical_plane(normal: Vec<Rational>, offset: Rational) -> Halfspace {
    let s = normal
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.abs())
        .expect("degenerate facet");
    Halfspace {
        normal: normal.iter().map(|x| x / &s).collect(),
        offset: offset / s,
    }
}

/// Incremental hull for full-dimensional point sets in ℝ³.
fn hull_3d(pts: &[Point]) -> HullParts {
    // Initial tetrahedron.
    let a = 0;
    let b = (1..pts.len())
        .find(|&i| pts[i] != pts[a])
        .expect("full-dimensional input");
    let ab = sub(&pts[b], &pts[a]);
    let c = (0..pts.len())
        .find(|&i| {
            cross(&ab, &sub(&pts[i], &pts[a]))
                .iter()
                .any(|x| !x.is_zero())
        })
        .expect("full-dimensional input");
    let ac = sub(&pts[c], &pts[a]);
    let d = (0..pts.len())
        .find(|&i| !det3(&ab, &ac, &sub(&pts[i], &pts[a])).is_zero())
        .expect("full-dimensional input");
    let centroid: Point = (0..3)
        .map(|j| (&pts[a][j] + &pts[b][j] + &pts[c][j] + &pts[d][j]) / rational::int(4))
        .collect();

    let orient = |f: &[usize; 3], p: &[Rational]| -> Rational {
        let o = &pts[f[0]];
        det3(&sub(&pts[f[1]], o), &sub(&pts[f[2]], o), &sub(p, o))
    };
    let outward = |f: [usize; 3]| -> [usize; 3] {
        if orient(&f, &centroid) > Rational::zero() {
            [f[0], f[2], f[1]]
        } else {
            f
        }
    };
    let mut faces: Vec<[usize; 3]> = vec![
        outward([a, b, c]),
        outward([a, b, d]),
        outward([a, c, d]),
        outward([b, c, d]),
    ];

    for (i, p) in pts.iter().enumerate() {
        if [a, b, c, d].contains(&i) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| orient(f, p) > Rational::zero())
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let vis_edges: HashSet<(usize, usize)> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| v)
            .flat_map(|(f, _)| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .collect();
        let mut next: Vec<[usize; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| *f)
            .collect();
        for &(u, v) in &vis_edges {
            if !vis_edges.contains(&(v, u)) {
                next.push([u, v, i]);
            }
        }
        faces = next;
    }

    let mut volume = Rational::zero();
    let mut planes: Vec<Halfspace> = Vec::new();
    for f in &faces {
        volume -= orient(f, &centroid);
        let o = &pts[f[0]];
        let normal = cross(&sub(&pts[f[1]], o), &sub(&pts[f[2]], o));
        let offset = dot(&normal, o);
        let h = canonical_plane(normal, offset);
        if !planes.contains(&h) {
            planes.push(h);
        }
    }
    volume /= rational::int(6);

    // Extreme points are the vertices of the facet polygons.
    let mut extreme: Vec<usize> = Vec::new();
    for h in &planes {
        let on: Vec<usize> = (0..pts.len())
            .filter(|&i| dot(&h.normal, &pts[i]) == h.offset)
            .collect();
        let drop = h.normal.iter().position(|x| !x.is_zero()).unwrap();
        let flat: Vec<Point> = pts
            .iter()
            .map(|p| {
                (0..3)
                    .filter(|&j| j != drop)
                    .map(|j| p[j].clone())
                    .collect()
            })
            .collect();
        extreme.extend(monotone_chain(&flat, &on));
    }
    extreme.sort();
    extreme.dedup();
    (extreme, planes, volume)
}

/// Exact Euclidean volume; zero for lower-dimensional bodies.
pub fn volume(p: &Polytope) -> Result<Rational> {
    if p.is_empty() {
        return Err(Error::EmptyBody);
    }
    Ok(p.volume.clone())
}

/// Hull of pairwise vertex sums.
pub fn minkowski_sum(p: &Polytope, q: &Polytope) -> Result<Polytope> {
    check_dim(p.dim, q.dim)?;
    if p.is_empty() || q.is_empty() {
        return Ok(Polytope::empty(p.dim));
    }
    let sums: Vec<Point> = p
        .vertices
        .iter()
        .flat_map(|u| q.vertices.iter().map(move |v| linalg::add(u, v)))
        .collect();
    convex_hull(&sums)
}

/// Exact point membership; `Interior` means the interior in ℝⁿ, so it is
/// always false for lower-dimensional bodies.
pub fn membership(p: &Polytope, x: &[Rational], mode: Membership) -> Result<bool> {
    check_dim(p.dim, x.len())?;
    if p.is_empty() {
        return Ok(false);
    }
    match mode {
        Membership::BoundaryInclusive => {
            Ok(p.equalities.iter().all(|h| dot(&h.normal, x) == h.offset)
                && p.facets.iter().all(|h| dot(&h.normal, x) <= h.offset))
        }
        Membership::Interior => {
            Ok(p.is_full_dimensional() && p.facets.iter().all(|h| dot(&h.normal, x) < h.offset))
        }
    }
}

/// `P ⊆ Q`, decided on the vertices of `P`.
pub fn contains(outer: &Polytope, inner: &Polytope) -> Result<bool> {
    check_dim(outer.dim, inner.dim)?;
    for v in &inner.vertices {
        if !membership(outer, v, Membership::BoundaryInclusive)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    dim: usize,
    vertices: Vec<Vec<String>>,
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(rational::fmt).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolytopeJson::deserialize(d)?;
        if raw.vertices.is_empty() {
            return Ok(Polytope::empty(raw.dim));
        }
        let pts: Vec<Point> = raw
            .vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|s| rational::parse(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()
            .map_err(D::Error::custom)?;
        let p = convex_hull(&pts).map_err(D::Error::custom)?;
        if p.dim != raw.dim {
            return Err(D::Error::custom("dim does not match vertex length"));
        }
        Ok(p)
    }
}
