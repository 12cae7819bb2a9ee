//! Graded linear series with explicit bases, the valuation `ord_z`, the
//! Okounkov semigroup and finite-level Okounkov bodies.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{monomials_of_degree, Exponent, Polynomial};
use crate::ratgeom::{self, Membership, Point, Polytope};
use crate::rational::{self, Rational};

/// Ambient variety, line bundle and valuation flag.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// `O(degree)` on ℙⁿ. Sections are homogeneous in `X_0..X_n`; the
    /// valuation is taken in the chart `X_n = 1` at the affine point `point`
    /// with parameters `z_i = X_i/X_n - point_i`, ordered by index.
    Projective {
        n: usize,
        degree: u32,
        point: Vec<Rational>,
    },
    /// Toric model of a lattice polytope in the nonnegative orthant. Sections
    /// are combinations of characters `χ^u`, `u ∈ kΔ`, valued at the torus
    /// fixed point where `ord(χ^u) = u`.
    Toric { polytope: Polytope },
}

impl Model {
    pub fn projective(n: usize, degree: u32, point: Vec<Rational>) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if point.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: point.len(),
            });
        }
        if degree == 0 {
            return Err(Error::Invalid("line bundle degree must be positive".into()));
        }
        Ok(Model::Projective { n, degree, point })
    }

    /// ℙⁿ with `O(1)` valued at `[0:…:0:1]`.
    pub fn pn(n: usize) -> Self {
        Model::projective(n, 1, vec![Rational::zero(); n]).expect("valid dimension")
    }

    /// ℙ¹ with `O(1)` valued at `[m:1]`.
    pub fn p1_at(m: Rational) -> Self {
        Model::Projective {
            n: 1,
            degree: 1,
            point: vec![m],
        }
    }

    pub fn toric(polytope: Polytope) -> Result<Self> {
        let n = polytope.dim();
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if polytope.is_empty() {
            return Err(Error::EmptyBody);
        }
        for v in polytope.vertices() {
            if v.iter().any(|c| !c.is_integer() || c < &Rational::zero()) {
                return Err(Error::Invalid(
                    "toric polytope must have integral vertices in the nonnegative orthant".into(),
                ));
            }
        }
        Ok(Model::Toric { polytope })
    }

    /// Dimension `n` of the variety (and of the Okounkov body).
    pub fn dim(&self) -> usize {
        match self {
            Model::Projective { n, .. } => *n,
            Model::Toric { polytope } => polytope.dim(),
        }
    }

    /// Number of polynomial variables carried by a section.
    pub fn nvars(&self) -> usize {
        match self {
            Model::Projective { n, .. } => n + 1,
            Model::Toric { polytope } => polytope.dim(),
        }
    }

    /// Monomial (or character) basis of `H⁰(kL)`, in lex order.
    pub fn complete_exponents(&self, k: usize) -> Vec<Exponent> {
        match self {
            Model::Projective { n, degree, .. } => monomials_of_degree(n + 1, degree * k as u32),
            Model::Toric { polytope } => lattice_points(polytope, k),
        }
    }

    /// Whether a polynomial is an admissible degree-`k` section.
    pub fn admits(&self, k: usize, poly: &Polynomial) -> bool {
        if poly.nvars() != self.nvars() {
            return false;
        }
        match self {
            Model::Projective { degree, .. } => poly.is_homogeneous_of(degree * k as u32),
            Model::Toric { polytope } => {
                let kp = polytope.scale(&rational::int(k as i64));
                poly.terms().keys().all(|u| match &kp {
                    Ok(kp) if !kp.is_empty() => {
                        let x: Point = u.iter().map(|&c| rational::int(c as i64)).collect();
                        ratgeom::membership(kp, &x, Membership::BoundaryInclusive).unwrap_or(false)
                    }
                    _ => u.iter().all(|&c| c == 0),
                })
            }
        }
    }

    /// Expansion of a section in the local parameters at the valuation point.
    pub fn expansion(&self, poly: &Polynomial) -> Polynomial {
        match self {
            Model::Projective { point, .. } => poly.dehomogenize_at(point),
            Model::Toric { .. } => poly.clone(),
        }
    }

    /// `ord_z`: lex-minimal exponent of the local expansion.
    pub fn ord(&self, poly: &Polynomial) -> Result<Exponent> {
        self.expansion(poly)
            .lex_min_exponent()
            .cloned()
            .ok_or(Error::ZeroSection)
    }
}

/// Lattice points of `kΔ`.
fn lattice_points(p: &Polytope, k: usize) -> Vec<Exponent> {
    let n = p.dim();
    if k == 0 {
        return vec![vec![0; n]];
    }
    let kr = rational::int(k as i64);
    let Ok(kp) = p.scale(&kr) else {
        return Vec::new();
    };
    let mut hi = vec![0u32; n];
    for v in kp.vertices() {
        for (h, c) in hi.iter_mut().zip(v) {
            *h = (*h).max(c.to_integer().try_into().unwrap_or(0));
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        let x: Point = cur.iter().map(|&c| rational::int(c as i64)).collect();
        if ratgeom::membership(&kp, &x, Membership::BoundaryInclusive).unwrap_or(false) {
            out.push(cur.clone());
        }
        // Odometer over the bounding box, last coordinate fastest.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Elimination structure whose rows have pairwise distinct lex-minimal
/// exponents (the staircase of the spanned subspace).
#[derive(Debug, Clone, Default)]
pub struct Staircase {
    rows: BTreeMap<Exponent, Polynomial>,
}

impl Staircase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &Polynomial) -> Polynomial {
        let mut v = v.clone();
        // Cancelling the lead only introduces lex-larger terms, so this terminates.
        while let Some(lead) = v.lex_min_exponent().cloned() {
            let Some(row) = self.rows.get(&lead) else {
                break;
            };
            let c = v.coefficient(&lead);
            v = v.sub(&row.scale(&c));
        }
        v
    }

    /// Inserts `v`; returns the new staircase exponent, or `None` when `v`
    /// already lies in the span.
    pub fn insert(&mut self, v: &Polynomial) -> Option<Exponent> {
        let v = self.reduce(v);
        let lead = v.lex_min_exponent()?.clone();
        let inv = Rational::one() / v.coefficient(&lead);
        self.rows.insert(lead.clone(), v.scale(&inv));
        Some(lead)
    }

    pub fn contains(&self, v: &Polynomial) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn exponents(&self) -> impl Iterator<Item = &Exponent> {
        self.rows.keys()
    }
}

/// A degree-`k` section.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub degree: usize,
    pub poly: Polynomial,
}

impl Section {
    pub fn new(degree: usize, poly: Polynomial) -> Self {
        Section { degree, poly }
    }

    pub fn mul(&self, other: &Section) -> Section {
        Section {
            degree: self.degree + other.degree,
            poly: self.poly.mul(&other.poly),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemigroupSlice {
    pub k: usize,
    pub exponents: BTreeSet<Exponent>,
}

impl SemigroupSlice {
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn contains(&self, alpha: &[u32]) -> bool {
        self.exponents.contains(alpha)
    }
}

/// Explicit bases of `V_0, …, V_{k_max}`.
#[derive(Debug, Clone)]
pub struct GradedSeries {
    model: Model,
    bases: Vec<Vec<Section>>,
}

impl GradedSeries {
    /// The complete series `V_k = H⁰(kL)`.
    pub fn complete(model: Model, k_max: usize) -> Self {
        let bases = (0..=k_max)
            .map(|k| {
                model
                    .complete_exponents(k)
                    .into_iter()
                    .map(|e| Section::new(k, Polynomial::monomial(e, Rational::one())))
                    .collect()
            })
            .collect();
        GradedSeries { model, bases }
    }

    /// The subalgebra generated by `gens` (each of positive degree), up to `k_max`.
    pub fn generated(model: Model, gens: &[Section], k_max: usize) -> Result<Self> {
        for g in gens {
            if g.degree == 0 || g.poly.is_zero() || !model.admits(g.degree, &g.poly) {
                return Err(Error::NotHomogeneous(g.degree));
            }
        }
        let nv = model.nvars();
        let mut bases: Vec<Vec<Section>> = vec![vec![Section::new(
            0,
            Polynomial::constant(nv, Rational::one()),
        )]];
        for k in 1..=k_max {
            let mut stair = Staircase::new();
            let mut basis = Vec::new();
            for g in gens.iter().filter(|g| g.degree <= k) {
                for s in &bases[k - g.degree] {
                    let prod = g.mul(s);
                    if stair.insert(&prod.poly).is_some() {
                        basis.push(prod);
                    }
                }
            }
            bases.push(basis);
        }
        Ok(GradedSeries { model, bases })
    }

    /// Series from user-supplied bases; `bases[0]` is forced to the constants.
    pub fn explicit(model: Model, bases: Vec<Vec<Polynomial>>) -> Result<Self> {
        let nv = model.nvars();
        let mut out = vec![vec![Section::new(
            0,
            Polynomial::constant(nv, Rational::one()),
        )]];
        for (k, basis) in bases.into_iter().enumerate().skip(1) {
            let mut stair = Staircase::new();
            let mut v = Vec::new();
            for p in basis {
                if p.is_zero() || !model.admits(k, &p) {
                    return Err(Error::NotHomogeneous(k));
                }
                if stair.insert(&p).is_none() {
                    return Err(Error::Invalid(format!(
                        "basis of V_{k} is linearly dependent"
                    )));
                }
                v.push(Section::new(k, p));
            }
            out.push(v);
        }
        Ok(GradedSeries { model, bases: out })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn k_max(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn basis(&self, k: usize) -> Result<&[Section]> {
        self.bases
            .get(k)
            .map(|b| b.as_slice())
            .ok_or(Error::DegreeOutOfRange {
                k,
                k_max: self.k_max(),
            })
    }

    pub fn dim(&self, k: usize) -> Result<usize> {
        Ok(self.basis(k)?.len())
    }

    pub fn ord(&self, s: &Section) -> Result<Exponent> {
        self.model.ord(&s.poly)
    }

    /// `Γ_k`: staircase exponents of the local expansions of `V_k`.
    pub fn semigroup_slice(&self, k: usize) -> Result<SemigroupSlice> {
        let mut stair = Staircase::new();
        for s in self.basis(k)? {
            stair.insert(&self.model.expansion(&s.poly));
        }
        Ok(SemigroupSlice {
            k,
            exponents: stair.exponents().cloned().collect(),
        })
    }

    /// Hull of `⋃_{1 ≤ k ≤ k_max} Γ_k / k`.
    pub fn okounkov_body(&self, k_max: usize) -> Result<Polytope> {
        if k_max == 0 {
            return Err(Error::Invalid("k_max must be at least 1".into()));
        }
        let mut pts: Vec<Point> = Vec::new();
        for k in 1..=k_max {
            let kr = rational::int(k as i64);
            for a in self.semigroup_slice(k)?.exponents {
                pts.push(a.iter().map(|&c| rational::int(c as i64) / &kr).collect());
            }
        }
        if pts.is_empty() {
            return Err(Error::EmptyBody);
        }
        ratgeom::convex_hull(&pts)
    }

    /// The subalgebra generated by `V_1 + … + V_p`, computed up to `k_max`.
    pub fn truncate_subalgebra(&self, p: usize, k_max: usize) -> Result<GradedSeries> {
        if p == 0 {
            return Err(Error::Invalid("p must be at least 1".into()));
        }
        let mut gens = Vec::new();
        for k in 1..=p.min(k_max) {
            gens.extend(self.basis(k)?.iter().cloned());
        }
        GradedSeries::generated(self.model.clone(), &gens, k_max)
    }

    /// Whether `s` lies in `V_k`.
    pub fn contains(&self, k: usize, poly: &Polynomial) -> Result<bool> {
        let mut stair = Staircase::new();
        for s in self.basis(k)? {
            stair.insert(&s.poly);
        }
        Ok(stair.contains(poly))
    }

    /// Certifies `V_k · V_m ⊆ V_{k+m}` on basis products.
    pub fn check_closure(&self, k: usize, m: usize) -> Result<()> {
        let mut stair = Staircase::new();
        for s in self.basis(k + m)? {
            stair.insert(&s.poly);
        }
        for a in self.basis(k)? {
            for b in self.basis(m)? {
                if !stair.contains(&a.poly.mul(&b.poly)) {
                    return Err(Error::ClosureViolation { k, m });
                }
            }
        }
        Ok(())
    }

    pub fn ample_series_diagnostic(&self, k_max: usize) -> Result<AmpleReport> {
        if k_max == 0 || k_max > self.k_max() {
            return Err(Error::DegreeOutOfRange {
                k: k_max,
                k_max: self.k_max(),
            });
        }
        let k_lo = k_max.div_ceil(2).max(1);
        let window: Vec<usize> = (k_lo..=k_max).collect();
        let mut empty_degrees = Vec::new();
        let mut complete_degrees = Vec::new();
        let mut simplex_dilates = Vec::new();
        for &k in &window {
            let dim = self.dim(k)?;
            if dim == 0 {
                empty_degrees.push(k);
            }
            if dim == self.model.complete_exponents(k).len() {
                complete_degrees.push(k);
            }
            let slice = self.semigroup_slice(k)?;
            simplex_dilates.push((k, largest_simplex_dilate(&slice, self.model.dim())));
        }
        let verdict = if !empty_degrees.is_empty() {
            Verdict::Fail
        } else if complete_degrees.len() == window.len() {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        };
        Ok(AmpleReport {
            verdict,
            window,
            empty_degrees,
            complete_degrees,
            simplex_dilates,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmpleReport {
    pub verdict: Verdict,
    /// Degrees examined.
    pub window: Vec<usize>,
    /// Degrees with `V_k = 0`.
    pub empty_degrees: Vec<usize>,
    /// Degrees with `V_k = H⁰(kL)`.
    pub complete_degrees: Vec<usize>,
    /// Largest `r` such that `Γ_k` contains a translate of the lattice points
    /// of `r·Σ_n`; `None` when `Γ_k` is empty.
    pub simplex_dilates: Vec<(usize, Option<usize>)>,
}

fn largest_simplex_dilate(slice: &SemigroupSlice, n: usize) -> Option<usize> {
    if slice.is_empty() {
        return None;
    }
    let mut best = 0;
    let max_r = slice
        .exponents
        .iter()
        .flat_map(|a| a.iter())
        .copied()
        .max()
        .unwrap_or(0) as usize;
    for r in 1..=max_r {
        let pattern = (0..=r as u32)
            .flat_map(|d| monomials_of_degree(n + 1, d))
            .map(|mut e| {
                e.pop();
                e
            });
        let pattern: BTreeSet<Exponent> = pattern.collect();
        let found = slice.exponents.iter().any(|base| {
            pattern.iter().all(|g| {
                let q: Exponent = base.iter().zip(g).map(|(a, b)| a + b).collect();
                slice.contains(&q)
            })
        });
        if !found {
            break;
        }
        best = r;
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn p1() -> Model {
        Model::pn(1)
    }

    fn sec(k: usize, nv: usize, terms: &[(&[u32], i64)]) -> Section {
        let p = Polynomial::from_int_terms(nv, terms);
        assert_eq!(p.nvars(), nv);
        Section::new(k, p)
    }

    #[test]
    fn ord_examples() {
        let m = p1();
        assert_eq!(m.ord(&sec(5, 2, &[(&[2, 3], 1)]).poly).unwrap(), vec![2]);
        let at = Model::p1_at(int(3));
        assert_eq!(
            at.ord(&sec(1, 2, &[(&[1, 0], 1), (&[0, 1], -3)]).poly)
                .unwrap(),
            vec![1]
        );
        let p2 = Model::pn(2);
        assert_eq!(
            p2.ord(&sec(2, 3, &[(&[1, 1, 0], 1)]).poly).unwrap(),
            vec![1, 1]
        );
        assert_eq!(p2.ord(&Polynomial::zero(3)), Err(Error::ZeroSection));
    }

    #[test]
    fn slices_of_complete_series() {
        let s = GradedSeries::complete(p1(), 3);
        let g = s.semigroup_slice(3).unwrap();
        assert_eq!(g.exponents, (0..=3).map(|a| vec![a]).collect());
        let s2 = GradedSeries::complete(Model::pn(2), 1);
        let g = s2.semigroup_slice(1).unwrap();
        assert_eq!(
            g.exponents,
            [vec![0, 0], vec![1, 0], vec![0, 1]].into_iter().collect()
        );
    }

    #[test]
    fn subseries_staircase() {
        let s = GradedSeries::explicit(
            p1(),
            vec![
                vec![],
                vec![],
                vec![
                    Polynomial::from_int_terms(2, &[(&[2, 0], 1)]),
                    Polynomial::from_int_terms(2, &[(&[1, 1], 1)]),
                ],
            ],
        )
        .unwrap();
        assert_eq!(
            s.semigroup_slice(2).unwrap().exponents,
            [vec![2], vec![1]].into_iter().collect()
        );
    }

    #[test]
    fn staircase_at_non_toric_point_is_full() {
        // At p = [1:1] every degree-k slice of the complete series is {0..k}.
        let s = GradedSeries::complete(Model::p1_at(int(1)), 4);
        for k in 0..=4 {
            assert_eq!(s.semigroup_slice(k).unwrap().len(), k + 1);
        }
    }

    #[test]
    fn bodies() {
        let b = GradedSeries::complete(p1(), 1).okounkov_body(1).unwrap();
        assert_eq!(b.vertices(), &[vec![int(0)], vec![int(1)]]);
        let b2 = GradedSeries::complete(Model::pn(2), 1)
            .okounkov_body(1)
            .unwrap();
        assert_eq!(b2, Polytope::standard_simplex(2).unwrap());
        assert_eq!(ratgeom::volume(&b2).unwrap(), frac(1, 2));
        let seg = ratgeom::convex_hull(&[vec![int(0)], vec![int(2)]]).unwrap();
        let t = GradedSeries::complete(Model::toric(seg.clone()).unwrap(), 1);
        assert_eq!(t.dim(1).unwrap(), 3);
        assert_eq!(t.okounkov_body(1).unwrap(), seg);
    }

    #[test]
    fn empty_body_is_an_error() {
        let s = GradedSeries::explicit(p1(), vec![vec![], vec![]]).unwrap();
        assert_eq!(s.okounkov_body(1), Err(Error::EmptyBody));
    }

    fn veronese(k_max: usize) -> GradedSeries {
        let gens = [
            sec(2, 2, &[(&[2, 0], 1)]),
            sec(2, 2, &[(&[1, 1], 1)]),
            sec(2, 2, &[(&[0, 2], 1)]),
        ];
        GradedSeries::generated(p1(), &gens, k_max).unwrap()
    }

    #[test]
    fn truncations() {
        let full = GradedSeries::complete(p1(), 4);
        let t = full.truncate_subalgebra(1, 4).unwrap();
        for k in 0..=4 {
            assert_eq!(t.dim(k).unwrap(), k + 1);
        }
        let v = veronese(6);
        let t1 = v.truncate_subalgebra(1, 6).unwrap();
        assert!((1..=6).all(|k| t1.dim(k).unwrap() == 0));
        let t2 = v.truncate_subalgebra(2, 6).unwrap();
        for m in 1..=3 {
            assert_eq!(t2.dim(2 * m).unwrap(), 2 * m + 1);
            assert_eq!(t2.dim(2 * m - 1).unwrap(), 0);
        }
    }

    #[test]
    fn closure() {
        let v = veronese(4);
        v.check_closure(2, 2).unwrap();
        let bad = GradedSeries::explicit(
            p1(),
            vec![
                vec![],
                vec![Polynomial::from_int_terms(2, &[(&[1, 0], 1)])],
                vec![Polynomial::from_int_terms(2, &[(&[0, 2], 1)])],
            ],
        )
        .unwrap();
        assert_eq!(
            bad.check_closure(1, 1),
            Err(Error::ClosureViolation { k: 1, m: 1 })
        );
    }

    #[test]
    fn ample_diagnostic() {
        let full = GradedSeries::complete(p1(), 6);
        assert_eq!(
            full.ample_series_diagnostic(6).unwrap().verdict,
            Verdict::Pass
        );
        assert_eq!(
            veronese(6).ample_series_diagnostic(6).unwrap().verdict,
            Verdict::Fail
        );
        // Monomials of ℙ² with positive first chart exponent, plus constants.
        let p2 = Model::pn(2);
        let bases: Vec<Vec<Polynomial>> = (0..=4u32)
            .map(|k| {
                monomials_of_degree(3, k)
                    .into_iter()
                    .filter(|e| e[0] > 0)
                    .map(|e| Polynomial::monomial(e, Rational::one()))
                    .collect()
            })
            .collect();
        let s = GradedSeries::explicit(p2, bases).unwrap();
        let r = s.ample_series_diagnostic(4).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.simplex_dilates.iter().all(|(_, d)| d.is_some()));
    }

    #[test]
    fn toric_lattice_points() {
        let tri = ratgeom::convex_hull(&[
            vec![int(0), int(0)],
            vec![int(2), int(0)],
            vec![int(0), int(2)],
        ])
        .unwrap();
        let m = Model::toric(tri).unwrap();
        assert_eq!(m.complete_exponents(1).len(), 6);
        assert_eq!(m.complete_exponents(2).len(), 15);
        let neg = ratgeom::convex_hull(&[vec![int(-1)], vec![int(1)]]).unwrap();
        assert!(Model::toric(neg).is_err());
    }
}
