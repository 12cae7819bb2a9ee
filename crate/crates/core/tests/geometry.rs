use num_traits::{Signed, Zero};
use proptest::prelude::*;

use okounkov::poly::Polynomial;
use okounkov::ratgeom::{self, Membership, Point, Polytope};
use okounkov::rational::{frac, int, one, to_f64};
use okounkov::series::{GradedSeries, Model, Section};
use okounkov::{Error, Rational};

fn pts(raw: &[&[i64]]) -> Vec<Point> {
    raw.iter()
        .map(|p| p.iter().map(|&c| int(c)).collect())
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Shoelace area of the convex hull, with the hull taken by angle sorting
/// of the reported vertices around their centroid.
fn shoelace(vertices: &[Point]) -> Rational {
    let f: Vec<(f64, f64)> = vertices
        .iter()
        .map(|v| (to_f64(&v[0]), to_f64(&v[1])))
        .collect();
    let (cx, cy) = f.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = f.len() as f64;
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    idx.sort_by(|&i, &j| {
        let ai = (f[i].1 - cy / n).atan2(f[i].0 - cx / n);
        let aj = (f[j].1 - cy / n).atan2(f[j].0 - cx / n);
        ai.total_cmp(&aj)
    });
    let mut twice = Rational::zero();
    for w in 0..idx.len() {
        let (p, q) = (&vertices[idx[w]], &vertices[idx[(w + 1) % idx.len()]]);
        twice += &p[0] * &q[1] - &q[0] * &p[1];
    }
    twice.abs() / int(2)
}

#[test]
fn dilated_simplex_volumes() {
    for n in 1..=3usize {
        let s = Polytope::standard_simplex(n).unwrap();
        for k in 1..=4i64 {
            let v = ratgeom::volume(&s.scale(&int(k)).unwrap()).unwrap();
            assert_eq!(v, frac(k.pow(n as u32), factorial(n as u64) as i64));
        }
    }
}

#[test]
fn hull_of_cube_corners_and_centre() {
    let mut raw: Vec<Vec<i64>> = Vec::new();
    for m in 0..8 {
        raw.push((0..3).map(|b| (m >> b) & 1).collect());
    }
    raw.push(vec![0, 0, 0]);
    let points: Vec<Point> = raw
        .iter()
        .map(|p| p.iter().map(|&c| int(c)).collect())
        .collect();
    let mut with_centre = points.clone();
    with_centre.push(vec![frac(1, 2), frac(1, 2), frac(1, 2)]);
    let cube = ratgeom::convex_hull(&with_centre).unwrap();
    assert_eq!(cube.vertices().len(), 8);
    assert_eq!(ratgeom::volume(&cube).unwrap(), int(1));
    assert_eq!(cube.facets().len(), 6);
}

#[test]
fn degenerate_hulls() {
    let seg = ratgeom::convex_hull(&pts(&[&[0, 0], &[2, 2], &[1, 1]])).unwrap();
    assert_eq!(seg.affine_dim(), Some(1));
    assert!(!seg.is_full_dimensional());
    assert!(ratgeom::membership(&seg, &[int(1), int(1)], Membership::BoundaryInclusive).unwrap());
    assert!(!ratgeom::membership(&seg, &[int(1), int(1)], Membership::Interior).unwrap());
}

#[test]
fn mixed_dimensions_are_rejected() {
    let p = ratgeom::convex_hull(&pts(&[&[0], &[1]])).unwrap();
    let q = Polytope::standard_simplex(2).unwrap();
    assert!(matches!(
        ratgeom::minkowski_sum(&p, &q),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn minkowski_sum_of_simplex_and_square() {
    // vol(Σ + □) = vol Σ + vol □ + perimeter-type mixed term 2·V(Σ, □) = 1/2 + 1 + 2.
    let s = Polytope::standard_simplex(2).unwrap();
    let sq = ratgeom::convex_hull(&pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap();
    let sum = ratgeom::minkowski_sum(&s, &sq).unwrap();
    assert_eq!(ratgeom::volume(&sum).unwrap(), frac(7, 2));
    assert!(ratgeom::contains(&sum, &s).unwrap());
}

fn point_set(dim: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, dim), dim + 1..dim + 7).prop_map(|v| {
        v.into_iter()
            .map(|p| p.into_iter().map(int).collect())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn brunn_minkowski_in_the_plane(a in point_set(2), b in point_set(2)) {
        let (p, q) = (ratgeom::convex_hull(&a).unwrap(), ratgeom::convex_hull(&b).unwrap());
        prop_assume!(p.is_full_dimensional() && q.is_full_dimensional());
        let s = ratgeom::minkowski_sum(&p, &q).unwrap();
        let (vp, vq, vs) = (ratgeom::volume(&p).unwrap(), ratgeom::volume(&q).unwrap(), ratgeom::volume(&s).unwrap());
        let d = &vs - &vp - &vq;
        prop_assert!(!d.is_negative());
        prop_assert!(&d * &d >= int(4) * &vp * &vq);
    }

    #[test]
    fn brunn_minkowski_in_space(a in point_set(3), b in point_set(3)) {
        let (p, q) = (ratgeom::convex_hull(&a).unwrap(), ratgeom::convex_hull(&b).unwrap());
        prop_assume!(p.is_full_dimensional() && q.is_full_dimensional());
        let s = ratgeom::minkowski_sum(&p, &q).unwrap();
        let r = |x: &Polytope| to_f64(&ratgeom::volume(x).unwrap()).cbrt();
        prop_assert!(r(&s) >= (r(&p) + r(&q)) * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_hulls_match_shoelace(a in point_set(2)) {
        let p = ratgeom::convex_hull(&a).unwrap();
        prop_assume!(p.is_full_dimensional());
        prop_assert_eq!(ratgeom::volume(&p).unwrap(), shoelace(p.vertices()));
        for x in &a {
            prop_assert!(ratgeom::membership(&p, x, Membership::BoundaryInclusive).unwrap());
        }
        for v in p.vertices() {
            prop_assert!(a.contains(v));
        }
    }

    #[test]
    fn translation_preserves_volume(a in point_set(3), t in prop::collection::vec(-5i64..=5, 3)) {
        let p = ratgeom::convex_hull(&a).unwrap();
        prop_assume!(p.is_full_dimensional());
        let shift: Vec<Rational> = t.into_iter().map(int).collect();
        prop_assert_eq!(ratgeom::volume(&p.translate(&shift).unwrap()).unwrap(), ratgeom::volume(&p).unwrap());
    }
}

#[test]
fn complete_series_dimensions() {
    for n in 1..=3usize {
        for d in 1..=2u32 {
            let s = GradedSeries::complete(Model::projective(n, d, vec![int(0); n]).unwrap(), 4);
            for k in 0..=4u64 {
                assert_eq!(
                    s.dim(k as usize).unwrap() as u64,
                    binomial(n as u64 + d as u64 * k, n as u64)
                );
            }
        }
    }
}

#[test]
fn bodies_of_projective_spaces() {
    let p2 = GradedSeries::complete(Model::pn(2), 1)
        .okounkov_body(1)
        .unwrap();
    assert_eq!(p2, Polytope::standard_simplex(2).unwrap());
    assert_eq!(ratgeom::volume(&p2).unwrap(), frac(1, 2));
    let unit = ratgeom::convex_hull(&pts(&[&[0], &[1]])).unwrap();
    for m in [int(0), int(1), frac(-3, 2)] {
        let b = GradedSeries::complete(Model::p1_at(m), 3)
            .okounkov_body(3)
            .unwrap();
        assert_eq!(b, unit);
    }
    let o2 = Model::projective(1, 2, vec![int(0)]).unwrap();
    let b = GradedSeries::complete(o2, 2).okounkov_body(2).unwrap();
    assert_eq!(b, ratgeom::convex_hull(&pts(&[&[0], &[2]])).unwrap());
    let p3 = GradedSeries::complete(Model::pn(3), 2)
        .okounkov_body(2)
        .unwrap();
    assert_eq!(ratgeom::volume(&p3).unwrap(), frac(1, 6));
}

#[test]
fn toric_body_is_the_polytope() {
    let trap = ratgeom::convex_hull(&pts(&[&[0, 0], &[3, 0], &[0, 1], &[1, 1]])).unwrap();
    let s = GradedSeries::complete(Model::toric(trap.clone()).unwrap(), 3);
    assert_eq!(s.okounkov_body(3).unwrap(), trap);
    // Lattice points of kΔ: Ehrhart polynomial 2k² + 3k + 1 for this trapezoid.
    for k in 0..=3usize {
        assert_eq!(s.dim(k).unwrap(), 2 * k * k + 3 * k + 1);
    }
}

#[test]
fn degree_two_generated_series() {
    let gens: Vec<Section> = [[2u32, 0], [0, 2]]
        .iter()
        .map(|e| Section::new(2, Polynomial::monomial(e.to_vec(), one())))
        .collect();
    let s = GradedSeries::generated(Model::pn(1), &gens, 6).unwrap();
    for k in 0..=6 {
        let want = if k % 2 == 0 { k / 2 + 1 } else { 0 };
        assert_eq!(s.dim(k).unwrap(), want);
    }
    // Γ_4 = {0, 2, 4}; the body at level 4 is still [0, 1].
    let g4: Vec<_> = s
        .semigroup_slice(4)
        .unwrap()
        .exponents
        .into_iter()
        .collect();
    assert_eq!(g4, vec![vec![0], vec![2], vec![4]]);
    assert_eq!(
        s.okounkov_body(6).unwrap(),
        ratgeom::convex_hull(&pts(&[&[0], &[1]])).unwrap()
    );
}

#[test]
fn explicit_series_rejects_dependent_bases() {
    let x = Polynomial::from_int_terms(2, &[(&[1, 0], 1)]);
    let x2 = Polynomial::from_int_terms(2, &[(&[1, 0], 2)]);
    assert!(GradedSeries::explicit(Model::pn(1), vec![vec![], vec![x.clone(), x2]]).is_err());
    let xy = Polynomial::from_int_terms(2, &[(&[1, 1], 1)]);
    assert!(matches!(
        GradedSeries::explicit(Model::pn(1), vec![vec![], vec![xy]]),
        Err(Error::NotHomogeneous(1))
    ));
    assert!(GradedSeries::explicit(Model::pn(1), vec![vec![], vec![x]]).is_ok());
}

fn form(nvars: usize) -> impl Strategy<Value = Polynomial> {
    (1u32..=3).prop_flat_map(move |d| {
        let monos = okounkov::poly::monomials_of_degree(nvars, d);
        prop::collection::vec(-3i64..=3, monos.len()).prop_filter_map("zero form", move |cs| {
            let p =
                Polynomial::from_terms(nvars, monos.iter().cloned().zip(cs.into_iter().map(int)));
            (!p.is_zero()).then_some(p)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ord_is_additive_on_products(
        s in form(3),
        t in form(3),
        a in -3i64..=3, b in 1i64..=3, c in -3i64..=3,
    ) {
        let model = Model::projective(2, 1, vec![frac(a, b), int(c)]).unwrap();
        let (os, ot) = (model.ord(&s).unwrap(), model.ord(&t).unwrap());
        let sum: Vec<u32> = os.iter().zip(&ot).map(|(x, y)| x + y).collect();
        prop_assert_eq!(model.ord(&s.mul(&t)).unwrap(), sum);
    }
}

#[test]
fn ord_of_zero_is_an_error() {
    assert!(matches!(
        Model::pn(1).ord(&Polynomial::zero(2)),
        Err(Error::ZeroSection)
    ));
}
