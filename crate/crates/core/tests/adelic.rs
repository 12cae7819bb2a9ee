use std::f64::consts::PI;

use okounkov::adelic::{self, AdelicLattice, ChiMethod, GapConfig};
use okounkov::filt::FiltrationKind;
use okounkov::norm::{Decision, Metric, MetricKind};
use okounkov::poly::Polynomial;
use okounkov::rational::Rational;
use okounkov::series::{GradedSeries, Model};
use okounkov::transform;
use proptest::prelude::*;

/// Dense-grid sup norm on ℙ¹ with Newton-free local polishing, for `c`
/// indexed by the power of X. Independent of the library's oracle.
fn grid_fs_norm(c: &[f64]) -> f64 {
    let k = c.len() - 1;
    let value = |theta: f64, phi: f64| {
        let (ct, st) = (theta.cos(), theta.sin());
        let (mut re, mut im) = (0.0, 0.0);
        for (a, ca) in c.iter().enumerate() {
            let m = ca * ct.powi(a as i32) * st.powi((k - a) as i32);
            re += m * (a as f64 * phi).cos();
            im += m * (a as f64 * phi).sin();
        }
        (re * re + im * im).sqrt()
    };
    let (nt, np) = (600, 120);
    let mut best = (0.0, 0.0, 0.0);
    for i in 0..=nt {
        for j in 0..np {
            let (t, p) = (
                PI / 2.0 * i as f64 / nt as f64,
                2.0 * PI * j as f64 / np as f64,
            );
            let v = value(t, p);
            if v > best.0 {
                best = (v, t, p);
            }
        }
    }
    // Shrinking pattern search around the best node.
    let (mut v, mut t, mut p) = best;
    let mut h = PI / nt as f64;
    while h > 1e-12 {
        let mut moved = false;
        for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let w = value(t + dt, p + dp);
            if w > v {
                (v, t, p) = (w, t + dt, p + dp);
                moved = true;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    v
}

fn ln_fact(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Test-side norms of an integer vector in the monomial order of `lat`.
fn oracle_norm(lat: &AdelicLattice, v: &[i64]) -> f64 {
    let mons = lat.monomials();
    let d: u32 = mons[0].iter().sum();
    let scale = (-(lat.k() as f64) * lat.metric().scale).exp();
    scale
        * match lat.metric().kind {
            MetricKind::Trivial => v.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt(),
            MetricKind::L2Invariant => {
                let n = mons[0].len() as u32 - 1;
                v.iter()
                    .zip(mons)
                    .map(|(&c, a)| {
                        let lw = a.iter().map(|&x| ln_fact(x)).sum::<f64>() + ln_fact(n)
                            - ln_fact(d + n);
                        (c * c) as f64 * lw.exp()
                    })
                    .sum::<f64>()
                    .sqrt()
            }
            MetricKind::FsSup => {
                assert_eq!(mons[0].len(), 2);
                let mut c = vec![0.0; d as usize + 1];
                for (&x, a) in v.iter().zip(mons) {
                    c[a[0] as usize] = x as f64;
                }
                grid_fs_norm(&c)
            }
        }
}

/// Rank of integer vectors by fraction-free elimination.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let (a, b) = (m[r][c], m[i][c]);
                for j in 0..cols {
                    m[i][j] = m[i][j] * a - m[r][j] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    m[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        r += 1;
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All vectors of the box `|c_a| ≤ ⌊R / ‖X^a‖⌋`, with oracle norms.
fn box_vectors(lat: &AdelicLattice, radius: f64) -> Vec<(f64, Vec<i64>)> {
    let radii: Vec<i64> = lat
        .log_norms()
        .iter()
        .map(|l| (radius / l.exp() + 1e-9).floor() as i64)
        .collect();
    let mut out = Vec::new();
    let mut v: Vec<i64> = radii.iter().map(|r| -r).collect();
    'outer: loop {
        if v.iter().any(|&x| x != 0) {
            out.push((oracle_norm(lat, &v), v.clone()));
        }
        for i in (0..v.len()).rev() {
            if v[i] < radii[i] {
                v[i] += 1;
                continue 'outer;
            }
            v[i] = -radii[i];
        }
        break;
    }
    out
}

fn brute_force_minima(lat: &AdelicLattice) -> Vec<f64> {
    // Every λ_j is at most the largest basis norm.
    let r = lat
        .log_norms()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
        .exp();
    let mut cands = box_vectors(lat, r);
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut lambdas = Vec::new();
    for (nv, v) in cands {
        let mut trial = chosen.clone();
        trial.push(v);
        if rank(&trial) == trial.len() {
            chosen = trial;
            lambdas.push(nv);
            if chosen.len() == lat.dim() {
                break;
            }
        }
    }
    lambdas
}

fn instances() -> Vec<AdelicLattice> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for kind in [
            MetricKind::FsSup,
            MetricKind::L2Invariant,
            MetricKind::Trivial,
        ] {
            out.push(AdelicLattice::new(1, 1, k, Metric::new(kind)).unwrap());
        }
    }
    for kind in [MetricKind::L2Invariant, MetricKind::Trivial] {
        out.push(AdelicLattice::new(2, 1, 1, Metric::new(kind)).unwrap());
    }
    out.push(AdelicLattice::new(1, 1, 2, Metric::scaled(MetricKind::FsSup, 0.1)).unwrap());
    out
}

#[test]
fn enumeration_equals_brute_force_minima() {
    for lat in instances() {
        let m = lat.successive_minima().unwrap();
        assert!(m.certified);
        let bf = brute_force_minima(&lat);
        assert_eq!(bf.len(), lat.dim());
        for (a, b) in m.lambdas.iter().zip(&bf) {
            assert!(
                (a - b).abs() < 1e-9,
                "{:?} k={}: {:?} vs {:?}",
                lat.metric(),
                lat.k(),
                m.lambdas,
                bf
            );
        }
        assert!(m.lambdas.windows(2).all(|w| w[0] <= w[1]));
        assert!(m.e.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn small_section_counts_equal_brute_force() {
    for lat in instances() {
        let s = lat.small_sections(10_000_000, 6).unwrap();
        assert_eq!(s.ambiguous, 0);
        let bf = 1 + box_vectors(&lat, 1.0)
            .iter()
            .filter(|(nv, _)| *nv <= 1.0 + 1e-9)
            .count() as u64;
        assert_eq!(s.count, bf, "{:?} k={}", lat.metric(), lat.k());
    }
}

#[test]
fn p1_fs_degree_one() {
    let lat = AdelicLattice::new(1, 1, 1, Metric::fs()).unwrap();
    assert_eq!(lat.successive_minima().unwrap().lambdas, vec![1.0, 1.0]);
    let s = lat.small_sections(1000, 4).unwrap();
    assert_eq!(s.count, 5);
    assert!((s.hat_dim - 5f64.ln()).abs() < 1e-15);
    let chi = lat
        .euler_characteristic(ChiMethod::ExactLowdim, 0, 0)
        .unwrap();
    assert!((chi.value - PI.ln()).abs() < 1e-9);
}

#[test]
fn p1_fs_degree_two_first_minimum_is_log_two() {
    let lat = AdelicLattice::new(1, 1, 2, Metric::fs()).unwrap();
    let e = lat.successive_minima().unwrap().e;
    assert!((e[0] - 2f64.ln()).abs() < 1e-15);
    assert!(e[1].abs() < 1e-15 && e[2].abs() < 1e-15);
}

#[test]
fn diagonal_l2_minima_are_sorted_monomial_norms() {
    let lat = AdelicLattice::new(2, 1, 2, Metric::new(MetricKind::L2Invariant)).unwrap();
    let mut expect: Vec<f64> = lat.log_norms().iter().map(|l| -l).collect();
    expect.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(lat.successive_minima().unwrap().e, expect);
}

#[test]
fn all_large_lattice_has_only_zero() {
    let lat = AdelicLattice::new(1, 1, 1, Metric::scaled(MetricKind::Trivial, -1.0)).unwrap();
    let s = lat.small_sections(100, 2).unwrap();
    assert_eq!((s.count, s.hat_dim), (1, 0.0));
}

#[test]
fn budget_errors_report_a_lower_bound() {
    let lat = AdelicLattice::new(1, 1, 5, Metric::fs()).unwrap();
    match lat.small_sections(1000, 2) {
        Err(okounkov::Error::Budget { partial, .. }) => assert!(partial.contains("at least 13")),
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn monte_carlo_matches_closed_forms() {
    let cases = [
        (1, MetricKind::FsSup),
        (2, MetricKind::FsSup),
        (2, MetricKind::L2Invariant),
        (3, MetricKind::Trivial),
    ];
    for (k, kind) in cases {
        let lat = AdelicLattice::new(1, 1, k, Metric::new(kind)).unwrap();
        let exact = lat
            .euler_characteristic(ChiMethod::ExactLowdim, 0, 0)
            .unwrap();
        let mc = lat
            .euler_characteristic(ChiMethod::MonteCarlo, 100_000, 11)
            .unwrap();
        assert!(
            (exact.value - mc.value).abs() < 4.0 * mc.std_err,
            "k={k} {kind:?}: {exact:?} vs {mc:?}"
        );
        let again = lat
            .euler_characteristic(ChiMethod::MonteCarlo, 100_000, 11)
            .unwrap();
        assert_eq!(mc.value, again.value);
    }
    assert!(
        (AdelicLattice::new(1, 1, 2, Metric::fs())
            .unwrap()
            .euler_characteristic(ChiMethod::ExactLowdim, 0, 0)
            .unwrap()
            .value
            - (8.0 * PI / 3.0).ln())
        .abs()
            < 1e-12
    );
}

#[test]
fn doubling_norms_lowers_chi_by_n_log_two() {
    for kind in [MetricKind::FsSup, MetricKind::L2Invariant] {
        let c = -(2f64.ln());
        let a = AdelicLattice::new(1, 1, 1, Metric::new(kind)).unwrap();
        let b = AdelicLattice::new(1, 1, 1, Metric::scaled(kind, c)).unwrap();
        let (ca, cb) = (
            a.euler_characteristic(ChiMethod::ExactLowdim, 0, 0)
                .unwrap()
                .value,
            b.euler_characteristic(ChiMethod::ExactLowdim, 0, 0)
                .unwrap()
                .value,
        );
        assert!((ca - cb - 2.0 * 2f64.ln()).abs() < 1e-12);
    }
}

#[test]
fn heights_of_sample_sections() {
    let lat = AdelicLattice::new(1, 1, 1, Metric::fs()).unwrap();
    let h = |terms: &[(&[u32], i64)]| {
        lat.height(&Polynomial::from_int_terms(2, terms), 4)
            .unwrap()
            .hi
    };
    assert!(h(&[(&[1, 0], 2)]).abs() < 1e-15);
    assert!((h(&[(&[1, 0], 1), (&[0, 1], -1)]) - 0.5 * 2f64.ln()).abs() < 1e-15);
    let lat3 = AdelicLattice::new(1, 1, 3, Metric::fs()).unwrap();
    let x2y = Polynomial::from_int_terms(2, &[(&[2, 1], 1)]);
    let expect = 0.5 * (4f64 / 27.0).ln();
    assert!((lat3.height(&x2y, 0).unwrap().hi - expect).abs() < 1e-15);
    assert!(expect <= 0.0);
}

#[test]
fn height_dominates_minima_per_index() {
    let series = GradedSeries::complete(Model::pn(1), 6);
    let fm = adelic::minima_filtration(&series, Metric::fs()).unwrap();
    let fh = adelic::height_filtration(&series, Metric::fs()).unwrap();
    assert_eq!(fh.kind(), FiltrationKind::Height);
    for k in 0..=6 {
        let (a, b) = (fm.space(k).unwrap().values(), fh.space(k).unwrap().values());
        assert!(a.iter().zip(b).all(|(m, h)| h >= m));
    }
}

#[test]
fn minima_filtration_values_and_scaling() {
    let series = GradedSeries::complete(Model::pn(1), 4);
    let f = adelic::minima_filtration(&series, Metric::fs()).unwrap();
    assert_eq!(f.space(1).unwrap().values(), &[0.0, 0.0]);
    for k in 1..=4 {
        // Every FS monomial norm is at most one.
        assert!(f.space(k).unwrap().e_min().unwrap() >= 0.0);
    }
    let c = 0.3;
    let t = adelic::minima_filtration(&series, Metric::new(MetricKind::Trivial)).unwrap();
    let ts = adelic::minima_filtration(&series, Metric::scaled(MetricKind::Trivial, c)).unwrap();
    for k in 1..=4 {
        let shifted: Vec<f64> = t
            .space(k)
            .unwrap()
            .values()
            .iter()
            .map(|v| v + k as f64 * c)
            .collect();
        let got = ts.space(k).unwrap().values();
        assert!(shifted.iter().zip(got).all(|(a, b)| (a - b).abs() < 1e-12));
    }
    let g = transform::concave_transform(&series, &f, 4).unwrap();
    assert!(g.min_graph_value() >= Rational::from_integer(0.into()));
}

#[test]
fn shipped_lattice_filtrations_are_multiplicative() {
    let series = GradedSeries::complete(Model::pn(1), 6);
    for f in [
        adelic::minima_filtration(&series, Metric::fs()).unwrap(),
        adelic::height_filtration(&series, Metric::fs()).unwrap(),
        adelic::minima_filtration(&series, Metric::new(MetricKind::Trivial)).unwrap(),
    ] {
        let r = f.check_multiplicative(10_000, 3).unwrap();
        assert!(r.pass, "{:?}: {:?}", f.kind(), r.witness);
    }
    let p2 = GradedSeries::complete(Model::pn(2), 4);
    let r = adelic::minima_filtration(&p2, Metric::fs())
        .unwrap()
        .check_multiplicative(10_000, 3)
        .unwrap();
    assert!(r.pass);
}

#[test]
fn gap_report_on_p1() {
    let series = GradedSeries::complete(Model::pn(1), 5);
    let ks: Vec<usize> = (0..=5).collect();
    let rep = adelic::gap_report(&series, Metric::fs(), &ks, &GapConfig::default()).unwrap();
    let r0 = &rep.rows[0];
    assert_eq!((r0.n_dim, r0.gs_ratio, r0.minkowski_ratio), (1, None, None));
    let r1 = &rep.rows[1];
    assert_eq!(r1.small_count, 5);
    assert!((r1.gs_gap + 5f64.ln()).abs() < 1e-12);
    assert!((r1.gs_ratio.unwrap() - 5f64.ln() / (2.0 * 2f64.ln())).abs() < 1e-12);
    assert!((r1.gs_ratio.unwrap() - 1.16).abs() < 0.01);
    assert!((r1.chi - PI.ln()).abs() < 1e-12);
    let counts: Vec<u64> = rep.rows.iter().map(|r| r.small_count).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    // Ties at norm one that are not phase-aligned stay undecided from k = 4.
    assert!(rep.rows.iter().take(4).all(|r| r.ambiguous == 0));
    assert!(rep.bounded && rep.max_ratio <= 5.0, "{rep:?}");
}

#[test]
fn sectional_capacity_trends_to_a_quarter() {
    let series = GradedSeries::complete(Model::pn(1), 8);
    let rep = adelic::sectional_capacity(&series, Metric::fs(), 8, 100.0).unwrap();
    let dist = |k: usize| (rep.rows[k - 1].chi_slope - 0.25).abs();
    assert!(dist(8) < dist(2));
    assert!(rep
        .rows
        .windows(2)
        .skip(1)
        .all(|w| w[0].chi_slope <= w[1].chi_slope));
    assert!((rep.integral_g - 0.25).abs() < 0.02);
    assert!(rep.capacity > (-0.5f64).exp());

    let trivial =
        adelic::sectional_capacity(&series, Metric::new(MetricKind::Trivial), 8, 100.0).unwrap();
    assert_eq!((trivial.capacity, trivial.integral_g), (1.0, 0.0));
    let c = 0.25;
    let shifted =
        adelic::sectional_capacity(&series, Metric::scaled(MetricKind::Trivial, c), 8, 100.0)
            .unwrap();
    // vol Δ = 1 for the segment.
    assert!((shifted.integral_g - c).abs() < 1e-12);
    assert!(matches!(
        adelic::sectional_capacity(
            &series,
            Metric::scaled(MetricKind::Trivial, 500.0),
            8,
            100.0
        ),
        Err(okounkov::Error::Unbounded(_))
    ));
}

#[test]
fn non_complete_series_is_refused() {
    let x = okounkov::series::Section::new(1, Polynomial::from_int_terms(2, &[(&[1, 0], 1)]));
    let series = GradedSeries::generated(Model::pn(1), &[x], 2).unwrap();
    assert!(AdelicLattice::for_series(&series, 2, Metric::fs()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fs_monomial_norms_are_submultiplicative(a in 0u32..8, b in 0u32..8, c in 0u32..8, d in 0u32..8) {
        prop_assume!(a + b > 0 && c + d > 0);
        let fs = Metric::fs();
        let lhs = fs.base_monomial_norm_sq(&[a + c, b + d]);
        let rhs = fs.base_monomial_norm_sq(&[a, b]) * fs.base_monomial_norm_sq(&[c, d]);
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn exact_decisions_agree_with_the_oracle(c0 in -2i64..=2, c1 in -2i64..=2, c2 in -2i64..=2) {
        let lat = AdelicLattice::new(1, 1, 2, Metric::fs()).unwrap();
        let v = [c0, c1, c2];
        let d = lat.decide_small(&v, 6).unwrap();
        if v.iter().any(|&x| x != 0) {
            let n = oracle_norm(&lat, &v);
            if (n - 1.0).abs() > 1e-6 {
                prop_assert_eq!(d == Decision::Small, n < 1.0);
            }
        }
    }
}
