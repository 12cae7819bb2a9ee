//! The acceptance suite: nine named criteria, each producing one verdict.
//!
//! Every check is deterministic; the property suites draw from fixed seeds so
//! that `run_all` can be used standalone from the command line.

use std::time::Instant;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adelic::{self, AdelicLattice, ChiMethod, GapConfig};
use crate::envelope;
use crate::error::{Error, Result};
use crate::filt::{FilteredSpace, MultiplicativeFiltration};
use crate::linalg;
use crate::norm::{Metric, MetricKind};
use crate::poly::{monomials_of_degree, Polynomial};
use crate::ratgeom::{self, Point, Polytope};
use crate::rational::{self, frac, int, Rational};
use crate::series::{GradedSeries, Model, Section};
use crate::transform;

pub const CRITERIA: [(u8, &str); 9] = [
    (1, "okounkov bodies"),
    (2, "equidistribution"),
    (3, "volume identity"),
    (4, "fujita approximation"),
    (5, "counterexample"),
    (6, "toric identity"),
    (7, "lattice suite"),
    (8, "sectional capacity trend"),
    (9, "property suites"),
];

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    /// Wall time; excluded from artifacts so that reruns are byte-identical.
    #[serde(skip)]
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {:<26} {}  ({:.2} s) {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

/// A failed check with its reason.
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn deadline(&mut self, start: Instant, limit: f64) {
        let s = start.elapsed().as_secs_f64();
        self.require(s < limit, format!("runtime {s:.2} s exceeds {limit} s"));
    }
}

pub fn run(id: u8) -> Result<Outcome> {
    let (_, name) = *CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .ok_or_else(|| Error::Invalid(format!("no criterion {id}")))?;
    let start = Instant::now();
    let mut c = Check::new();
    let res = match id {
        1 => bodies(&mut c),
        2 => equidistribution(&mut c),
        3 => volume_identity(&mut c),
        4 => fujita(&mut c),
        5 => counterexample(&mut c),
        6 => toric(&mut c),
        7 => lattice(&mut c),
        8 => capacity(&mut c),
        _ => properties(&mut c),
    };
    if let Err(e) = res {
        c.failures.push(format!("error: {e}"));
    }
    let pass = c.failures.is_empty();
    let detail = if pass {
        c.notes.join("; ")
    } else {
        c.failures.join("; ")
    };
    Ok(Outcome {
        id,
        name,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA
        .iter()
        .map(|(id, _)| run(*id).expect("known criterion"))
        .collect()
}

fn unit_segment() -> Result<Polytope> {
    ratgeom::convex_hull(&[vec![int(0)], vec![int(1)]])
}

fn p1_weight(k_max: usize) -> Result<(GradedSeries, MultiplicativeFiltration)> {
    let s = GradedSeries::complete(Model::pn(1), k_max);
    let f = MultiplicativeFiltration::weight(&s, &[int(1), int(0)])?;
    Ok((s, f))
}

fn bodies(c: &mut Check) -> Result<()> {
    let start = Instant::now();
    let p2 = GradedSeries::complete(Model::pn(2), 1).okounkov_body(1)?;
    c.require(
        p2 == Polytope::standard_simplex(2)?,
        "ℙ² body is not the standard simplex",
    );
    let v = ratgeom::volume(&p2)?;
    c.require(
        v == frac(1, 2),
        format!("ℙ² volume {} != 1/2", rational::fmt(&v)),
    );
    let p1 = GradedSeries::complete(Model::pn(1), 1).okounkov_body(1)?;
    c.require(p1 == unit_segment()?, "ℙ¹ body is not [0,1]");
    c.deadline(start, 1.0);
    c.note(format!("vol = {}", rational::fmt(&v)));
    Ok(())
}

fn equidistribution(c: &mut Check) -> Result<()> {
    let start = Instant::now();
    let (s, f) = p1_weight(50)?;
    let grid: Vec<Rational> = (0..=100).map(|i| frac(i, 100)).collect();
    let mut g50 = None;
    for k_max in 1..=50 {
        let g = transform::concave_transform(&s, &f, k_max)?;
        let exact = grid
            .iter()
            .all(|x| g.eval(std::slice::from_ref(x)).as_ref() == Some(x));
        c.require(exact, format!("G(x) != x at k_max = {k_max}"));
        g50 = Some(g);
    }
    let g = g50.expect("nonempty range");
    let mut worst: f64 = 0.0;
    for k in 2..=50 {
        let d = transform::levy_distance(&f.jump_measure(k)?, &g);
        worst = worst.max(d * k as f64);
        c.require(d <= 2.0 / k as f64, format!("levy distance {d} > 2/{k}"));
    }
    c.deadline(start, 5.0);
    c.note(format!("max k·levy = {worst:.3}"));
    Ok(())
}

fn volume_identity(c: &mut Check) -> Result<()> {
    let (_, f) = p1_weight(50)?;
    let half = frac(1, 2);
    let mut worst = Rational::zero();
    for k in 1..=50 {
        let m = f
            .space(k)?
            .exact_mass()
            .ok_or_else(|| Error::Invalid("inexact mass".into()))?;
        let kr = int(k as i64);
        let err = (m / (&kr * &kr) - &half).abs();
        c.require(
            err <= frac(1, k as i64),
            format!("|k⁻² mass − 1/2| = {} > 1/{k}", rational::fmt(&err)),
        );
        worst = worst.max(err * &kr);
    }
    c.note(format!("max k·|err| = {}", rational::fmt(&worst)));
    Ok(())
}

fn fujita(c: &mut Check) -> Result<()> {
    let gens: Vec<Section> = [[2u32, 0], [1, 1], [0, 2]]
        .iter()
        .map(|e| Section::new(2, Polynomial::monomial(e.to_vec(), rational::one())))
        .collect();
    for k_max in [4, 6, 8] {
        let v = GradedSeries::generated(Model::pn(1), &gens, k_max)?;
        let f = MultiplicativeFiltration::weight(&v, &[int(1), int(0)])?;
        let t = transform::fujita_approx(&v, &f, &[1, 2], k_max)?;
        c.require(
            t.rows[0].volume.is_zero(),
            format!(
                "vol(S•V≤1) = {} at k_max {k_max}",
                rational::fmt(&t.rows[0].volume)
            ),
        );
        c.require(
            t.rows[1].volume == t.full_volume,
            format!(
                "vol(S•V≤2) {} != {} at k_max {k_max}",
                rational::fmt(&t.rows[1].volume),
                rational::fmt(&t.full_volume)
            ),
        );
        c.note(format!(
            "k_max {k_max}: full {}",
            rational::fmt(&t.full_volume)
        ));
    }
    Ok(())
}

fn counterexample(c: &mut Check) -> Result<()> {
    let k_max = 4;
    for m in 1..=3i64 {
        let s = GradedSeries::complete(Model::p1_at(int(m)), k_max);
        let env = envelope::yuan_envelope(&s, Metric::fs(), k_max)?;
        let h1 = rational::to_f64(&env.hull.eval(&[int(1)]).ok_or(Error::EmptyBody)?);
        let want = -0.5 * ((1 + m * m) as f64).ln();
        c.require(
            (h1 - want).abs() <= 1e-9,
            format!("m={m}: H(1) = {h1}, expected {want}"),
        );
        let ends_exact = env
            .values
            .iter()
            .filter(|r| r.alpha[0] as usize == r.k)
            .all(|r| r.exact);
        c.require(ends_exact, format!("m={m}: h(k,k) not from a closed form"));
        let f = adelic::minima_filtration(&s, Metric::fs())?;
        for k in 1..=k_max {
            let neg = transform::graph_values(&s, &f, k)?
                .values()
                .filter(|g| g.value < 0.0)
                .count();
            c.require(neg == 0, format!("m={m}, k={k}: {neg} negative g-values"));
        }
        let g = transform::concave_transform(&s, &f, k_max)?;
        let inf_g = g.min_graph_value();
        c.require(
            !inf_g.is_negative() && h1 < 0.0,
            format!("m={m}: inf H < 0 <= inf G fails"),
        );
        c.note(format!("m={m}: H(1)={h1:.10}"));
    }
    Ok(())
}

fn toric(c: &mut Check) -> Result<()> {
    let start = Instant::now();
    let k_top = 8;
    let s = GradedSeries::complete(Model::pn(1), k_top);
    let f = adelic::minima_filtration(&s, Metric::fs())?;
    let grid: Vec<Rational> = (0..=100).map(|i| frac(i, 100)).collect();
    let mut prev: Option<Vec<Rational>> = None;
    let mut gaps = Vec::new();
    for k_max in 1..=k_top {
        let g = transform::concave_transform(&s, &f, k_max)?;
        let vals = grid
            .iter()
            .map(|x| g.eval(std::slice::from_ref(x)).ok_or(Error::EmptyBody))
            .collect::<Result<Vec<_>>>()?;
        let mut gap: f64 = 0.0;
        for (x, v) in grid.iter().zip(&vals) {
            let d = rational::to_f64(v) - envelope::fs_minus_gstar(rational::to_f64(x));
            c.require(
                d <= 1e-9,
                format!("G_{k_max}({}) exceeds -g* by {d}", rational::fmt(x)),
            );
            gap = gap.max(d.abs());
        }
        if let Some(p) = &prev {
            let mono = p.iter().zip(&vals).all(|(a, b)| a <= b);
            c.require(mono, format!("G_{k_max} < G_{} somewhere", k_max - 1));
        }
        prev = Some(vals);
        gaps.push(gap);
    }
    c.require(
        gaps[7] < gaps[1],
        format!(
            "sup-gap at 8 ({}) not below sup-gap at 2 ({})",
            gaps[7], gaps[1]
        ),
    );
    let half = envelope::minus_conjugate(&envelope::fs_weight, &unit_segment()?, &frac(1, 2))?;
    let want = 0.5 * 2f64.ln();
    c.require(
        (half - want).abs() <= 1e-12,
        format!("-g*(1/2) = {half}, expected {want}"),
    );
    c.deadline(start, 60.0);
    c.note(format!("sup-gap k=2 {:.4}, k=8 {:.4}", gaps[1], gaps[7]));
    Ok(())
}

fn lattice(c: &mut Check) -> Result<()> {
    let start = Instant::now();
    let s = GradedSeries::complete(Model::pn(1), 5);
    let lat = AdelicLattice::for_series(&s, 1, Metric::fs())?;
    let m = lat.successive_minima()?;
    c.require(
        m.lambdas == vec![1.0, 1.0] && m.certified,
        format!("k=1 minima {:?}", m.lambdas),
    );
    let cfg = GapConfig::default();
    let small = lat.small_sections(cfg.cap, cfg.depth)?;
    c.require(
        small.count == 5 && small.ambiguous == 0,
        format!("k=1 small sections {}", small.count),
    );
    let chi = lat.euler_characteristic(ChiMethod::ExactLowdim, 0, 0)?;
    let want = std::f64::consts::PI.ln();
    c.require(
        (chi.value - want).abs() <= 1e-9,
        format!("χ = {}, expected log π", chi.value),
    );
    let ks: Vec<usize> = (1..=5).collect();
    let report = adelic::gap_report(&s, Metric::fs(), &ks, &cfg)?;
    c.require(
        report.bounded,
        format!("max ratio {} exceeds {}", report.max_ratio, report.bound),
    );
    c.deadline(start, 120.0);
    c.note(format!(
        "max gap ratio {:.4} (bound {})",
        report.max_ratio, report.bound
    ));
    Ok(())
}

fn capacity(c: &mut Check) -> Result<()> {
    let s = GradedSeries::complete(Model::pn(1), 8);
    let r = adelic::sectional_capacity(&s, Metric::fs(), 8, 10.0)?;
    let at = |k: usize| {
        r.rows
            .iter()
            .find(|row| row.k == k)
            .map(|row| row.chi_slope)
            .ok_or(Error::EmptyBody)
    };
    let (d2, d8) = ((at(2)? - 0.25).abs(), (at(8)? - 0.25).abs());
    c.require(
        d8 < d2,
        format!("|slope(8) − 1/4| = {d8} not below |slope(2) − 1/4| = {d2}"),
    );
    c.note(format!(
        "slope k=2 {:.4}, k=8 {:.4}, capacity {:.4}",
        at(2)?,
        at(8)?,
        r.capacity
    ));
    Ok(())
}

fn properties(c: &mut Check) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c0ffee);
    brunn_minkowski(c, &mut rng)?;
    jumps(c, &mut rng)?;
    ord_multiplicative(c, &mut rng)?;
    shipped_filtrations(c)?;
    enumeration(c)?;
    Ok(())
}

fn random_polytope(rng: &mut ChaCha8Rng, dim: usize) -> Result<Polytope> {
    let n = rng.random_range(dim + 1..=dim + 4);
    let pts: Vec<Point> = (0..n)
        .map(|_| (0..dim).map(|_| int(rng.random_range(-3..=3))).collect())
        .collect();
    ratgeom::convex_hull(&pts)
}

fn brunn_minkowski(c: &mut Check, rng: &mut ChaCha8Rng) -> Result<()> {
    let vol = |p: &Polytope| {
        if p.is_full_dimensional() {
            ratgeom::volume(p)
        } else {
            Ok(Rational::zero())
        }
    };
    for i in 0..20 {
        let dim = if i < 10 { 2 } else { 3 };
        let (p, q) = (random_polytope(rng, dim)?, random_polytope(rng, dim)?);
        let s = ratgeom::minkowski_sum(&p, &q)?;
        let (vp, vq, vs) = (vol(&p)?, vol(&q)?, vol(&s)?);
        let ok = if dim == 2 {
            // √vs ≥ √vp + √vq, squared twice.
            let d = &vs - &vp - &vq;
            !d.is_negative() && &d * &d >= int(4) * &vp * &vq
        } else {
            let r = |v: &Rational| rational::to_f64(v).cbrt();
            r(&vs) >= (r(&vp) + r(&vq)) * (1.0 - 1e-12)
        };
        c.require(ok, format!("Brunn–Minkowski fails on pair {i}"));
    }
    c.note("Brunn–Minkowski 20/20");
    Ok(())
}

fn jumps(c: &mut Check, rng: &mut ChaCha8Rng) -> Result<()> {
    for i in 0..100 {
        let n = rng.random_range(1..=8);
        let values: Vec<f64> = (0..n)
            .map(|_| rng.random_range(-12..=12) as f64 / 4.0)
            .collect();
        let sp = FilteredSpace::from_values(&values)?;
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let e = sp.jumping_values();
        let mut ok = e == sorted;
        let mass: f64 = values.iter().filter(|v| **v > 0.0).sum();
        ok &= (sp.mass() - mass).abs() <= 1e-12;
        for (j, ej) in e.iter().enumerate() {
            // e_j = sup{t : dim F_t ≥ j}.
            ok &= sp.dim_at(*ej) > j && sp.dim_at(ej + 1e-6) <= j;
        }
        c.require(ok, format!("jump/mass unwinding fails on space {i}"));
    }
    c.note("filtered spaces 100/100");
    Ok(())
}

fn random_form(rng: &mut ChaCha8Rng, nvars: usize, d: u32) -> Polynomial {
    loop {
        let mut terms = Vec::new();
        for e in monomials_of_degree(nvars, d) {
            if rng.random_bool(0.6) {
                terms.push((e, int(rng.random_range(-3..=3))));
            }
        }
        let p = Polynomial::from_terms(nvars, terms);
        if !p.is_zero() {
            return p;
        }
    }
}

fn ord_multiplicative(c: &mut Check, rng: &mut ChaCha8Rng) -> Result<()> {
    for i in 0..100 {
        let n = rng.random_range(1..=2);
        let point: Vec<Rational> = (0..n)
            .map(|_| frac(rng.random_range(-2..=2), rng.random_range(1..=2)))
            .collect();
        let model = Model::projective(n, 1, point)?;
        let (ds, dt) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let s = random_form(rng, n + 1, ds);
        let t = random_form(rng, n + 1, dt);
        let (os, ot, ost) = (model.ord(&s)?, model.ord(&t)?, model.ord(&s.mul(&t))?);
        let sum: Vec<u32> = os.iter().zip(&ot).map(|(a, b)| a + b).collect();
        c.require(
            ost == sum,
            format!("ord(st) != ord(s) + ord(t) on pair {i}"),
        );
    }
    c.note("ord pairs 100/100");
    Ok(())
}

fn shipped_filtrations(c: &mut Check) -> Result<()> {
    let p1 = GradedSeries::complete(Model::pn(1), 6);
    let p2 = GradedSeries::complete(Model::pn(2), 4);
    let toric = GradedSeries::complete(
        Model::toric(ratgeom::convex_hull(&[
            vec![int(0), int(0)],
            vec![int(2), int(0)],
            vec![int(0), int(1)],
        ])?)?,
        3,
    );
    let fs = Metric::fs();
    let cases: Vec<(&str, MultiplicativeFiltration)> = vec![
        (
            "weight ℙ¹",
            MultiplicativeFiltration::weight(&p1, &[int(1), int(0)])?,
        ),
        (
            "weight ℙ²",
            MultiplicativeFiltration::weight(&p2, &[frac(1, 2), int(-1), int(2)])?,
        ),
        (
            "weight toric",
            MultiplicativeFiltration::weight(&toric, &[int(1), frac(-1, 3)])?,
        ),
        ("trivial", MultiplicativeFiltration::trivial(&p2)?),
        ("minima FS", adelic::minima_filtration(&p1, fs)?),
        ("height FS", adelic::height_filtration(&p1, fs)?),
        (
            "minima trivial",
            adelic::minima_filtration(&p2, Metric::new(MetricKind::Trivial))?,
        ),
        (
            "minima scaled FS",
            adelic::minima_filtration(&p1, Metric::scaled(MetricKind::FsSup, 0.3))?,
        ),
    ];
    for (name, f) in &cases {
        let r = f.check_multiplicative(5000, 7)?;
        c.require(
            r.pass,
            format!("{name} is not multiplicative: {:?}", r.witness),
        );
    }
    c.note(format!("filtrations {}/{}", cases.len(), cases.len()));
    Ok(())
}

/// Exhaustive box search for minima and small sections. Every vector of norm
/// at most `M` has `|c_a| ≤ M / ‖X^a‖`; `M = max(1, max ‖X^a‖)` covers both.
struct BoxSearch {
    lambdas: Vec<f64>,
    small: u64,
}

fn box_search(lat: &AdelicLattice) -> Result<BoxSearch> {
    let w: Vec<f64> = lat.log_norms().iter().map(|l| l.exp()).collect();
    let top = w.iter().cloned().fold(0.0, f64::max);
    let reach = top.max(1.0);
    let radii: Vec<i64> = w
        .iter()
        .map(|x| (reach / x * (1.0 + 1e-12)).floor() as i64)
        .collect();
    let mut cur: Vec<i64> = radii.iter().map(|r| -r).collect();
    let mut found: Vec<(f64, Vec<i64>)> = Vec::new();
    let mut small = 0;
    loop {
        if cur.iter().any(|&x| x != 0) {
            let p = Polynomial::from_terms(
                lat.monomials()[0].len(),
                lat.monomials()
                    .iter()
                    .cloned()
                    .zip(cur.iter().map(|&x| int(x))),
            );
            // The lower end is the locally refined estimate.
            let v = lat.norm(&p, 4)?.lo;
            if v <= 1.0 + 1e-9 {
                small += 1;
            }
            if v <= top * (1.0 + 1e-9) {
                found.push((v, cur.clone()));
            }
        } else {
            small += 1;
        }
        let mut i = 0;
        loop {
            if i == cur.len() {
                found.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut span: Vec<Vec<Rational>> = Vec::new();
                let mut lambdas = Vec::new();
                for (v, x) in found {
                    let mut cand = span.clone();
                    cand.push(x.iter().map(|&c| int(c)).collect());
                    if linalg::rank(&cand) > span.len() {
                        span = cand;
                        lambdas.push(v);
                    }
                }
                return Ok(BoxSearch { lambdas, small });
            }
            if cur[i] < radii[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = -radii[i];
            i += 1;
        }
    }
}

fn enumeration(c: &mut Check) -> Result<()> {
    let kinds = [
        MetricKind::FsSup,
        MetricKind::L2Invariant,
        MetricKind::Trivial,
    ];
    let mut instances = Vec::new();
    for k in 1..=3 {
        for kind in kinds {
            instances.push(AdelicLattice::new(1, 1, k, Metric::new(kind))?);
        }
    }
    for kind in [MetricKind::L2Invariant, MetricKind::Trivial] {
        instances.push(AdelicLattice::new(2, 1, 1, Metric::new(kind))?);
    }
    for lat in &instances {
        let label = format!("n={} k={} {:?}", lat.n(), lat.k(), lat.metric().kind);
        let brute = box_search(lat)?;
        let minima = lat.successive_minima()?;
        let close = brute.lambdas.len() == minima.lambdas.len()
            && brute
                .lambdas
                .iter()
                .zip(&minima.lambdas)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * b.max(1.0));
        c.require(
            close,
            format!(
                "{label}: minima {:?} vs box {:?}",
                minima.lambdas, brute.lambdas
            ),
        );
        let small = lat.small_sections(u64::MAX, 4)?;
        c.require(
            small.ambiguous == 0 && small.count == brute.small,
            format!(
                "{label}: {} small sections vs box {}",
                small.count, brute.small
            ),
        );
    }
    c.note(format!("lattices {}/{}", instances.len(), instances.len()));
    Ok(())
}
