//! The seven experiment pipelines and the artifact bundle they produce.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::Zero;
use serde_json::{json, Value};

use okounkov::adelic::{self, GapReport};
use okounkov::envelope::{self, CompareTolerances};
use okounkov::norm::MetricKind;
use okounkov::ratgeom;
use okounkov::rational::{self, Rational};
use okounkov::series::Model;
use okounkov::transform::{self, PiecewiseConcave};
use okounkov::{acceptance, Error, Result};

use crate::config::{Config, Pipeline};
use crate::emit::{self, Artifact, Format};

#[derive(Debug, Clone)]
pub struct Output {
    pub name: String,
    pub artifact: Artifact,
    pub format: Format,
}

impl Output {
    pub fn file_name(&self) -> String {
        format!("{}.{}", self.name, self.format.extension())
    }
}

/// Artifacts of one run. On error the outputs produced so far are kept.
#[derive(Debug, Default)]
pub struct Bundle {
    pub outputs: Vec<Output>,
    pub error: Option<Error>,
    pub criteria_failed: bool,
    /// Human-readable lines for standard output.
    pub lines: Vec<String>,
}

impl Bundle {
    fn push(&mut self, name: &str, artifact: Artifact, format: Format) {
        self.outputs.push(Output {
            name: name.into(),
            artifact,
            format,
        });
    }

    fn record<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.push(name, Artifact::record(value)?, Format::Json);
        Ok(())
    }

    fn function(&mut self, name: &str, g: &PiecewiseConcave, steps: usize) {
        self.push(
            name,
            Artifact::Function {
                g: g.clone(),
                steps,
            },
            Format::Json,
        );
        self.push(
            name,
            Artifact::Function {
                g: g.clone(),
                steps,
            },
            Format::Plotdata,
        );
    }

    /// 0 pass, 1 criteria failure, 2 config or budget error.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.criteria_failed {
            1
        } else {
            0
        }
    }
}

pub fn run(pipeline: Pipeline, cfg: &Config) -> Bundle {
    let mut b = Bundle::default();
    let res = b.record("config", cfg).and_then(|_| match pipeline {
        Pipeline::Body => body(cfg, &mut b),
        Pipeline::Transform => transform(cfg, &mut b),
        Pipeline::Measure => measure(cfg, &mut b),
        Pipeline::Adelic => lattice(cfg, &mut b),
        Pipeline::Envelope => envelope(cfg, &mut b),
        Pipeline::Compare => compare(cfg, &mut b),
        Pipeline::Acceptance => accept(cfg, &mut b),
    });
    if let Err(e) = res {
        b.error = Some(e);
    }
    b
}

fn body(cfg: &Config, b: &mut Bundle) -> Result<()> {
    let s = cfg.series()?;
    let body = s.okounkov_body(cfg.k_max)?;
    let volume = if body.is_full_dimensional() {
        Some(ratgeom::volume(&body)?)
    } else {
        None
    };
    b.record(
        "body",
        &json!({
            "k_max": cfg.k_max,
            "polytope": body,
            "affine_dim": body.affine_dim(),
            "vertex_count": body.vertices().len(),
            "volume": volume.as_ref().map(rational::fmt),
            "volume_f64": volume.as_ref().map(rational::to_f64),
        }),
    )?;
    let slices = (0..=cfg.k_max)
        .map(|k| s.semigroup_slice(k))
        .collect::<Result<Vec<_>>>()?;
    b.record("semigroup", &slices)?;
    b.record("ample", &s.ample_series_diagnostic(cfg.k_max)?)?;
    b.lines.push(format!(
        "body: {} vertices, volume {}",
        body.vertices().len(),
        volume
            .as_ref()
            .map_or("(not full-dimensional)".into(), rational::fmt)
    ));
    Ok(())
}

fn transform(cfg: &Config, b: &mut Bundle) -> Result<()> {
    let s = cfg.series()?;
    let f = cfg.filtration(&s)?;
    let g = transform::concave_transform(&s, &f, cfg.k_max)?;
    b.function("transform", &g, cfg.grid);
    let levels = transform::level_grid(&g.min_graph_value(), &g.max_value(), cfg.levels);
    let fv = transform::filtered_body_volume(&g, &levels);
    b.push(
        "distribution",
        Artifact::Distribution(fv.distribution.clone()),
        Format::Csv,
    );
    b.record("filtered_volume", &fv)?;
    b.record("slopes", &f.asymptotic_slopes(cfg.k_max)?)?;
    let mult = f.check_multiplicative(cfg.caps.samples, cfg.seed)?;
    b.record("multiplicativity", &mult)?;
    if !cfg.p_list.is_empty() {
        b.record(
            "fujita",
            &transform::fujita_approx(&s, &f, &cfg.p_list, cfg.k_max)?,
        )?;
    }
    b.lines.push(format!(
        "transform: vol Δ̂ = {}, multiplicative: {}",
        rational::fmt(&fv.volume),
        mult.pass
    ));
    Ok(())
}

fn measure(cfg: &Config, b: &mut Bundle) -> Result<()> {
    let s = cfg.series()?;
    let f = cfg.filtration(&s)?;
    let g = transform::concave_transform(&s, &f, cfg.k_max)?;
    let n = s.model().dim() as i32;
    let mut rows = Vec::new();
    for k in cfg.k_range() {
        let mu = f.jump_measure(k)?;
        let levy = transform::levy_distance(&mu, &g);
        let mass = f.space(k)?.mass() / (k as f64).powi(n + 1);
        rows.push(vec![
            k.to_string(),
            mu.atoms.len().to_string(),
            rational::fmt_f64(mu.total_mass()),
            rational::fmt_f64(levy),
            rational::fmt_f64(mass),
        ]);
        b.push(&format!("jumps_k{k}"), Artifact::Jumps(mu), Format::Csv);
    }
    let header = ["k", "dim", "total_mass", "levy_distance", "normalized_mass"]
        .map(String::from)
        .to_vec();
    b.push("measure", Artifact::Table { header, rows }, Format::Csv);
    b.lines.push(format!(
        "measure: vol Δ̂ = {}",
        rational::fmt(&g.positive_integral())
    ));
    Ok(())
}

fn lattice(cfg: &Config, b: &mut Bundle) -> Result<()> {
    let s = cfg.series()?;
    let metric = cfg.metric();
    let ks = cfg.k_range();
    let mut minima = Vec::new();
    for &k in &ks {
        let lat = adelic::AdelicLattice::for_series(&s, k, metric)?;
        minima.push(json!({ "k": k, "n_dim": lat.dim(), "minima": lat.successive_minima()? }));
    }
    b.record("minima", &minima)?;
    // Degree by degree, so that a budget failure keeps the finished rows.
    let gap_cfg = cfg.gap_config();
    let mut report = GapReport {
        rows: Vec::new(),
        max_ratio: 0.0,
        bound: gap_cfg.bound,
        bounded: true,
    };
    let mut failure = None;
    for &k in &ks {
        match adelic::gap_report(&s, metric, &[k], &gap_cfg) {
            Ok(r) => {
                report.max_ratio = report.max_ratio.max(r.max_ratio);
                report.rows.extend(r.rows);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    report.bounded = report.max_ratio <= report.bound;
    let mut rec = serde_json::to_value(&report)?;
    rec["complete"] = Value::Bool(failure.is_none());
    b.record("gap_report", &rec)?;
    if let Some(e) = failure {
        return Err(e);
    }
    b.criteria_failed |= !report.bounded;
    b.lines.push(format!(
        "adelic: max gap ratio {:.4} (bound {})",
        report.max_ratio, report.bound
    ));
    if cfg.k_max >= 1 {
        let cap = adelic::sectional_capacity(&s, metric, cfg.k_max, cfg.slope_bound)?;
        b.lines.push(format!(
            "adelic: sectional capacity estimate {:.6}",
            cap.capacity
        ));
        b.record("capacity", &cap)?;
    }
    Ok(())
}

/// `−g*` on `[0, 1]` for ℙ¹ with `O(1)` or the unit-segment toric model,
/// when the metric weight is known in closed form.
fn minus_gstar(cfg: &Config, model: &Model) -> Result<Option<PiecewiseConcave>> {
    let seg = ratgeom::convex_hull(&[vec![Rational::zero()], vec![rational::int(1)]])?;
    let on_segment = match model {
        Model::Projective { n, degree, .. } => *n == 1 && *degree == 1,
        Model::Toric { polytope } => *polytope == seg,
    };
    if !on_segment {
        return Ok(None);
    }
    let c = cfg.metric.scale;
    let g: Box<dyn Fn(f64) -> f64> = match cfg.metric.kind {
        MetricKind::FsSup => Box::new(move |s| envelope::fs_weight(s) - c),
        MetricKind::Trivial => Box::new(move |s: f64| s.max(0.0) - c),
        MetricKind::L2Invariant => return Ok(None),
    };
    envelope::toric_legendre(&*g, &seg, cfg.grid).map(Some)
}

fn envelope(cfg: &Config, b: &mut Bundle) -> Result<()> {
    let s = cfg.series()?;
    let env = envelope::yuan_envelope(&s, cfg.metric(), cfg.k_max)?;
    let rows = env
        .values
        .iter()
        .map(|r| {
            let alpha: Vec<String> = r.alpha.iter().map(|a| a.to_string()).collect();
            vec![
                r.k.to_string(),
                alpha.join(";"),
                rational::fmt_f64(r.h),
                r.exact.to_string(),
            ]
        })
        .collect();
    let header = ["k", "alpha", "h", "exact"].map(String::from).to_vec();
    b.push("h_values", Artifact::Table { header, rows }, Format::Csv);
    b.function("envelope", &env.hull, cfg.grid);
    b.record(
        "envelope_summary",
        &json!({
            "integral": rational::to_f64(&env.hull.integral()),
            "max": rational::to_f64(&env.hull.max_value()),
            "upper_c": env.upper_c,
            "lower_c": env.lower_c,
            "approximate": env.approximate,
        }),
    )?;
    if let Some(mg) = minus_gstar(cfg, s.model())? {
        b.function("minus_gstar", &mg, cfg.grid);
    }
    b.lines.push(format!(
        "envelope: max H = {:.10}",
        rational::to_f64(&env.hull.max_value())
    ));
    Ok(())
}

fn compare(cfg: &Config, b: &mut Bundle) -> Result<()> {
    let s = cfg.series()?;
    let metric = cfg.metric();
    let mg = minus_gstar(cfg, s.model())?.ok_or_else(|| {
        Error::Unsupported(
            "comparison needs ℙ¹ or the unit segment with the FS or trivial metric".into(),
        )
    })?;
    let f = adelic::minima_filtration(&s, metric)?;
    let g = transform::concave_transform(&s, &f, cfg.k_max)?;
    let h = envelope::yuan_envelope(&s, metric, cfg.k_max)?.hull;
    let tol = CompareTolerances::default();
    let c = envelope::compare_transforms(&g, &h, &mg, cfg.grid, tol)?;
    let off_toric =
        matches!(s.model(), Model::Projective { point, .. } if point.iter().any(|p| !p.is_zero()));
    let mut asserted: Vec<(String, bool)> = Vec::new();
    if off_toric {
        asserted.push((c.verdicts[0].name.clone(), c.verdicts[0].pass));
    } else {
        asserted.push((c.verdicts[1].name.clone(), c.verdicts[1].pass));
        if cfg.k_max > 2 {
            let g2 = transform::concave_transform(&s, &f, 2)?;
            let c2 = envelope::compare_transforms(&g2, &h, &mg, cfg.grid, tol)?;
            asserted.push((
                format!("sup|G - (-g*)| at k_max {} below k_max 2", cfg.k_max),
                c.sup_gap_g_vs_gstar < c2.sup_gap_g_vs_gstar,
            ));
        }
    }
    let pass = asserted.iter().all(|(_, p)| *p);
    let mut rec = serde_json::to_value(&c)?;
    rec["configuration"] = Value::from(if off_toric { "counterexample" } else { "toric" });
    rec["asserted"] = asserted
        .iter()
        .map(|(n, p)| json!({ "name": n, "pass": p }))
        .collect();
    rec["pass"] = Value::Bool(pass);
    b.record("comparison", &rec)?;
    b.function("G", &g, cfg.grid);
    b.function("H", &h, cfg.grid);
    b.function("minus_gstar", &mg, cfg.grid);
    b.lines.push(format!(
        "compare: inf_G = {:.6}, inf_H = {:.6}, sup|G - (-g*)| = {:.6}",
        c.inf_g, c.inf_h, c.sup_gap_g_vs_gstar
    ));
    for (name, p) in &asserted {
        b.lines
            .push(format!("  {} {name}", if *p { "PASS" } else { "FAIL" }));
    }
    b.criteria_failed |= !pass;
    Ok(())
}

fn accept(cfg: &Config, b: &mut Bundle) -> Result<()> {
    let ids: Vec<u8> = match &cfg.criteria {
        Some(ids) => ids.clone(),
        None => acceptance::CRITERIA.iter().map(|(i, _)| *i).collect(),
    };
    let mut outcomes = Vec::new();
    for id in ids {
        let o = acceptance::run(id)?;
        b.lines.push(o.line());
        outcomes.push(o);
    }
    let pass = outcomes.iter().all(|o| o.pass);
    b.lines.push(format!(
        "acceptance: {} of {} criteria pass",
        outcomes.iter().filter(|o| o.pass).count(),
        outcomes.len()
    ));
    b.record("acceptance", &json!({ "criteria": outcomes, "pass": pass }))?;
    b.criteria_failed |= !pass;
    Ok(())
}

/// Writes every artifact and the manifest into `dir`; returns the manifest path.
pub fn write(
    bundle: &Bundle,
    cfg: &Config,
    pipeline: Pipeline,
    dir: &Path,
    started: Instant,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let hash = cfg.sha256();
    let mut files = Vec::new();
    for o in &bundle.outputs {
        let text = emit::emit(&o.name, &o.artifact, o.format, &hash)?;
        let file = o.file_name();
        std::fs::write(dir.join(&file), text)?;
        files.push(file);
    }
    let status = match bundle.exit_code() {
        0 => "pass",
        1 => "criteria_failed",
        _ => "error",
    };
    let manifest = json!({
        "config_sha256": hash,
        "seed": cfg.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "pipeline": pipeline.name(),
        "wall_time_seconds": started.elapsed().as_secs_f64(),
        "artifacts": files,
        "status": status,
        "error": bundle.error.as_ref().map(|e| e.to_string()),
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}
