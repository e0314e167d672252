//! Experiment execution and artifact writing.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::config::{ExactValue, ExperimentConfig, ExperimentKind, Prepared, RatioMethod};
use crate::envelope::{lp_lq_rate, Rate};
use crate::error::{Error, Result};
use crate::fitcheck::{self, ExponentReport};
use crate::oscint::{eval_auto, KernelSample, LatticeOptions};
use crate::propagator::{
    default_points_per_axis, operator_ratio, standard_probes, strichartz_norm, GridField, DEFAULT_HALF_WIDTH,
    DEFAULT_STEPS_PER_UNIT, STRICHARTZ_INSTABILITY,
};
use crate::scalar::{log_space, ExactScalar, Rational};

/// Everything an experiment produced, before it is written out.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub samples: Vec<KernelSample<f64>>,
    /// Entries of `fits.json`.
    pub fits: Vec<Value>,
    /// Named checks, each with a `verdict` field.
    pub verdicts: Vec<Value>,
    /// Envelope, region and other exact objects used.
    pub objects: Map<String, Value>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v["verdict"] == "pass")
    }
}

fn verdict_str(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn along_axis(n: usize, s: f64) -> Vec<f64> {
    let mut x = vec![0.0; n];
    x[0] = s;
    x
}

fn exact_json(e: &Rational) -> Value {
    json!({"exact": e.render(), "value": e.to_float()})
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    prepared: &'a Prepared,
    lattice: LatticeOptions,
}

impl Context<'_> {
    fn kernel(&self, t: f64, x: &[f64]) -> Result<KernelSample<f64>> {
        let p = self.prepared;
        eval_auto(&p.phase, &p.symbol, t, x, self.config.tolerances.quadrature, &self.lattice)
    }

    fn dimension(&self) -> usize {
        self.prepared.phase.dimension()
    }
}

/// Runs a validated experiment.
pub fn execute(config: &ExperimentConfig, prepared: &Prepared) -> Result<RunOutput> {
    let ctx = Context {
        config,
        prepared,
        lattice: LatticeOptions::default(),
    };
    let mut out = RunOutput::default();
    if let Some(env) = &prepared.envelope {
        out.objects.insert("envelope".into(), env.to_json());
    }
    if let Some(region) = &prepared.region {
        out.objects.insert("region".into(), region.to_json());
    }
    match config.kind {
        ExperimentKind::PointwiseDecay => pointwise_decay(&ctx, &mut out)?,
        ExperimentKind::EnvelopeDomination => envelope_domination(&ctx, &mut out)?,
        ExperimentKind::LpLqRatio => lp_lq_ratio(&ctx, &mut out)?,
        ExperimentKind::Strichartz => strichartz(&ctx, &mut out)?,
        ExperimentKind::RegionReport => region_report(&ctx, &mut out)?,
        ExperimentKind::EllipticityAudit => ellipticity_audit(&ctx, &mut out)?,
    }
    Ok(out)
}

fn push_fit(out: &mut RunOutput, check: String, report: &ExponentReport<Rational>) {
    let mut fit = report.to_json();
    fit["check"] = json!(check);
    out.verdicts.push(json!({
        "check": check,
        "verdict": report.verdict.as_str(),
        "fitted_exponent": report.fitted,
        "predicted_exponent": report.predicted.render(),
    }));
    out.fits.push(fit);
}

fn pointwise_decay(ctx: &Context, out: &mut RunOutput) -> Result<()> {
    let env = ctx.prepared.envelope.as_ref().expect("validated envelope");
    let n = ctx.dimension();
    let tol = ctx.config.tolerances.exponent;
    for (i, fit) in ctx.config.sampling.time_fits.iter().enumerate() {
        let piece = if fit.regime == "large_time_inner" { 1 } else { 0 };
        let predicted = match &fit.predicted {
            Some(p) => p.to_rational("predicted")?,
            None => {
                let rate = &env.pieces[piece].rate;
                let t_exp = rate.t_exponent().cloned().unwrap_or_default();
                match (fit.speed, rate) {
                    // along |x| = c|t| the scaled distance grows like |t|^{1-1/m}
                    (Some(_), Rate::Scaled { x_exp, m, .. }) => {
                        -(t_exp + x_exp.clone() * (Rational::from_int(1) - Rational::from_int(1) / m.clone()))
                    }
                    _ => -t_exp,
                }
            }
        };
        let samples = log_space(fit.t_range[0], fit.t_range[1], fit.points)
            .into_iter()
            .map(|t| {
                let s = fit.speed.map_or(fit.x.unwrap_or(0.0), |c| c * t);
                ctx.kernel(t, &along_axis(n, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let report = fitcheck::fit_time_decay(&samples, &fit.regime, predicted, tol)?;
        push_fit(out, format!("time_fits[{i}] {}", fit.regime), &report);
        out.samples.extend(samples);
    }
    for (i, fit) in ctx.config.sampling.space_fits.iter().enumerate() {
        let check = format!("space_fits[{i}] t={}", fit.t);
        let t = fit.t;
        // the piece governing the sweep is the one at its near end
        let probe_x = fit.scaled_range[0];
        let piece = env
            .pieces
            .iter()
            .find(|p| {
                p.rate
                    .m()
                    .is_some_and(|m| p.regime.holds(t, probe_x * t.powf(1.0 / m.to_float())))
            })
            .ok_or_else(|| Error::Config(format!("{check}: no scaled envelope piece at this time")))?;
        let m = piece.rate.m().cloned().expect("scaled piece");
        let predicted = match &fit.predicted {
            Some(p) => p.to_rational("predicted")?,
            None => -piece.rate.x_exponent().cloned().unwrap_or_default(),
        };
        let scale = t.powf(1.0 / m.to_float());
        let samples = log_space(fit.scaled_range[0], fit.scaled_range[1], fit.points)
            .into_iter()
            .map(|z| ctx.kernel(t, &along_axis(n, z * scale)))
            .collect::<Result<Vec<_>>>()?;
        match fitcheck::fit_space_decay(&samples, piece.regime.name, &m, predicted.clone(), tol) {
            Ok(report) => push_fit(out, check, &report),
            Err(Error::OscillationDominated { r_squared }) => {
                out.fits.push(json!({
                    "check": check,
                    "regime": piece.regime.name,
                    "predicted_exponent": exact_json(&predicted),
                    "error": "oscillation dominated",
                    "r_squared": r_squared,
                    "verdict": "fail",
                }));
                out.verdicts.push(json!({"check": check, "verdict": "fail", "reason": "oscillation dominated"}));
            }
            Err(e) => return Err(e),
        }
        out.samples.extend(samples);
    }
    Ok(())
}

fn envelope_domination(ctx: &Context, out: &mut RunOutput) -> Result<()> {
    let env = ctx.prepared.envelope.as_ref().expect("validated envelope");
    let grid = ctx.config.domination_grid(ctx.dimension())?;
    let extension = ctx.config.sampling.grid.as_ref().expect("validated grid").extension;
    let report = fitcheck::check_domination(&grid, env, extension, |t, x| ctx.kernel(t, x))?;
    let mut summary = report.to_json();
    summary["check"] = json!("envelope domination");
    summary["verdict"] = json!(verdict_str(report.stable));
    out.verdicts.push(json!({
        "check": "envelope domination",
        "verdict": verdict_str(report.stable),
        "c_fit": report.c_fit,
        "change": report.change,
        "flagged": report.base.flagged + report.refined.flagged,
    }));
    out.fits.push(summary);
    out.samples.extend(report.samples);
    out.samples.extend(report.refined_samples);
    Ok(())
}

fn lebesgue_float(inv: &Rational) -> f64 {
    if *inv == Rational::from_int(0) {
        f64::INFINITY
    } else {
        1.0 / inv.to_float()
    }
}

fn lp_lq_ratio(ctx: &Context, out: &mut RunOutput) -> Result<()> {
    let plan = ctx.config.sampling.lp_lq.as_ref().expect("validated plan");
    let region = ctx.prepared.region.as_ref().expect("validated region");
    let (inv_p, inv_q) = (plan.p.reciprocal("p")?, plan.q.reciprocal("q")?);
    let n = ctx.dimension();
    let phase = &ctx.prepared.phase;
    let probes = match plan.method {
        RatioMethod::Probes => Some(standard_probes::<f64>(
            n,
            default_points_per_axis(n),
            DEFAULT_HALF_WIDTH,
            ctx.config.seed,
        )?),
        RatioMethod::Kernel => None,
    };
    let scales = [phase.m1(), phase.m2()];
    let mut curves = Vec::new();
    for (i, window) in plan.windows.iter().enumerate() {
        let times = log_space(window.t_range[0], window.t_range[1], window.points);
        let mid = (window.t_range[0] * window.t_range[1]).sqrt();
        let rate = lp_lq_rate(region, &inv_p, &inv_q, mid)?;
        let mut values = Vec::with_capacity(times.len());
        for &t in &times {
            let value = match &probes {
                Some(probes) => {
                    let r = operator_ratio(
                        phase,
                        Some(&ctx.prepared.symbol),
                        lebesgue_float(&inv_p),
                        lebesgue_float(&inv_q),
                        t,
                        probes,
                    )?;
                    r.ratio
                }
                None => {
                    let mut sup = 0.0f64;
                    for m in scales {
                        let scale = t.powf(1.0 / m);
                        for k in 0..plan.z_points {
                            let z = plan.z_max * k as f64 / (plan.z_points - 1) as f64;
                            let sample = ctx.kernel(t, &along_axis(n, z * scale))?;
                            sup = sup.max(sample.modulus());
                            out.samples.push(sample);
                        }
                    }
                    sup / (2.0 * PI).powi(n as i32)
                }
            };
            values.push(value);
        }
        let regime = match rate.regime {
            crate::envelope::RateRegime::SmallTime => "small_time",
            crate::envelope::RateRegime::LargeTime => "large_time",
        };
        let report = fitcheck::fit_power_law(
            &times,
            &values,
            regime,
            -rate.exponent.clone(),
            ctx.config.tolerances.exponent,
        )?;
        curves.push(json!({"window": i, "t": times, "ratio": values}));
        push_fit(out, format!("lp_lq.windows[{i}] {regime}"), &report);
        let last = out.fits.len() - 1;
        out.fits[last]["critical"] = json!(rate.critical);
        out.fits[last]["endpoint"] = json!(rate.endpoint);
    }
    out.objects.insert(
        "lp_lq".into(),
        json!({
            "inv_p": exact_json(&inv_p),
            "inv_q": exact_json(&inv_q),
            "method": match plan.method { RatioMethod::Kernel => "kernel", RatioMethod::Probes => "probes" },
            "curves": curves,
        }),
    );
    Ok(())
}

fn strichartz(ctx: &Context, out: &mut RunOutput) -> Result<()> {
    let plan = ctx.config.sampling.strichartz.as_ref().expect("validated plan");
    let region = ctx.prepared.region.as_ref().expect("validated region");
    let pairs = ctx.prepared.pairs.as_ref().expect("validated pairs");
    let n = ctx.dimension();
    let inv_p = match &plan.p {
        Some(p) => p.reciprocal("strichartz.p")?,
        None => pairs.sample(2)[1].0.clone(),
    };
    let inv_q = pairs.inv_q(&inv_p)?;
    let u0 = GridField::<f64>::gaussian(n, default_points_per_axis(n), DEFAULT_HALF_WIDTH, plan.gaussian_width, None)?;
    let b = region.b.to_float();
    let measure = |inv_p: &Rational, inv_q: &Rational| {
        strichartz_norm(
            &ctx.prepared.phase,
            b,
            &u0,
            lebesgue_float(inv_p),
            lebesgue_float(inv_q),
            plan.window,
            DEFAULT_STEPS_PER_UNIT,
        )
    };
    let mut entry = |check: &str, inv_p: &Rational, inv_q: &Rational, expect_stable: bool| -> Result<()> {
        let r = measure(inv_p, inv_q)?;
        let pass = r.unstable != expect_stable;
        let record = json!({
            "check": check,
            "inv_p": exact_json(inv_p),
            "inv_q": exact_json(inv_q),
            "window": plan.window,
            "norm": r.norm,
            "doubled": r.doubled,
            "delta": r.delta,
            "threshold": STRICHARTZ_INSTABILITY,
            "unstable": r.unstable,
            "expected": if expect_stable { "stable" } else { "unstable" },
            "verdict": verdict_str(pass),
        });
        out.fits.push(record);
        out.verdicts.push(json!({"check": check, "verdict": verdict_str(pass), "delta": r.delta}));
        Ok(())
    };
    entry("admissible pair", &inv_p, &inv_q, true)?;
    if let Some([p, q]) = &plan.control {
        let (cp, cq) = (p.reciprocal("control p")?, q.reciprocal("control q")?);
        entry("non-admissible control", &cp, &cq, false)?;
    }
    out.objects.insert(
        "strichartz_interval".into(),
        json!({
            "inv_p_closed": exact_json(&pairs.interval.inv_p_closed),
            "inv_p_open": exact_json(&pairs.interval.inv_p_open),
        }),
    );
    Ok(())
}

fn region_report(ctx: &Context, out: &mut RunOutput) -> Result<()> {
    let region = ctx.prepared.region.as_ref().expect("validated region");
    let mut pairs = Vec::new();
    for [p, q] in &ctx.config.sampling.pairs {
        let (inv_p, inv_q) = (p.reciprocal("p")?, q.reciprocal("q")?);
        let mut entry = json!({
            "p": exact_label(p),
            "q": exact_label(q),
            "inv_p": exact_json(&inv_p),
            "inv_q": exact_json(&inv_q),
            "inside": region.contains(&inv_p, &inv_q),
        });
        if region.contains(&inv_p, &inv_q) {
            let small = lp_lq_rate(region, &inv_p, &inv_q, 0.5)?;
            let large = lp_lq_rate(region, &inv_p, &inv_q, 2.0)?;
            entry["endpoint"] = json!(small.endpoint);
            entry["small_time_exponent"] = exact_json(&small.exponent);
            entry["large_time_exponent"] = exact_json(&large.exponent);
            entry["critical"] = json!(large.critical);
        }
        pairs.push(entry);
    }
    out.objects.insert("pairs".into(), Value::Array(pairs));
    match &ctx.prepared.pairs {
        Some(sp) => {
            out.objects.insert(
                "strichartz_interval".into(),
                json!({
                    "inv_p_closed": exact_json(&sp.interval.inv_p_closed),
                    "inv_p_open": exact_json(&sp.interval.inv_p_open),
                }),
            );
        }
        None => {
            out.objects.insert("strichartz_interval".into(), Value::Null);
        }
    }
    Ok(())
}

fn exact_label(v: &ExactValue) -> Value {
    match v {
        ExactValue::Number(x) => json!(x),
        ExactValue::Text(s) => json!(s),
    }
}

fn ellipticity_audit(ctx: &Context, out: &mut RunOutput) -> Result<()> {
    let samples = ctx.config.sampling.shell_samples.unwrap_or(64);
    let report = ctx.prepared.phase.verify_ellipticity(samples)?;
    let stats = |s: &crate::phase::RatioStats<f64>| {
        json!({"min": s.min, "max": s.max, "argmin": s.argmin, "argmax": s.argmax})
    };
    let c = &report.constants;
    let violation = report.violation.as_ref().map(|v| {
        json!({
            "region": format!("{:?}", v.region).to_lowercase(),
            "ratio": format!("{:?}", v.kind).to_lowercase(),
            "xi": v.xi,
            "value": v.ratio,
        })
    });
    out.objects.insert(
        "ellipticity".into(),
        json!({
            "holds": report.holds,
            "inner": {"gradient": stats(&report.inner.gradient), "hessian_det": stats(&report.inner.hessian)},
            "outer": {"gradient": stats(&report.outer.gradient), "hessian_det": stats(&report.outer.hessian)},
            "constants": {
                "c1": c.c1, "c2": c.c2, "c1_hess": c.c1_hess, "c2_hess": c.c2_hess,
                "d1_lower": c.d1_lower, "d1_upper": c.d1_upper, "d2_lower": c.d2_lower, "d2_upper": c.d2_upper,
            },
            "violation": violation,
        }),
    );
    out.verdicts.push(json!({"check": "ellipticity", "verdict": verdict_str(report.holds)}));
    Ok(())
}

/// CSV with columns `t, x_1..x_n, re, im, abs, method, epsilon, est_error`.
pub fn samples_csv(samples: &[KernelSample<f64>], dimension: usize) -> String {
    let mut csv = String::from("t");
    for i in 1..=dimension {
        write!(csv, ",x_{i}").expect("string write");
    }
    csv.push_str(",re,im,abs,method,epsilon,est_error\n");
    for s in samples {
        write!(csv, "{}", s.t).expect("string write");
        for x in &s.x {
            write!(csv, ",{x}").expect("string write");
        }
        writeln!(
            csv,
            ",{},{},{},{},{},{}",
            s.value.re,
            s.value.im,
            s.modulus(),
            s.method,
            s.epsilon,
            s.est_error
        )
        .expect("string write");
    }
    csv
}

fn report_json(config: &ExperimentConfig, out: &RunOutput) -> Result<Value> {
    Ok(json!({
        "name": config.name,
        "kind": config.kind.as_str(),
        "overall": verdict_str(out.passed()),
        "verdicts": out.verdicts,
        "objects": Value::Object(out.objects.clone()),
        "config": serde_json::to_value(config)?,
    }))
}

/// Writes `samples.csv`, `fits.json` and `report.json` into `dir`. Files are first written to a
/// staging directory and moved into place only when all three are complete.
pub fn write_artifacts(dir: &Path, config: &ExperimentConfig, out: &RunOutput, dimension: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let staging = dir.join(format!(".{}.partial", config.name.replace(['/', '\\'], "_")));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir(&staging)?;
    let files = [
        ("samples.csv", samples_csv(&out.samples, dimension)),
        ("fits.json", serde_json::to_string_pretty(&out.fits)? + "\n"),
        ("report.json", serde_json::to_string_pretty(&report_json(config, out)?)? + "\n"),
    ];
    let written: Result<()> = files
        .iter()
        .try_for_each(|(name, body)| fs::write(staging.join(name), body).map_err(Error::from));
    if let Err(e) = written {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }
    let mut paths = Vec::new();
    for (name, _) in &files {
        let target = dir.join(name);
        fs::rename(staging.join(name), &target)?;
        paths.push(target);
    }
    fs::remove_dir(&staging)?;
    Ok(paths)
}
