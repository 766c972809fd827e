//! JSON views of the exact data structures.
//!
//! Counts and denominators are decimal strings (never floats); coefficient
//! arrays are JSON integers, falling back to decimal strings past i64 range;
//! every floating "approx" field is rounded to 12 significant digits so that
//! identical runs serialize byte-identically.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::bernoulli::{MaskPmf, TildeReport};
use crate::coherence::{CoherenceReport, WelchReport};
use crate::cyclotomic::{CycElem, CycRat, CyclotomicContext};
use crate::distribution::{ComponentKind, ComponentLaws, ComponentPmf, DiscreteLaw, ExactPmf, UniformityReport};
use crate::moments::MomentReport;
use crate::sampling::{CrossCheckReport, SampleEstimate, SampleStrategy};
use crate::verify::{CheckRow, SweepReport};

/// Round to 12 significant digits; keeps output stable without hiding the
/// value behind a string.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn int_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn coeffs_value(elem: &CycElem) -> Value {
    Value::Array(elem.coeffs().iter().map(int_value).collect())
}

pub fn complex_value(z: Complex64) -> Value {
    json!([sig12(z.re), sig12(z.im)])
}

pub fn cycrat_value(ctx: &CyclotomicContext, value: &CycRat) -> Value {
    json!({
        "coeffs": coeffs_value(value.num()),
        "den": value.den().to_string(),
        "approx": complex_value(value.to_complex(ctx)),
    })
}

fn atoms_value<L: DiscreteLaw>(law: &L) -> Value {
    let ctx = law.ctx();
    Value::Array(
        law.entries()
            .iter()
            .map(|(key, count)| {
                json!({
                    "coeffs": coeffs_value(key),
                    "approx": complex_value(ctx.to_complex(key)),
                    "count": count.to_string(),
                })
            })
            .collect(),
    )
}

pub fn pmf_value(pmf: &ExactPmf) -> Value {
    json!({
        "N": pmf.ctx().n(),
        "l": pmf.ctx().l(),
        "m": pmf.m(),
        "denominator": pmf.denominator().to_string(),
        "atoms": atoms_value(pmf),
    })
}

pub fn mask_pmf_value(pmf: &MaskPmf) -> Value {
    json!({
        "N": pmf.ctx().n(),
        "l": pmf.ctx().l(),
        "m": pmf.m(),
        "denominator": pmf.denominator().to_string(),
        "atoms": atoms_value(pmf),
    })
}

pub fn component_value(ctx: &CyclotomicContext, pmf: &ComponentPmf) -> Value {
    let kind = match pmf.kind {
        ComponentKind::RealPart => "real-part",
        ComponentKind::ImagPart => "imag-part",
    };
    let atoms: Vec<Value> = pmf
        .entries
        .iter()
        .map(|(key, count)| {
            json!({
                "coeffs": coeffs_value(key),
                "value": sig12(pmf.numeric_value(ctx, key)),
                "count": count.to_string(),
            })
        })
        .collect();
    json!({
        "kind": kind,
        "denominator": pmf.denominator.to_string(),
        "atoms": atoms,
    })
}

pub fn component_laws_value(ctx: &CyclotomicContext, laws: &ComponentLaws) -> Value {
    let joint: Vec<Value> = laws
        .joint
        .iter()
        .map(|((u, v), count)| {
            json!({
                "u_coeffs": coeffs_value(u),
                "v_coeffs": coeffs_value(v),
                "count": count.to_string(),
            })
        })
        .collect();
    json!({
        "U": component_value(ctx, &laws.u),
        "V": component_value(ctx, &laws.v),
        "joint": joint,
    })
}

pub fn uniformity_value(report: &UniformityReport) -> Value {
    json!({
        "N": report.n,
        "l": report.l,
        "m": report.m,
        "support_size": report.support_size.to_string(),
        "binom": report.binom.to_string(),
        "is_uniform": report.is_uniform,
        "collision_witnesses": report
            .collision_witnesses
            .iter()
            .map(|(a, b)| json!([a, b]))
            .collect::<Vec<_>>(),
    })
}

pub fn moment_value(ctx: &CyclotomicContext, report: &MomentReport) -> Value {
    json!({
        "k": report.k,
        "value": cycrat_value(ctx, &report.value),
        "is_real": report.is_real,
        "is_rational": report.is_rational,
        "predicted_zero": report.predicted_zero,
        "numeric": complex_value(report.numeric),
    })
}

pub fn tilde_report_value(ctx: &CyclotomicContext, report: &TildeReport) -> Value {
    json!({
        "moments": report.moments.iter().map(|m| moment_value(ctx, m)).collect::<Vec<_>>(),
        "mean": cycrat_value(ctx, &report.mean),
        "variance": report.variance.to_string(),
        "variance_fixed_subset": report.variance_fixed.to_string(),
        "variance_ratio": report.variance_ratio.as_ref().map(|r| r.to_string()),
        "comparison": report
            .comparisons
            .iter()
            .map(|c| {
                json!({
                    "k": c.k,
                    "mask": cycrat_value(ctx, &c.tilde),
                    "fixed_subset": cycrat_value(ctx, &c.fixed),
                    "delta": cycrat_value(ctx, &c.delta),
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn check_row_value(row: &CheckRow) -> Value {
    json!({
        "case": row.case,
        "check": row.check,
        "status": row.status.as_str(),
        "expected": row.expected,
        "got": row.got,
        "reason": row.reason,
    })
}

/// Sweep report as JSON. Elapsed time is intentionally omitted so identical
/// invocations serialize identically.
pub fn sweep_value(report: &SweepReport) -> Value {
    json!({
        "cases_run": report.cases_run,
        "passed": report.passed(),
        "notes": report.notes,
        "failures": report.failures().iter().map(|r| check_row_value(r)).collect::<Vec<_>>(),
        "rows": report.rows.iter().map(check_row_value).collect::<Vec<_>>(),
    })
}

pub fn estimate_value(est: &SampleEstimate) -> Value {
    let strategy = match est.strategy {
        SampleStrategy::Rejection => "rejection",
        SampleStrategy::PartialShuffle => "partial-shuffle",
    };
    json!({
        "N": est.n,
        "l": est.l,
        "m": est.m,
        "trials": est.trials,
        "seed": est.seed,
        "rng": est.rng,
        "strategy": strategy,
        "mean": complex_value(est.mean_hat),
        "var": sig12(est.var_hat),
        "stderr_var": sig12(est.stderr_var),
        "closed_form_var": sig12(est.closed_form_var),
        "z_score": sig12(est.z_score),
    })
}

pub fn cross_check_value(ctx: &CyclotomicContext, report: &CrossCheckReport) -> Value {
    let atoms: Vec<Value> = report
        .atoms
        .iter()
        .map(|a| {
            json!({
                "coeffs": coeffs_value(&a.key),
                "approx": complex_value(ctx.to_complex(&a.key)),
                "prob": sig12(a.prob),
                "freq": sig12(a.freq),
                "band": sig12(a.band),
                "ok": a.ok,
            })
        })
        .collect();
    json!({
        "N": report.n,
        "l": report.l,
        "m": report.m,
        "trials": report.trials,
        "seed": report.seed,
        "rng": report.rng,
        "pass": report.pass,
        "atoms": atoms,
    })
}

pub fn welch_value(report: &WelchReport) -> Value {
    json!({
        "N": report.n,
        "m": report.m,
        "welch": sig12(report.bound),
        "sigma_ratio": sig12(report.sigma_ratio),
        "approx_inv_sqrt_m": sig12(report.approx_inv_sqrt_m),
    })
}

pub fn coherence_value(report: &CoherenceReport) -> Value {
    json!({
        "N": report.n,
        "rows": report.rows,
        "mu": sig12(report.mu),
        "welch": sig12(report.welch),
        "sigma_ratio": sig12(report.sigma_ratio),
        "satisfied": report.satisfied,
    })
}

/// Big-unsigned helper for identity rows.
pub fn uint_string(x: &BigUint) -> String {
    x.to_string()
}
