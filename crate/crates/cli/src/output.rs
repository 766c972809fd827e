//! Rendering of the payloads in the three output formats and delivery to
//! stdout or a file. JSON is the canonical machine format; CSV flattens the
//! row-shaped payloads; table is a plain human view.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use cyclosum::bernoulli::MaskPmf;
use cyclosum::coherence::{CoherenceReport, WelchReport};
use cyclosum::cyclotomic::CyclotomicContext;
use cyclosum::distribution::{DiscreteLaw, ExactPmf};
use cyclosum::identities::IdentityCase;
use cyclosum::moments::MomentReport;
use cyclosum::report::sig12;
use cyclosum::sampling::{CrossCheckReport, SampleEstimate, SampleStrategy};
use cyclosum::verify::SweepReport;
use cyclosum::{report, Error};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub enum Payload<'a> {
    Pmf { value: Value, pmf: &'a ExactPmf },
    MaskPmf { value: Value, mask: &'a MaskPmf },
    Moments { value: Value, ctx: &'a CyclotomicContext, reports: &'a [MomentReport] },
    Sweep(&'a SweepReport),
    Identities(&'a [IdentityCase]),
    Estimate(&'a SampleEstimate),
    CrossCheck { ctx: &'a CyclotomicContext, report: &'a CrossCheckReport },
    Coherence(&'a CoherenceReport),
    Welch(&'a WelchReport),
}

/// Render the payload and deliver it to stdout or `--output`.
pub fn sink(format: Format, output: &Option<PathBuf>, payload: Payload<'_>) -> cyclosum::Result<()> {
    let text = render(format, &payload)?;
    match output {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::usage(format!("cannot write to stdout: {e}")))?;
        }
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Error::usage(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(())
}

fn render(format: Format, payload: &Payload<'_>) -> cyclosum::Result<String> {
    let text = match format {
        Format::Json => {
            let value = to_json(payload);
            let mut text = serde_json::to_string_pretty(&value)
                .map_err(|e| Error::usage(format!("serialization failed: {e}")))?;
            text.push('\n');
            text
        }
        Format::Csv => to_csv(payload)?,
        Format::Table => to_table(payload),
    };
    Ok(text)
}

fn to_json(payload: &Payload<'_>) -> Value {
    match payload {
        Payload::Pmf { value, .. } | Payload::MaskPmf { value, .. } | Payload::Moments { value, .. } => {
            value.clone()
        }
        Payload::Sweep(report) => report::sweep_value(report),
        Payload::Identities(cases) => Value::Array(
            cases
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "name": c.name.to_string(),
                        "params": c.params,
                        "lhs": c.lhs.to_string(),
                        "rhs": c.rhs.to_string(),
                        "holds": c.holds,
                        "divisible": c.divisible,
                    })
                })
                .collect(),
        ),
        Payload::Estimate(est) => report::estimate_value(est),
        Payload::CrossCheck { ctx, report } => report::cross_check_value(ctx, report),
        Payload::Coherence(rep) => report::coherence_value(rep),
        Payload::Welch(rep) => report::welch_value(rep),
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> cyclosum::Result<String> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::usage(format!("CSV rendering failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::usage(format!("CSV rendering failed: {e}")))
}

fn coeffs_field(coeffs: &[num_bigint::BigInt]) -> String {
    coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

fn law_csv<L: DiscreteLaw>(law: &L) -> cyclosum::Result<String> {
    let ctx = law.ctx();
    let mut w = csv_writer();
    w.write_record(["coeffs", "re", "im", "count"]).ok();
    for (key, count) in law.entries() {
        let z = ctx.to_complex(key);
        w.write_record([
            coeffs_field(key.coeffs()),
            format!("{:.12e}", sig12(z.re)),
            format!("{:.12e}", sig12(z.im)),
            count.to_string(),
        ])
        .ok();
    }
    finish_csv(w)
}

fn to_csv(payload: &Payload<'_>) -> cyclosum::Result<String> {
    match payload {
        Payload::Pmf { pmf, .. } => law_csv(*pmf),
        Payload::MaskPmf { mask, .. } => law_csv(*mask),
        Payload::Moments { ctx, reports, .. } => {
            let mut w = csv_writer();
            w.write_record(["k", "coeffs", "den", "re", "im", "is_real", "is_rational", "predicted_zero"])
                .ok();
            for r in reports.iter() {
                w.write_record([
                    r.k.to_string(),
                    coeffs_field(r.value.num().coeffs()),
                    r.value.den().to_string(),
                    format!("{:.12e}", sig12(r.value.to_complex(ctx).re)),
                    format!("{:.12e}", sig12(r.value.to_complex(ctx).im)),
                    r.is_real.to_string(),
                    r.is_rational.to_string(),
                    r.predicted_zero.to_string(),
                ])
                .ok();
            }
            finish_csv(w)
        }
        Payload::Sweep(report) => {
            let mut w = csv_writer();
            w.write_record(["case", "check", "status", "expected", "got", "reason"]).ok();
            for row in &report.rows {
                w.write_record([
                    row.case.as_str(),
                    row.check,
                    row.status.as_str(),
                    row.expected.as_deref().unwrap_or(""),
                    row.got.as_deref().unwrap_or(""),
                    row.reason.as_deref().unwrap_or(""),
                ])
                .ok();
            }
            finish_csv(w)
        }
        Payload::Identities(cases) => {
            let mut w = csv_writer();
            w.write_record(["name", "params", "lhs", "rhs", "holds"]).ok();
            for c in cases.iter() {
                w.write_record([
                    c.name.to_string(),
                    c.params.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "),
                    c.lhs.to_string(),
                    c.rhs.to_string(),
                    c.ok().to_string(),
                ])
                .ok();
            }
            finish_csv(w)
        }
        Payload::Estimate(est) => {
            let mut w = csv_writer();
            w.write_record([
                "N", "l", "m", "trials", "seed", "rng", "strategy", "mean_re", "mean_im", "var",
                "stderr_var", "closed_form_var", "z_score",
            ])
            .ok();
            let strategy = match est.strategy {
                SampleStrategy::Rejection => "rejection",
                SampleStrategy::PartialShuffle => "partial-shuffle",
            };
            w.write_record([
                est.n.to_string(),
                est.l.to_string(),
                est.m.to_string(),
                est.trials.to_string(),
                est.seed.to_string(),
                est.rng.to_string(),
                strategy.to_string(),
                format!("{:.12e}", sig12(est.mean_hat.re)),
                format!("{:.12e}", sig12(est.mean_hat.im)),
                format!("{:.12e}", sig12(est.var_hat)),
                format!("{:.12e}", sig12(est.stderr_var)),
                format!("{:.12e}", sig12(est.closed_form_var)),
                format!("{:.12e}", sig12(est.z_score)),
            ])
            .ok();
            finish_csv(w)
        }
        Payload::CrossCheck { ctx, report } => {
            let mut w = csv_writer();
            w.write_record(["coeffs", "re", "im", "prob", "freq", "band", "ok"]).ok();
            for atom in &report.atoms {
                let z = ctx.to_complex(&atom.key);
                w.write_record([
                    coeffs_field(atom.key.coeffs()),
                    format!("{:.12e}", sig12(z.re)),
                    format!("{:.12e}", sig12(z.im)),
                    format!("{:.12e}", sig12(atom.prob)),
                    format!("{:.12e}", sig12(atom.freq)),
                    format!("{:.12e}", sig12(atom.band)),
                    atom.ok.to_string(),
                ])
                .ok();
            }
            finish_csv(w)
        }
        Payload::Coherence(rep) => {
            let mut w = csv_writer();
            w.write_record(["N", "m", "mu", "welch", "sigma_ratio", "satisfied"]).ok();
            w.write_record([
                rep.n.to_string(),
                rep.rows.len().to_string(),
                format!("{:.12e}", sig12(rep.mu)),
                format!("{:.12e}", sig12(rep.welch)),
                format!("{:.12e}", sig12(rep.sigma_ratio)),
                rep.satisfied.to_string(),
            ])
            .ok();
            finish_csv(w)
        }
        Payload::Welch(rep) => {
            let mut w = csv_writer();
            w.write_record(["N", "m", "welch", "sigma_ratio", "approx_inv_sqrt_m"]).ok();
            w.write_record([
                rep.n.to_string(),
                rep.m.to_string(),
                format!("{:.12e}", sig12(rep.bound)),
                format!("{:.12e}", sig12(rep.sigma_ratio)),
                format!("{:.12e}", sig12(rep.approx_inv_sqrt_m)),
            ])
            .ok();
            finish_csv(w)
        }
    }
}

fn law_table<L: DiscreteLaw>(law: &L, title: &str) -> String {
    let ctx = law.ctx();
    let mut out = format!(
        "{title}: N = {}, l = {}, denominator = {}\n",
        ctx.n(),
        ctx.l(),
        law.denominator()
    );
    out.push_str(&format!("{:<28} {:>24} {:>16}\n", "value", "approx (re, im)", "count"));
    for (key, count) in law.entries() {
        let z = ctx.to_complex(key);
        out.push_str(&format!(
            "{:<28} {:>24} {:>16}\n",
            key.to_string(),
            format!("({:.6}, {:.6})", z.re, z.im),
            count.to_string()
        ));
    }
    out
}

fn to_table(payload: &Payload<'_>) -> String {
    match payload {
        Payload::Pmf { pmf, .. } => law_table(*pmf, "subset-sum law"),
        Payload::MaskPmf { mask, .. } => law_table(*mask, "mask-sum law"),
        Payload::Moments { ctx, reports, .. } => {
            let mut out = format!("{:<4} {:<28} {:>24} {:>8} {:>10} {:>14}\n",
                "k", "value", "approx (re, im)", "real", "rational", "predicted_zero");
            for r in reports.iter() {
                let z = r.value.to_complex(ctx);
                out.push_str(&format!(
                    "{:<4} {:<28} {:>24} {:>8} {:>10} {:>14}\n",
                    r.k,
                    r.value.to_string(),
                    format!("({:.6}, {:.6})", z.re, z.im),
                    r.is_real,
                    r.is_rational,
                    r.predicted_zero
                ));
            }
            out
        }
        Payload::Sweep(report) => {
            let mut out = format!(
                "cases: {}   failures: {}   verdict: {}\n",
                report.cases_run,
                report.failures().len(),
                if report.passed() { "pass" } else { "FAIL" }
            );
            for note in &report.notes {
                out.push_str(&format!("note: {note}\n"));
            }
            for row in &report.rows {
                if row.status != cyclosum::verify::CheckStatus::Pass {
                    out.push_str(&format!(
                        "{:<20} {:<28} {:<8} {}\n",
                        row.case,
                        row.check,
                        row.status.as_str(),
                        row.reason.clone().or_else(|| row.got.clone()).unwrap_or_default()
                    ));
                }
            }
            out
        }
        Payload::Identities(cases) => {
            let failures: Vec<_> = cases.iter().filter(|c| !c.ok()).collect();
            let mut out = format!(
                "identity cases: {}   failures: {}\n",
                cases.len(),
                failures.len()
            );
            for c in failures {
                out.push_str(&format!("FAIL {} {:?}: {} != {}\n", c.name, c.params, c.lhs, c.rhs));
            }
            out
        }
        Payload::Estimate(est) => format!(
            "N = {}, l = {}, m = {}, trials = {}, seed = {} ({}, {})\n\
             mean      = ({:.9}, {:.9})\n\
             var       = {:.9}  (closed form {:.9})\n\
             stderr    = {:.9}\n\
             z-score   = {:.4}\n",
            est.n,
            est.l,
            est.m,
            est.trials,
            est.seed,
            est.rng,
            match est.strategy {
                SampleStrategy::Rejection => "rejection",
                SampleStrategy::PartialShuffle => "partial-shuffle",
            },
            est.mean_hat.re,
            est.mean_hat.im,
            est.var_hat,
            est.closed_form_var,
            est.stderr_var,
            est.z_score
        ),
        Payload::CrossCheck { ctx, report } => {
            let mut out = format!(
                "cross-check: N = {}, l = {}, m = {}, trials = {}, seed = {} -> {}\n",
                report.n,
                report.l,
                report.m,
                report.trials,
                report.seed,
                if report.pass { "pass" } else { "FAIL" }
            );
            out.push_str(&format!(
                "{:<24} {:>12} {:>12} {:>12} {:>6}\n",
                "atom", "prob", "freq", "band", "ok"
            ));
            for atom in &report.atoms {
                let z = ctx.to_complex(&atom.key);
                out.push_str(&format!(
                    "{:<24} {:>12.6} {:>12.6} {:>12.6} {:>6}\n",
                    format!("({:.4}, {:.4})", z.re, z.im),
                    atom.prob,
                    atom.freq,
                    atom.band,
                    atom.ok
                ));
            }
            out
        }
        Payload::Coherence(rep) => format!(
            "N = {}, m = {}\nmu          = {:.12}\nwelch       = {:.12}\nsigma/m     = {:.12}\nsatisfied   = {}\n",
            rep.n,
            rep.rows.len(),
            rep.mu,
            rep.welch,
            rep.sigma_ratio,
            rep.satisfied
        ),
        Payload::Welch(rep) => format!(
            "N = {}, m = {}\nwelch       = {:.12}\nsigma/m     = {:.12}\n1/sqrt(m)   = {:.12}\n",
            rep.n, rep.m, rep.bound, rep.sigma_ratio, rep.approx_inv_sqrt_m
        ),
    }
}

pub fn write_pairs_csv(path: &Path, pairs: &[(u64, u64, f64)]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["i", "j", "magnitude"])?;
    for (i, j, magnitude) in pairs {
        w.write_record([i.to_string(), j.to_string(), format!("{:.12e}", sig12(*magnitude))])?;
    }
    w.flush()
}
