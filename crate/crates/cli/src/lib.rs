//! Command-line front end: every exact-computation module exposed as a
//! subcommand with machine-readable JSON/CSV output and stable exit codes.
//!
//! Exit codes: 0 success (and all checks pass), 1 a mathematical check failed
//! or a scan found a counterexample, 2 usage error, 3 enumeration budget
//! exceeded.

mod output;

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use cyclosum::coherence::{pairwise_magnitudes, partial_fourier_coherence, welch_bound};
use cyclosum::cyclotomic::CyclotomicContext;
use cyclosum::distribution::{pmf_components, pmf_x, uniformity_report};
use cyclosum::identities::{check_identity, default_limit, IdentityName, ALL_IDENTITIES};
use cyclosum::sampling::{cross_check, sample_estimate};
use cyclosum::verify::{conjecture_scan, run_sweep, Policy, SweepSpec};
use cyclosum::{bernoulli, moments, report, Error};
use serde_json::json;

use crate::output::{sink, Format, Payload};

const EXIT_OK: i32 = 0;
const EXIT_CHECK_FAILED: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cyclosum",
    version,
    about = "Exact laws, moments and verification sweeps for random subset sums of roots of unity",
    after_help = "Sample indices n run 1..=N; coherence row indices are 0-based (matrix convention)."
)]
struct Cli {
    /// Output format for the main payload.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the payload to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (default: CYCLOSUM_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print timing information to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact law of the sum of m samples drawn without replacement from the
    /// N-point root multiset at frequency index l, with component laws and a
    /// uniformity census.
    Pmf(PmfArgs),
    /// Exact moments: E[X^k] up to k-max, variance, component second moments
    /// and the componentwise square-expectation convention.
    Moments(MomentsArgs),
    /// Sweep every distributional check over a range of signal lengths.
    Verify(VerifyArgs),
    /// Scan for counterexamples to "uniform law iff prime N" over coprime
    /// (l, m).
    #[command(name = "scan-conjecture")]
    ScanConjecture(ScanArgs),
    /// Verify the combinatorial identities in cleared big-integer form.
    Identities(IdentitiesArgs),
    /// Exact law and moments of the Bernoulli-mask companion variable.
    Bernoulli(BernoulliArgs),
    /// Seeded Monte Carlo moment estimation, optionally cross-checked against
    /// the exact law.
    Sample(SampleArgs),
    /// Coherence of a partial Fourier measurement matrix against the Welch
    /// bound (equal to sigma/m of the subset-sum variable).
    Coherence(CoherenceArgs),
}

#[derive(Args, Debug)]
struct PmfArgs {
    /// Signal length N >= 1 (number of roots in the multiset).
    #[arg(long = "N")]
    n: u64,
    /// Frequency index l in [0, N-1]; the root is exp(-2*pi*j*l/N).
    #[arg(long)]
    l: u64,
    /// Number of samples drawn without replacement, 1 <= m <= N.
    #[arg(long)]
    m: u64,
    /// Cap on C(N, m) for exhaustive enumeration.
    #[arg(long, default_value_t = cyclosum::DEFAULT_ENUM_BUDGET)]
    budget: u64,
    /// Also emit the pushforward law of X^k for this k.
    #[arg(long)]
    power: Option<u32>,
    /// Also emit the law of |X|^2.
    #[arg(long)]
    abs_squared: bool,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    /// Signal length N >= 1.
    #[arg(long = "N")]
    n: u64,
    /// Frequency index l in [0, N-1].
    #[arg(long)]
    l: u64,
    /// Number of samples, 1 <= m <= N.
    #[arg(long)]
    m: u64,
    /// Largest moment order to compute.
    #[arg(long = "k-max", default_value_t = 4)]
    k_max: u32,
    /// Cap on C(N, m) for exhaustive enumeration.
    #[arg(long, default_value_t = cyclosum::DEFAULT_ENUM_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Inclusive signal-length range, e.g. 2..12.
    #[arg(long = "N-range", value_parser = parse_range)]
    n_range: (u64, u64),
    /// Largest moment order exercised per case.
    #[arg(long = "k-max", default_value_t = 8)]
    k_max: u32,
    /// Frequency indices to visit: all, coprime, or a comma list.
    #[arg(long = "l-policy", default_value = "all", value_parser = parse_policy)]
    l_policy: Policy,
    /// Sample counts to visit: all, coprime, or a comma list.
    #[arg(long = "m-policy", default_value = "all", value_parser = parse_policy)]
    m_policy: Policy,
    /// Cap on C(N, m); larger cases are skipped with a reason.
    #[arg(long, default_value_t = cyclosum::DEFAULT_ENUM_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Largest signal length to scan (from 3).
    #[arg(long = "N-max")]
    n_max: u64,
    /// Use the literal range 2 <= m <= N-1 instead of the documented
    /// 2 <= m <= N-2 (m = N-1 is always uniform by antisymmetry).
    #[arg(long)]
    literal_m_range: bool,
    /// Cap on C(N, m); larger cases are skipped with a notice.
    #[arg(long, default_value_t = cyclosum::DEFAULT_ENUM_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct IdentitiesArgs {
    /// Identity to check (default: all seven).
    #[arg(long)]
    name: Option<String>,
    /// Primary-parameter limit (default: per-identity regression range).
    #[arg(long)]
    limit: Option<u64>,
}

#[derive(Args, Debug)]
struct BernoulliArgs {
    /// Signal length N >= 1.
    #[arg(long = "N")]
    n: u64,
    /// Frequency index l in [0, N-1].
    #[arg(long)]
    l: u64,
    /// Expected kept-sample count: each position kept with probability m/N.
    #[arg(long)]
    m: u64,
    /// Largest moment order for the comparison table.
    #[arg(long = "k-max", default_value_t = 4)]
    k_max: u32,
    /// Cap on N for the 2^N mask enumeration.
    #[arg(long = "mask-budget", default_value_t = cyclosum::DEFAULT_MASK_BUDGET)]
    mask_budget: u64,
    /// Cap on C(N, m) for the fixed-subset-size comparison law.
    #[arg(long, default_value_t = cyclosum::DEFAULT_ENUM_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Signal length N >= 1 (may exceed exact budgets).
    #[arg(long = "N")]
    n: u64,
    /// Frequency index l in [0, N-1].
    #[arg(long)]
    l: u64,
    /// Number of samples per trial, 1 <= m <= N.
    #[arg(long)]
    m: u64,
    /// Number of independent trials.
    #[arg(long)]
    trials: u64,
    /// RNG seed; mandatory so runs are reproducible.
    #[arg(long)]
    seed: u64,
    /// Compare empirical atom frequencies against the exact law instead of
    /// reporting moment estimates (requires C(N, m) within budget).
    #[arg(long)]
    cross_check: bool,
    /// Cap on C(N, m) for the cross-check law.
    #[arg(long, default_value_t = cyclosum::DEFAULT_ENUM_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct CoherenceArgs {
    /// Number of matrix columns (and root order), capped at 4096.
    #[arg(long = "N")]
    n: u64,
    /// Comma-separated 0-based row indices of the kept Fourier rows.
    #[arg(long, value_parser = parse_rows)]
    rows: Option<Rows>,
    /// Row count for a bound-only report (no matrix is built).
    #[arg(long)]
    m: Option<u64>,
    /// Write all pairwise column inner-product magnitudes as CSV to a path.
    #[arg(long = "pairs-csv")]
    pairs_csv: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Rows(Vec<u64>);

fn parse_rows(s: &str) -> Result<Rows, String> {
    s.split(',')
        .map(|part| part.trim().parse::<u64>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(Rows)
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B (inclusive), got {s}"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: u64 = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    match s {
        "all" => Ok(Policy::All),
        "coprime" => Ok(Policy::CoprimeOnly),
        list => list
            .split(',')
            .map(|part| part.trim().parse::<u64>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(Policy::List),
    }
}

/// Parse argv and dispatch; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.exit_code() == 0 { EXIT_OK } else { EXIT_USAGE };
            let _ = err.print();
            return code;
        }
    };

    configure_threads(cli.threads);

    let started = std::time::Instant::now();
    let result = dispatch(&cli);
    if cli.verbose {
        eprintln!("elapsed: {:?}", started.elapsed());
    }
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Usage(_) | Error::UnknownIdentity(_) => EXIT_USAGE,
                Error::Budget { .. } | Error::MaskBudget { .. } => EXIT_BUDGET,
            }
        }
    }
}

fn configure_threads(flag: Option<usize>) {
    let threads =
        flag.or_else(|| std::env::var("CYCLOSUM_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(threads) = threads {
        // The global pool initializes once per process; later invocations
        // (e.g. in-process tests) keep the first configuration.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn dispatch(cli: &Cli) -> cyclosum::Result<i32> {
    match &cli.command {
        Command::Pmf(args) => cmd_pmf(cli, args),
        Command::Moments(args) => cmd_moments(cli, args),
        Command::Verify(args) => cmd_verify(cli, args),
        Command::ScanConjecture(args) => cmd_scan(cli, args),
        Command::Identities(args) => cmd_identities(cli, args),
        Command::Bernoulli(args) => cmd_bernoulli(cli, args),
        Command::Sample(args) => cmd_sample(cli, args),
        Command::Coherence(args) => cmd_coherence(cli, args),
    }
}

fn cmd_pmf(cli: &Cli, args: &PmfArgs) -> cyclosum::Result<i32> {
    let ctx = Arc::new(CyclotomicContext::new(args.n, args.l)?);
    let pmf = pmf_x(&ctx, args.m, args.budget)?;
    let laws = pmf_components(&pmf);
    let uniformity = uniformity_report(&ctx, args.m, args.budget)?;

    let mut value = report::pmf_value(&pmf);
    let obj = value.as_object_mut().expect("object");
    obj.insert("components".into(), report::component_laws_value(&ctx, &laws));
    obj.insert("uniformity".into(), report::uniformity_value(&uniformity));
    if let Some(k) = args.power {
        obj.insert(
            "power_law".into(),
            json!({ "k": k, "law": report::pmf_value(&pmf.transform_pow(k)) }),
        );
    }
    if args.abs_squared {
        obj.insert("abs_squared_law".into(), report::pmf_value(&pmf.abs_squared()));
    }

    sink(cli.format, &cli.output, Payload::Pmf { value, pmf: &pmf })?;
    Ok(EXIT_OK)
}

fn cmd_moments(cli: &Cli, args: &MomentsArgs) -> cyclosum::Result<i32> {
    if args.k_max < 1 {
        return Err(Error::usage("k-max must be at least 1"));
    }
    let ctx = Arc::new(CyclotomicContext::new(args.n, args.l)?);
    let pmf = pmf_x(&ctx, args.m, args.budget)?;
    let reports = moments::moments_up_to(&pmf, args.k_max);
    let variance = moments::variance(&pmf);
    let uu = moments::component_moments(&pmf, 2, 0);
    let vv = moments::component_moments(&pmf, 0, 2);
    let uv = moments::component_moments(&pmf, 1, 1);
    let square = moments::square_expectation(&pmf);

    let value = json!({
        "N": args.n,
        "l": args.l,
        "m": args.m,
        "moments": reports.iter().map(|r| report::moment_value(&ctx, r)).collect::<Vec<_>>(),
        "variance": variance.to_string(),
        // doubled keys: E[(2U)^2], E[(2jV)^2], E[(2U)(2jV)]
        "component_second_moments": {
            "uu": report::cycrat_value(&ctx, &uu),
            "vv": report::cycrat_value(&ctx, &vv),
            "uv": report::cycrat_value(&ctx, &uv),
        },
        "square_convention": report::cycrat_value(&ctx, &square),
    });
    sink(cli.format, &cli.output, Payload::Moments { value, ctx: &ctx, reports: &reports })?;
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> cyclosum::Result<i32> {
    let spec = SweepSpec {
        n_range: args.n_range,
        l_policy: args.l_policy.clone(),
        m_policy: args.m_policy.clone(),
        k_max: args.k_max,
        budget: args.budget,
    };
    let report = run_sweep(&spec);
    if cli.verbose {
        eprintln!("sweep: {} cases in {:?}", report.cases_run, report.elapsed);
    }
    sink(cli.format, &cli.output, Payload::Sweep(&report))?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_scan(cli: &Cli, args: &ScanArgs) -> cyclosum::Result<i32> {
    let report = conjecture_scan(args.n_max, args.budget, args.literal_m_range)?;
    if cli.verbose {
        eprintln!("scan: {} cases in {:?}", report.cases_run, report.elapsed);
    }
    sink(cli.format, &cli.output, Payload::Sweep(&report))?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_identities(cli: &Cli, args: &IdentitiesArgs) -> cyclosum::Result<i32> {
    let names: Vec<IdentityName> = match &args.name {
        Some(name) => vec![IdentityName::from_str(name)?],
        None => ALL_IDENTITIES.to_vec(),
    };
    let mut cases = Vec::new();
    for name in names {
        cases.extend(check_identity(name, args.limit.unwrap_or_else(|| default_limit(name))));
    }
    let all_ok = cases.iter().all(|c| c.ok());
    sink(cli.format, &cli.output, Payload::Identities(&cases))?;
    Ok(if all_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_bernoulli(cli: &Cli, args: &BernoulliArgs) -> cyclosum::Result<i32> {
    if args.k_max < 1 {
        return Err(Error::usage("k-max must be at least 1"));
    }
    let ctx = Arc::new(CyclotomicContext::new(args.n, args.l)?);
    let mask = bernoulli::pmf_tilde(&ctx, args.m, args.mask_budget)?;
    let tilde = bernoulli::tilde_moments(&ctx, args.m, args.k_max, args.mask_budget, args.budget)?;

    let mut value = report::mask_pmf_value(&mask);
    let obj = value.as_object_mut().expect("object");
    obj.insert("report".into(), report::tilde_report_value(&ctx, &tilde));
    sink(cli.format, &cli.output, Payload::MaskPmf { value, mask: &mask })?;
    Ok(EXIT_OK)
}

fn cmd_sample(cli: &Cli, args: &SampleArgs) -> cyclosum::Result<i32> {
    if args.cross_check {
        let report = cross_check(args.n, args.l, args.m, args.trials, args.seed, args.budget)?;
        let ctx = CyclotomicContext::new(args.n, args.l)?;
        let pass = report.pass;
        sink(cli.format, &cli.output, Payload::CrossCheck { ctx: &ctx, report: &report })?;
        Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
    } else {
        let estimate = sample_estimate(args.n, args.l, args.m, args.trials, args.seed)?;
        // 5-sigma acceptance band on the variance estimate, meaningful for l >= 1
        let in_band = args.l == 0 || !estimate.z_score.is_finite() || estimate.z_score.abs() <= 5.0;
        sink(cli.format, &cli.output, Payload::Estimate(&estimate))?;
        Ok(if in_band { EXIT_OK } else { EXIT_CHECK_FAILED })
    }
}

fn cmd_coherence(cli: &Cli, args: &CoherenceArgs) -> cyclosum::Result<i32> {
    match (&args.rows, args.m) {
        (Some(rows), _) => {
            let report = partial_fourier_coherence(args.n, &rows.0)?;
            if let Some(path) = &args.pairs_csv {
                let pairs = pairwise_magnitudes(args.n, &rows.0)?;
                output::write_pairs_csv(path, &pairs)
                    .map_err(|e| Error::usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let satisfied = report.satisfied;
            sink(cli.format, &cli.output, Payload::Coherence(&report))?;
            Ok(if satisfied { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        (None, Some(m)) => {
            let report = welch_bound(args.n, m)?;
            sink(cli.format, &cli.output, Payload::Welch(&report))?;
            Ok(EXIT_OK)
        }
        (None, None) => Err(Error::usage("coherence requires --rows or --m")),
    }
}
