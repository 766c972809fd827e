//! Seeded Monte Carlo estimation for sizes where exact enumeration is out of
//! reach, plus an empirical-versus-exact cross-check at small sizes.
//!
//! Reproducibility contract: every trial runs on its own ChaCha8 stream
//! derived from (seed, trial index), and per-trial results are reduced in
//! trial order. Estimates are therefore bit-identical across re-runs and
//! across thread counts.

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combinatorics::gcd;
use crate::cyclotomic::{CycElem, CyclotomicContext};
use crate::distribution::{pmf_x, DiscreteLaw};
use crate::error::{Error, Result};

/// Name of the generator recorded in reports.
pub const RNG_NAME: &str = "chacha8";

/// Subset-sampling strategy, switched on the m/N ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleStrategy {
    /// Draw indices uniformly and reject duplicates; efficient when m << N.
    Rejection,
    /// Partial Fisher-Yates shuffle of 1..=N; efficient for dense subsets.
    PartialShuffle,
}

/// Moment estimates from `trials` independent subset draws.
#[derive(Clone, Debug)]
pub struct SampleEstimate {
    pub n: u64,
    pub l: u64,
    pub m: u64,
    pub trials: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub strategy: SampleStrategy,
    pub mean_hat: Complex64,
    /// Empirical estimate of `Var[X] = E[|X|^2] - |E[X]|^2`.
    pub var_hat: f64,
    /// Standard error of the `|X|^2` sample mean.
    pub stderr_var: f64,
    /// `m(N-m)/(N-1)`; the exact variance for every frequency index in [1, N-1].
    pub closed_form_var: f64,
    /// `(var_hat - closed_form_var) / stderr_var`; non-finite when degenerate.
    pub z_score: f64,
}

/// Per-atom agreement between empirical frequencies and exact probabilities.
#[derive(Clone, Debug)]
pub struct AtomCheck {
    pub key: CycElem,
    pub prob: f64,
    pub freq: f64,
    /// `5 * sqrt(p(1-p)/trials)`.
    pub band: f64,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct CrossCheckReport {
    pub n: u64,
    pub l: u64,
    pub m: u64,
    pub trials: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub atoms: Vec<AtomCheck>,
    pub pass: bool,
}

fn validate(n: u64, m: u64, trials: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("N must be positive"));
    }
    if m == 0 || m > n {
        return Err(Error::usage(format!("m must lie in [1, N]; got m = {m}, N = {n}")));
    }
    if trials == 0 {
        return Err(Error::usage("trials must be positive"));
    }
    Ok(())
}

fn strategy_for(n: u64, m: u64) -> SampleStrategy {
    if m <= n / 64 {
        SampleStrategy::Rejection
    } else {
        SampleStrategy::PartialShuffle
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform m-subset of {1, ..., n} into `scratch`; `pool` is reused across
/// trials on the shuffle path.
fn draw_subset(
    rng: &mut ChaCha8Rng,
    n: u64,
    m: u64,
    strategy: SampleStrategy,
    pool: &mut Vec<u64>,
    scratch: &mut Vec<u64>,
) {
    scratch.clear();
    match strategy {
        SampleStrategy::Rejection => {
            let mut seen = std::collections::HashSet::with_capacity(m as usize);
            while seen.len() < m as usize {
                let candidate = rng.random_range(1..=n);
                if seen.insert(candidate) {
                    scratch.push(candidate);
                }
            }
        }
        SampleStrategy::PartialShuffle => {
            pool.clear();
            pool.extend(1..=n);
            let len = pool.len();
            for i in 0..m as usize {
                let j = rng.random_range(i..len);
                pool.swap(i, j);
                scratch.push(pool[i]);
            }
        }
    }
}

/// Complex subset sum in double precision, evaluated through basis exponents
/// reduced modulo the root order.
fn subset_sum_numeric(indices: &[u64], d: u64, lg: u64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &i in indices {
        let e = (lg as u128 * i as u128 % d as u128) as u64;
        let angle = -2.0 * std::f64::consts::PI * e as f64 / d as f64;
        acc += Complex64::new(angle.cos(), angle.sin());
    }
    acc
}

/// Estimate mean and variance of the subset-sum variable from `trials`
/// seeded draws and score the variance against `m(N-m)/(N-1)`.
pub fn sample_estimate(n: u64, l: u64, m: u64, trials: u64, seed: u64) -> Result<SampleEstimate> {
    validate(n, m, trials)?;
    if l >= n {
        return Err(Error::usage(format!("l must lie in [0, N-1]; got l = {l}, N = {n}")));
    }
    let g = gcd(n, l);
    let d = n / g;
    let lg = l / g;
    let strategy = strategy_for(n, m);

    let values: Vec<Complex64> = (0..trials)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::with_capacity(m as usize)),
            |(pool, scratch), trial| {
                let mut rng = trial_rng(seed, trial);
                draw_subset(&mut rng, n, m, strategy, pool, scratch);
                subset_sum_numeric(scratch, d, lg)
            },
        )
        .collect();

    // Welford accumulation in trial order: deterministic, and exactly zero
    // spread for constant sequences (the l = 0 case).
    let mut mean = Complex64::new(0.0, 0.0);
    let mut mean_sq = 0.0f64;
    let mut m2_sq = 0.0f64;
    for (t, x) in values.iter().enumerate() {
        let count = (t + 1) as f64;
        mean.re += (x.re - mean.re) / count;
        mean.im += (x.im - mean.im) / count;
        let y = x.norm_sqr();
        let delta = y - mean_sq;
        mean_sq += delta / count;
        m2_sq += delta * (y - mean_sq);
    }
    let var_hat = mean_sq - mean.norm_sqr();
    let stderr_var = if trials > 1 {
        (m2_sq / (trials - 1) as f64 / trials as f64).sqrt()
    } else {
        0.0
    };
    let closed_form_var = closed_form_variance(n, m);
    let z_score = if stderr_var > 0.0 {
        (var_hat - closed_form_var) / stderr_var
    } else if var_hat == closed_form_var {
        0.0
    } else {
        f64::INFINITY * (var_hat - closed_form_var).signum()
    };

    Ok(SampleEstimate {
        n,
        l,
        m,
        trials,
        seed,
        rng: RNG_NAME,
        strategy,
        mean_hat: mean,
        var_hat,
        stderr_var,
        closed_form_var,
        z_score,
    })
}

/// `m(N-m)/(N-1)` in double precision; 0 for N = 1.
pub fn closed_form_variance(n: u64, m: u64) -> f64 {
    if n <= 1 {
        0.0
    } else {
        (m as f64) * ((n - m) as f64) / ((n - 1) as f64)
    }
}

/// Compare empirical atom frequencies against the exact law: every atom's
/// frequency must sit within `5 * sqrt(p(1-p)/trials)` of its probability.
pub fn cross_check(
    n: u64,
    l: u64,
    m: u64,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<CrossCheckReport> {
    validate(n, m, trials)?;
    let ctx = Arc::new(CyclotomicContext::new(n, l)?);
    let pmf = pmf_x(&ctx, m, budget)?;
    let strategy = strategy_for(n, m);

    let keys: Vec<CycElem> = (0..trials)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::with_capacity(m as usize)),
            |(pool, scratch), trial| {
                let mut rng = trial_rng(seed, trial);
                draw_subset(&mut rng, n, m, strategy, pool, scratch);
                let mut acc = ctx.zero();
                for &i in scratch.iter() {
                    acc = ctx.add(&acc, ctx.zeta_power(ctx.exponent_of(i)));
                }
                acc
            },
        )
        .collect();

    let mut hits: std::collections::HashMap<&CycElem, u64> = std::collections::HashMap::new();
    for key in &keys {
        *hits.entry(key).or_insert(0) += 1;
    }

    let denom = pmf
        .denominator()
        .to_f64()
        .expect("budget-checked binomial fits in f64");
    let mut atoms = Vec::with_capacity(pmf.support_size());
    let mut pass = true;
    for (key, count) in pmf.entries() {
        let prob = count.to_f64().unwrap_or(f64::NAN) / denom;
        let freq = *hits.get(key).unwrap_or(&0) as f64 / trials as f64;
        let band = 5.0 * (prob * (1.0 - prob) / trials as f64).sqrt();
        let ok = (freq - prob).abs() < band || prob == 1.0;
        pass &= ok;
        atoms.push(AtomCheck { key: key.clone(), prob, freq, band, ok });
    }
    // every sampled sum must be an atom of the exact law
    let support: std::collections::HashSet<&CycElem> = pmf.entries().keys().collect();
    assert!(
        hits.keys().all(|k| support.contains(*k)),
        "sampled a sum outside the exact support"
    );

    Ok(CrossCheckReport { n, l, m, trials, seed, rng: RNG_NAME, atoms, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_variable_is_exact() {
        let est = sample_estimate(50, 0, 7, 1000, 11).unwrap();
        assert_eq!(est.var_hat, 0.0);
        assert_eq!(est.mean_hat, Complex64::new(7.0, 0.0));
        assert_eq!(est.strategy, SampleStrategy::PartialShuffle);
    }

    #[test]
    fn small_case_variance_lands_in_band() {
        let est = sample_estimate(4, 1, 2, 100_000, 7).unwrap();
        assert!((est.closed_form_var - 4.0 / 3.0).abs() < 1e-12);
        assert!(est.z_score.abs() < 5.0, "z = {}", est.z_score);
        assert!(est.mean_hat.norm() < 5.0 * (est.closed_form_var / est.trials as f64).sqrt());
    }

    #[test]
    fn reruns_are_bit_identical() {
        let a = sample_estimate(100, 3, 10, 2000, 42).unwrap();
        let b = sample_estimate(100, 3, 10, 2000, 42).unwrap();
        assert_eq!(a.mean_hat, b.mean_hat);
        assert_eq!(a.var_hat, b.var_hat);
        assert_eq!(a.z_score, b.z_score);
        let c = sample_estimate(100, 3, 10, 2000, 43).unwrap();
        assert_ne!(a.var_hat, c.var_hat);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let quad = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = single.install(|| sample_estimate(60, 7, 9, 5000, 99).unwrap());
        let b = quad.install(|| sample_estimate(60, 7, 9, 5000, 99).unwrap());
        assert_eq!(a.mean_hat, b.mean_hat);
        assert_eq!(a.var_hat, b.var_hat);
        assert_eq!(a.stderr_var, b.stderr_var);
    }

    #[test]
    fn rejection_strategy_kicks_in_for_sparse_draws() {
        let est = sample_estimate(1000, 1, 10, 10, 5).unwrap();
        assert_eq!(est.strategy, SampleStrategy::Rejection);
    }

    #[test]
    fn cross_check_small_uniform_law() {
        let report = cross_check(5, 1, 2, 100_000, 7, crate::DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(report.atoms.len(), 10);
        assert!(report.pass);
        for atom in &report.atoms {
            assert!((atom.prob - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_check_collapsed_law() {
        let report = cross_check(4, 1, 2, 100_000, 7, crate::DEFAULT_ENUM_BUDGET).unwrap();
        assert!(report.pass);
        let zero_atom = report
            .atoms
            .iter()
            .find(|a| (a.prob - 1.0 / 3.0).abs() < 1e-12)
            .expect("atom with probability 1/3");
        assert!((zero_atom.freq - 1.0 / 3.0).abs() < zero_atom.band);

        let report = cross_check(6, 3, 2, 100_000, 7, crate::DEFAULT_ENUM_BUDGET).unwrap();
        assert!(report.pass);
        assert!(report.atoms.iter().any(|a| (a.prob - 0.6).abs() < 1e-12));
    }

    #[test]
    fn invalid_arguments_are_usage_errors() {
        assert!(matches!(sample_estimate(0, 0, 1, 10, 1), Err(Error::Usage(_))));
        assert!(matches!(sample_estimate(5, 1, 0, 10, 1), Err(Error::Usage(_))));
        assert!(matches!(sample_estimate(5, 1, 6, 10, 1), Err(Error::Usage(_))));
        assert!(matches!(sample_estimate(5, 5, 2, 10, 1), Err(Error::Usage(_))));
        assert!(matches!(sample_estimate(5, 1, 2, 0, 1), Err(Error::Usage(_))));
    }
}
