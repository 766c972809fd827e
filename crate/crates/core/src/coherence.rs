//! Coherence of partial Fourier measurement matrices and the Welch lower
//! bound, which for these matrices coincides with sigma/m of the subset-sum
//! variable at the same (N, m).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampling::closed_form_variance;

/// Hard cap on N for the O(m N^2) Gram computation.
pub const MAX_COHERENCE_N: u64 = 4096;

/// Welch bound together with its sigma/m restatement.
#[derive(Clone, Debug)]
pub struct WelchReport {
    pub n: u64,
    pub m: u64,
    /// `sqrt((N - m) / (m (N - 1)))`.
    pub bound: f64,
    /// `sqrt(Var) / m` with `Var = m(N-m)/(N-1)`; must match `bound` to 1e-12.
    pub sigma_ratio: f64,
    /// `1 / sqrt(m)`, the m << N approximation of the bound.
    pub approx_inv_sqrt_m: f64,
}

/// Coherence of the row-restricted Fourier matrix with l2-normalized columns.
#[derive(Clone, Debug)]
pub struct CoherenceReport {
    pub n: u64,
    pub rows: Vec<u64>,
    /// Maximum absolute inner product over distinct column pairs.
    pub mu: f64,
    pub welch: f64,
    pub sigma_ratio: f64,
    /// `mu >= welch - 1e-12`.
    pub satisfied: bool,
}

/// The Welch lower bound on coherence for an m x N matrix, with the sigma/m
/// restatement checked against it.
pub fn welch_bound(n: u64, m: u64) -> Result<WelchReport> {
    if n == 0 {
        return Err(Error::usage("N must be positive"));
    }
    if m == 0 || m > n {
        return Err(Error::usage(format!("m must lie in [1, N]; got m = {m}, N = {n}")));
    }
    let (bound, sigma_ratio) = if n == 1 {
        (0.0, 0.0)
    } else {
        let bound = (((n - m) as f64) / ((m * (n - 1)) as f64)).sqrt();
        let sigma_ratio = closed_form_variance(n, m).sqrt() / m as f64;
        (bound, sigma_ratio)
    };
    assert!(
        (bound - sigma_ratio).abs() <= 1e-12,
        "Welch bound and sigma/m disagree: {bound} vs {sigma_ratio}"
    );
    Ok(WelchReport {
        n,
        m,
        bound,
        sigma_ratio,
        approx_inv_sqrt_m: 1.0 / (m as f64).sqrt(),
    })
}

fn validate_rows(n: u64, rows: &[u64]) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("N must be positive"));
    }
    if n > MAX_COHERENCE_N {
        return Err(Error::usage(format!("N = {n} exceeds coherence cap {MAX_COHERENCE_N}")));
    }
    if rows.is_empty() || rows.len() as u64 > n {
        return Err(Error::usage("row count must lie in [1, N]"));
    }
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::usage("row indices must be distinct"));
    }
    if *sorted.last().expect("nonempty") >= n {
        return Err(Error::usage("row indices must lie in [0, N-1]"));
    }
    Ok(())
}

/// Columns of the matrix `exp(-2*pi*j*r*c/N) / sqrt(m)`, restricted to `rows`.
fn build_columns(n: u64, rows: &[u64]) -> Vec<Vec<Complex64>> {
    let m = rows.len();
    let scale = 1.0 / (m as f64).sqrt();
    (0..n)
        .map(|c| {
            rows.iter()
                .map(|&r| {
                    let angle = -2.0 * std::f64::consts::PI * ((r as u128 * c as u128 % n as u128) as f64)
                        / n as f64;
                    Complex64::new(angle.cos(), angle.sin()) * scale
                })
                .collect()
        })
        .collect()
}

fn inner_product_magnitude(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x * y.conj();
    }
    acc.norm()
}

/// Coherence of the partial Fourier matrix given by a set of row indices
/// (0-based), checked against the Welch bound.
pub fn partial_fourier_coherence(n: u64, rows: &[u64]) -> Result<CoherenceReport> {
    validate_rows(n, rows)?;
    let mut rows = rows.to_vec();
    rows.sort_unstable();
    let m = rows.len() as u64;
    let columns = build_columns(n, &rows);

    let mu = (0..columns.len().saturating_sub(1))
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for j in i + 1..columns.len() {
                best = best.max(inner_product_magnitude(&columns[i], &columns[j]));
            }
            best
        })
        .reduce(|| 0.0, f64::max);

    let welch = welch_bound(n, m)?;
    Ok(CoherenceReport {
        n,
        rows,
        mu,
        welch: welch.bound,
        sigma_ratio: welch.sigma_ratio,
        satisfied: mu >= welch.bound - 1e-12,
    })
}

/// All pairwise column inner-product magnitudes, for CSV export.
pub fn pairwise_magnitudes(n: u64, rows: &[u64]) -> Result<Vec<(u64, u64, f64)>> {
    validate_rows(n, rows)?;
    let mut rows = rows.to_vec();
    rows.sort_unstable();
    let columns = build_columns(n, &rows);
    let mut pairs = Vec::with_capacity(columns.len() * (columns.len() - 1) / 2);
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            pairs.push((i as u64, j as u64, inner_product_magnitude(&columns[i], &columns[j])));
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welch_bound_values() {
        let report = welch_bound(4, 2).unwrap();
        assert!((report.bound - 0.5773502691896258).abs() < 1e-15);
        let report = welch_bound(50, 1).unwrap();
        assert!((report.bound - 1.0).abs() < 1e-15);
        // m << N: close to 1/sqrt(m)
        let report = welch_bound(100_000, 25).unwrap();
        assert!((report.bound - report.approx_inv_sqrt_m).abs() < 1e-4);
    }

    #[test]
    fn full_dft_matrix_is_tight() {
        let rows: Vec<u64> = (0..4).collect();
        let report = partial_fourier_coherence(4, &rows).unwrap();
        assert!(report.mu.abs() < 1e-12);
        assert!(report.welch.abs() < 1e-12);
        assert!(report.satisfied);
    }

    #[test]
    fn two_row_matrix() {
        let report = partial_fourier_coherence(4, &[0, 1]).unwrap();
        // inner products (1 + exp(-pi j delta / 2)) / 2: maximum sqrt(2)/2
        assert!((report.mu - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(report.satisfied);
    }

    #[test]
    fn quadratic_residue_rows() {
        let report = partial_fourier_coherence(7, &[1, 2, 4]).unwrap();
        assert!(report.satisfied);
        // difference-set rows achieve the Welch bound for N = 7, m = 3
        assert!((report.mu - report.welch).abs() < 1e-9);
    }

    #[test]
    fn row_validation() {
        assert!(partial_fourier_coherence(4, &[]).is_err());
        assert!(partial_fourier_coherence(4, &[0, 0]).is_err());
        assert!(partial_fourier_coherence(4, &[0, 4]).is_err());
        assert!(partial_fourier_coherence(8192, &[0, 1]).is_err());
    }

    #[test]
    fn pairwise_magnitude_count() {
        let pairs = pairwise_magnitudes(5, &[0, 2]).unwrap();
        assert_eq!(pairs.len(), 10);
        let report = partial_fourier_coherence(5, &[0, 2]).unwrap();
        let max = pairs.iter().map(|p| p.2).fold(0.0f64, f64::max);
        assert!((max - report.mu).abs() < 1e-15);
    }
}
