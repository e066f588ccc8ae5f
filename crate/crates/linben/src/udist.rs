//! Empirical uniform-distribution-mod-1 and leading-digit diagnostics.
//!
//! All statistics are computed from exact sorted order, never from bins;
//! zero terms are excluded from mod-1 statistics and reported separately.

use crate::numkit::{arg_principal, Base, ComplexVal, ScaledReal};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum UdError {
    #[error("empty histogram (no nonzero terms)")]
    EmptyHistogram,
    #[error("all terms are zero; mod-1 statistics undefined")]
    AllZero,
    #[error("Weyl harmonic k must be nonzero")]
    ZeroHarmonic,
    #[error("empty point list")]
    EmptyInput,
}

/// Counts of first significant digits. `counts[d-1]` is the count of digit
/// `d`; zero terms are tracked in `n_zero` and excluded from `counts`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DigitHistogram {
    pub base: Base,
    pub counts: Vec<u64>,
    pub n_total: u64,
    pub n_zero: u64,
}

impl DigitHistogram {
    /// Relative frequency of digit `d` in percent.
    pub fn percent(&self, d: u32) -> f64 {
        100.0 * self.counts[(d - 1) as usize] as f64 / self.n_total as f64
    }
}

/// Exact limiting frequency `log_b(1 + 1/d)` of leading digit `d`.
pub fn benford_probability(b: Base, d: u32) -> f64 {
    (1.0 + 1.0 / d as f64).ln() / b.ln()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeylEntry {
    pub k: i32,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

/// Bundle of equidistribution diagnostics for one point set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UDReport {
    pub n_points: usize,
    pub weyl: Vec<WeylEntry>,
    pub star_discrepancy: f64,
    pub ks_significand: f64,
    pub beta_n: f64,
}

/// Harmonics reported by default; enough to expose rational-angle failures.
pub const DEFAULT_HARMONICS: std::ops::RangeInclusive<i32> = 1..=8;

/// First-digit histogram of a scaled sequence.
pub fn digit_histogram(seq: &[ScaledReal], b: Base) -> DigitHistogram {
    let mut counts = vec![0u64; (b.get() - 1) as usize];
    let mut n_zero = 0u64;
    for x in seq {
        if x.is_zero() {
            n_zero += 1;
        } else {
            counts[(x.leading_digit(b) - 1) as usize] += 1;
        }
    }
    let n_total = counts.iter().sum();
    DigitHistogram {
        base: b,
        counts,
        n_total,
        n_zero,
    }
}

/// Max over digits of |empirical frequency - log_b(1 + 1/d)|.
pub fn benford_digit_deviation(hist: &DigitHistogram) -> Result<f64, UdError> {
    if hist.n_total == 0 {
        return Err(UdError::EmptyHistogram);
    }
    let n = hist.n_total as f64;
    let mut worst = 0.0f64;
    for (i, c) in hist.counts.iter().enumerate() {
        let d = (i + 1) as u32;
        let dev = (*c as f64 / n - benford_probability(hist.base, d)).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Exact Kolmogorov-Smirnov distance of the significand sample from the
/// limiting CDF `log_b s` on `[1, b)`.
pub fn significand_ks(seq: &[ScaledReal], b: Base) -> Result<f64, UdError> {
    let mut sig: Vec<f64> = seq
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| x.significand(b))
        .collect();
    if sig.is_empty() {
        return Err(UdError::AllZero);
    }
    sig.sort_by(|a, c| a.partial_cmp(c).unwrap());
    let n = sig.len() as f64;
    let mut d = 0.0f64;
    for (i, s) in sig.iter().enumerate() {
        let f = s.ln() / b.ln();
        d = d.max(((i + 1) as f64 / n - f).max(f - i as f64 / n));
    }
    Ok(d)
}

/// Average exponential sum `(1/N) sum_n e^{2 pi i k x_n}`.
pub fn weyl_sum(points: &[f64], k: i32) -> Result<ComplexVal, UdError> {
    if k == 0 {
        return Err(UdError::ZeroHarmonic);
    }
    if points.is_empty() {
        return Err(UdError::EmptyInput);
    }
    let mut acc = ComplexVal::new(0.0, 0.0);
    for x in points {
        let phase = TAU * k as f64 * x;
        acc += ComplexVal::new(phase.cos(), phase.sin());
    }
    Ok(acc / points.len() as f64)
}

/// Exact one-dimensional star discrepancy from the sorted-points formula.
pub fn star_discrepancy(points: &[f64]) -> Result<f64, UdError> {
    if points.is_empty() {
        return Err(UdError::EmptyInput);
    }
    let mut u: Vec<f64> = points.iter().map(|x| x.rem_euclid(1.0)).collect();
    u.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = u.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in u.iter().enumerate() {
        d = d.max(((i + 1) as f64 / n - x).max(x - i as f64 / n));
    }
    Ok(d)
}

/// Full diagnostic bundle for a set of mod-1 points. The digit-level
/// statistics view each point as `log_b` of a sequence term.
pub fn ud_report(points: &[f64], b: Base) -> Result<UDReport, UdError> {
    if points.is_empty() {
        return Err(UdError::EmptyInput);
    }
    let weyl = DEFAULT_HARMONICS
        .map(|k| {
            let w = weyl_sum(points, k).expect("k != 0");
            WeylEntry {
                k,
                re: w.re,
                im: w.im,
                magnitude: w.norm(),
            }
        })
        .collect();
    let seq: Vec<ScaledReal> = points
        .iter()
        .map(|x| ScaledReal::from_sign_ln(1, x.rem_euclid(1.0) * b.ln()))
        .collect();
    let hist = digit_histogram(&seq, b);
    Ok(UDReport {
        n_points: points.len(),
        weyl,
        star_discrepancy: star_discrepancy(points)?,
        ks_significand: significand_ks(&seq, b)?,
        beta_n: benford_digit_deviation(&hist)?,
    })
}

/// Diagnostics for a scaled sequence: mod-1 points are `log_b |x_n|` of the
/// nonzero terms.
pub fn sequence_report(seq: &[ScaledReal], b: Base) -> Result<UDReport, UdError> {
    let points: Vec<f64> = seq
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| x.log_base_frac(b))
        .collect();
    if points.is_empty() {
        return Err(UdError::AllZero);
    }
    let weyl = DEFAULT_HARMONICS
        .map(|k| {
            let w = weyl_sum(&points, k).expect("k != 0");
            WeylEntry {
                k,
                re: w.re,
                im: w.im,
                magnitude: w.norm(),
            }
        })
        .collect();
    let hist = digit_histogram(seq, b);
    Ok(UDReport {
        n_points: points.len(),
        weyl,
        star_discrepancy: star_discrepancy(&points)?,
        ks_significand: significand_ks(seq, b)?,
        beta_n: benford_digit_deviation(&hist)?,
    })
}

/// One report per residue class `l in {1, .., L}` of the index, supporting
/// empirical subsequence equidistribution checks.
pub fn subsequence_ud_check(points: &[f64], l: usize, b: Base) -> Result<Vec<UDReport>, UdError> {
    if l == 0 || points.len() < l {
        return Err(UdError::EmptyInput);
    }
    (0..l)
        .map(|class| {
            let sub: Vec<f64> = points
                .iter()
                .skip(class)
                .step_by(l)
                .copied()
                .collect();
            ud_report(&sub, b)
        })
        .collect()
}

#[allow(dead_code)]
fn _complex_helper_used(z: ComplexVal) -> f64 {
    arg_principal(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn b10() -> Base {
        Base::new(10).unwrap()
    }

    #[test]
    fn histogram_constant_sequence() {
        let seq: Vec<ScaledReal> = (0..50).map(|_| ScaledReal::from_real(2.0)).collect();
        let h = digit_histogram(&seq, b10());
        assert_eq!(h.counts[1], 50);
        assert_eq!(h.n_total, 50);
        assert_eq!(h.n_zero, 0);
    }

    #[test]
    fn deviation_exact_benford_is_zero() {
        let n = 100_000u64;
        let counts: Vec<u64> = (1..10)
            .map(|d| (n as f64 * benford_probability(b10(), d)).round() as u64)
            .collect();
        let total = counts.iter().sum();
        let h = DigitHistogram {
            base: b10(),
            counts,
            n_total: total,
            n_zero: 0,
        };
        assert!(benford_digit_deviation(&h).unwrap() < 1e-5);
    }

    #[test]
    fn deviation_degenerate_all_mass_on_one() {
        let mut counts = vec![0u64; 9];
        counts[0] = 1000;
        let h = DigitHistogram {
            base: b10(),
            counts,
            n_total: 1000,
            n_zero: 0,
        };
        assert_relative_eq!(
            benford_digit_deviation(&h).unwrap(),
            1.0 - 2f64.log10(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn ks_equidistributed_lattice() {
        let n = 1000;
        let seq: Vec<ScaledReal> = (0..n)
            .map(|k| ScaledReal::from_sign_ln(1, (k as f64 / n as f64) * b10().ln()))
            .collect();
        assert!(significand_ks(&seq, b10()).unwrap() <= 1.0 / n as f64 + 1e-12);
    }

    #[test]
    fn ks_degenerate_all_ones() {
        let seq: Vec<ScaledReal> = (0..10).map(|_| ScaledReal::from_real(1.0)).collect();
        assert!(significand_ks(&seq, b10()).unwrap() > 0.9);
    }

    #[test]
    fn weyl_alternating() {
        let pts: Vec<f64> = (1..=1000).map(|n| n as f64 / 2.0).collect();
        let w = weyl_sum(&pts, 1).unwrap();
        assert!(w.norm() <= 1.0 / 1000.0 + 1e-12);
    }

    #[test]
    fn weyl_rational_resonance() {
        let pts: Vec<f64> = (1..=100).map(|n| n as f64 / 3.0).collect();
        let w = weyl_sum(&pts, 3).unwrap();
        assert_relative_eq!(w.norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn weyl_sqrt2_orbit() {
        let pts: Vec<f64> = (1..=10_000)
            .map(|n| (n as f64 * 2f64.sqrt()).rem_euclid(1.0))
            .collect();
        assert!(weyl_sum(&pts, 1).unwrap().norm() <= 0.02);
    }

    #[test]
    fn weyl_zero_harmonic_rejected() {
        assert!(weyl_sum(&[0.5], 0).is_err());
    }

    #[test]
    fn star_discrepancy_midpoint_lattice() {
        let n = 100;
        let pts: Vec<f64> = (1..=n).map(|k| (2 * k - 1) as f64 / (2 * n) as f64).collect();
        assert_relative_eq!(
            star_discrepancy(&pts).unwrap(),
            1.0 / (2 * n) as f64,
            max_relative = 1e-10
        );
    }

    #[test]
    fn star_discrepancy_single_point() {
        assert_relative_eq!(star_discrepancy(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn star_discrepancy_sqrt2() {
        let pts: Vec<f64> = (1..=1000)
            .map(|n| (n as f64 * 2f64.sqrt()).rem_euclid(1.0))
            .collect();
        assert!(star_discrepancy(&pts).unwrap() <= 0.01);
    }

    #[test]
    fn subsequence_identity_split() {
        let pts: Vec<f64> = (1..=500)
            .map(|n| (n as f64 * 2f64.sqrt()).rem_euclid(1.0))
            .collect();
        let reports = subsequence_ud_check(&pts, 1, b10()).unwrap();
        assert_eq!(reports.len(), 1);
        let global = ud_report(&pts, b10()).unwrap();
        assert_relative_eq!(
            reports[0].star_discrepancy,
            global.star_discrepancy,
            max_relative = 1e-12
        );
    }

    #[test]
    fn subsequence_both_classes_ud_for_sqrt2() {
        let pts: Vec<f64> = (1..=10_000)
            .map(|n| (n as f64 * 2f64.sqrt()).rem_euclid(1.0))
            .collect();
        for rep in subsequence_ud_check(&pts, 2, b10()).unwrap() {
            assert!(rep.weyl[0].magnitude <= 0.03);
        }
    }

    #[test]
    fn subsequence_constructed_counter_pattern() {
        // even indices follow a rational orbit, odd indices an irrational one
        let pts: Vec<f64> = (1..=10_000u64)
            .map(|n| {
                let base = n as f64 / 2.0;
                let extra = if n % 2 == 1 {
                    2f64.sqrt() * n as f64
                } else {
                    0.0
                };
                (base + extra).rem_euclid(1.0)
            })
            .collect();
        let reps = subsequence_ud_check(&pts, 2, b10()).unwrap();
        let mags: Vec<f64> = reps.iter().map(|r| r.weyl[1].magnitude).collect();
        assert!((mags[0] - mags[1]).abs() > 0.5, "classes must differ: {mags:?}");
    }

    // Structural invariants on the classical test corpus.

    #[test]
    fn scale_invariance_higher_harmonics() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        for alpha in [2f64.sqrt(), golden] {
            let pts: Vec<f64> = (1..=10_000)
                .map(|n| (n as f64 * alpha).rem_euclid(1.0))
                .collect();
            let tau = weyl_sum(&pts, 1).unwrap().norm().max(0.01);
            for k in [2, 3] {
                assert!(weyl_sum(&pts, k).unwrap().norm() <= 3.0 * tau);
            }
        }
    }

    #[test]
    fn perturbation_by_convergent_sequence() {
        let pts: Vec<f64> = (1..=10_000)
            .map(|n| (n as f64 * 2f64.sqrt()).rem_euclid(1.0))
            .collect();
        let perturbed: Vec<f64> = (1..=10_000)
            .map(|n| (n as f64 * 2f64.sqrt() + 1.0 / n as f64).rem_euclid(1.0))
            .collect();
        let d0 = star_discrepancy(&pts).unwrap();
        let d1 = star_discrepancy(&perturbed).unwrap();
        assert!((d0 - d1).abs() <= 0.01);
    }

    #[test]
    fn logarithmic_drift_stays_ud() {
        let pts: Vec<f64> = (1..=10_000)
            .map(|n| (n as f64 * 2f64.sqrt() + (n as f64).ln()).rem_euclid(1.0))
            .collect();
        assert!(weyl_sum(&pts, 1).unwrap().norm() <= 0.03);
    }

    #[test]
    fn digit_deviation_bounded_by_discrepancy() {
        // digit cells are arcs, so beta_N <= 2 * D*
        for alpha in [2f64.sqrt(), (1.0 + 5f64.sqrt()) / 2.0, 0.5f64] {
            let pts: Vec<f64> = (1..=5000)
                .map(|n| (n as f64 * alpha).rem_euclid(1.0))
                .collect();
            let rep = ud_report(&pts, b10()).unwrap();
            assert!(rep.beta_n <= 2.0 * rep.star_discrepancy + 1e-12);
        }
    }
}
