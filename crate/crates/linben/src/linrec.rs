//! Sequence engines in overflow-proof scaled arithmetic: linear recurrences,
//! bilinear observables x'A^n y, vector norms |A^n x| and matrix norms |A^n|,
//! plus zero-set structure detection and the predict-and-verify pipeline.

use crate::numkit::{scaled_linear_combination, Base, PrecisionMode, ScaledReal};
use crate::resonance::{
    self, HiSpectrum, Overall, ResonanceParams, ResonanceVerdict,
};
use crate::spectral::{self, Matrix};
use crate::udist::{self, UDReport};
use nalgebra::DVector;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinrecError {
    #[error("leading recurrence coefficient a_d must be nonzero")]
    DegenerateLeadingCoeff,
    #[error("coefficient and initial-value lengths must agree and be nonzero")]
    ShapeMismatch,
    #[error("need at least d = {0} terms")]
    TooFewTerms(usize),
    #[error(transparent)]
    Resonance(#[from] resonance::ResonanceError),
    #[error(transparent)]
    Distribution(#[from] udist::UdError),
}

/// x_n = a_1 x_(n-1) + ... + a_d x_(n-d), seeded with x_1..x_d.
#[derive(Debug, Clone)]
pub struct RecurrenceSpec {
    pub coeffs: Vec<f64>,
    pub initial: Vec<f64>,
}

impl RecurrenceSpec {
    pub fn new(coeffs: Vec<f64>, initial: Vec<f64>) -> Result<Self, LinrecError> {
        if coeffs.is_empty() || coeffs.len() != initial.len() {
            return Err(LinrecError::ShapeMismatch);
        }
        if *coeffs.last().unwrap() == 0.0 {
            return Err(LinrecError::DegenerateLeadingCoeff);
        }
        Ok(RecurrenceSpec { coeffs, initial })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Monic polynomial z^d - a_1 z^(d-1) - ... - a_d whose roots govern
    /// the growth of every solution.
    pub fn char_poly(&self) -> Vec<f64> {
        let mut p = vec![1.0];
        p.extend(self.coeffs.iter().map(|a| -a));
        p
    }
}

/// The observable x' A^n y.
#[derive(Debug, Clone)]
pub struct BilinearSpec {
    pub a: Matrix,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

impl BilinearSpec {
    pub fn new(a: Matrix, x: DVector<f64>, y: DVector<f64>) -> Result<Self, LinrecError> {
        let d = a.nrows();
        if d == 0 || a.ncols() != d || x.len() != d || y.len() != d {
            return Err(LinrecError::ShapeMismatch);
        }
        Ok(BilinearSpec { a, x, y })
    }
}

/// x_1..x_N of the recurrence, every term carried as sign + log-magnitude;
/// catastrophic cancellations (relative to the accumulated magnitude) are
/// recorded as exact zeros.
pub fn simulate_recurrence(
    spec: &RecurrenceSpec,
    n: usize,
    mode: PrecisionMode,
) -> Result<Vec<ScaledReal>, LinrecError> {
    let d = spec.order();
    if n < d {
        return Err(LinrecError::TooFewTerms(d));
    }
    let eps = mode.eps_cancel();
    let mut out: Vec<ScaledReal> = spec.initial.iter().map(|x| ScaledReal::from_real(*x)).collect();
    // coefficients reversed so they line up with the trailing window
    let rev: Vec<f64> = spec.coeffs.iter().rev().copied().collect();
    for k in d..n {
        let window = &out[k - d..k];
        out.push(scaled_linear_combination(&rev, window, eps));
    }
    Ok(out)
}

fn unit_and_norm(v: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    Some((v / norm, norm))
}

/// x' A^n y for n = 1..N by renormalized vector iteration: A^n y is kept as
/// a unit direction times a scaled magnitude, so moduli like 10^pi per step
/// never overflow.
pub fn simulate_bilinear(
    spec: &BilinearSpec,
    n: usize,
    mode: PrecisionMode,
) -> Result<Vec<ScaledReal>, LinrecError> {
    let eps = mode.eps_cancel();
    let mut out = Vec::with_capacity(n);
    let Some((mut u, norm0)) = unit_and_norm(&spec.y) else {
        return Ok(vec![ScaledReal::zero(); n]);
    };
    let mut mag = ScaledReal::from_real(norm0);
    let x_norm = spec.x.norm();
    for _ in 0..n {
        let w = &spec.a * &u;
        let Some((nu, step)) = unit_and_norm(&w) else {
            // the iterate fell into the kernel: everything from here is zero
            while out.len() < n {
                out.push(ScaledReal::zero());
            }
            return Ok(out);
        };
        u = nu;
        mag = mag.scale(step);
        let dot = spec.x.dot(&u);
        if dot.abs() < eps * x_norm {
            out.push(ScaledReal::zero());
        } else {
            out.push(mag.scale(dot));
        }
    }
    Ok(out)
}

/// |A^n x| for n = 1..N via the same renormalized iteration.
pub fn simulate_vector_norm(
    a: &Matrix,
    x: &DVector<f64>,
    n: usize,
) -> Vec<ScaledReal> {
    let mut out = Vec::with_capacity(n);
    let Some((mut u, norm0)) = unit_and_norm(x) else {
        return vec![ScaledReal::zero(); n];
    };
    let mut mag = ScaledReal::from_real(norm0);
    for _ in 0..n {
        let w = a * &u;
        let Some((nu, step)) = unit_and_norm(&w) else {
            while out.len() < n {
                out.push(ScaledReal::zero());
            }
            return out;
        };
        u = nu;
        mag = mag.scale(step);
        out.push(mag);
    }
    out
}

/// |A^n| for n = 1..N: the power is accumulated with its largest entry
/// factored into a scaled prefactor, and the exact spectral norm is taken
/// on the renormalized residue each step.
pub fn simulate_matrix_norm(a: &Matrix, n: usize) -> Vec<ScaledReal> {
    let d = a.nrows();
    let mut out = Vec::with_capacity(n);
    let mut residue = Matrix::identity(d, d);
    let mut prefactor = ScaledReal::from_real(1.0);
    for _ in 0..n {
        residue = &residue * a;
        let max_entry = residue.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if max_entry == 0.0 {
            while out.len() < n {
                out.push(ScaledReal::zero());
            }
            return out;
        }
        residue /= max_entry;
        prefactor = prefactor.scale(max_entry);
        out.push(prefactor.scale(spectral::spectral_norm(&residue)));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroStructure {
    /// Finitely many zeros, all listed.
    Finite,
    /// All but finitely many terms vanish.
    Cofinite,
    /// Zeros are a union of arithmetic progressions (period, residue) with
    /// residue in 1..=period, up to a finite exceptional prefix.
    LatticeUnion(Vec<(usize, usize)>),
    /// No lattice-union of admissible period explains the zeros.
    Irregular,
}

#[derive(Debug, Clone)]
pub struct ZeroSetReport {
    /// 1-based indices of vanishing terms.
    pub zero_indices: Vec<usize>,
    pub density_estimate: f64,
    pub structure: ZeroStructure,
    pub terminating: bool,
}

/// Detect the structure of the zero set of a simulated sequence. Periods up
/// to N/4 are tried; `prefix` indices at the start may be exceptional.
pub fn zero_set(seq: &[ScaledReal], prefix: usize) -> ZeroSetReport {
    let n = seq.len();
    let zero_indices: Vec<usize> = seq
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.is_zero().then_some(i + 1))
        .collect();
    let density_estimate = zero_indices.len() as f64 / n.max(1) as f64;
    let tail_zeros = seq.iter().rev().take_while(|v| v.is_zero()).count();
    let terminating = tail_zeros == n || (tail_zeros > n / 4 && tail_zeros >= 4);

    let beyond: Vec<usize> = zero_indices.iter().copied().filter(|i| *i > prefix).collect();
    let structure = if beyond.is_empty() {
        ZeroStructure::Finite
    } else if beyond.len() == n.saturating_sub(prefix.min(n)) {
        ZeroStructure::Cofinite
    } else {
        fit_lattices(&beyond, prefix, n)
    };
    ZeroSetReport {
        zero_indices,
        density_estimate,
        structure,
        terminating,
    }
}

fn fit_lattices(zeros: &[usize], prefix: usize, n: usize) -> ZeroStructure {
    let zero_set: std::collections::HashSet<usize> = zeros.iter().copied().collect();
    for period in 1..=n / 4 {
        // residues whose entire class beyond the prefix vanishes
        let mut classes = Vec::new();
        let mut covered = true;
        for residue in 1..=period {
            let members: Vec<usize> = (0..)
                .map(|k| residue + k * period)
                .skip_while(|i| *i <= prefix)
                .take_while(|i| *i <= n)
                .collect();
            if members.is_empty() {
                continue;
            }
            if members.iter().all(|i| zero_set.contains(i)) {
                classes.push((period, residue));
            }
        }
        // every zero beyond the prefix must be explained by some class
        let in_classes = |i: usize| {
            classes
                .iter()
                .any(|(p, r)| i > prefix && i % p == r % p)
        };
        for z in zeros {
            if !in_classes(*z) {
                covered = false;
                break;
            }
        }
        if covered && !classes.is_empty() {
            return ZeroStructure::LatticeUnion(classes);
        }
    }
    ZeroStructure::Irregular
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agrees,
    Disagrees,
    /// The theoretical verdict is inconclusive; only the measurement stands.
    EmpiricalOnly,
}

#[derive(Debug, Clone)]
pub enum PredictInput {
    Recurrence(RecurrenceSpec),
    Bilinear(BilinearSpec),
}

#[derive(Debug, Clone)]
pub struct PredictReport {
    /// Which criterion produced the prediction.
    pub criterion: String,
    pub verdict: ResonanceVerdict,
    /// Benford predicted (None when the verdict is inconclusive).
    pub predicted_benford: Option<bool>,
    pub empirical: UDReport,
    pub zeros: ZeroSetReport,
    pub agreement: Agreement,
}

pub struct PredictParams {
    pub resonance: ResonanceParams,
    pub mode: PrecisionMode,
    /// High-precision spectrum to use instead of refining the binary64
    /// coefficients; needed whenever the model parameters are themselves
    /// transcendental-exact (e.g. gamma = sqrt5 cos(pi log10(5)/2)).
    pub spectrum_override: Option<HiSpectrum>,
    /// Empirical digit deviation below which a sequence counts as
    /// conforming, and above 2.5x which it counts as clearly deviating.
    pub beta_threshold: f64,
}

impl Default for PredictParams {
    fn default() -> Self {
        PredictParams {
            resonance: ResonanceParams::default(),
            mode: PrecisionMode::Extended,
            spectrum_override: None,
            beta_threshold: 0.02,
        }
    }
}

/// Run the full pipeline: simulate, measure significand distribution,
/// classify the spectrum, and compare prediction against measurement.
pub fn predict_and_verify(
    input: &PredictInput,
    base: Base,
    n: usize,
    params: &PredictParams,
) -> Result<PredictReport, LinrecError> {
    let prec = params.resonance.precision_bits;
    let (seq, criterion, hi) = match input {
        PredictInput::Recurrence(spec) => {
            let seq = simulate_recurrence(spec, n, params.mode)?;
            let hi = match &params.spectrum_override {
                Some(s) => s.clone(),
                None => HiSpectrum::from_poly(&spec.char_poly(), prec)?,
            };
            (seq, "difference-equation spectrum criterion", hi)
        }
        PredictInput::Bilinear(spec) => {
            let seq = simulate_bilinear(spec, n, params.mode)?;
            let hi = match &params.spectrum_override {
                Some(s) => s.clone(),
                None => HiSpectrum::from_matrix(&spec.a, prec)?,
            };
            (seq, "bilinear-observable spectrum criterion", hi)
        }
    };
    let verdict = resonance::classify_spectrum(&hi, base, &params.resonance)?;
    let prefix = match input {
        PredictInput::Recurrence(s) => s.order(),
        PredictInput::Bilinear(s) => s.a.nrows(),
    };
    let zeros = zero_set(&seq, prefix);
    let empirical = udist::sequence_report(&seq, base)?;

    let predicted_benford = match verdict.overall {
        Overall::NonresonantUpToBound => Some(!zeros.terminating),
        Overall::Resonant => Some(false),
        Overall::Inconclusive => None,
    };
    let beta = empirical.beta_n;
    let agreement = match predicted_benford {
        None => Agreement::EmpiricalOnly,
        Some(true) => {
            if beta <= params.beta_threshold {
                Agreement::Agrees
            } else {
                Agreement::Disagrees
            }
        }
        Some(false) => {
            if zeros.terminating || beta >= 2.5 * params.beta_threshold {
                Agreement::Agrees
            } else {
                Agreement::Disagrees
            }
        }
    };
    Ok(PredictReport {
        criterion: criterion.to_string(),
        verdict,
        predicted_benford,
        empirical,
        zeros,
        agreement,
    })
}
