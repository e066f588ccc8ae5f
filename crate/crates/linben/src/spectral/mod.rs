//! Spectral analysis of real square matrices: characteristic polynomials,
//! eigenvalues with multiplicities, modulus classes, Jordan indices, the
//! extremal peripheral spectrum, spectral norms, and eventual positivity.

mod roots;

use crate::numkit::ComplexVal;
use nalgebra::DMatrix;
use thiserror::Error;

pub type Matrix = DMatrix<f64>;

/// Relative gap used to merge eigenvalue moduli into one class. Polished
/// high-multiplicity roots can sit up to ~1e-8 relative off their exact
/// location, so the gap is kept well above that.
pub const MODULUS_RTOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix must be square and nonempty")]
    BadShape,
    #[error("leading recurrence coefficient a_d must be nonzero")]
    DegenerateRecurrence,
    #[error("{0} is not an eigenvalue of the matrix")]
    NotEigenvalue(ComplexVal),
    #[error("eigenvalue computation failed: {0}")]
    RootFinding(String),
}

/// One eigenvalue with its algebraic multiplicity and (when computed) the
/// Jordan index k: the largest size of a Jordan block for it, minus one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenInfo {
    pub value: ComplexVal,
    pub multiplicity: u32,
    pub jordan_index: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<EigenInfo>,
    /// Spectral radius.
    pub r_sigma: f64,
}

/// All eigenvalues whose moduli agree up to `MODULUS_RTOL`, tagged with the
/// shared modulus.
#[derive(Debug, Clone)]
pub struct ModulusClass {
    pub r: f64,
    pub members: Vec<EigenInfo>,
    pub is_peripheral: bool,
}

/// Peripheral eigenvalues of maximal Jordan index, or `Nilpotent` when every
/// eigenvalue is zero.
#[derive(Debug, Clone)]
pub enum PeripheralSpectrum {
    Nilpotent,
    Class {
        r: f64,
        k_max: u32,
        members: Vec<EigenInfo>,
    },
}

/// Companion matrix of the recurrence x_n = a_1 x_{n-1} + ... + a_d x_{n-d}.
pub fn companion_matrix(a: &[f64]) -> Result<Matrix, SpectralError> {
    let d = a.len();
    if d == 0 || a[d - 1] == 0.0 {
        return Err(SpectralError::DegenerateRecurrence);
    }
    let mut m = Matrix::zeros(d, d);
    for (j, coeff) in a.iter().enumerate() {
        m[(0, j)] = *coeff;
    }
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    Ok(m)
}

/// Monic characteristic polynomial coefficients `[1, c1, ..., cd]` with
/// `det(zI - A) = z^d + c1 z^(d-1) + ... + cd`, by the Faddeev-LeVerrier
/// recursion (exact in rational arithmetic, and accurate for the moderate
/// dimensions used here).
pub fn char_poly(a: &Matrix) -> Result<Vec<f64>, SpectralError> {
    let d = a.nrows();
    if d == 0 || a.ncols() != d {
        return Err(SpectralError::BadShape);
    }
    let mut coeffs = vec![1.0f64];
    let mut m = a.clone();
    for k in 1..=d {
        let c = -m.trace() / k as f64;
        coeffs.push(c);
        if k < d {
            let mut shifted = m.clone();
            for i in 0..d {
                shifted[(i, i)] += c;
            }
            m = a * shifted;
        }
    }
    Ok(coeffs)
}

/// Eigenvalues with algebraic multiplicities (Jordan indices left unset).
pub fn eigenvalues(a: &Matrix) -> Result<Spectrum, SpectralError> {
    let coeffs = char_poly(a)?;
    spectrum_of_poly(&coeffs)
}

/// Spectrum of a monic real polynomial `[1, c1, ..., cd]`.
pub fn spectrum_of_poly(coeffs: &[f64]) -> Result<Spectrum, SpectralError> {
    let roots =
        roots::roots_with_multiplicity(coeffs).map_err(SpectralError::RootFinding)?;
    let eigenvalues: Vec<EigenInfo> = roots
        .into_iter()
        .map(|(value, multiplicity)| EigenInfo {
            value,
            multiplicity,
            jordan_index: None,
        })
        .collect();
    let r_sigma = eigenvalues
        .iter()
        .fold(0.0f64, |acc, e| acc.max(e.value.norm()));
    Ok(Spectrum {
        eigenvalues,
        r_sigma,
    })
}

/// Partition the nonzero spectrum by modulus via single-linkage merging at
/// relative tolerance `rtol`. Zero eigenvalues are dropped: they contribute
/// nothing to growth and have no modulus class in the sense used here.
pub fn modulus_classes(spectrum: &Spectrum, rtol: f64) -> Vec<ModulusClass> {
    let zero_cut = 1e-12 * spectrum.r_sigma.max(1.0);
    let mut items: Vec<&EigenInfo> = spectrum
        .eigenvalues
        .iter()
        .filter(|e| e.value.norm() > zero_cut)
        .collect();
    items.sort_by(|x, y| x.value.norm().partial_cmp(&y.value.norm()).unwrap());
    let mut classes: Vec<ModulusClass> = Vec::new();
    for e in items {
        let r = e.value.norm();
        match classes.last_mut() {
            Some(c) if (r - c.r).abs() <= rtol * r.max(c.r) => {
                c.members.push(*e);
                // representative modulus: running mean keeps it stable
                let n = c.members.len() as f64;
                c.r += (r - c.r) / n;
            }
            _ => classes.push(ModulusClass {
                r,
                members: vec![*e],
                is_peripheral: false,
            }),
        }
    }
    if let Some(last) = classes.last_mut() {
        last.is_peripheral = true;
    }
    classes
}

fn rank_of(m: &Matrix, tol_scale: f64) -> usize {
    let d = m.nrows();
    let svd = m.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().fold(0.0f64, |a, s| a.max(*s));
    let tol = d as f64 * 1e-10 * sigma_max.max(tol_scale);
    svd.singular_values.iter().filter(|s| **s > tol).count()
}

/// Jordan index of eigenvalue `lambda`: the largest block size minus one,
/// computed from rank drops of powers of the (real) annihilating factor.
/// For complex lambda the real quadratic `A^2 - 2 Re(l) A + |l|^2 I` is used,
/// which has the same null-chain structure for the conjugate pair.
pub fn jordan_index(a: &Matrix, lambda: ComplexVal) -> Result<u32, SpectralError> {
    let d = a.nrows();
    if d == 0 || a.ncols() != d {
        return Err(SpectralError::BadShape);
    }
    let b = if lambda.im == 0.0 {
        let mut b = a.clone();
        for i in 0..d {
            b[(i, i)] -= lambda.re;
        }
        b
    } else {
        let mut b = a * a - a * (2.0 * lambda.re);
        let n2 = lambda.norm_sqr();
        for i in 0..d {
            b[(i, i)] += n2;
        }
        b
    };
    let scale = b.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if rank_of(&b, scale) == d {
        return Err(SpectralError::NotEigenvalue(lambda));
    }
    // normalize powers so rank thresholds stay meaningful
    let bn = if scale > 0.0 { &b / scale } else { b.clone() };
    let mut prev_rank = rank_of(&bn, 0.0);
    let mut power = bn.clone();
    let mut k = 0u32;
    for _ in 1..=d {
        power *= &bn;
        let pscale = power.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if pscale > 0.0 {
            power /= pscale;
        }
        let r = rank_of(&power, 0.0);
        if r < prev_rank {
            k += 1;
            prev_rank = r;
        } else {
            break;
        }
    }
    Ok(k)
}

/// Modulus classes with Jordan indices filled in for every member.
pub fn annotated_classes(a: &Matrix) -> Result<Vec<ModulusClass>, SpectralError> {
    let spectrum = eigenvalues(a)?;
    let mut classes = modulus_classes(&spectrum, MODULUS_RTOL);
    for class in &mut classes {
        for member in &mut class.members {
            member.jordan_index = Some(jordan_index(a, member.value)?);
        }
    }
    Ok(classes)
}

/// The extremal peripheral spectrum: among eigenvalues of maximal modulus,
/// those whose Jordan index is maximal.
pub fn extremal_peripheral_spectrum(a: &Matrix) -> Result<PeripheralSpectrum, SpectralError> {
    let classes = annotated_classes(a)?;
    let Some(peripheral) = classes.last() else {
        return Ok(PeripheralSpectrum::Nilpotent);
    };
    let k_max = peripheral
        .members
        .iter()
        .map(|m| m.jordan_index.unwrap())
        .max()
        .unwrap();
    let members: Vec<EigenInfo> = peripheral
        .members
        .iter()
        .filter(|m| m.jordan_index == Some(k_max))
        .copied()
        .collect();
    Ok(PeripheralSpectrum::Class {
        r: peripheral.r,
        k_max,
        members,
    })
}

/// Largest singular value, by power iteration on A^T A.
pub fn spectral_norm(a: &Matrix) -> f64 {
    let d = a.nrows();
    let scale = a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let an = a / scale;
    let g = an.transpose() * &an;
    let mut v = nalgebra::DVector::from_fn(d, |i, _| 1.0 / (1.0 + i as f64));
    v /= v.norm();
    let mut prev = 0.0f64;
    for _ in 0..10_000 {
        let w = &g * &v;
        let lam = w.norm();
        if lam == 0.0 {
            return 0.0;
        }
        v = w / lam;
        if (lam - prev).abs() <= 1e-14 * lam {
            prev = lam;
            break;
        }
        prev = lam;
    }
    scale * prev.sqrt()
}

/// Smallest N with A^N entrywise strictly positive, if one exists up to
/// `n_max`. Powers are renormalized by their largest entry; positivity is
/// judged against a relative floor of 1e-12.
pub fn positivity_index(a: &Matrix, n_max: u32) -> Option<u32> {
    let mut power = a.clone();
    for n in 1..=n_max {
        let scale = power.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if scale == 0.0 {
            return None;
        }
        if power.iter().all(|x| *x > 1e-12 * scale) {
            return Some(n);
        }
        power = &power * a;
        let s = power.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if s > 1e100 || (s < 1e-100 && s > 0.0) {
            power /= s;
        }
    }
    None
}
