//! Independent special-function oracle layer: closed forms and adaptive
//! quadrature for the oscillatory torus integrals
//! `I(p, beta) = integral over T of exp(4*pi*i*p*t + 2i*beta*ln|cos 2pi t|)`,
//! their one-parameter extension `i(p, beta, x)`, Chebyshev coefficients,
//! pushforward Fourier coefficients on T^d, and the search for parameter
//! vectors `u` whose pushforward measure is provably not Haar.

use crate::numkit::{log_gamma_complex, pochhammer, ComplexVal, NumError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecfunError {
    #[error("target error must be at least 1e-12")]
    TargetTooTight,
    #[error("beta must be nonzero for the closed form")]
    BetaZero,
    #[error("quadrature did not converge; best estimate {value:?} +- {err:?}")]
    NoConvergence { value: ComplexVal, err: f64 },
    #[error("parameter vectors must be nonempty and of equal length")]
    ShapeMismatch,
    #[error("all coordinates of u vanish")]
    DegenerateU,
    #[error(transparent)]
    Numeric(#[from] NumError),
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: ComplexVal,
    pub err_estimate: f64,
    pub nodes_used: usize,
}

/// Deterministic evaluation budget for the lattice quasi-Monte Carlo rule.
#[derive(Debug, Clone, Copy)]
pub struct QmcBudget {
    pub points: usize,
    pub shifts: usize,
    pub seed: u64,
}

impl Default for QmcBudget {
    fn default() -> Self {
        QmcBudget {
            points: 1 << 16,
            shifts: 8,
            seed: 0,
        }
    }
}

/// Closed form for `I(p, beta)` with `beta != 0`:
/// `(-1)^p exp(-i beta ln4) * Gamma(1+2i beta)/Gamma(1+i beta)^2 *
/// (-i beta)_|p| / (1+i beta)_|p|`
/// (the Gamma prefactor rewrites `2i beta Gamma(2i beta) / (i beta
/// Gamma(i beta))^2` via `z Gamma(z) = Gamma(z+1)`).
/// By convention `I(p, 0)` is 1 for p = 0 and 0 otherwise.
pub fn i_closed(p: i64, beta: f64) -> Result<ComplexVal, SpecfunError> {
    if beta == 0.0 {
        return Ok(if p == 0 {
            ComplexVal::new(1.0, 0.0)
        } else {
            ComplexVal::new(0.0, 0.0)
        });
    }
    let ib = ComplexVal::new(0.0, beta);
    let one = ComplexVal::new(1.0, 0.0);
    let gamma_log = log_gamma_complex(one + 2.0 * ib)? - 2.0 * log_gamma_complex(one + ib)?;
    let ap = p.unsigned_abs() as u32;
    // the quotient (-ib)_|p| / (1+ib)_|p| through log-Gamma differences:
    // direct products overflow beyond |p| of roughly 170
    let poch = if ap == 0 {
        one
    } else {
        let n = ComplexVal::new(ap as f64, 0.0);
        (log_gamma_complex(-ib + n)? - log_gamma_complex(-ib)?
            + log_gamma_complex(one + ib)?
            - log_gamma_complex(one + ib + n)?)
        .exp()
    };
    let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let phase = ComplexVal::new(0.0, -beta * 4f64.ln()).exp();
    Ok(sign * phase * gamma_log.exp() * poch)
}

/// The exact squared modulus `beta tanh(pi beta) / (pi (p^2 + beta^2))`.
pub fn i_modulus_squared(p: i64, beta: f64) -> f64 {
    if beta == 0.0 {
        return if p == 0 { 1.0 } else { 0.0 };
    }
    let pf = p as f64;
    beta * (std::f64::consts::PI * beta).tanh()
        / (std::f64::consts::PI * (pf * pf + beta * beta))
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
const GL_NODES: [f64; 16] = [
    -0.989_400_934_991_649_9,
    -0.944_575_023_073_232_6,
    -0.865_631_202_387_831_7,
    -0.755_404_408_355_003_1,
    -0.617_876_244_402_643_7,
    -0.458_016_777_657_227_4,
    -0.281_603_550_779_258_9,
    -0.095_012_509_837_637_44,
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003_1,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL_WEIGHTS: [f64; 16] = [
    0.027_152_459_411_754_1,
    0.062_253_523_938_647_9,
    0.095_158_511_682_492_8,
    0.124_628_971_255_533_9,
    0.149_595_988_816_576_7,
    0.169_156_519_395_002_5,
    0.182_603_415_044_923_6,
    0.189_450_610_455_068_5,
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_8,
    0.062_253_523_938_647_9,
    0.027_152_459_411_754_1,
];

fn gl_panel<F: Fn(f64) -> ComplexVal>(f: &F, a: f64, b: f64, nodes: &mut usize) -> ComplexVal {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = ComplexVal::new(0.0, 0.0);
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        acc += *w * f(mid + half * x);
    }
    *nodes += 16;
    acc * half
}

/// Composite rule on a panel free of singularities, capping subpanel length
/// so the oscillatory phase stays resolvable by 16 Gauss points.
fn smooth_integral<F: Fn(f64) -> ComplexVal>(
    f: &F,
    a: f64,
    b: f64,
    max_len: f64,
    nodes: &mut usize,
) -> ComplexVal {
    let pieces = (((b - a) / max_len).ceil() as usize).max(1);
    let step = (b - a) / pieces as f64;
    let mut acc = ComplexVal::new(0.0, 0.0);
    for i in 0..pieces {
        acc += gl_panel(f, a + i as f64 * step, a + (i + 1) as f64 * step, nodes);
    }
    acc
}

/// Integrate over [a, b] with a logarithmic phase singularity at `a`:
/// geometric panels toward `a` with ratio 1/2 resolve the singularity scale
/// by scale; the integrand is unimodular, so the untouched sliver of width
/// `(b-a) 2^-depth` contributes at most that much to the error.
fn geometric_toward_left<F: Fn(f64) -> ComplexVal>(
    f: &F,
    a: f64,
    b: f64,
    depth: u32,
    nodes: &mut usize,
) -> (ComplexVal, f64) {
    let len = b - a;
    let mut acc = ComplexVal::new(0.0, 0.0);
    let mut hi = b;
    for k in 1..=depth {
        let lo = a + len * (0.5f64).powi(k as i32);
        acc += smooth_integral(f, lo, hi, (hi - lo) / 4.0, nodes);
        hi = lo;
    }
    (acc, hi - a)
}

/// Integrate the 1-periodic unimodular integrand over the circle, splitting
/// at the listed interior singular points of the log phase.
fn circle_integral<F: Fn(f64) -> ComplexVal>(
    f: &F,
    singularities: &[f64],
    depth: u32,
) -> QuadratureResult {
    let mut nodes = 0usize;
    if singularities.is_empty() {
        let value = smooth_integral(f, 0.0, 1.0, 1.0 / 64.0, &mut nodes);
        return QuadratureResult {
            value,
            err_estimate: 1e-13,
            nodes_used: nodes,
        };
    }
    let mut sing: Vec<f64> = singularities.iter().map(|s| s.rem_euclid(1.0)).collect();
    sing.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sing.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut acc = ComplexVal::new(0.0, 0.0);
    let mut tail = 0.0;
    for i in 0..sing.len() {
        let a = sing[i];
        let b = if i + 1 < sing.len() { sing[i + 1] } else { sing[0] + 1.0 };
        let mid = 0.5 * (a + b);
        let (left, t1) = geometric_toward_left(f, a, mid, depth, &mut nodes);
        // mirror the geometric refinement toward the right endpoint
        let g = |t: f64| f(a + b - t);
        let (right, t2) = geometric_toward_left(&g, a, mid, depth, &mut nodes);
        acc += left + right;
        tail += t1 + t2;
    }
    QuadratureResult {
        value: acc,
        err_estimate: tail,
        nodes_used: nodes,
    }
}

fn refine<F: Fn(f64) -> ComplexVal>(
    f: &F,
    singularities: &[f64],
    target_err: f64,
) -> Result<QuadratureResult, SpecfunError> {
    if target_err < 1e-12 {
        return Err(SpecfunError::TargetTooTight);
    }
    let coarse = circle_integral(f, singularities, 40);
    let fine = circle_integral(f, singularities, 48);
    let err = (fine.value - coarse.value).norm() + fine.err_estimate;
    let result = QuadratureResult {
        value: fine.value,
        err_estimate: err,
        nodes_used: coarse.nodes_used + fine.nodes_used,
    };
    if err > target_err.max(1e-10) {
        return Err(SpecfunError::NoConvergence {
            value: result.value,
            err,
        });
    }
    Ok(result)
}

/// Direct quadrature of `I(p, beta)`, splitting at the cosine zeros
/// t = 1/4 and t = 3/4.
pub fn i_quadrature(p: i64, beta: f64, target_err: f64) -> Result<QuadratureResult, SpecfunError> {
    if beta == 0.0 {
        // pure character integral, exact
        return Ok(QuadratureResult {
            value: i_closed(p, 0.0)?,
            err_estimate: 0.0,
            nodes_used: 0,
        });
    }
    let f = move |t: f64| {
        let c = (2.0 * std::f64::consts::PI * t).cos().abs().max(1e-300);
        let phase = 4.0 * std::f64::consts::PI * p as f64 * t + 2.0 * beta * c.ln();
        ComplexVal::new(0.0, phase).exp()
    };
    refine(&f, &[0.25, 0.75], target_err)
}

/// Quadrature of `i(p, beta, x) = integral of
/// exp(4 pi i p t + 2 i beta ln|x + cos 2 pi t|)`, splitting at the (up to
/// two) interior roots of `x + cos(2 pi t) = 0`.
pub fn i_func(p: i64, beta: f64, x: f64, target_err: f64) -> Result<QuadratureResult, SpecfunError> {
    if beta == 0.0 {
        return Ok(QuadratureResult {
            value: i_closed(p, 0.0)?,
            err_estimate: 0.0,
            nodes_used: 0,
        });
    }
    let f = move |t: f64| {
        // clamp away exact zeros of x + cos: nodes this close to the
        // singularity sit on panels of negligible measure, and the
        // integrand stays unimodular regardless of the clamped phase
        let c = (x + (2.0 * std::f64::consts::PI * t).cos()).abs().max(1e-300);
        let phase = 4.0 * std::f64::consts::PI * p as f64 * t + 2.0 * beta * c.ln();
        ComplexVal::new(0.0, phase).exp()
    };
    let sing: Vec<f64> = if x.abs() <= 1.0 {
        let t0 = (-x).acos() / (2.0 * std::f64::consts::PI);
        if t0 == 0.0 || t0 == 0.5 {
            vec![t0]
        } else {
            vec![t0, 1.0 - t0]
        }
    } else {
        Vec::new()
    };
    refine(&f, &sing, target_err)
}

/// Chebyshev coefficient `c_k = exp(i beta ln4) I(|p|-k, beta) I(|p|+k, beta)`
/// of the even expansion `i(p, beta, x) = c_0 + 2 sum c_n T_{2n}(x)`.
pub fn chebyshev_coeff(p: i64, beta: f64, k: i64) -> Result<ComplexVal, SpecfunError> {
    if beta == 0.0 {
        return Err(SpecfunError::BetaZero);
    }
    let phase = ComplexVal::new(0.0, beta * 4f64.ln()).exp();
    Ok(phase * i_closed(p.abs() - k, beta)? * i_closed(p.abs() + k, beta)?)
}

/// The alternating sum
/// `R_m(z) = sum_{l=0}^m (-1)^l C(m,l) prod_{k=1}^l (2k-1+z) prod_{k=l+1}^m (2k-1)`,
/// which collapses to the product form `2^m (-z/2)_m`.
pub fn r_poly_sum(m: u32, z: ComplexVal) -> ComplexVal {
    let mut acc = ComplexVal::new(0.0, 0.0);
    for l in 0..=m {
        let mut term = ComplexVal::new(binomial(m, l), 0.0);
        if l % 2 == 1 {
            term = -term;
        }
        for k in 1..=l {
            term *= z + (2 * k - 1) as f64;
        }
        for k in l + 1..=m {
            term *= ComplexVal::new((2 * k - 1) as f64, 0.0);
        }
        acc += term;
    }
    acc
}

/// The closed product form `2^m (-z/2)_m` of the same polynomial.
pub fn r_poly_product(m: u32, z: ComplexVal) -> ComplexVal {
    2f64.powi(m as i32) * pochhammer(-0.5 * z, m)
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Membership in the dominant-coordinate cone: some `|u_j|` strictly exceeds
/// the sum of all the others.
pub fn in_e_d(u: &[f64]) -> bool {
    let total: f64 = u.iter().map(|x| x.abs()).sum();
    u.iter().any(|x| x.abs() > total - x.abs())
}

/// k-th Fourier coefficient of the pushforward of Haar measure on T^d under
/// `t -> sum p_j t_j + beta ln|sum u_j cos(2 pi t_j)|`, by shifted rank-1
/// lattice QMC. For d = 1 the exact reduction to `I` is used instead
/// whenever the index arithmetic permits.
pub fn pushforward_fourier(
    p: &[i64],
    beta: f64,
    u: &[f64],
    k: i64,
    budget: &QmcBudget,
) -> Result<QuadratureResult, SpecfunError> {
    let d = p.len();
    if d == 0 || u.len() != d {
        return Err(SpecfunError::ShapeMismatch);
    }
    if u.iter().all(|x| *x == 0.0) {
        return Err(SpecfunError::DegenerateU);
    }
    if beta == 0.0 {
        // pure character: nonzero iff every k p_j vanishes
        let value = if p.iter().all(|pj| k * pj == 0) { 1.0 } else { 0.0 };
        return Ok(QuadratureResult {
            value: ComplexVal::new(value, 0.0),
            err_estimate: 0.0,
            nodes_used: 0,
        });
    }
    if d == 1 && (k * p[0]) % 2 == 0 {
        // exact reduction: the coefficient equals
        // exp(2 pi i k beta ln|u_1|) I(k p_1 / 2, pi k beta)
        let phase =
            ComplexVal::new(0.0, 2.0 * std::f64::consts::PI * k as f64 * beta * u[0].abs().ln())
                .exp();
        let value = phase * i_closed(k * p[0] / 2, std::f64::consts::PI * k as f64 * beta)?;
        return Ok(QuadratureResult {
            value,
            err_estimate: 1e-12,
            nodes_used: 0,
        });
    }
    let n = budget.points.max(64);
    let shifts = budget.shifts.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    // Korobov generating vector z_j = a^(j-1) mod n with a odd, so the
    // lattice projects evenly for the small d used here
    let a: u64 = 1571;
    let mut gen = vec![1u64; d];
    for j in 1..d {
        gen[j] = gen[j - 1].wrapping_mul(a) % n as u64;
    }
    let mut shift_means = Vec::with_capacity(shifts);
    for _ in 0..shifts {
        let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let mut acc = ComplexVal::new(0.0, 0.0);
        for i in 0..n {
            let mut inner = 0.0f64;
            let mut s = 0.0f64;
            for j in 0..d {
                let t = ((i as u64 * gen[j]) % n as u64) as f64 / n as f64 + shift[j];
                let t = t.fract();
                inner += p[j] as f64 * t;
                s += u[j] * (2.0 * std::f64::consts::PI * t).cos();
            }
            if s.abs() < 1e-300 {
                continue; // measure-zero discontinuity set
            }
            let phase = 2.0 * std::f64::consts::PI * k as f64 * (inner + beta * s.abs().ln());
            acc += ComplexVal::new(0.0, phase).exp();
        }
        shift_means.push(acc / n as f64);
    }
    let mean = shift_means.iter().sum::<ComplexVal>() / shifts as f64;
    let var = shift_means
        .iter()
        .map(|m| (m - mean).norm_sqr())
        .sum::<f64>()
        / (shifts - 1) as f64;
    Ok(QuadratureResult {
        value: mean,
        err_estimate: (var / shifts as f64).sqrt(),
        nodes_used: n * shifts,
    })
}

#[derive(Debug, Clone)]
pub struct BreakingU {
    pub u: Vec<f64>,
    pub j_magnitude: f64,
    pub in_e_d: bool,
}

#[derive(Debug, Clone)]
pub enum BreakingSearch {
    Found(BreakingU),
    /// No grid point cleared the threshold; carries the best candidate seen.
    Failed { best: Option<(Vec<f64>, f64)> },
}

/// Search a coarse grid inside the dominant-coordinate cone for a vector u
/// whose second pushforward Fourier coefficient provably exceeds the
/// threshold, certifying that the pushforward measure is not Haar. With
/// beta = 0 every coefficient vanishes and the search must fail.
pub fn find_breaking_u(
    p: &[i64],
    beta: f64,
    threshold: f64,
    budget: &QmcBudget,
) -> Result<BreakingSearch, SpecfunError> {
    let d = p.len();
    if d == 0 {
        return Err(SpecfunError::ShapeMismatch);
    }
    if beta == 0.0 {
        return Ok(BreakingSearch::Failed { best: None });
    }
    let magnitudes: Vec<f64> = (-4..=4).map(|e| 2f64.powi(e)).collect();
    let sub_factors = [0.0, 0.25, -0.25, 0.5, -0.5];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for dominant in 0..d {
        for mag in &magnitudes {
            // enumerate subordinate-coordinate patterns in mixed radix
            let patterns = sub_factors.len().pow((d - 1) as u32);
            for code in 0..patterns {
                let mut u = vec![0.0; d];
                u[dominant] = *mag;
                let mut c = code;
                for j in (0..d).filter(|j| *j != dominant) {
                    u[j] = sub_factors[c % sub_factors.len()] * mag;
                    c /= sub_factors.len();
                }
                if !in_e_d(&u) {
                    continue;
                }
                let q = pushforward_fourier(p, beta, &u, 2, budget)?;
                let magnitude = q.value.norm();
                if magnitude - q.err_estimate >= threshold {
                    return Ok(BreakingSearch::Found(BreakingU {
                        u,
                        j_magnitude: magnitude,
                        in_e_d: true,
                    }));
                }
                if best.as_ref().map_or(true, |(_, b)| magnitude > *b) {
                    best = Some((u, magnitude));
                }
            }
        }
    }
    Ok(BreakingSearch::Failed { best })
}
