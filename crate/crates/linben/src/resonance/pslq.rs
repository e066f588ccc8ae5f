//! PSLQ integer relation detection over arbitrary-precision floats.
//!
//! Given x_1..x_n, searches for integers c_1..c_n (not all zero) with
//! Σ c_i x_i = 0 within the working precision. The algorithm maintains a
//! lower bound on the Euclidean norm of any relation, so "none found" is a
//! certified statement up to the coefficient bound and precision used.

use rug::ops::CompleteRound;
use rug::{Complete, Float, Integer};

/// A detected relation together with the residual it reproduces.
#[derive(Debug, Clone)]
pub struct Relation {
    pub coefficients: Vec<Integer>,
    pub residual: Float,
}

/// Minimum working precision accepted; below this, verdicts are unreliable.
pub const MIN_PRECISION_BITS: u32 = 128;

/// Residual acceptance threshold: 2^(-prec/2) * max|x_i|.
pub fn residual_threshold(xs: &[Float], prec: u32) -> Float {
    let max_abs = xs
        .iter()
        .fold(Float::with_val(prec, 0), |acc, x| acc.max(&x.clone().abs()));
    max_abs * Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)))
}

/// Evaluate |Σ c_i x_i| at the precision of the inputs.
pub fn relation_residual(xs: &[Float], coeffs: &[Integer], prec: u32) -> Float {
    let mut acc = Float::with_val(prec, 0);
    for (x, c) in xs.iter().zip(coeffs) {
        acc += (x * c).complete(prec);
    }
    acc.abs()
}

/// Run PSLQ on `xs` at `prec` bits, accepting only relations with
/// max |c_i| <= h_bound. Returns Ok(None) when the norm bound certifies that
/// no such relation exists, or when iterations are exhausted.
pub fn find_relation(
    xs: &[Float],
    h_bound: &Integer,
    prec: u32,
) -> Result<Option<Relation>, String> {
    if prec < MIN_PRECISION_BITS {
        return Err(format!(
            "working precision {prec} bits is below the {MIN_PRECISION_BITS}-bit floor"
        ));
    }
    let n = xs.len();
    if n < 2 {
        return Err("need at least two inputs for a relation search".into());
    }
    for x in xs {
        if !x.is_finite() {
            return Err("non-finite input to relation search".into());
        }
        if x.prec() < prec {
            return Err("input computed below the requested working precision".into());
        }
    }
    // An exact zero input is already a relation e_i.
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            let mut coeffs = vec![Integer::from(0); n];
            coeffs[i] = Integer::from(1);
            return Ok(Some(Relation {
                coefficients: coeffs,
                residual: Float::with_val(prec, 0),
            }));
        }
    }

    let f = |v: f64| Float::with_val(prec, v);
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 24));
    let gamma = f(2.0) / f(3.0).sqrt();
    let threshold = residual_threshold(xs, prec);

    // normalize input
    let norm = xs
        .iter()
        .fold(Float::with_val(prec, 0), |acc, x| acc + x.clone().square())
        .sqrt();
    let mut y: Vec<Float> = xs.iter().map(|x| (x / &norm).complete(prec)).collect();

    // partial norms s_k = sqrt(Σ_{j>=k} y_j^2)
    let mut s = vec![Float::with_val(prec, 0); n];
    let mut acc = Float::with_val(prec, 0);
    for k in (0..n).rev() {
        acc += y[k].clone().square();
        s[k] = acc.clone().sqrt();
    }

    // H is n x (n-1), lower trapezoidal
    let mut h: Vec<Vec<Float>> = vec![vec![Float::with_val(prec, 0); n - 1]; n];
    for j in 0..n - 1 {
        h[j][j] = (&s[j + 1] / &s[j]).complete(prec);
        for i in j + 1..n {
            h[i][j] = -(&y[i] * &y[j]).complete(prec) / (&s[j] * &s[j + 1]).complete(prec);
        }
    }

    let mut b: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Integer::from(u32::from(i == j)))
                .collect()
        })
        .collect();

    let round_to_int = |v: &Float| -> Integer {
        v.clone().round().to_integer().expect("finite rounding")
    };

    // size reduction of rows start.. against the diagonal
    let reduce = |y: &mut Vec<Float>,
                      h: &mut Vec<Vec<Float>>,
                      b: &mut Vec<Vec<Integer>>,
                      start: usize| {
        for i in start.max(1)..n {
            for j in (0..i.min(n - 1)).rev() {
                if h[j][j].is_zero() {
                    continue;
                }
                let q = round_to_int(&(&h[i][j] / &h[j][j]).complete(prec));
                if q == 0 {
                    continue;
                }
                let yi = y[i].clone();
                y[j] += (&yi * &q).complete(prec);
                for k in 0..=j {
                    let t = (&h[j][k] * &q).complete(prec);
                    h[i][k] -= t;
                }
                for k in 0..n {
                    let t = (&b[k][i] * &q).complete();
                    b[k][j] += t;
                }
            }
        }
    };
    reduce(&mut y, &mut h, &mut b, 1);

    let sqrt_n = f(n as f64).sqrt();
    let max_iters = 200 * n * (prec as usize);
    for _ in 0..max_iters {
        // pick the row with maximal gamma^i |H_ii|
        let mut m = 0usize;
        let mut best = Float::with_val(prec, -1);
        let mut weight = Float::with_val(prec, 1);
        for i in 0..n - 1 {
            let v = h[i][i].clone().abs() * &weight;
            if v > best {
                best = v;
                m = i;
            }
            weight *= &gamma;
        }

        y.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }

        if m + 1 < n - 1 {
            // restore the trapezoidal shape with a Givens rotation
            let t0 = (h[m][m].clone().square() + h[m][m + 1].clone().square()).sqrt();
            if !t0.is_zero() {
                let c = (&h[m][m] / &t0).complete(prec);
                let d = (&h[m][m + 1] / &t0).complete(prec);
                for i in m..n {
                    let t3 = h[i][m].clone();
                    let t4 = h[i][m + 1].clone();
                    h[i][m] = (&c * &t3).complete(prec) + (&d * &t4).complete(prec);
                    h[i][m + 1] = (&c * &t4).complete(prec) - (&d * &t3).complete(prec);
                }
            }
        }
        reduce(&mut y, &mut h, &mut b, m);

        // detection: a vanishing y entry exposes a relation in column of B
        let mut min_idx = 0usize;
        for j in 1..n {
            if y[j].clone().abs() < y[min_idx].clone().abs() {
                min_idx = j;
            }
        }
        if y[min_idx].clone().abs() < tiny {
            let coeffs: Vec<Integer> = (0..n).map(|i| b[i][min_idx].clone()).collect();
            let max_c = coeffs.iter().fold(Integer::from(0), |a, c| a.max(c.clone().abs()));
            let residual = relation_residual(xs, &coeffs, prec);
            if max_c <= *h_bound && residual < threshold {
                return Ok(Some(normalize_sign(coeffs, residual)));
            }
            // a true relation outside the coefficient bound: report none
            return Ok(None);
        }

        // norm bound: 1/max|H_jj| is a lower bound on |c|_2 for any relation
        let max_diag = (0..n - 1).fold(Float::with_val(prec, 0), |a, j| {
            a.max(&h[j][j].clone().abs())
        });
        if !max_diag.is_zero() {
            let bound = max_diag.recip();
            let h_float = Float::with_val(prec, h_bound);
            if bound > h_float * &sqrt_n {
                return Ok(None);
            }
        }
    }
    Ok(None)
}

fn normalize_sign(mut coeffs: Vec<Integer>, residual: Float) -> Relation {
    if let Some(first) = coeffs.iter().find(|c| **c != 0) {
        if *first < 0 {
            for c in &mut coeffs {
                *c = -c.clone();
            }
        }
    }
    Relation {
        coefficients: coeffs,
        residual,
    }
}
