//! Simultaneous (Aberth-Ehrlich) root finding for real monic polynomials,
//! with cluster-based multiplicity detection and joint polishing.

use crate::numkit::ComplexVal;

const MAX_ITERS: usize = 400;
// A root of multiplicity m computed in double precision wanders by roughly
// eps^(1/m): about 6e-6 for triple roots and 3e-4 for quadruple roots
// (which arise when squaring a matrix with a +-r Jordan pair). 1e-3 keeps
// all of those in one cluster; genuinely distinct eigenvalues closer than
// 0.1% relative are beyond what this double-precision stage can separate
// anyway.
const CLUSTER_RTOL: f64 = 1e-3;

/// Roots with multiplicity of `z^d + c[1] z^(d-1) + ... + c[d]`.
/// `monic[0]` must be 1. Zero roots are deflated exactly first.
pub fn roots_with_multiplicity(monic: &[f64]) -> Result<Vec<(ComplexVal, u32)>, String> {
    assert!(monic.len() >= 2 && monic[0] == 1.0);
    let mut coeffs: Vec<f64> = monic.to_vec();
    // deflate exact zero roots
    let mut zero_mult = 0u32;
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
        zero_mult += 1;
    }
    let mut out = Vec::new();
    if zero_mult > 0 {
        out.push((ComplexVal::new(0.0, 0.0), zero_mult));
    }
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(out);
    }
    if d == 1 {
        out.push((ComplexVal::new(-coeffs[1], 0.0), 1));
        return Ok(out);
    }

    let mut z = initial_guesses(&coeffs);
    let mut converged = false;
    for _ in 0..MAX_ITERS {
        let mut max_step = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(&coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 {
                p / dp
            } else {
                ComplexVal::new(1e-3, 1e-3)
            };
            let mut s = ComplexVal::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 0.0 {
                        s += ComplexVal::new(1.0, 0.0) / diff;
                    }
                }
            }
            let denom = ComplexVal::new(1.0, 0.0) - newton * s;
            let w = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        // accept if residuals are small anyway; Aberth often stalls within
        // rounding noise of a converged configuration
        let scale: f64 = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        for zi in &z {
            let (p, _) = horner(&coeffs, *zi);
            if p.norm() > 1e-8 * scale * (1.0 + zi.norm()).powi(d as i32) {
                return Err(format!(
                    "root iteration did not converge (residual {:.3e} at {zi})",
                    p.norm()
                ));
            }
        }
    }

    let clusters = cluster(&z);
    let mut found: Vec<(ComplexVal, u32)> = Vec::new();
    for c in clusters {
        let m = c.len() as u32;
        let centroid = c.iter().sum::<ComplexVal>() / c.len() as f64;
        let polished = polish(&coeffs, centroid, m);
        found.push((polished, m));
    }
    symmetrize_conjugates(&mut found);
    out.extend(found);
    Ok(out)
}

fn initial_guesses(coeffs: &[f64]) -> Vec<ComplexVal> {
    let d = coeffs.len() - 1;
    let radius = 1.0 + coeffs.iter().skip(1).fold(0.0f64, |a, c| a.max(c.abs()));
    (0..d)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / d as f64 + 0.4;
            ComplexVal::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect()
}

/// Evaluate p and p' at z by a Horner pass.
fn horner(coeffs: &[f64], z: ComplexVal) -> (ComplexVal, ComplexVal) {
    let mut p = ComplexVal::new(coeffs[0], 0.0);
    let mut dp = ComplexVal::new(0.0, 0.0);
    for c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + ComplexVal::new(*c, 0.0);
    }
    (p, dp)
}

/// Derivative coefficients of a complex-coefficient polynomial.
fn derivative(coeffs: &[ComplexVal]) -> Vec<ComplexVal> {
    let d = coeffs.len() - 1;
    coeffs[..d]
        .iter()
        .enumerate()
        .map(|(i, c)| *c * (d - i) as f64)
        .collect()
}

fn eval(coeffs: &[ComplexVal], z: ComplexVal) -> ComplexVal {
    let mut p = coeffs[0];
    for c in &coeffs[1..] {
        p = p * z + *c;
    }
    p
}

/// A root of multiplicity m of p is a simple root of p^(m-1); polish there.
fn polish(coeffs: &[f64], z0: ComplexVal, mult: u32) -> ComplexVal {
    let mut poly: Vec<ComplexVal> = coeffs.iter().map(|c| ComplexVal::new(*c, 0.0)).collect();
    for _ in 1..mult {
        poly = derivative(&poly);
    }
    let dpoly = derivative(&poly);
    let mut z = z0;
    for _ in 0..60 {
        let p = eval(&poly, z);
        let dp = eval(&dpoly, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn cluster(roots: &[ComplexVal]) -> Vec<Vec<ComplexVal>> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            let tol = CLUSTER_RTOL * (1.0 + roots[i].norm().max(roots[j].norm()));
            if (roots[i] - roots[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::HashMap<usize, Vec<ComplexVal>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(roots[i]);
    }
    groups.into_values().collect()
}

/// Force exact realness for near-real roots and exact conjugate pairing for
/// the rest (the source polynomials are real).
fn symmetrize_conjugates(roots: &mut [(ComplexVal, u32)]) {
    for (z, _) in roots.iter_mut() {
        if z.im.abs() <= 1e-8 * (1.0 + z.norm()) {
            *z = ComplexVal::new(z.re, 0.0);
        }
    }
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || roots[i].0.im <= 0.0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if i != j && !used[j] && roots[j].0.im < 0.0 && roots[j].1 == roots[i].1 {
                let dist = (roots[j].0.conj() - roots[i].0).norm();
                if best.map_or(true, |(_, d)| dist < d) {
                    best = Some((j, dist));
                }
            }
        }
        if let Some((j, _)) = best {
            let avg = (roots[i].0 + roots[j].0.conj()) / 2.0;
            roots[i].0 = avg;
            roots[j].0 = avg.conj();
            used[i] = true;
            used[j] = true;
        }
    }
}
