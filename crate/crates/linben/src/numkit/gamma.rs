//! Principal-branch complex log-Gamma via a fixed-degree rational
//! (Lanczos-type) approximation, with reflection for Re z < 1/2.

use super::{ComplexVal, NumError};
use std::f64::consts::PI;

// Godfrey's coefficients for g = 607/128, giving ~15 correct digits.
const G: f64 = 607.0 / 128.0;
const COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_188_9e-5,
    4.652_362_892_704_857_5e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_124_7e-4,
    -2.102_644_417_241_048_7e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_274e-5,
    -2.619_083_840_158_140_9e-5,
    3.689_918_265_953_162_4e-6,
];

fn lanczos_ln_gamma(z: ComplexVal) -> ComplexVal {
    // valid for Re z >= 0.5
    let mut x = ComplexVal::new(COEF[0], 0.0);
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += ComplexVal::new(*c, 0.0) / (z + ComplexVal::new(i as f64 - 1.0, 0.0));
    }
    let t = z + ComplexVal::new(G - 0.5, 0.0);
    0.5 * (2.0 * PI).ln() + (z - ComplexVal::new(0.5, 0.0)) * t.ln() - t + x.ln()
}

/// Log of the Gamma function for complex arguments away from the poles
/// `0, -1, -2, ...`. The branch is principal up to multiples of 2 pi i
/// introduced by the reflection formula; `exp` of the result is exact in
/// branch.
pub fn log_gamma_complex(z: ComplexVal) -> Result<ComplexVal, NumError> {
    let nearest = z.re.round();
    if nearest <= 0.0 {
        let dist = ((z.re - nearest).powi(2) + z.im.powi(2)).sqrt();
        if dist < 1e-12 {
            return Err(NumError::PoleProximity {
                pole: nearest as i64,
                dist,
            });
        }
    }
    if z.re < 0.5 {
        // reflection: ln Gamma(z) = ln pi - ln sin(pi z) - ln Gamma(1 - z)
        let lg = lanczos_ln_gamma(ComplexVal::new(1.0, 0.0) - z);
        let s = (ComplexVal::new(PI, 0.0) * z).sin();
        Ok(ComplexVal::new(PI.ln(), 0.0) - s.ln() - lg)
    } else {
        Ok(lanczos_ln_gamma(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gamma(z: ComplexVal) -> ComplexVal {
        log_gamma_complex(z).unwrap().exp()
    }

    #[test]
    fn integer_values() {
        assert_relative_eq!(gamma(ComplexVal::new(1.0, 0.0)).re, 1.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(ComplexVal::new(5.0, 0.0)).re, 24.0, max_relative = 1e-13);
        assert!(log_gamma_complex(ComplexVal::new(1.0, 0.0)).unwrap().norm() < 1e-13);
    }

    #[test]
    fn gamma_imaginary_axis_modulus() {
        // |Gamma(i beta)|^2 = pi / (beta sinh(pi beta))
        let beta = 1.0;
        let g = gamma(ComplexVal::new(0.0, beta));
        let expect = PI / (beta * (PI * beta).sinh());
        assert_relative_eq!(g.norm_sqr(), expect, max_relative = 1e-12);
        assert_relative_eq!(g.norm_sqr(), 0.272_029_054_982_133, max_relative = 1e-9);
    }

    #[test]
    fn recurrence_on_grid() {
        for i in 0..10 {
            for j in -5..=5 {
                let z = ComplexVal::new(0.1 + i as f64, 2.0 * j as f64);
                let lhs = gamma(z + ComplexVal::new(1.0, 0.0));
                let rhs = z * gamma(z);
                let err = (lhs - rhs).norm() / lhs.norm();
                assert!(err < 1e-10, "z={z} err={err}");
            }
        }
    }

    #[test]
    fn legendre_duplication() {
        // Gamma(i b) Gamma(1/2 + i b) = 2^(1 - 2 i b) sqrt(pi) Gamma(2 i b)
        for &beta in &[0.25, 1.0, 2.5] {
            let ib = ComplexVal::new(0.0, beta);
            let lhs = gamma(ib) * gamma(ComplexVal::new(0.5, beta));
            let two = ComplexVal::new(2.0, 0.0);
            let rhs = two.powc(ComplexVal::new(1.0, -2.0 * beta)) * PI.sqrt()
                * gamma(ComplexVal::new(0.0, 2.0 * beta));
            let err = (lhs - rhs).norm() / rhs.norm();
            assert!(err < 1e-10, "beta={beta} err={err}");
        }
    }

    #[test]
    fn pole_rejection() {
        assert!(log_gamma_complex(ComplexVal::new(-3.0, 0.0)).is_err());
        assert!(log_gamma_complex(ComplexVal::new(0.0, 0.0)).is_err());
    }
}
