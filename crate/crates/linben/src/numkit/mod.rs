//! Numeric substrate: scaled (log-domain) reals, significand extraction,
//! complex helpers and the complex log-Gamma function.
//!
//! `ScaledReal` stores the natural log of the magnitude as a double-double
//! so that round trips and digit extraction are not limited by the ~1e-13
//! relative error a plain f64 log carries for large exponents.

mod dd;
mod gamma;

pub use dd::Dd;
pub use gamma::log_gamma_complex;

use num_complex::Complex64;
use thiserror::Error;

pub type ComplexVal = Complex64;

#[derive(Debug, Error)]
pub enum NumError {
    #[error("non-finite input {0}")]
    NonFinite(f64),
    #[error("base must be an integer >= 2, got {0}")]
    InvalidBase(i64),
    #[error("argument within {dist:.3e} of Gamma pole at {pole}")]
    PoleProximity { pole: i64, dist: f64 },
}

/// Integer base `b >= 2` for significand and digit statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Base(u32);

impl Base {
    pub fn new(b: i64) -> Result<Base, NumError> {
        if b < 2 {
            return Err(NumError::InvalidBase(b));
        }
        Ok(Base(b as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// ln b, the conversion factor between nats and base-b digits.
    #[inline]
    pub fn ln(self) -> f64 {
        (self.0 as f64).ln()
    }

    #[inline]
    pub fn ln_dd(self) -> Dd {
        Dd::from_f64(self.0 as f64).ln()
    }
}

impl TryFrom<i64> for Base {
    type Error = NumError;
    fn try_from(v: i64) -> Result<Self, Self::Error> {
        Base::new(v)
    }
}

impl From<Base> for i64 {
    fn from(b: Base) -> i64 {
        b.0 as i64
    }
}

/// Working precision of a run. Standard keeps the binary64 cancellation
/// threshold; extended tightens it for structural-zero detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionMode {
    #[default]
    Standard,
    Extended,
}

impl PrecisionMode {
    /// Relative residual magnitude below which a linear combination is
    /// flagged near-zero. Distinguishes structural zeros from rounding.
    pub fn eps_cancel(self) -> f64 {
        match self {
            PrecisionMode::Standard => 1e-12,
            PrecisionMode::Extended => 1e-28,
        }
    }
}

/// Sign-and-log-magnitude representation of a real number. `sign == 0`
/// encodes exact or flagged-near-zero values; `lnmag` is then ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledReal {
    sign: i8,
    lnmag: Dd,
}

impl ScaledReal {
    pub const fn zero() -> ScaledReal {
        ScaledReal {
            sign: 0,
            lnmag: Dd::ZERO,
        }
    }

    pub fn from_real(x: f64) -> ScaledReal {
        if x == 0.0 {
            ScaledReal::zero()
        } else {
            ScaledReal {
                sign: if x > 0.0 { 1 } else { -1 },
                lnmag: Dd::from_f64(x.abs()).ln(),
            }
        }
    }

    pub fn from_sign_ln(sign: i8, lnmag: f64) -> ScaledReal {
        ScaledReal {
            sign,
            lnmag: Dd::from_f64(lnmag),
        }
    }

    pub fn from_sign_ln_dd(sign: i8, lnmag: Dd) -> ScaledReal {
        ScaledReal { sign, lnmag }
    }

    #[inline]
    pub fn sign(&self) -> i8 {
        self.sign
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Natural log of the magnitude; meaningless for zero values.
    #[inline]
    pub fn lnmag(&self) -> f64 {
        self.lnmag.to_f64()
    }

    #[inline]
    pub fn lnmag_dd(&self) -> Dd {
        self.lnmag
    }

    pub fn to_real(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.lnmag.exp().to_f64()
        }
    }

    /// log_b |x| for nonzero x.
    pub fn log_base(&self, b: Base) -> f64 {
        self.lnmag.to_f64() / b.ln()
    }

    /// Fractional part of log_b |x|, in [0, 1).
    pub fn log_base_frac(&self, b: Base) -> f64 {
        let t = self.lnmag.div_dd(b.ln_dd());
        let f = t.sub(Dd::from_f64(t.to_f64().floor())).to_f64();
        f.rem_euclid(1.0)
    }

    /// Significand in `[1, b)`, or 0 for zero values.
    pub fn significand(&self, b: Base) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let s = Dd::from_f64(self.log_base_frac(b))
            .mul(b.ln_dd())
            .exp()
            .to_f64();
        if s >= b.as_f64() {
            s / b.as_f64()
        } else if s < 1.0 {
            s * b.as_f64()
        } else {
            s
        }
    }

    /// First significant base-b digit, in `{1, .., b-1}`; 0 for zero.
    pub fn leading_digit(&self, b: Base) -> u32 {
        if self.sign == 0 {
            return 0;
        }
        let s = self.significand(b);
        let mut d = s.floor() as u32;
        // snap values a few ulps below a digit boundary
        if (d + 1) as f64 * (1.0 - 4.0 * f64::EPSILON) <= s {
            d += 1;
        }
        d.clamp(1, b.get() - 1)
    }

    /// Multiply by a scalar.
    pub fn scale(&self, c: f64) -> ScaledReal {
        if self.sign == 0 || c == 0.0 {
            return ScaledReal::zero();
        }
        ScaledReal {
            sign: self.sign * if c > 0.0 { 1 } else { -1 },
            lnmag: self.lnmag.add_f64(c.abs().ln()),
        }
    }
}

/// Significand `S_b(x)` of an ordinary float, with `S_b(0) = 0`.
pub fn significand(x: f64, b: Base) -> Result<f64, NumError> {
    if !x.is_finite() {
        return Err(NumError::NonFinite(x));
    }
    Ok(ScaledReal::from_real(x).significand(b))
}

/// `sum_i coeffs[i] * terms[i]` computed by factoring out the largest log
/// magnitude. When the residual sum falls below `eps_c` times the absolute
/// term sum the result is flagged near-zero (sign 0).
pub fn scaled_linear_combination(
    coeffs: &[f64],
    terms: &[ScaledReal],
    eps_c: f64,
) -> ScaledReal {
    assert_eq!(coeffs.len(), terms.len());
    assert!(!terms.is_empty());
    let mut max_ln: Option<Dd> = None;
    for (c, t) in coeffs.iter().zip(terms) {
        if t.sign != 0 && *c != 0.0 {
            let l = t.lnmag.add_f64(c.abs().ln());
            max_ln = Some(match max_ln {
                None => l,
                Some(m) => {
                    if m.cmp_dd(&l) == std::cmp::Ordering::Less {
                        l
                    } else {
                        m
                    }
                }
            });
        }
    }
    let m = match max_ln {
        None => return ScaledReal::zero(),
        Some(m) => m,
    };
    let mut sum = Dd::ZERO;
    let mut abs_sum = Dd::ZERO;
    for (c, t) in coeffs.iter().zip(terms) {
        if t.sign == 0 || *c == 0.0 {
            continue;
        }
        let scaled = t.lnmag.add_f64(c.abs().ln()).sub(m).exp();
        sum = sum.add(scaled.mul_f64((t.sign as f64) * c.signum()));
        abs_sum = abs_sum.add(scaled);
    }
    let s = sum.to_f64();
    if s == 0.0 || sum.abs().cmp_dd(&abs_sum.mul_f64(eps_c)) == std::cmp::Ordering::Less {
        return ScaledReal::zero();
    }
    ScaledReal {
        sign: if s > 0.0 { 1 } else { -1 },
        lnmag: m.add(sum.abs().ln()),
    }
}

/// Principal argument in `(-pi, pi]`; the argument of a negative real is
/// `+pi` regardless of the sign of a zero imaginary part.
pub fn arg_principal(z: ComplexVal) -> f64 {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    im.atan2(z.re)
}

/// Ascending factorial `(z)_n = z (z+1) ... (z+n-1)`, with `(z)_0 = 1`.
pub fn pochhammer(z: ComplexVal, n: u32) -> ComplexVal {
    let mut acc = ComplexVal::new(1.0, 0.0);
    for k in 0..n {
        acc *= z + ComplexVal::new(k as f64, 0.0);
    }
    acc
}
