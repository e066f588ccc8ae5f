//! Minimal double-double arithmetic (~106-bit significand) used by the
//! extended precision mode of the sequence engines.
//!
//! Only the operations the log-domain recurrence step needs are provided:
//! add/sub/mul, `exp` and `ln`, comparisons, and conversions. Algorithms are
//! the classical error-free transformations (Dekker/Knuth) plus argument
//! reduction for `exp` and a single Newton-style correction for `ln`.

use std::cmp::Ordering;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    /// 2^-106-accurate ln 2, used for exp argument reduction.
    const LN2: Dd = Dd {
        hi: 0.693_147_180_559_945_3,
        lo: 2.319_046_813_846_299_6e-17,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        let (s, e) = two_sum(self.hi, x);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let e = e + self.lo * x;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn div_dd(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul_f64(q2));
        let q3 = r2.hi / other.hi;
        Dd::new(q1, q2).add_f64(q3)
    }

    pub fn div_f64(self, x: f64) -> Dd {
        let q1 = self.hi / x;
        let (p, e) = two_prod(q1, x);
        let r = self.sub(Dd { hi: p, lo: e });
        let q2 = (r.hi + r.lo) / x;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    /// exp with argument reduction `x = k ln 2 + r`, `|r| <= ln2/2`,
    /// followed by a Taylor series in `r`.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self.sub(Dd::LN2.mul_f64(k));
        // sum r^n / n!
        let mut term = r;
        let mut sum = Dd::from_f64(1.0).add(r);
        let mut n = 2.0f64;
        loop {
            term = term.mul(r).div_f64(n);
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 || n > 40.0 {
                break;
            }
            n += 1.0;
        }
        let scale = (k as i32).clamp(-1074, 1023);
        Dd {
            hi: libm_ldexp(sum.hi, scale),
            lo: libm_ldexp(sum.lo, scale),
        }
    }

    /// Natural log for positive inputs: f64 seed plus one correction step.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        let y0 = self.hi.ln();
        // r = x * exp(-y0) = 1 + delta with |delta| ~ 1e-16
        let r = self.mul(Dd::from_f64(-y0).exp());
        let delta = r.add_f64(-1.0);
        // ln(1+delta) = delta - delta^2/2 + O(delta^3)
        let corr = delta.sub(delta.mul(delta).div_f64(2.0));
        Dd::from_f64(y0).add(corr)
    }

    #[inline]
    pub fn cmp_dd(&self, other: &Dd) -> Ordering {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo).unwrap_or(Ordering::Equal),
            Some(o) => o,
            None => Ordering::Equal,
        }
    }
}

#[inline]
fn libm_ldexp(x: f64, e: i32) -> f64 {
    x * (2.0f64).powi(e)
}
