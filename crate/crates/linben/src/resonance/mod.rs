//! The decision core: modulus-class angle sets, integer-relation detection,
//! and three-valued resonance verdicts for spectra of real matrices.
//!
//! A modulus class Z (all eigenvalues sharing |lambda| = r) is resonance-free
//! when (i) the set Delta_Z = {1 + (arg z - arg w)/2pi} meets Q only in {1},
//! and (ii) log_b r lies outside the Q-span of Delta_Z. Both conditions are
//! semi-decidable numerically; verdicts are therefore "resonant with
//! witness", "no relation up to (H, precision)", or "inconclusive".

pub mod expr;
pub mod pslq;

use crate::numkit::Base;
use crate::spectral::{self, Matrix, PeripheralSpectrum};
use rug::float::Constant;
use rug::ops::{CompleteRound, Pow};
use rug::{Complete, Float, Integer, Rational};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResonanceError {
    #[error("spectral analysis failed: {0}")]
    Spectral(#[from] spectral::SpectralError),
    #[error("relation search failed: {0}")]
    Relation(String),
    #[error("expression error: {0}")]
    Expression(String),
    #[error("root refinement did not converge for seed {0}")]
    Refinement(f64),
}

/// A real number carried either as an exact rational or as a float computed
/// at working precision. Exactness is preserved wherever the construction
/// allows (angles of real or purely imaginary eigenvalues, their powers).
#[derive(Debug, Clone, PartialEq)]
pub enum HpReal {
    Exact(Rational),
    Approx(Float),
}

impl HpReal {
    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            HpReal::Exact(q) => Float::with_val(prec, q),
            HpReal::Approx(x) => Float::with_val(prec, x),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            HpReal::Exact(q) => q.to_f64(),
            HpReal::Approx(x) => x.to_f64(),
        }
    }

    fn is_one(&self, prec: u32) -> bool {
        match self {
            HpReal::Exact(q) => *q == 1u32,
            HpReal::Approx(x) => {
                let d = (x - 1u32).complete(prec).abs();
                d < tiny(prec)
            }
        }
    }
}

fn tiny(prec: u32) -> Float {
    Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)))
}

fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

/// One eigenvalue in polar form: modulus at working precision, angle as a
/// fraction of a full turn in (-1/2, 1/2].
#[derive(Debug, Clone)]
pub struct HiEigen {
    pub modulus: Float,
    pub angle: HpReal,
    pub multiplicity: u32,
}

#[derive(Debug, Clone)]
pub struct HiSpectrum {
    pub prec: u32,
    pub eigenvalues: Vec<HiEigen>,
}

/// Normalize a turn fraction into (-1/2, 1/2].
fn normalize_turn_float(t: Float, prec: u32) -> Float {
    let mut t = t.clone() - t.floor(); // [0, 1)
    if t > 0.5 {
        t -= 1u32;
    }
    Float::with_val(prec, t)
}

fn normalize_turn_rational(q: &Rational) -> Rational {
    let (mut f, _) = q.clone().fract_floor(Integer::new()); // [0, 1)
    if f > Rational::from((1u32, 2u32)) {
        f -= 1u32;
    }
    f
}

impl HiSpectrum {
    /// Refine the binary64 roots of a real monic polynomial to `prec` bits
    /// by Newton iteration (on the (m-1)-th derivative for m-fold roots),
    /// recording exact angles for real and purely imaginary eigenvalues.
    pub fn from_poly(coeffs: &[f64], prec: u32) -> Result<Self, ResonanceError> {
        let low = spectral::spectrum_of_poly(coeffs)?;
        let poly: Vec<Float> = coeffs.iter().map(|c| Float::with_val(prec, *c)).collect();
        let mut eigenvalues = Vec::new();
        for e in &low.eigenvalues {
            let z = e.value;
            let m = e.multiplicity;
            if z.norm() == 0.0 {
                eigenvalues.push(HiEigen {
                    modulus: Float::with_val(prec, 0),
                    angle: HpReal::Exact(Rational::new()),
                    multiplicity: m,
                });
                continue;
            }
            let mut target = poly.clone();
            for _ in 1..m {
                target = derivative(&target);
            }
            if z.im == 0.0 {
                let x = newton_real(&target, z.re, prec)?;
                let angle = if x.is_sign_negative() {
                    Rational::from((1u32, 2u32))
                } else {
                    Rational::new()
                };
                eigenvalues.push(HiEigen {
                    modulus: x.abs(),
                    angle: HpReal::Exact(angle),
                    multiplicity: m,
                });
            } else if z.im > 0.0 {
                let (re, im) = newton_complex(&target, z, prec)?;
                let modulus = (re.clone().square() + im.clone().square()).sqrt();
                // snap purely imaginary pairs to the exact quarter turn
                let pure_imag = re.clone().abs() < modulus.clone() * tiny(prec);
                let (angle, conj_angle) = if pure_imag {
                    (
                        HpReal::Exact(Rational::from((1u32, 4u32))),
                        HpReal::Exact(Rational::from((-1i32, 4i32))),
                    )
                } else {
                    let a = im.clone().atan2(&re) / two_pi(prec);
                    (HpReal::Approx(a.clone()), HpReal::Approx(-a))
                };
                eigenvalues.push(HiEigen {
                    modulus: modulus.clone(),
                    angle,
                    multiplicity: m,
                });
                eigenvalues.push(HiEigen {
                    modulus,
                    angle: conj_angle,
                    multiplicity: m,
                });
            }
        }
        Ok(HiSpectrum { prec, eigenvalues })
    }

    pub fn from_matrix(a: &Matrix, prec: u32) -> Result<Self, ResonanceError> {
        let coeffs = spectral::char_poly(a)?;
        Self::from_poly(&coeffs, prec)
    }

    /// Build a spectrum from (modulus, argument-in-radians) expression pairs,
    /// e.g. `("sqrt(5)", "pi/sqrt(8)")`. Conjugates are not added implicitly.
    /// Arguments that evaluate to an exact multiple of pi/2 are stored as
    /// exact turn fractions.
    pub fn from_polar_exprs(items: &[(&str, &str)], prec: u32) -> Result<Self, ResonanceError> {
        let mut eigenvalues = Vec::new();
        for (mod_src, arg_src) in items {
            let modulus = expr::eval(mod_src, prec).map_err(ResonanceError::Expression)?;
            if modulus.is_sign_negative() {
                return Err(ResonanceError::Expression(format!(
                    "negative modulus '{mod_src}'"
                )));
            }
            let arg = expr::eval(arg_src, prec).map_err(ResonanceError::Expression)?;
            let turn = normalize_turn_float(arg / two_pi(prec), prec);
            let angle = snap_turn(&turn, prec);
            eigenvalues.push(HiEigen {
                modulus,
                angle,
                multiplicity: 1,
            });
        }
        Ok(HiSpectrum { prec, eigenvalues })
    }

    /// The spectrum of the n-th power: moduli are raised, angles multiplied
    /// modulo one full turn (exactly, for exact angles).
    pub fn power(&self, n: u32) -> Self {
        let prec = self.prec;
        let eigenvalues = self
            .eigenvalues
            .iter()
            .map(|e| {
                let angle = match &e.angle {
                    HpReal::Exact(q) => {
                        HpReal::Exact(normalize_turn_rational(&(q * Rational::from(n)).into()))
                    }
                    HpReal::Approx(a) => {
                        HpReal::Approx(normalize_turn_float((a * n).complete(prec), prec))
                    }
                };
                HiEigen {
                    modulus: e.modulus.clone().pow(n),
                    angle,
                    multiplicity: e.multiplicity,
                }
            })
            .collect();
        HiSpectrum { prec, eigenvalues }
    }
}

/// Map float turns that land exactly on quarter-turn multiples back to exact
/// rationals; everything else stays approximate.
fn snap_turn(turn: &Float, _prec: u32) -> HpReal {
    for (num, den) in [(0i32, 1i32), (1, 2), (1, 4), (-1, 4)] {
        let q = Rational::from((num, den));
        if (turn.clone() - &q).is_zero() {
            return HpReal::Exact(q);
        }
    }
    HpReal::Approx(turn.clone())
}

fn derivative(poly: &[Float]) -> Vec<Float> {
    let d = poly.len() - 1;
    poly[..d]
        .iter()
        .enumerate()
        .map(|(i, c)| (c * ((d - i) as u32)).complete(c.prec()))
        .collect()
}

fn newton_real(poly: &[Float], seed: f64, prec: u32) -> Result<Float, ResonanceError> {
    let mut x = Float::with_val(prec, seed);
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 8));
    for _ in 0..500 {
        let mut p = Float::with_val(prec, 0);
        let mut dp = Float::with_val(prec, 0);
        for c in poly {
            dp = dp * &x + &p;
            p = p * &x + c;
        }
        if dp.is_zero() {
            break;
        }
        let step = p / dp;
        x -= &step;
        if step.abs() <= (x.clone().abs() + 1u32) * &eps {
            return Ok(x);
        }
    }
    Err(ResonanceError::Refinement(seed))
}

fn newton_complex(
    poly: &[Float],
    seed: crate::numkit::ComplexVal,
    prec: u32,
) -> Result<(Float, Float), ResonanceError> {
    let mut re = Float::with_val(prec, seed.re);
    let mut im = Float::with_val(prec, seed.im);
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 8));
    for _ in 0..500 {
        // Horner for p and p' in split real/imaginary arithmetic
        let (mut pr, mut pi) = (Float::with_val(prec, 0), Float::with_val(prec, 0));
        let (mut dr, mut di) = (Float::with_val(prec, 0), Float::with_val(prec, 0));
        for c in poly {
            let (ndr, ndi) = (
                (&dr * &re).complete(prec) - (&di * &im).complete(prec) + &pr,
                (&dr * &im).complete(prec) + (&di * &re).complete(prec) + &pi,
            );
            dr = ndr;
            di = ndi;
            let (npr, npi) = (
                (&pr * &re).complete(prec) - (&pi * &im).complete(prec) + c,
                (&pr * &im).complete(prec) + (&pi * &re).complete(prec),
            );
            pr = npr;
            pi = npi;
        }
        let dnorm = dr.clone().square() + di.clone().square();
        if dnorm.is_zero() {
            break;
        }
        let sr = ((&pr * &dr).complete(prec) + (&pi * &di).complete(prec)) / &dnorm;
        let si = ((&pi * &dr).complete(prec) - (&pr * &di).complete(prec)) / &dnorm;
        re -= &sr;
        im -= &si;
        let step = (sr.square() + si.square()).sqrt();
        let mag = (re.clone().square() + im.clone().square()).sqrt();
        if step <= (mag + 1u32) * &eps {
            return Ok((re, im));
        }
    }
    Err(ResonanceError::Refinement(seed.re))
}

/// The angle-difference set of a modulus class, plus the span generators
/// (folded turn fractions |arg lambda|/2pi, one per conjugate pair).
#[derive(Debug, Clone)]
pub struct DeltaSet {
    pub r: Float,
    pub values: Vec<HpReal>,
    pub generators: Vec<HpReal>,
}

pub fn delta_set(r: &Float, members: &[HiEigen], prec: u32) -> DeltaSet {
    let mut values: Vec<HpReal> = Vec::new();
    let mut push_value = |v: HpReal| {
        let dup = values.iter().any(|w| hp_eq(w, &v, prec));
        if !dup {
            values.push(v);
        }
    };
    for z in members {
        for w in members {
            let v = match (&z.angle, &w.angle) {
                (HpReal::Exact(a), HpReal::Exact(b)) => {
                    HpReal::Exact(Rational::from(1u32) + (a - b).complete())
                }
                (a, b) => {
                    let diff = a.to_float(prec) - b.to_float(prec);
                    HpReal::Approx(diff + 1u32)
                }
            };
            push_value(v);
        }
    }
    let mut generators: Vec<HpReal> = Vec::new();
    for z in members {
        let folded = match &z.angle {
            HpReal::Exact(q) => {
                let f = q.clone().abs();
                if f == 0u32 {
                    continue;
                }
                HpReal::Exact(f)
            }
            HpReal::Approx(a) => {
                let f = a.clone().abs();
                if f.is_zero() {
                    continue;
                }
                HpReal::Approx(f)
            }
        };
        if !generators.iter().any(|g| hp_eq(g, &folded, prec)) {
            generators.push(folded);
        }
    }
    DeltaSet {
        r: r.clone(),
        values,
        generators,
    }
}

fn hp_eq(a: &HpReal, b: &HpReal, prec: u32) -> bool {
    match (a, b) {
        (HpReal::Exact(x), HpReal::Exact(y)) => x == y,
        _ => {
            let d = a.to_float(prec) - b.to_float(prec);
            d.abs() < tiny(prec)
        }
    }
}

/// Search and certification parameters for the relation machinery.
#[derive(Debug, Clone)]
pub struct ResonanceParams {
    /// Coefficient bound for accepted relations.
    pub h_bound: Integer,
    /// Working precision in bits.
    pub precision_bits: u32,
    /// Maximal degree tried when certifying a generator algebraic.
    pub max_poly_degree: u32,
}

impl Default for ResonanceParams {
    fn default() -> Self {
        ResonanceParams {
            h_bound: Integer::from(1_000_000),
            precision_bits: 256,
            max_poly_degree: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ClassOutcome {
    /// Some delta value other than 1 is rational; the witness is that value.
    ResonantConditionI { witness: Rational },
    /// log_b r lies in the rational span; the witness gives integers over
    /// the vector (log_b r, 1, generators...).
    ResonantConditionII { witness: Vec<Integer> },
    /// Both conditions cleared; honest up to the stated search bound.
    NoRelationFound { h: Integer, precision_bits: u32 },
    /// Cleared numerically, but a generator resisted algebraic
    /// certification, so clearance proves nothing structural.
    Inconclusive { reason: String },
}

#[derive(Debug, Clone)]
pub struct ClassReport {
    pub r: f64,
    pub outcome: ClassOutcome,
    /// Relations among (1, generators) alone, detected and set aside while
    /// testing condition (ii); they never involve log_b r.
    pub discarded: Vec<Vec<Integer>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overall {
    Resonant,
    NonresonantUpToBound,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct ResonanceVerdict {
    pub classes: Vec<ClassReport>,
    pub overall: Overall,
}

/// Condition (i): is any delta value other than 1 rational?
pub fn check_condition_i(
    delta: &DeltaSet,
    params: &ResonanceParams,
) -> Result<Option<Rational>, ResonanceError> {
    let prec = params.precision_bits;
    for v in &delta.values {
        if v.is_one(prec) {
            continue;
        }
        match v {
            HpReal::Exact(q) => return Ok(Some(q.clone())),
            HpReal::Approx(x) => {
                let xs = vec![Float::with_val(prec, x), Float::with_val(prec, 1)];
                if let Some(rel) = pslq::find_relation(&xs, &params.h_bound, prec)
                    .map_err(ResonanceError::Relation)?
                {
                    let c0 = rel.coefficients[0].clone();
                    let c1 = rel.coefficients[1].clone();
                    if c0 != 0 {
                        return Ok(Some(Rational::from((-c1, c0))));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub struct CondIiOutcome {
    pub witness: Option<Vec<Integer>>,
    pub discarded: Vec<Vec<Integer>>,
}

/// Condition (ii): does log_b r admit an integer relation with 1 and the
/// class generators? Relations not involving log_b r are internal
/// dependencies of the generator set; they are set aside and the search is
/// repeated without the implicated generator.
pub fn check_condition_ii(
    log_b_r: &HpReal,
    generators: &[HpReal],
    params: &ResonanceParams,
) -> Result<CondIiOutcome, ResonanceError> {
    let prec = params.precision_bits;
    if let HpReal::Exact(q) = log_b_r {
        // log_b r rational: r = b^(p/q) lies in the span trivially
        return Ok(CondIiOutcome {
            witness: Some(vec![q.denom().clone(), -q.numer().clone()]),
            discarded: vec![],
        });
    }
    // exact rational generators add nothing beyond span{1}
    let approx: Vec<(usize, Float)> = generators
        .iter()
        .enumerate()
        .filter_map(|(i, g)| match g {
            HpReal::Approx(x) => Some((i, Float::with_val(prec, x))),
            HpReal::Exact(_) => None,
        })
        .collect();
    let mut active: Vec<(usize, Float)> = approx;
    let mut discarded = Vec::new();
    loop {
        let mut xs = vec![log_b_r.to_float(prec), Float::with_val(prec, 1)];
        xs.extend(active.iter().map(|(_, g)| g.clone()));
        let rel = pslq::find_relation(&xs, &params.h_bound, prec)
            .map_err(ResonanceError::Relation)?;
        let Some(rel) = rel else {
            return Ok(CondIiOutcome {
                witness: None,
                discarded,
            });
        };
        if rel.coefficients[0] != 0 {
            // expand back to the full generator list
            let mut witness = vec![rel.coefficients[0].clone(), rel.coefficients[1].clone()];
            let mut by_index = vec![Integer::from(0); generators.len()];
            for (slot, (gi, _)) in active.iter().enumerate() {
                by_index[*gi] = rel.coefficients[2 + slot].clone();
            }
            witness.extend(by_index);
            return Ok(CondIiOutcome {
                witness: Some(witness),
                discarded,
            });
        }
        // internal dependency: drop the last generator it involves
        let last_involved = (2..rel.coefficients.len())
            .rev()
            .find(|i| rel.coefficients[*i] != 0);
        discarded.push(rel.coefficients.clone());
        match last_involved {
            Some(i) => {
                active.remove(i - 2);
            }
            None => {
                // relation purely in (0, 1): numerically impossible; bail out
                return Ok(CondIiOutcome {
                    witness: None,
                    discarded,
                });
            }
        }
    }
}

/// Certify x algebraic by finding an integer polynomial it annihilates, up
/// to the configured degree and coefficient bound.
pub fn minimal_polynomial(
    x: &Float,
    params: &ResonanceParams,
) -> Result<Option<Vec<Integer>>, ResonanceError> {
    let prec = params.precision_bits;
    let mut powers = vec![Float::with_val(prec, 1)];
    for deg in 1..=params.max_poly_degree {
        powers.push((powers.last().unwrap() * x).complete(prec));
        if let Some(rel) = pslq::find_relation(&powers, &params.h_bound, prec)
            .map_err(ResonanceError::Relation)?
        {
            let _ = deg;
            return Ok(Some(rel.coefficients));
        }
    }
    Ok(None)
}

fn classify_class(
    r: &Float,
    members: &[HiEigen],
    base: Base,
    params: &ResonanceParams,
) -> Result<ClassReport, ResonanceError> {
    let prec = params.precision_bits;
    let delta = delta_set(r, members, prec);
    let r_f64 = r.to_f64();

    if let Some(witness) = check_condition_i(&delta, params)? {
        return Ok(ClassReport {
            r: r_f64,
            outcome: ClassOutcome::ResonantConditionI { witness },
            discarded: vec![],
        });
    }

    let log_b_r = if *r == 1u32 {
        HpReal::Exact(Rational::new())
    } else {
        let ln_b = Float::with_val(prec, base.get()).ln();
        HpReal::Approx(r.clone().ln() / ln_b)
    };
    let cond_ii = check_condition_ii(&log_b_r, &delta.generators, params)?;
    if let Some(witness) = cond_ii.witness {
        return Ok(ClassReport {
            r: r_f64,
            outcome: ClassOutcome::ResonantConditionII { witness },
            discarded: cond_ii.discarded,
        });
    }

    // Both conditions cleared up to the bound. That clearance is structural
    // only if every numeric generator is algebraic: then a hidden relation
    // would force log_b r to be algebraic, hence rational, which the search
    // has excluded. A generator without a detected minimal polynomial
    // leaves Q-independence genuinely open.
    for g in &delta.generators {
        if let HpReal::Approx(x) = g {
            if minimal_polynomial(x, params)?.is_none() {
                return Ok(ClassReport {
                    r: r_f64,
                    outcome: ClassOutcome::Inconclusive {
                        reason: format!(
                            "generator {:.6} not certified algebraic up to degree {}; \
                             rational independence is an open question at this level",
                            x.to_f64(),
                            params.max_poly_degree
                        ),
                    },
                    discarded: cond_ii.discarded,
                });
            }
        }
    }
    Ok(ClassReport {
        r: r_f64,
        outcome: ClassOutcome::NoRelationFound {
            h: params.h_bound.clone(),
            precision_bits: prec,
        },
        discarded: cond_ii.discarded,
    })
}

/// Group a high-precision spectrum into modulus classes (zero eigenvalues
/// dropped) and classify each; the overall verdict is resonant if any class
/// is resonant, inconclusive if any class is undecided, and clear otherwise.
pub fn classify_spectrum(
    spectrum: &HiSpectrum,
    base: Base,
    params: &ResonanceParams,
) -> Result<ResonanceVerdict, ResonanceError> {
    let prec = spectrum.prec;
    let mut nonzero: Vec<&HiEigen> = spectrum
        .eigenvalues
        .iter()
        .filter(|e| !e.modulus.is_zero())
        .collect();
    nonzero.sort_by(|a, b| a.modulus.partial_cmp(&b.modulus).unwrap());
    let mut classes: Vec<Vec<HiEigen>> = Vec::new();
    for e in nonzero {
        let fits = classes.last().is_some_and(|c| {
            let r = &c[0].modulus;
            let diff = (&e.modulus - r).complete(prec).abs();
            diff < r.clone() * tiny(prec)
        });
        if fits {
            classes.last_mut().unwrap().push(e.clone());
        } else {
            classes.push(vec![e.clone()]);
        }
    }
    let mut reports = Vec::new();
    for members in &classes {
        let r = members[0].modulus.clone();
        reports.push(classify_class(&r, members, base, params)?);
    }
    let overall = overall_of(&reports);
    Ok(ResonanceVerdict {
        classes: reports,
        overall,
    })
}

fn overall_of(reports: &[ClassReport]) -> Overall {
    let mut saw_inconclusive = false;
    for rep in reports {
        match rep.outcome {
            ClassOutcome::ResonantConditionI { .. } | ClassOutcome::ResonantConditionII { .. } => {
                return Overall::Resonant
            }
            ClassOutcome::Inconclusive { .. } => saw_inconclusive = true,
            ClassOutcome::NoRelationFound { .. } => {}
        }
    }
    if saw_inconclusive {
        Overall::Inconclusive
    } else {
        Overall::NonresonantUpToBound
    }
}

/// Search N = 1..N_max (extended by the least common multiple of any
/// rational-angle denominators, the only powers that can collapse a
/// condition-(i) failure) for the first power whose spectrum clears.
pub fn classify_power_nonresonance(
    spectrum: &HiSpectrum,
    base: Base,
    n_max: u32,
    params: &ResonanceParams,
) -> Result<Option<(u32, ResonanceVerdict)>, ResonanceError> {
    let mut candidates: std::collections::BTreeSet<u32> = (1..=n_max.max(1)).collect();
    let mut lcm = Integer::from(1);
    for e in &spectrum.eigenvalues {
        if let HpReal::Exact(q) = &e.angle {
            lcm = lcm.lcm(q.denom());
        }
    }
    if let Some(l) = lcm.to_u32() {
        if l > 0 {
            candidates.insert(l);
        }
    }
    for n in candidates {
        let powered = spectrum.power(n);
        let verdict = classify_spectrum(&powered, base, params)?;
        if verdict.overall == Overall::NonresonantUpToBound {
            return Ok(Some((n, verdict)));
        }
    }
    Ok(None)
}

/// Matrix front end for the power search, optionally restricted to the
/// extremal peripheral spectrum.
pub fn classify_power_matrix(
    a: &Matrix,
    base: Base,
    n_max: u32,
    use_ep: bool,
    params: &ResonanceParams,
) -> Result<Option<(u32, ResonanceVerdict)>, ResonanceError> {
    let mut hi = HiSpectrum::from_matrix(a, params.precision_bits)?;
    if use_ep {
        let ep = spectral::extremal_peripheral_spectrum(a)?;
        match ep {
            PeripheralSpectrum::Nilpotent => return Ok(None),
            PeripheralSpectrum::Class { members, .. } => {
                hi.eigenvalues.retain(|e| {
                    let z = hi_to_complex(e);
                    members.iter().any(|m| {
                        (z - m.value).norm() <= 1e-6 * (1.0 + m.value.norm())
                    })
                });
            }
        }
    }
    classify_power_nonresonance(&hi, base, n_max, params)
}

fn hi_to_complex(e: &HiEigen) -> crate::numkit::ComplexVal {
    let r = e.modulus.to_f64();
    let theta = e.angle.to_f64() * std::f64::consts::TAU;
    crate::numkit::ComplexVal::new(r * theta.cos(), r * theta.sin())
}

#[derive(Debug, Clone)]
pub enum PositiveOutcome {
    /// No power of the matrix became entrywise positive within the bound.
    NotApplicable,
    /// log_b of the spectral radius cleared the rationality search: the
    /// nonnegative-data observables are predicted Benford.
    BenfordPredicted { h: Integer, precision_bits: u32 },
    /// log_b of the spectral radius is rational; nothing is Benford.
    NotBenford { log_value: Rational },
}

#[derive(Debug, Clone)]
pub struct PositiveCaseReport {
    pub positivity_index: Option<u32>,
    pub r_sigma: f64,
    pub outcome: PositiveOutcome,
}

/// For eventually positive matrices the whole resonance question collapses
/// to one number: the verdict is decided by rationality of log_b r_sigma.
pub fn classify_positive_case(
    a: &Matrix,
    base: Base,
    params: &ResonanceParams,
) -> Result<PositiveCaseReport, ResonanceError> {
    let d = a.nrows() as u32;
    let bound = (d * d).saturating_sub(2 * d).saturating_add(2).max(64);
    let Some(idx) = spectral::positivity_index(a, bound) else {
        return Ok(PositiveCaseReport {
            positivity_index: None,
            r_sigma: spectral::eigenvalues(a)?.r_sigma,
            outcome: PositiveOutcome::NotApplicable,
        });
    };
    let prec = params.precision_bits;
    let hi = HiSpectrum::from_matrix(a, prec)?;
    let r = hi
        .eigenvalues
        .iter()
        .map(|e| e.modulus.clone())
        .max_by(|x, y| x.partial_cmp(y).unwrap())
        .expect("positive matrix has a spectrum");
    let ln_b = Float::with_val(prec, base.get()).ln();
    let log_b_r = r.clone().ln() / ln_b;
    let xs = vec![log_b_r, Float::with_val(prec, 1)];
    let rel = pslq::find_relation(&xs, &params.h_bound, prec)
        .map_err(ResonanceError::Relation)?;
    let outcome = match rel {
        Some(rel) => PositiveOutcome::NotBenford {
            log_value: Rational::from((
                -rel.coefficients[1].clone(),
                rel.coefficients[0].clone(),
            )),
        },
        None => PositiveOutcome::BenfordPredicted {
            h: params.h_bound.clone(),
            precision_bits: prec,
        },
    };
    Ok(PositiveCaseReport {
        positivity_index: Some(idx),
        r_sigma: r.to_f64(),
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ResonanceParams {
        ResonanceParams::default()
    }

    fn b10() -> Base {
        Base::new(10).unwrap()
    }

    fn fib_spectrum() -> HiSpectrum {
        let a = spectral::companion_matrix(&[1.0, 1.0]).unwrap();
        HiSpectrum::from_matrix(&a, 256).unwrap()
    }

    #[test]
    fn refinement_reaches_full_precision() {
        let hi = fib_spectrum();
        let phi = (Float::with_val(256, 5).sqrt() + 1u32) / 2u32;
        let m = hi
            .eigenvalues
            .iter()
            .map(|e| e.modulus.clone())
            .max_by(|x, y| x.partial_cmp(y).unwrap())
            .unwrap();
        let err = (m - phi).abs();
        assert!(err < Float::with_val(256, Float::i_exp(1, -240)));
    }

    #[test]
    fn delta_singleton_positive_real() {
        let hi = HiSpectrum::from_polar_exprs(&[("2", "0")], 256).unwrap();
        let d = delta_set(&hi.eigenvalues[0].modulus, &hi.eigenvalues, 256);
        assert_eq!(d.values.len(), 1);
        assert!(d.values[0].is_one(256));
        assert!(d.generators.is_empty());
    }

    #[test]
    fn delta_conjugate_pair() {
        let hi =
            HiSpectrum::from_polar_exprs(&[("sqrt(5)", "pi/sqrt(8)"), ("sqrt(5)", "-pi/sqrt(8)")], 256)
                .unwrap();
        let d = delta_set(&hi.eigenvalues[0].modulus, &hi.eigenvalues, 256);
        // {1, 1 +- arg/pi}
        assert_eq!(d.values.len(), 3);
        let mut vals: Vec<f64> = d.values.iter().map(|v| v.to_f64()).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let a = 1.0 / 8f64.sqrt();
        assert!((vals[0] - (1.0 - a)).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!((vals[2] - (1.0 + a)).abs() < 1e-12);
        // one generator: |arg|/2pi = sqrt(2)/8
        assert_eq!(d.generators.len(), 1);
        assert!((d.generators[0].to_f64() - 2f64.sqrt() / 8.0).abs() < 1e-12);
    }

    #[test]
    fn delta_plus_minus_r() {
        let hi = HiSpectrum::from_polar_exprs(&[("3", "0"), ("3", "pi")], 256).unwrap();
        let d = delta_set(&hi.eigenvalues[0].modulus, &hi.eigenvalues, 256);
        let has = |x: f64| d.values.iter().any(|v| (v.to_f64() - x).abs() < 1e-12);
        assert!(has(0.5) && has(1.0) && has(1.5));
        // the negative member's angle is stored exactly
        assert!(matches!(
            delta_set(&hi.eigenvalues[1].modulus, &hi.eigenvalues[1..], 256).generators[0],
            HpReal::Exact(_)
        ));
    }

    #[test]
    fn condition_i_rational_hit() {
        let hi = HiSpectrum::from_polar_exprs(&[("3", "0"), ("3", "pi")], 256).unwrap();
        let d = delta_set(&hi.eigenvalues[0].modulus, &hi.eigenvalues, 256);
        let w = check_condition_i(&d, &params()).unwrap().unwrap();
        assert!(w == Rational::from((1u32, 2u32)) || w == Rational::from((3u32, 2u32)));
    }

    #[test]
    fn condition_i_clears_sqrt2_angle() {
        let hi =
            HiSpectrum::from_polar_exprs(&[("sqrt(5)", "pi/sqrt(8)"), ("sqrt(5)", "-pi/sqrt(8)")], 256)
                .unwrap();
        let d = delta_set(&hi.eigenvalues[0].modulus, &hi.eigenvalues, 256);
        assert!(check_condition_i(&d, &params()).unwrap().is_none());
    }

    #[test]
    fn condition_ii_r_equal_one_resonant() {
        let out = check_condition_ii(&HpReal::Exact(Rational::new()), &[], &params()).unwrap();
        assert!(out.witness.is_some());
    }

    #[test]
    fn condition_ii_witness_for_log_generator() {
        // r = sqrt5, generator log10(5)/4: witness (1, 0, -2)
        let prec = 256;
        let l5 = Float::with_val(prec, 5).log10();
        let log_r = HpReal::Approx(l5.clone() / 2u32);
        let gens = vec![HpReal::Approx(l5 / 4u32)];
        let out = check_condition_ii(&log_r, &gens, &params()).unwrap();
        let w: Vec<i64> = out
            .witness
            .unwrap()
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect();
        assert_eq!(w, vec![1, 0, -2]);
    }

    #[test]
    fn classify_fibonacci_nonresonant() {
        let v = classify_spectrum(&fib_spectrum(), b10(), &params()).unwrap();
        assert_eq!(v.overall, Overall::NonresonantUpToBound);
        assert_eq!(v.classes.len(), 2);
    }

    #[test]
    fn classify_one_pi_resonant() {
        let hi = HiSpectrum::from_polar_exprs(&[("1", "0"), ("pi", "0")], 256).unwrap();
        let v = classify_spectrum(&hi, b10(), &params()).unwrap();
        assert_eq!(v.overall, Overall::Resonant);
        // the r = 1 class is the resonant one
        let c1 = v.classes.iter().find(|c| (c.r - 1.0).abs() < 1e-12).unwrap();
        assert!(matches!(
            c1.outcome,
            ClassOutcome::ResonantConditionII { .. }
        ));
    }

    #[test]
    fn classify_gamma_families() {
        // gamma = sqrt5 cos(pi/sqrt8): nonresonant (generator sqrt2/8 algebraic)
        let hi =
            HiSpectrum::from_polar_exprs(&[("sqrt(5)", "pi/sqrt(8)"), ("sqrt(5)", "-pi/sqrt(8)")], 256)
                .unwrap();
        let v = classify_spectrum(&hi, b10(), &params()).unwrap();
        assert_eq!(v.overall, Overall::NonresonantUpToBound);

        // gamma = sqrt5 cos(pi log10(5)/2): resonant with witness (1,0,-2)
        let hi = HiSpectrum::from_polar_exprs(
            &[
                ("sqrt(5)", "pi*log10(5)/2"),
                ("sqrt(5)", "-pi*log10(5)/2"),
            ],
            256,
        )
        .unwrap();
        let v = classify_spectrum(&hi, b10(), &params()).unwrap();
        assert_eq!(v.overall, Overall::Resonant);
        match &v.classes[0].outcome {
            ClassOutcome::ResonantConditionII { witness } => {
                let w: Vec<i64> = witness.iter().map(|c| c.to_i64().unwrap()).collect();
                assert_eq!(w, vec![1, 0, -2]);
            }
            other => panic!("expected condition-II witness, got {other:?}"),
        }

        // gamma = 1: generator atan(2)/2pi, not certified algebraic
        let hi = HiSpectrum::from_polar_exprs(
            &[("sqrt(5)", "atan(2)"), ("sqrt(5)", "-atan(2)")],
            256,
        )
        .unwrap();
        let v = classify_spectrum(&hi, b10(), &params()).unwrap();
        assert_eq!(v.overall, Overall::Inconclusive);
    }

    #[test]
    fn classify_ten_pow_pi_resonant() {
        // {10^pi e^(+-i pi^2)}: log10 r = pi lies in span{1, pi/2}
        let hi = HiSpectrum::from_polar_exprs(
            &[("10^pi", "pi^2"), ("10^pi", "-(pi^2)")],
            256,
        )
        .unwrap();
        let v = classify_spectrum(&hi, b10(), &params()).unwrap();
        assert_eq!(v.overall, Overall::Resonant);
        assert!(matches!(
            v.classes[0].outcome,
            ClassOutcome::ResonantConditionII { .. }
        ));
    }

    #[test]
    fn power_search_minus_pi_pi() {
        let hi = HiSpectrum::from_polar_exprs(&[("pi", "0"), ("pi", "pi")], 256).unwrap();
        let (n, v) = classify_power_nonresonance(&hi, b10(), 16, &params())
            .unwrap()
            .unwrap();
        assert_eq!(n, 2);
        assert_eq!(v.overall, Overall::NonresonantUpToBound);
    }

    #[test]
    fn power_search_monotone_at_one() {
        let a = spectral::companion_matrix(&[1.0, 1.0]).unwrap();
        let (n, _) = classify_power_matrix(&a, b10(), 16, false, &params())
            .unwrap()
            .unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn power_search_never_clears_for_ten_pow_pi() {
        let hi = HiSpectrum::from_polar_exprs(
            &[("10^pi", "pi^2"), ("10^pi", "-(pi^2)")],
            256,
        )
        .unwrap();
        let out = classify_power_nonresonance(&hi, b10(), 6, &params()).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn subset_monotonicity_on_clear_class() {
        let hi = fib_spectrum();
        let v = classify_spectrum(&hi, b10(), &params()).unwrap();
        assert_eq!(v.overall, Overall::NonresonantUpToBound);
        for drop_idx in 0..hi.eigenvalues.len() {
            let mut sub = hi.clone();
            sub.eigenvalues.remove(drop_idx);
            let v = classify_spectrum(&sub, b10(), &params()).unwrap();
            assert_ne!(v.overall, Overall::Resonant);
        }
    }

    #[test]
    fn conjugate_collapse_representative_free() {
        let forward =
            HiSpectrum::from_polar_exprs(&[("sqrt(5)", "pi/sqrt(8)"), ("sqrt(5)", "-pi/sqrt(8)")], 256)
               .unwrap();
        let reversed =
            HiSpectrum::from_polar_exprs(&[("sqrt(5)", "-pi/sqrt(8)"), ("sqrt(5)", "pi/sqrt(8)")], 256)
                .unwrap();
        let va = classify_spectrum(&forward, b10(), &params()).unwrap();
        let vb = classify_spectrum(&reversed, b10(), &params()).unwrap();
        assert_eq!(va.overall, vb.overall);
        let d = delta_set(&forward.eigenvalues[0].modulus, &forward.eigenvalues, 256);
        assert!(d.generators.len() <= 1);
    }

    #[test]
    fn positive_case_base_dependence() {
        // eigenvalues {2, -1 +- i sqrt2}; A^5 entrywise positive
        let a = Matrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 6.0, 1.0, 0.0],
        );
        let rep = classify_positive_case(&a, b10(), &params()).unwrap();
        assert_eq!(rep.positivity_index, Some(5));
        assert!((rep.r_sigma - 2.0).abs() < 1e-12);
        assert!(matches!(rep.outcome, PositiveOutcome::BenfordPredicted { .. }));

        let rep8 = classify_positive_case(&a, Base::new(8).unwrap(), &params()).unwrap();
        match rep8.outcome {
            PositiveOutcome::NotBenford { log_value } => {
                assert_eq!(log_value, Rational::from((1u32, 3u32)));
            }
            other => panic!("expected rational log, got {other:?}"),
        }
    }

    #[test]
    fn positive_case_not_applicable() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let rep = classify_positive_case(&a, b10(), &params()).unwrap();
        assert!(matches!(rep.outcome, PositiveOutcome::NotApplicable));
    }

    #[test]
    fn minimal_polynomial_of_sqrt2_over_8() {
        let x = Float::with_val(256, 2).sqrt() / 8u32;
        let p = minimal_polynomial(&x, &params()).unwrap().unwrap();
        // x^2 = 1/32, so the relation over (1, x, x^2) is (1, 0, -32)
        let ints: Vec<i64> = p.iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(ints, vec![1, 0, -32]);
    }

    #[test]
    fn minimal_polynomial_rejects_pi() {
        let x = Float::with_val(256, Constant::Pi);
        assert!(minimal_polynomial(&x, &params()).unwrap().is_none());
    }
}
