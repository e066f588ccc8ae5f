//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them on success).

use linben::cli;
use linben::linrec::{self, BilinearSpec, RecurrenceSpec, ZeroStructure};
use linben::numkit::{Base, ComplexVal, PrecisionMode};
use linben::resonance::{
    self, ClassOutcome, HiSpectrum, Overall, PositiveOutcome, ResonanceParams,
};
use linben::specfun::{self, BreakingSearch, QmcBudget};
use linben::spectral::{self, Matrix, PeripheralSpectrum};
use linben::udist;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn report(id: u32, name: &str, ok: bool) {
    println!(
        "acceptance {:02} {}: {}",
        id,
        name,
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "acceptance criterion {id} ({name}) failed");
}

fn base10() -> Base {
    Base::new(10).unwrap()
}

fn params() -> ResonanceParams {
    ResonanceParams::default()
}

fn mat(rows: usize, data: &[f64]) -> Matrix {
    Matrix::from_row_slice(rows, data.len() / rows, data)
}

/// The two-dimensional rotation-by-pi^2 example scaled by 10^pi.
fn matrix_a_314() -> Matrix {
    let p2 = std::f64::consts::PI * std::f64::consts::PI;
    let s = 10f64.powf(std::f64::consts::PI);
    mat(2, &[s * p2.cos(), -s * p2.sin(), s * p2.sin(), s * p2.cos()])
}

fn matrix_b_314() -> Matrix {
    let p2 = std::f64::consts::PI * std::f64::consts::PI;
    let s = 10f64.powf(std::f64::consts::PI) / 3f64.sqrt();
    mat(
        2,
        &[
            s * 3f64.sqrt() * p2.cos(),
            -s * 3.0 * p2.sin(),
            s * p2.sin(),
            s * 3f64.sqrt() * p2.cos(),
        ],
    )
}

/// Symmetric matrix with spectrum {1, pi}.
fn matrix_c() -> Matrix {
    let pi = std::f64::consts::PI;
    mat(
        2,
        &[
            (1.0 + pi) / 2.0,
            (1.0 - pi) / 2.0,
            (1.0 - pi) / 2.0,
            (1.0 + pi) / 2.0,
        ],
    )
}

/// 6x6 block diagonal: Jordan blocks for +2 and -2, and a modulus-2
/// rotation block through angle pi*log10(2).
fn matrix_block_six() -> Matrix {
    let t = std::f64::consts::PI * 2f64.log10();
    let s = 2.0 / 3f64.sqrt();
    let mut a = Matrix::zeros(6, 6);
    a[(0, 0)] = 2.0;
    a[(0, 1)] = 1.0;
    a[(1, 1)] = 2.0;
    a[(2, 2)] = -2.0;
    a[(2, 3)] = 1.0;
    a[(3, 3)] = -2.0;
    a[(4, 4)] = s * 3f64.sqrt() * t.cos();
    a[(4, 5)] = -s * 3.0 * t.sin();
    a[(5, 4)] = s * t.sin();
    a[(5, 5)] = s * 3f64.sqrt() * t.cos();
    a
}

fn digit_percentages(gamma: f64) -> Vec<f64> {
    let spec = RecurrenceSpec::new(vec![2.0 * gamma, -5.0], vec![1.0, 1.0]).unwrap();
    let seq = linrec::simulate_recurrence(&spec, 10_000, PrecisionMode::Extended).unwrap();
    let hist = udist::digit_histogram(&seq, base10());
    (1..=9).map(|d| hist.percent(d)).collect()
}

#[test]
fn criterion_01_figure1_rows() {
    let frozen: [(&str, [f64; 9]); 3] = [
        (
            "gamma=0.9928",
            [29.99, 17.43, 12.82, 9.58, 7.93, 6.70, 6.01, 5.02, 4.52],
        ),
        (
            "gamma=1.018",
            [43.68, 7.77, 7.20, 6.87, 6.68, 6.62, 6.71, 6.99, 7.48],
        ),
        (
            "gamma=1",
            [29.99, 17.23, 12.78, 9.51, 7.92, 6.61, 6.01, 5.19, 4.76],
        ),
    ];
    let mut ok = true;
    for ((label, expected), (_, gamma)) in frozen.iter().zip(cli::reference_gammas()) {
        let start = Instant::now();
        let got = digit_percentages(gamma);
        let elapsed = start.elapsed();
        for (g, e) in got.iter().zip(expected.iter()) {
            if (g - e).abs() > 0.02 {
                eprintln!("{label}: got {g:.3}, expected {e}");
                ok = false;
            }
        }
        if elapsed.as_secs_f64() >= 5.0 {
            eprintln!("{label}: row took {elapsed:?}");
            ok = false;
        }
    }
    report(1, "figure-1 digit rows", ok);
}

#[test]
fn criterion_02_exact_benford_row() {
    let frozen = [30.10, 17.60, 12.49, 9.69, 7.91, 6.69, 5.79, 5.11, 4.57];
    let csv = cli::figure1_csv(PrecisionMode::Extended).unwrap();
    let exact_line = csv
        .lines()
        .find(|l| l.starts_with("exact-benford"))
        .unwrap();
    let printed: Vec<f64> = exact_line
        .split(',')
        .skip(1)
        .map(|v| v.parse().unwrap())
        .collect();
    let mut ok = printed.len() == 9;
    for (d, (p, e)) in printed.iter().zip(frozen.iter()).enumerate() {
        let exact = 100.0 * udist::benford_probability(base10(), (d + 1) as u32);
        if (p - e).abs() > 5e-3 || (p - exact).abs() > 0.01 {
            eprintln!("digit {}: printed {p}, frozen {e}, exact {exact}", d + 1);
            ok = false;
        }
    }
    report(2, "exact reference probabilities row", ok);
}

#[test]
fn criterion_03_figure2_deviations() {
    let start = Instant::now();
    let near = digit_percentages(5f64.sqrt() * (std::f64::consts::PI / 8f64.sqrt()).cos());
    let beta_near: f64 = (1..=9)
        .map(|d| {
            (near[d - 1] / 100.0 - udist::benford_probability(base10(), d as u32)).abs()
        })
        .fold(0.0, f64::max);
    let far = digit_percentages(5f64.sqrt() * (0.5 * std::f64::consts::PI * 5f64.log10()).cos());
    let beta_far: f64 = (1..=9)
        .map(|d| (far[d - 1] / 100.0 - udist::benford_probability(base10(), d as u32)).abs())
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let ok = beta_near < 0.01 && beta_far >= 0.13 && elapsed.as_secs_f64() < 10.0;
    if !ok {
        eprintln!("beta(0.9928)={beta_near}, beta(1.018)={beta_far}, took {elapsed:?}");
    }
    report(3, "digit-deviation magnitudes at N=10^4", ok);
}

#[test]
fn criterion_04_oracle_grid() {
    let start = Instant::now();
    let mut ok = true;
    for p in 0..=5i64 {
        for beta in [0.25, 1.0, 2.5, 2.0 * std::f64::consts::PI] {
            let closed = specfun::i_closed(p, beta).unwrap();
            let quad = specfun::i_quadrature(p, beta, 1e-8).unwrap();
            if (closed - quad.value).norm() > 1e-8 {
                eprintln!("p={p} beta={beta}: closed/quadrature gap");
                ok = false;
            }
            if (closed.norm_sqr() - specfun::i_modulus_squared(p, beta)).abs() > 1e-10 {
                eprintln!("p={p} beta={beta}: modulus law violated");
                ok = false;
            }
        }
    }
    if start.elapsed().as_secs() >= 30 {
        ok = false;
    }
    report(4, "oscillatory-integral oracle agreement", ok);
}

#[test]
fn criterion_05_boundary_ratio() {
    let mut ok = true;
    for beta in [0.5, 1.0, 2.0] {
        let top = specfun::i_func(1, beta, 1.0, 1e-8).unwrap().value.norm_sqr();
        let bottom = specfun::i_func(1, beta, 0.0, 1e-8).unwrap().value.norm_sqr();
        let expected = 0.5 * (1.0 + 1.0 / (2.0 * std::f64::consts::PI * beta).cosh());
        if (top / bottom - expected).abs() > 1e-6 {
            eprintln!("beta={beta}: ratio {} vs {expected}", top / bottom);
            ok = false;
        }
    }
    report(5, "boundary-value modulus ratio", ok);
}

#[test]
fn criterion_06_alternating_sum_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut ok = true;
    for m in 0..=8u32 {
        for _ in 0..20 {
            let r = 5.0 * rng.gen::<f64>().sqrt();
            let t = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let z = ComplexVal::new(r * t.cos(), r * t.sin());
            let s = specfun::r_poly_sum(m, z);
            let p = specfun::r_poly_product(m, z);
            let scale = s.norm().max(p.norm()).max(1.0);
            if (s - p).norm() > 1e-9 * scale {
                eprintln!("m={m} z={z}: relative deviation too large");
                ok = false;
            }
        }
    }
    report(6, "alternating-sum vs product identity", ok);
}

#[test]
fn criterion_07_resonance_verdicts() {
    let prm = params();
    let mut ok = true;

    // Fibonacci: golden-ratio pair, clear at the default bounds
    let fib = HiSpectrum::from_poly(&[1.0, -1.0, -1.0], prm.precision_bits).unwrap();
    let v = resonance::classify_spectrum(&fib, base10(), &prm).unwrap();
    if v.overall != Overall::NonresonantUpToBound {
        eprintln!("fibonacci: {:?}", v.overall);
        ok = false;
    }

    // modulus sqrt5, angle pi*log10(5)/2: resonant through the relation
    // log10(sqrt5) - 2 * angle/(2 pi) = ... with witness (1, 0, -2)
    let res = HiSpectrum::from_polar_exprs(
        &[("sqrt(5)", "pi*log10(5)/2"), ("sqrt(5)", "-pi*log10(5)/2")],
        prm.precision_bits,
    )
    .unwrap();
    let v = resonance::classify_spectrum(&res, base10(), &prm).unwrap();
    let witness_ok = v.classes.iter().any(|c| {
        matches!(
            &c.outcome,
            ClassOutcome::ResonantConditionII { witness }
                if witness.iter().map(|z| z.to_i64().unwrap()).collect::<Vec<_>>()
                    == vec![1, 0, -2]
        )
    });
    if v.overall != Overall::Resonant || !witness_ok {
        eprintln!("sqrt5 rotation family: {v:?}");
        ok = false;
    }

    // spectrum {1, pi}: resonant through the modulus-1 class
    let one_pi = HiSpectrum::from_polar_exprs(&[("1", "0"), ("pi", "0")], prm.precision_bits)
        .unwrap();
    let v = resonance::classify_spectrum(&one_pi, base10(), &prm).unwrap();
    let r1_resonant = v.classes.iter().any(|c| {
        (c.r - 1.0).abs() < 1e-9
            && matches!(c.outcome, ClassOutcome::ResonantConditionII { .. })
    });
    if v.overall != Overall::Resonant || !r1_resonant {
        eprintln!("{{1, pi}} spectrum: {v:?}");
        ok = false;
    }

    // modulus sqrt5, angle atan(2): the open case must stay inconclusive
    let open = HiSpectrum::from_polar_exprs(
        &[("sqrt(5)", "atan(2)"), ("sqrt(5)", "-atan(2)")],
        prm.precision_bits,
    )
    .unwrap();
    let v = resonance::classify_spectrum(&open, base10(), &prm).unwrap();
    if v.overall != Overall::Inconclusive {
        eprintln!("atan(2) family: {:?}", v.overall);
        ok = false;
    }

    report(7, "nonresonance classification verdicts", ok);
}

#[test]
fn criterion_08_zero_densities() {
    let mut ok = true;
    let n = 10_000;

    // eigenvalues +-r: observable vanishes exactly at odd n
    let r = 3.0;
    let spec = BilinearSpec::new(
        mat(2, &[r, 0.0, 0.0, -r]),
        DVector::from_vec(vec![1.0, 1.0]),
        DVector::from_vec(vec![1.0, 1.0]),
    )
    .unwrap();
    let seq = linrec::simulate_bilinear(&spec, n, PrecisionMode::Extended).unwrap();
    let rep = linrec::zero_set(&seq, 2);
    let brute: Vec<usize> = (1..=n).filter(|k| k % 2 == 1).collect();
    if rep.density_estimate != 0.5
        || rep.zero_indices != brute
        || rep.structure != ZeroStructure::LatticeUnion(vec![(2, 1)])
    {
        eprintln!("+-r construction: {rep:?}");
        ok = false;
    }

    // quarter-turn rotation observed off-axis: vanishes exactly at even n
    let spec = BilinearSpec::new(
        mat(2, &[0.0, -r, r, 0.0]),
        DVector::from_vec(vec![0.0, 1.0]),
        DVector::from_vec(vec![1.0, 0.0]),
    )
    .unwrap();
    let seq = linrec::simulate_bilinear(&spec, n, PrecisionMode::Extended).unwrap();
    let rep = linrec::zero_set(&seq, 2);
    let brute: Vec<usize> = (1..=n).filter(|k| k % 2 == 0).collect();
    if rep.density_estimate != 0.5
        || rep.zero_indices != brute
        || rep.structure != ZeroStructure::LatticeUnion(vec![(2, 2)])
    {
        eprintln!("quarter-turn rotation: {rep:?}");
        ok = false;
    }

    report(8, "zero-set densities and lattices", ok);
}

#[test]
fn criterion_09_extremal_peripheral_and_power_search() {
    let prm = params();
    let mut ok = true;

    // symmetric {1, pi} matrix: extremal peripheral part is {pi}; for the
    // inverse it is {1}
    let c = matrix_c();
    match spectral::extremal_peripheral_spectrum(&c).unwrap() {
        PeripheralSpectrum::Class { r, members, .. }
            if (r - std::f64::consts::PI).abs() < 1e-9 && members.len() == 1 => {}
        other => {
            eprintln!("extremal part of C: {other:?}");
            ok = false;
        }
    }
    let c_inv = c.clone().try_inverse().unwrap();
    match spectral::extremal_peripheral_spectrum(&c_inv).unwrap() {
        PeripheralSpectrum::Class { r, members, .. }
            if (r - 1.0).abs() < 1e-9 && members.len() == 1 => {}
        other => {
            eprintln!("extremal part of C^-1: {other:?}");
            ok = false;
        }
    }

    // 6x6 block example: the power search with extremal filtering settles
    // at N = 2, where the extremal part of the square is {4}
    let a6 = matrix_block_six();
    match resonance::classify_power_matrix(&a6, base10(), 16, true, &prm).unwrap() {
        Some((2, v)) if v.overall == Overall::NonresonantUpToBound => {}
        other => {
            eprintln!("block example power search: {other:?}");
            ok = false;
        }
    }
    let a6sq = &a6 * &a6;
    match spectral::extremal_peripheral_spectrum(&a6sq).unwrap() {
        PeripheralSpectrum::Class { members, .. }
            if members.len() == 1 && (members[0].value.re - 4.0).abs() < 1e-6 => {}
        other => {
            eprintln!("extremal part of square: {other:?}");
            ok = false;
        }
    }

    // scaled rotation by pi^2: no power clears within N_max = 16
    let a = matrix_a_314();
    match resonance::classify_power_matrix(&a, base10(), 16, true, &prm).unwrap() {
        None => {}
        Some((n, _)) => {
            eprintln!("rotation example unexpectedly cleared at N={n}");
            ok = false;
        }
    }

    report(9, "extremal peripheral spectra and power search", ok);
}

#[test]
fn criterion_10_positivity_pipeline() {
    let prm = params();
    let mut ok = true;
    let a = mat(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 6.0, 1.0, 0.0]);

    let rep = resonance::classify_positive_case(&a, base10(), &prm).unwrap();
    if rep.positivity_index != Some(5) {
        eprintln!("positivity index: {:?}", rep.positivity_index);
        ok = false;
    }
    if (rep.r_sigma - 2.0).abs() > 1e-10 {
        eprintln!("spectral radius: {}", rep.r_sigma);
        ok = false;
    }
    if !matches!(rep.outcome, PositiveOutcome::BenfordPredicted { .. }) {
        eprintln!("base-10 outcome: {:?}", rep.outcome);
        ok = false;
    }

    let spec = BilinearSpec::new(
        a.clone(),
        DVector::from_vec(vec![1.0, 0.0, 0.0]),
        DVector::from_vec(vec![1.0, 0.0, 0.0]),
    )
    .unwrap();
    let seq = linrec::simulate_bilinear(&spec, 10_000, PrecisionMode::Extended).unwrap();
    let hist = udist::digit_histogram(&seq, base10());
    let beta = udist::benford_digit_deviation(&hist).unwrap();
    if beta > 0.02 {
        eprintln!("empirical digit deviation: {beta}");
        ok = false;
    }

    let rep8 = resonance::classify_positive_case(&a, Base::new(8).unwrap(), &prm).unwrap();
    match &rep8.outcome {
        PositiveOutcome::NotBenford { log_value }
            if *log_value == rug::Rational::from((1, 3)) => {}
        other => {
            eprintln!("base-8 outcome: {other:?}");
            ok = false;
        }
    }

    report(10, "positive-case pipeline", ok);
}

#[test]
fn criterion_11_closed_form_norms() {
    let mut ok = true;

    // oscillating vector norm: |B^n e2| = 10^(pi n) sqrt(2 - cos(2 pi^2 n))
    let b = matrix_b_314();
    let e2 = DVector::from_vec(vec![0.0, 1.0]);
    let seq = linrec::simulate_vector_norm(&b, &e2, 50);
    let pi = std::f64::consts::PI;
    for (i, v) in seq.iter().enumerate() {
        let n = (i + 1) as f64;
        let expected = n * pi * 10f64.ln() + 0.5 * (2.0 - (2.0 * pi * pi * n).cos()).ln();
        if (v.lnmag() - expected).abs() > 1e-8 * expected.abs() {
            eprintln!("n={n}: log norm {} vs {expected}", v.lnmag());
            ok = false;
        }
    }

    // block example: |A^n| = 2^(n-1) n (1 + alpha_n) with n^2 alpha_n -> 4
    let a6 = matrix_block_six();
    let norms = linrec::simulate_matrix_norm(&a6, 200);
    let n = 200f64;
    let base_log = (n - 1.0) * 2f64.ln() + n.ln();
    let alpha = (norms[199].lnmag() - base_log).exp_m1();
    if (n * n * alpha - 4.0).abs() > 0.1 {
        eprintln!("n^2 alpha at n=200: {}", n * n * alpha);
        ok = false;
    }

    report(11, "closed-form norm identities", ok);
}

#[test]
fn criterion_12_breaking_u() {
    let start = Instant::now();
    let mut ok = true;
    let budget = QmcBudget::default();

    match specfun::find_breaking_u(&[1], 1.0, 1e-3, &budget).unwrap() {
        BreakingSearch::Found(b) => {
            // closed-form reference: the phase factor is unimodular, so the
            // magnitude is |I(1, 2 pi)| regardless of u
            let expected = specfun::i_closed(1, 2.0 * std::f64::consts::PI)
                .unwrap()
                .norm();
            if (b.j_magnitude - expected).abs() > 1e-3 || !b.in_e_d {
                eprintln!("found u={:?} with |J|={}, expected {expected}", b.u, b.j_magnitude);
                ok = false;
            }
        }
        BreakingSearch::Failed { best } => {
            eprintln!("search failed, best {best:?}");
            ok = false;
        }
    }

    match specfun::find_breaking_u(&[1], 0.0, 1e-3, &budget).unwrap() {
        BreakingSearch::Failed { .. } => {}
        BreakingSearch::Found(b) => {
            eprintln!("degenerate search unexpectedly found {:?}", b.u);
            ok = false;
        }
    }

    if start.elapsed().as_secs() >= 60 {
        ok = false;
    }
    report(12, "breaking-parameter search", ok);
}
