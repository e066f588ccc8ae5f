//! Command-line surface: configuration parsing, job orchestration, and
//! deterministic CSV/JSON serialization of every report the library
//! produces, including the two reference figures.

use crate::linrec::{
    self, BilinearSpec, PredictInput, PredictParams, RecurrenceSpec, ZeroSetReport, ZeroStructure,
};
use crate::numkit::{Base, PrecisionMode, ScaledReal};
use crate::resonance::{
    self, ClassOutcome, HiSpectrum, Overall, ResonanceParams, ResonanceVerdict,
};
use crate::specfun::{self, BreakingSearch, QmcBudget};
use crate::spectral::{self, Matrix, PeripheralSpectrum};
use crate::udist;
use clap::{Parser, Subcommand};
use nalgebra::DVector;
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::PathBuf;

pub const SCHEMA_VERSION: u32 = 1;

const EXIT_OK: i32 = 0;
const EXIT_VALIDATION: i32 = 2;
const EXIT_NUMERIC: i32 = 3;
const EXIT_INCONCLUSIVE: i32 = 4;
const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(
    name = "linben",
    about = "Scaled-arithmetic simulation of linear recurrences, leading-digit \
             diagnostics, and spectral nonresonance classification",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Integer base for digits and logarithms (>= 2)
    #[arg(long, global = true, default_value_t = 10)]
    base: i64,
    /// Number of terms to simulate
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Cancellation-detection precision: standard or extended
    #[arg(long, global = true, default_value = "extended")]
    precision: String,
    /// Seed for all randomized components
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long, global = true)]
    format: Option<String>,
    /// Integer-relation coefficient bound H
    #[arg(long = "relation-bound", global = true, default_value_t = 1_000_000)]
    relation_bound: u64,
    /// Working precision for integer-relation detection, in bits
    #[arg(long = "relation-bits", global = true, default_value_t = 256)]
    relation_bits: u32,
    /// Largest power checked in the power-nonresonance search
    #[arg(long = "power-nmax", global = true, default_value_t = 16)]
    power_nmax: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a job and emit the term-by-term sequence
    Simulate {
        /// Path to a JSON job config, or the JSON itself
        #[arg(long)]
        config: String,
    },
    /// Leading-digit histogram of a simulated job
    Digits {
        #[arg(long)]
        config: String,
    },
    /// Equidistribution diagnostics (Weyl sums, discrepancy, digit deviation)
    BenfordTest {
        #[arg(long)]
        config: String,
    },
    /// Eigenvalues, Jordan indices, modulus classes, extremal peripheral part
    Spectrum {
        #[arg(long)]
        config: String,
    },
    /// Nonresonance classification of the job's spectrum
    Resonance {
        #[arg(long)]
        config: String,
        /// Exit with code 4 when the verdict is inconclusive
        #[arg(long)]
        require_decisive: bool,
    },
    /// Full pipeline: simulate, measure, classify, and compare
    Classify {
        #[arg(long)]
        config: String,
        #[arg(long)]
        require_decisive: bool,
    },
    /// Structure of the zero set of a simulated sequence
    ZeroDensity {
        #[arg(long)]
        config: String,
    },
    /// Special-function oracle evaluations
    Oracle {
        #[command(subcommand)]
        what: OracleCmd,
    },
    /// Leading-digit percentage table for the three reference recurrences
    Figure1,
    /// Digit-deviation decay curves for the three reference recurrences
    Figure2,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Closed form vs quadrature for the oscillatory integral family
    Ibeta {
        #[arg(long)]
        p: i64,
        #[arg(long)]
        beta: f64,
        /// Evaluate the shifted integral i(p, beta, x) instead
        #[arg(long)]
        x: Option<f64>,
    },
    /// Alternating-sum vs product form of the R_m polynomial
    Rpoly {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1.0)]
        re: f64,
        #[arg(long, default_value_t = 0.0)]
        im: f64,
    },
    /// Pushforward Fourier coefficient on the d-torus
    Pushforward {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<i64>,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<f64>,
        #[arg(long, default_value_t = 2)]
        k: i64,
    },
    /// Grid search for a parameter vector breaking uniform distribution
    BreakingU {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<i64>,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
}

/// Job payload: which object to iterate and with what data.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum Payload {
    Recurrence { coeffs: Vec<f64>, initial: Vec<f64> },
    Bilinear { matrix: Vec<Vec<f64>>, x: Vec<f64>, y: Vec<f64> },
    VectorNorm { matrix: Vec<Vec<f64>>, x: Vec<f64> },
    MatrixNorm { matrix: Vec<Vec<f64>> },
}

struct Job {
    payload: Payload,
    base: Base,
    n: usize,
    mode: PrecisionMode,
    resonance: ResonanceParams,
    power_nmax: u32,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numeric(m) => m,
        }
    }
}

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn numeric(err: impl std::fmt::Display) -> CliError {
    CliError::Numeric(err.to_string())
}

/// Entry point: parse, dispatch, and map every failure to its exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let base = Base::new(cli.base).map_err(|e| validation(format!("base: {e}")))?;
    let mode = match cli.precision.as_str() {
        "standard" => PrecisionMode::Standard,
        "extended" => PrecisionMode::Extended,
        other => {
            return Err(validation(format!(
                "precision: expected standard or extended, got {other}"
            )))
        }
    };
    let resonance_params = ResonanceParams {
        h_bound: rug::Integer::from(cli.relation_bound),
        precision_bits: cli.relation_bits.max(128),
        ..ResonanceParams::default()
    };
    let make_job = |config: &str| -> Result<Job, CliError> {
        Ok(Job {
            payload: parse_payload(config)?,
            base,
            n: cli.n.unwrap_or(10_000),
            mode,
            resonance: resonance_params.clone(),
            power_nmax: cli.power_nmax,
        })
    };
    let format = cli.format.as_deref();
    match &cli.command {
        Command::Simulate { config } => {
            let job = make_job(config)?;
            let seq = simulate_job(&job)?;
            let text = match format.unwrap_or("csv") {
                "csv" => sequence_csv(&seq, job.base),
                "json" => pretty(&sequence_json(&seq, job.base, &job)),
                other => return Err(validation(format!("format: unknown format {other}"))),
            };
            write_out(&cli.out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Digits { config } => {
            let job = make_job(config)?;
            let seq = simulate_job(&job)?;
            let hist = udist::digit_histogram(&seq, job.base);
            let text = match format.unwrap_or("csv") {
                "csv" => digits_csv(&hist, job.base),
                "json" => pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "digits",
                    "base": job.base.get(),
                    "n": job.n,
                    "histogram": hist,
                })),
                other => return Err(validation(format!("format: unknown format {other}"))),
            };
            write_out(&cli.out, &text)?;
            Ok(EXIT_OK)
        }
        Command::BenfordTest { config } => {
            let job = make_job(config)?;
            let seq = simulate_job(&job)?;
            let report = udist::sequence_report(&seq, job.base).map_err(numeric)?;
            let text = match format.unwrap_or("json") {
                "json" => pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "benford-test",
                    "base": job.base.get(),
                    "n": job.n,
                    "report": report,
                })),
                "csv" => {
                    let mut s = String::from("metric,value\n");
                    s.push_str(&format!("beta_n,{}\n", fmt17(report.beta_n)));
                    s.push_str(&format!("ks_significand,{}\n", fmt17(report.ks_significand)));
                    s.push_str(&format!(
                        "star_discrepancy,{}\n",
                        fmt17(report.star_discrepancy)
                    ));
                    for w in &report.weyl {
                        s.push_str(&format!("weyl_{},{}\n", w.k, fmt17(w.magnitude)));
                    }
                    s
                }
                other => return Err(validation(format!("format: unknown format {other}"))),
            };
            write_out(&cli.out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Spectrum { config } => {
            let job = make_job(config)?;
            let a = job_matrix(&job.payload)?;
            let doc = spectrum_json(&a).map_err(numeric)?;
            write_out(
                &cli.out,
                &pretty(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "spectrum",
                    "spectrum": doc,
                })),
            )?;
            Ok(EXIT_OK)
        }
        Command::Resonance {
            config,
            require_decisive,
        } => {
            let job = make_job(config)?;
            let a = job_matrix(&job.payload)?;
            let hi = HiSpectrum::from_matrix(&a, job.resonance.precision_bits).map_err(numeric)?;
            let verdict =
                resonance::classify_spectrum(&hi, job.base, &job.resonance).map_err(numeric)?;
            let power = resonance::classify_power_matrix(
                &a,
                job.base,
                job.power_nmax,
                true,
                &job.resonance,
            )
            .map_err(numeric)?;
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "resonance",
                "base": job.base.get(),
                "relation_bound": job.resonance.h_bound.to_string(),
                "relation_bits": job.resonance.precision_bits,
                "power_nmax": job.power_nmax,
                "verdict": verdict_json(&verdict),
                "power_nonresonant_at": power.as_ref().map(|(n, _)| n),
            });
            write_out(&cli.out, &pretty(&doc))?;
            if *require_decisive && verdict.overall == Overall::Inconclusive {
                return Ok(EXIT_INCONCLUSIVE);
            }
            Ok(EXIT_OK)
        }
        Command::Classify {
            config,
            require_decisive,
        } => {
            let job = make_job(config)?;
            let input = predict_input(&job.payload)?;
            let params = PredictParams {
                resonance: job.resonance.clone(),
                mode: job.mode,
                spectrum_override: None,
                beta_threshold: 0.02,
            };
            let report = linrec::predict_and_verify(&input, job.base, job.n, &params)
                .map_err(numeric)?;
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "classify",
                "base": job.base.get(),
                "n": job.n,
                "criterion": report.criterion,
                "verdict": verdict_json(&report.verdict),
                "predicted_benford": report.predicted_benford,
                "empirical": report.empirical,
                "zeros": zero_json(&report.zeros),
                "agreement": format!("{:?}", report.agreement),
            });
            write_out(&cli.out, &pretty(&doc))?;
            if *require_decisive && report.predicted_benford.is_none() {
                return Ok(EXIT_INCONCLUSIVE);
            }
            Ok(EXIT_OK)
        }
        Command::ZeroDensity { config } => {
            let job = make_job(config)?;
            let seq = simulate_job(&job)?;
            let prefix = match &job.payload {
                Payload::Recurrence { coeffs, .. } => coeffs.len(),
                Payload::Bilinear { matrix, .. }
                | Payload::VectorNorm { matrix, .. }
                | Payload::MatrixNorm { matrix } => matrix.len(),
            };
            let rep = linrec::zero_set(&seq, prefix);
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "zero-density",
                "n": job.n,
                "report": zero_json(&rep),
            });
            write_out(&cli.out, &pretty(&doc))?;
            Ok(EXIT_OK)
        }
        Command::Oracle { what } => {
            let budget = QmcBudget {
                seed: cli.seed,
                ..QmcBudget::default()
            };
            let doc = oracle_json(what, &budget)?;
            write_out(&cli.out, &pretty(&doc))?;
            Ok(EXIT_OK)
        }
        Command::Figure1 => {
            let text = figure1_csv(mode)?;
            write_out(&cli.out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Figure2 => {
            let text = figure2_csv(mode)?;
            write_out(&cli.out, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn parse_payload(config: &str) -> Result<Payload, CliError> {
    let text = if config.trim_start().starts_with('{') {
        config.to_string()
    } else {
        std::fs::read_to_string(config)
            .map_err(|e| validation(format!("config: cannot read {config}: {e}")))?
    };
    let payload: Payload =
        serde_json::from_str(&text).map_err(|e| validation(format!("config: {e}")))?;
    // surface invariant violations with the offending field named
    match &payload {
        Payload::Recurrence { coeffs, initial } => {
            if coeffs.is_empty() || coeffs.len() != initial.len() {
                return Err(validation(
                    "coeffs/initial: must be nonempty and of equal length",
                ));
            }
            if *coeffs.last().unwrap() == 0.0 {
                return Err(validation(
                    "coeffs: leading coefficient a_d must be nonzero",
                ));
            }
        }
        Payload::Bilinear { matrix, x, y } => {
            let d = check_square(matrix)?;
            if x.len() != d || y.len() != d {
                return Err(validation("x/y: length must match the matrix dimension"));
            }
        }
        Payload::VectorNorm { matrix, x } => {
            let d = check_square(matrix)?;
            if x.len() != d {
                return Err(validation("x: length must match the matrix dimension"));
            }
        }
        Payload::MatrixNorm { matrix } => {
            check_square(matrix)?;
        }
    }
    Ok(payload)
}

fn check_square(matrix: &[Vec<f64>]) -> Result<usize, CliError> {
    let d = matrix.len();
    if d == 0 || matrix.iter().any(|row| row.len() != d) {
        return Err(validation("matrix: must be square and nonempty"));
    }
    Ok(d)
}

fn to_matrix(rows: &[Vec<f64>]) -> Matrix {
    let d = rows.len();
    Matrix::from_fn(d, d, |i, j| rows[i][j])
}

fn job_matrix(payload: &Payload) -> Result<Matrix, CliError> {
    match payload {
        Payload::Recurrence { coeffs, .. } => {
            spectral::companion_matrix(coeffs).map_err(numeric)
        }
        Payload::Bilinear { matrix, .. }
        | Payload::VectorNorm { matrix, .. }
        | Payload::MatrixNorm { matrix } => Ok(to_matrix(matrix)),
    }
}

fn predict_input(payload: &Payload) -> Result<PredictInput, CliError> {
    match payload {
        Payload::Recurrence { coeffs, initial } => Ok(PredictInput::Recurrence(
            RecurrenceSpec::new(coeffs.clone(), initial.clone()).map_err(numeric)?,
        )),
        Payload::Bilinear { matrix, x, y } => Ok(PredictInput::Bilinear(
            BilinearSpec::new(
                to_matrix(matrix),
                DVector::from_vec(x.clone()),
                DVector::from_vec(y.clone()),
            )
            .map_err(numeric)?,
        )),
        _ => Err(validation(
            "kind: classify requires a recurrence or bilinear job",
        )),
    }
}

fn simulate_job(job: &Job) -> Result<Vec<ScaledReal>, CliError> {
    match &job.payload {
        Payload::Recurrence { coeffs, initial } => {
            let spec = RecurrenceSpec::new(coeffs.clone(), initial.clone()).map_err(numeric)?;
            linrec::simulate_recurrence(&spec, job.n, job.mode).map_err(numeric)
        }
        Payload::Bilinear { matrix, x, y } => {
            let spec = BilinearSpec::new(
                to_matrix(matrix),
                DVector::from_vec(x.clone()),
                DVector::from_vec(y.clone()),
            )
            .map_err(numeric)?;
            linrec::simulate_bilinear(&spec, job.n, job.mode).map_err(numeric)
        }
        Payload::VectorNorm { matrix, x } => Ok(linrec::simulate_vector_norm(
            &to_matrix(matrix),
            &DVector::from_vec(x.clone()),
            job.n,
        )),
        Payload::MatrixNorm { matrix } => {
            Ok(linrec::simulate_matrix_norm(&to_matrix(matrix), job.n))
        }
    }
}

/// 17 significant digits: enough to round-trip any binary64 value.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn sequence_csv(seq: &[ScaledReal], base: Base) -> String {
    let mut s = String::from("n,sign,log10_magnitude,significand,leading_digit\n");
    for (i, x) in seq.iter().enumerate() {
        if x.is_zero() {
            s.push_str(&format!("{},0,,,0\n", i + 1));
        } else {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                i + 1,
                x.sign(),
                fmt17(x.lnmag() / std::f64::consts::LN_10),
                fmt17(x.significand(base)),
                x.leading_digit(base)
            ));
        }
    }
    s
}

fn sequence_json(seq: &[ScaledReal], base: Base, job: &Job) -> Value {
    let terms: Vec<Value> = seq
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if x.is_zero() {
                json!({"n": i + 1, "sign": 0})
            } else {
                json!({
                    "n": i + 1,
                    "sign": x.sign(),
                    "log10_magnitude": x.lnmag() / std::f64::consts::LN_10,
                    "significand": x.significand(base),
                    "leading_digit": x.leading_digit(base),
                })
            }
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "base": base.get(),
        "n": job.n,
        "terms": terms,
    })
}

fn digits_csv(hist: &udist::DigitHistogram, base: Base) -> String {
    let mut s = String::from("digit,count,percent,benford_percent\n");
    for d in 1..base.get() {
        s.push_str(&format!(
            "{},{},{},{}\n",
            d,
            hist.counts[(d - 1) as usize],
            fmt17(hist.percent(d)),
            fmt17(100.0 * udist::benford_probability(base, d)),
        ));
    }
    s
}

fn spectrum_json(a: &Matrix) -> Result<Value, spectral::SpectralError> {
    let spectrum = spectral::eigenvalues(a)?;
    let classes = spectral::annotated_classes(a)?;
    let ep = spectral::extremal_peripheral_spectrum(a)?;
    let eig: Vec<Value> = classes
        .iter()
        .flat_map(|c| c.members.iter())
        .map(|e| {
            json!({
                "re": e.value.re,
                "im": e.value.im,
                "multiplicity": e.multiplicity,
                "jordan_index": e.jordan_index,
            })
        })
        .collect();
    let class_docs: Vec<Value> = classes
        .iter()
        .map(|c| {
            json!({
                "modulus": c.r,
                "size": c.members.len(),
                "is_peripheral": c.is_peripheral,
            })
        })
        .collect();
    let ep_doc = match ep {
        PeripheralSpectrum::Nilpotent => json!({"kind": "nilpotent"}),
        PeripheralSpectrum::Class { r, k_max, members } => json!({
            "kind": "class",
            "modulus": r,
            "k_max": k_max,
            "members": members.iter().map(|e| json!({"re": e.value.re, "im": e.value.im})).collect::<Vec<_>>(),
        }),
    };
    Ok(json!({
        "r_sigma": spectrum.r_sigma,
        "eigenvalues": eig,
        "modulus_classes": class_docs,
        "extremal_peripheral": ep_doc,
    }))
}

fn verdict_json(v: &ResonanceVerdict) -> Value {
    let classes: Vec<Value> = v
        .classes
        .iter()
        .map(|c| {
            let outcome = match &c.outcome {
                ClassOutcome::ResonantConditionI { witness } => json!({
                    "kind": "resonant-condition-i",
                    "witness": witness.to_string(),
                }),
                ClassOutcome::ResonantConditionII { witness } => json!({
                    "kind": "resonant-condition-ii",
                    "witness": witness.iter().map(|z| z.to_string()).collect::<Vec<_>>(),
                }),
                ClassOutcome::NoRelationFound { h, precision_bits } => json!({
                    "kind": "no-relation-found",
                    "h": h.to_string(),
                    "precision_bits": precision_bits,
                }),
                ClassOutcome::Inconclusive { reason } => json!({
                    "kind": "inconclusive",
                    "reason": reason,
                }),
            };
            json!({
                "r": c.r,
                "outcome": outcome,
                "discarded": c
                    .discarded
                    .iter()
                    .map(|rel| rel.iter().map(|z| z.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    let overall = match v.overall {
        Overall::Resonant => "resonant",
        Overall::NonresonantUpToBound => "nonresonant-up-to-bound",
        Overall::Inconclusive => "inconclusive",
    };
    json!({"classes": classes, "overall": overall})
}

fn zero_json(rep: &ZeroSetReport) -> Value {
    let structure = match &rep.structure {
        ZeroStructure::Finite => json!({"kind": "finite"}),
        ZeroStructure::Cofinite => json!({"kind": "cofinite"}),
        ZeroStructure::LatticeUnion(classes) => json!({
            "kind": "lattice-union",
            "classes": classes
                .iter()
                .map(|(p, r)| json!({"period": p, "residue": r}))
                .collect::<Vec<_>>(),
        }),
        ZeroStructure::Irregular => json!({"kind": "irregular"}),
    };
    json!({
        "zero_count": rep.zero_indices.len(),
        "zero_indices_head": rep.zero_indices.iter().take(100).collect::<Vec<_>>(),
        "density_estimate": rep.density_estimate,
        "structure": structure,
        "terminating": rep.terminating,
    })
}

fn oracle_json(what: &OracleCmd, budget: &QmcBudget) -> Result<Value, CliError> {
    match what {
        OracleCmd::Ibeta { p, beta, x } => match x {
            None => {
                let closed = specfun::i_closed(*p, *beta).map_err(numeric)?;
                let quad = specfun::i_quadrature(*p, *beta, 1e-8).map_err(numeric)?;
                Ok(json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "oracle.ibeta",
                    "p": p,
                    "beta": beta,
                    "closed": {"re": closed.re, "im": closed.im},
                    "quadrature": {
                        "re": quad.value.re,
                        "im": quad.value.im,
                        "err_estimate": quad.err_estimate,
                        "nodes_used": quad.nodes_used,
                    },
                    "difference": (closed - quad.value).norm(),
                }))
            }
            Some(x) => {
                let quad = specfun::i_func(*p, *beta, *x, 1e-8).map_err(numeric)?;
                Ok(json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "oracle.ibeta",
                    "p": p,
                    "beta": beta,
                    "x": x,
                    "quadrature": {
                        "re": quad.value.re,
                        "im": quad.value.im,
                        "err_estimate": quad.err_estimate,
                        "nodes_used": quad.nodes_used,
                    },
                }))
            }
        },
        OracleCmd::Rpoly { m, re, im } => {
            let z = crate::numkit::ComplexVal::new(*re, *im);
            let s = specfun::r_poly_sum(*m, z);
            let prod = specfun::r_poly_product(*m, z);
            Ok(json!({
                "schema_version": SCHEMA_VERSION,
                "command": "oracle.rpoly",
                "m": m,
                "z": {"re": re, "im": im},
                "sum_form": {"re": s.re, "im": s.im},
                "product_form": {"re": prod.re, "im": prod.im},
                "difference": (s - prod).norm(),
            }))
        }
        OracleCmd::Pushforward { p, beta, u, k } => {
            let q = specfun::pushforward_fourier(p, *beta, u, *k, budget).map_err(numeric)?;
            Ok(json!({
                "schema_version": SCHEMA_VERSION,
                "command": "oracle.pushforward",
                "p": p,
                "beta": beta,
                "u": u,
                "k": k,
                "seed": budget.seed,
                "value": {"re": q.value.re, "im": q.value.im},
                "magnitude": q.value.norm(),
                "err_estimate": q.err_estimate,
                "nodes_used": q.nodes_used,
            }))
        }
        OracleCmd::BreakingU { p, beta, threshold } => {
            let res =
                specfun::find_breaking_u(p, *beta, *threshold, budget).map_err(numeric)?;
            let doc = match res {
                BreakingSearch::Found(b) => json!({
                    "found": true,
                    "u": b.u,
                    "j_magnitude": b.j_magnitude,
                    "in_e_d": b.in_e_d,
                }),
                BreakingSearch::Failed { best } => json!({
                    "found": false,
                    "best_candidate": best.map(|(u, m)| json!({"u": u, "magnitude": m})),
                }),
            };
            Ok(json!({
                "schema_version": SCHEMA_VERSION,
                "command": "oracle.breaking-u",
                "p": p,
                "beta": beta,
                "threshold": threshold,
                "seed": budget.seed,
                "result": doc,
            }))
        }
    }
}

/// The three reference growth parameters of the second-order model family
/// x_n = 2 gamma x_(n-1) - 5 x_(n-2).
pub fn reference_gammas() -> [(&'static str, f64); 3] {
    [
        (
            "gamma=0.9928",
            5f64.sqrt() * (std::f64::consts::PI / 8f64.sqrt()).cos(),
        ),
        (
            "gamma=1.018",
            5f64.sqrt() * (0.5 * std::f64::consts::PI * 5f64.log10()).cos(),
        ),
        ("gamma=1", 1.0),
    ]
}

fn reference_sequence(gamma: f64, n: usize, mode: PrecisionMode) -> Result<Vec<ScaledReal>, CliError> {
    let spec = RecurrenceSpec::new(vec![2.0 * gamma, -5.0], vec![1.0, 1.0]).map_err(numeric)?;
    linrec::simulate_recurrence(&spec, n, mode).map_err(numeric)
}

/// Truncate (not round) to two decimals, so the exact reference row matches
/// the conventional printed table digit for digit.
fn truncate2(x: f64) -> f64 {
    (x * 100.0).trunc() / 100.0
}

pub fn figure1_csv(mode: PrecisionMode) -> Result<String, CliError> {
    let base = Base::new(10).expect("10 is a valid base");
    let mut s = String::from("row,d1,d2,d3,d4,d5,d6,d7,d8,d9\n");
    for (label, gamma) in reference_gammas() {
        let seq = reference_sequence(gamma, 10_000, mode)?;
        let hist = udist::digit_histogram(&seq, base);
        s.push_str(label);
        for d in 1..=9 {
            s.push_str(&format!(",{:.2}", hist.percent(d)));
        }
        s.push('\n');
    }
    s.push_str("exact-benford");
    for d in 1..=9 {
        s.push_str(&format!(
            ",{:.2}",
            truncate2(100.0 * udist::benford_probability(base, d))
        ));
    }
    s.push('\n');
    Ok(s)
}

pub fn figure2_csv(mode: PrecisionMode) -> Result<String, CliError> {
    let base = Base::new(10).expect("10 is a valid base");
    let mut grid: Vec<usize> = Vec::new();
    for decade in [10usize, 100, 1000] {
        for k in 1..10 {
            grid.push(decade * k);
        }
    }
    grid.push(10_000);
    let mut s = String::from("row,n,beta_n\n");
    for (label, gamma) in reference_gammas() {
        let seq = reference_sequence(gamma, 10_000, mode)?;
        for n in &grid {
            let hist = udist::digit_histogram(&seq[..*n], base);
            let beta = udist::benford_digit_deviation(&hist).map_err(numeric)?;
            s.push_str(&format!("{label},{n},{}\n", fmt17(beta)));
        }
    }
    Ok(s)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| validation(format!("out: cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
