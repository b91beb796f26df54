//! kisinlab: instance generation, factorization drivers and seeded property
//! campaigns. Exit code 0 on success, 1 on a property failure, 2 on malformed
//! input or bad configuration.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use kisinlab::canonical::property_z_canonicalize;
use kisinlab::filtration::{build_h, check_coe2, check_property_a};
use kisinlab::kisin::{
    diag_shape_verify, family_diag_valuations, make_adapted_phi, make_triangular_instance, HTWeights, PhiFamily,
};
use kisinlab::localfield::{eisenstein_roots_lf, LocalCtx};
use kisinlab::rings::wire::{matrix_from_value, matrix_to_value};
use kisinlab::rings::{random, FiniteField, Valuation};
use kisinlab::shape::{shape_decompose_phi, shape_factorize, ShapedMatrix};
use kisinlab::suites::{run_suite, sample_shape_instance, Campaign, Params, REGISTRY};
use kisinlab::Error;

#[derive(Parser)]
#[command(name = "kisinlab", version, about = "Exact factorizations and property campaigns for mod-p Kisin modules")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Adapted,
    Triangular,
    ShapedMatrix,
    HRecord,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a registered property suite.
    Run {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        e: Option<u32>,
        #[arg(long)]
        f: Option<usize>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "M")]
        big_m: Option<u32>,
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Print the suite registry.
    ListSuites,
    /// Property-Z certificate for a matrix JSON ("-" reads stdin).
    Canonicalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        delta: usize,
    },
    /// Shape factorization of {X, s, A, t, deltas[, gamma]}.
    Factorize {
        #[arg(long)]
        input: PathBuf,
    },
    /// C·F1·F0 factors of a φ-family with witnesses.
    DecomposePhi {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        weights: PathBuf,
    },
    /// Generate a seeded instance.
    Gen {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        e: u32,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "M", default_value_t = 8)]
        big_m: u32,
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Recover (σ0, σ1) from the diagonal valuations of a family.
    VerifyDiag {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        weights: PathBuf,
    },
    /// Property A, Coe-2 and tame differences over a parameter grid.
    FiltrationSweep {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        e: u32,
        #[arg(long, default_value_t = 3)]
        rmax: usize,
        #[arg(long = "M", default_value_t = 8)]
        big_m: u32,
    },
}

enum Outcome {
    Pass(Value),
    Fail(Value),
}

fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::Malformed(_) | Error::ConfigError(_) | Error::DimensionMismatch(_) | Error::BadParameters(_))
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Malformed(e.to_string()))?
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn read_weights(path: &Path) -> Result<HTWeights, Error> {
    let w: HTWeights = serde_json::from_value(read_json(path)?).map_err(|e| Error::Malformed(e.to_string()))?;
    w.validate()?;
    Ok(w)
}

fn field<T: serde::de::DeserializeOwned>(v: &Value, key: &str) -> Result<T, Error> {
    let x = v.get(key).ok_or_else(|| Error::Malformed(format!("missing \"{key}\"")))?;
    serde_json::from_value(x.clone()).map_err(|e| Error::Malformed(format!("\"{key}\": {e}")))
}

fn shaped_to_value(x: &ShapedMatrix, n: usize) -> Value {
    json!({ "X": matrix_to_value(&x.matrix().to_series(n)), "s": x.exponents() })
}

fn shaped_from_value(v: &Value, key: &str) -> Result<ShapedMatrix, Error> {
    let m = matrix_from_value(v.get(key).ok_or_else(|| Error::Malformed(format!("missing \"{key}\"")))?)?;
    ShapedMatrix::new(m.to_poly(), field(v, "s")?)
}

fn run(cli: Cmd) -> Result<Outcome, Error> {
    match cli {
        Cmd::Run { suite, p, m, d, e, f, n, big_m, delta, seed, trials } => {
            let c = Campaign { suite, params: Params { p, m, e, d, f, n, big_m, delta }, seed, trials };
            let report = run_suite(&c)?;
            let v = serde_json::to_value(&report).expect("reports serialize");
            Ok(if report.all_passed() { Outcome::Pass(v) } else { Outcome::Fail(v) })
        }
        Cmd::ListSuites => Ok(Outcome::Pass(serde_json::to_value(REGISTRY).expect("registry serializes"))),
        Cmd::Canonicalize { input, delta } => {
            let a = matrix_from_value(&read_json(&input)?)?;
            let cert = property_z_canonicalize(&a, delta)?;
            Ok(Outcome::Pass(serde_json::to_value(&cert).expect("certificates serialize")))
        }
        Cmd::Factorize { input } => {
            let v = read_json(&input)?;
            let x = shaped_from_value(&v, "X")?;
            let a = matrix_from_value(v.get("A").ok_or_else(|| Error::Malformed("missing \"A\"".into()))?)?;
            let t: Vec<usize> = field(&v, "t")?;
            let deltas: Vec<usize> = field(&v, "deltas")?;
            let gamma: Option<usize> = v.get("gamma").map(|_| field(&v, "gamma")).transpose()?;
            let sf = shape_factorize(&x, &a, &t, &deltas, gamma)?;
            let n = a.precision();
            Ok(Outcome::Pass(json!({
                "X1": shaped_to_value(&sf.x1, n),
                "X0": shaped_to_value(&sf.x0, n),
                "B": matrix_to_value(&sf.b),
            })))
        }
        Cmd::DecomposePhi { family, weights } => {
            let fam = PhiFamily::from_value(&read_json(&family)?)?;
            let w = read_weights(&weights)?;
            let factors = shape_decompose_phi(&fam, &w)?;
            let n = fam.precision();
            Ok(Outcome::Pass(Value::Array(factors.iter().map(|f| f.to_value(n)).collect())))
        }
        Cmd::Gen { mode, weights, seed, p, m, d, e, n, big_m, j, r } => {
            gen(mode, weights, seed, p, m, d, e, n, big_m, j, r)
        }
        Cmd::VerifyDiag { family, weights } => {
            let fam = PhiFamily::from_value(&read_json(&family)?)?;
            let w = read_weights(&weights)?;
            if fam.f() != w.f || fam.dim() != w.d {
                return Err(Error::DimensionMismatch(format!("family is f = {}, d = {}", fam.f(), fam.dim())));
            }
            let t = family_diag_valuations(&fam)?;
            Ok(match diag_shape_verify(&t, &w)? {
                Some(pairs) => Outcome::Pass(json!({
                    "t": t,
                    "sigma": pairs.iter().map(|(a, b)| json!({ "sigma0": a, "sigma1": b })).collect::<Vec<_>>(),
                })),
                None => Outcome::Fail(json!({ "t": t, "sigma": null })),
            })
        }
        Cmd::FiltrationSweep { p, e, rmax, big_m } => sweep(p, e, rmax, big_m),
    }
}

#[allow(clippy::too_many_arguments)]
fn gen(
    mode: Mode,
    weights: Option<PathBuf>,
    seed: u64,
    p: u32,
    m: u32,
    d: usize,
    e: u32,
    n: Option<usize>,
    big_m: u32,
    j: usize,
    r: usize,
) -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let need_weights = || {
        weights
            .as_deref()
            .ok_or_else(|| Error::ConfigError("--weights is required for this mode".into()))
            .and_then(read_weights)
    };
    let mut v = match mode {
        Mode::Adapted => {
            let w = need_weights()?;
            let k = FiniteField::new(w.p, m)?;
            let fam = make_adapted_phi(&w, k, n.unwrap_or(4 * w.p as usize), seed)?;
            fam.to_value()
        }
        Mode::Triangular => {
            let w = need_weights()?;
            let k = FiniteField::new(w.p, m)?;
            let s0 = vec![random::permutation(w.d, &mut rng); w.f];
            let s1: Vec<Vec<usize>> = (0..w.f).map(|_| random::permutation(w.d, &mut rng)).collect();
            let fam = make_triangular_instance(&w, k, n.unwrap_or(4 * w.p as usize), &s0, &s1, seed)?;
            let mut v = fam.to_value();
            v["sigma0"] = json!(s0);
            v["sigma1"] = json!(s1);
            v
        }
        Mode::ShapedMatrix => {
            if !(1..=5).contains(&d) {
                return Err(Error::ConfigError(format!("d = {d} outside 1..=5")));
            }
            let k = FiniteField::new(p, m)?;
            let (x, a, t, deltas) = sample_shape_instance(k, d, &mut rng);
            let n = n.unwrap_or(40);
            let mut v = shaped_to_value(&x, n);
            v["A"] = matrix_to_value(&a.to_series(n));
            v["t"] = json!(t);
            v["deltas"] = json!(deltas);
            v
        }
        Mode::HRecord => {
            let ctx = LocalCtx::new(p as u64, big_m, e)?;
            build_h(j, &eisenstein_roots_lf(ctx), &vec![r; j])?.to_value()
        }
    };
    v["seed"] = json!(seed);
    Ok(Outcome::Pass(v))
}

fn sweep(p: u64, e: u32, rmax: usize, big_m: u32) -> Result<Outcome, Error> {
    let ctx = LocalCtx::new(p, big_m, e).map_err(|e| Error::ConfigError(e.to_string()))?;
    let pis = eisenstein_roots_lf(ctx);
    let mut ok = true;
    let mut prop_a = Vec::new();
    let mut coe2 = Vec::new();
    for r in 1..=rmax {
        for j in 1..e as usize {
            let rec = build_h(j, &pis, &vec![r; j])?;
            let a = check_property_a(&rec)?;
            ok &= a;
            prop_a.push(json!({ "r": r, "j": j, "pass": a }));
            for l in 1..p as usize {
                let c = check_coe2(&rec, l)?;
                ok &= c;
                coe2.push(json!({ "r": r, "j": j, "l": l, "pass": c }));
            }
        }
    }
    let mut diffs = Vec::new();
    for a in 0..pis.len() {
        for b in (0..pis.len()).filter(|&b| b != a) {
            let v = (&pis[a] - &pis[b]).valuation()?;
            ok &= v == Valuation::Finite(1);
            diffs.push(json!({ "j": a, "q": b, "valuation": v.finite() }));
        }
    }
    let v = json!({
        "p": p, "e": e, "rmax": rmax, "M": big_m,
        "property_a": prop_a, "coe2": coe2, "tame_differences": diffs, "all_passed": ok,
    });
    Ok(if ok { Outcome::Pass(v) } else { Outcome::Fail(v) })
}

fn emit(v: &Value, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(v).expect("values serialize");
    match out {
        Some(path) => {
            std::fs::write(path, text + "\n").map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Format::Json = cli.format;
    let (v, code) = match run(cli.cmd) {
        Ok(Outcome::Pass(v)) => (v, 0),
        Ok(Outcome::Fail(v)) => (v, 1),
        Err(e) => {
            let code = if is_input_error(&e) { 2 } else { 1 };
            eprintln!("kisinlab: {e}");
            (json!({ "error": e.to_string() }), code)
        }
    };
    if let Err(e) = emit(&v, cli.out.as_deref()) {
        eprintln!("kisinlab: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
