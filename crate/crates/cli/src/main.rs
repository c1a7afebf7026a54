//! kudla-lab: evaluate lattice-sum Green functions and theta series, and
//! run the verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad flags,
//! 3 on-cycle evaluation, 4 truncation failure.

use clap::{Args, Parser, Subcommand};
use kudla_core::error::Error as CoreError;
use kudla_core::green::{green_modified, green_zero, kudla_green, CutoffSpec, TruncationReport};
use kudla_core::heights::height_closed;
use kudla_core::lattice::PointH2;
use kudla_core::qseries::{eisenstein_e2, hurwitz_h, hurwitz_h1, sigma1, theta_eval, ThetaKind, ThetaValue};
use kudla_lab::cxarg::parse_complex;
use kudla_lab::report::{print_table, to_csv, to_json, Report};
use kudla_lab::suites::{run_suite, SuiteConfig};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kudla-lab", version, about = "Green functions and theta series on X(1) x X(1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single quantity.
    Eval(EvalArgs),
    /// Run a verification suite and report pass/fail per check.
    Verify(VerifyArgs),
    /// Emit a coefficient table as CSV (header `n,value`).
    Series(SeriesArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// One of green | green-mod | green-zero | theta:<kind> | e2 | height
    #[arg(long)]
    what: String,
    #[arg(long, default_value_t = 1.0)]
    v: f64,
    /// First coordinate, a+bi form
    #[arg(long)]
    z1: Option<String>,
    /// Second coordinate, a+bi form
    #[arg(long)]
    z2: Option<String>,
    #[arg(long, default_value_t = 1)]
    m: i64,
    /// Symplectic variable, a+bi form
    #[arg(long)]
    tau: Option<String>,
    #[arg(long, default_value_t = 40)]
    cutoff: i64,
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    #[arg(long, default_value_t = 2.0)]
    rho_t0: f64,
    #[arg(long, default_value_t = 3.0)]
    rho_t1: f64,
    /// Emit the result as a JSON object
    #[arg(long, default_value_t = false)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// special | lattice | fourier | boundary | ddc | theta | poisson | hurwitz | heights | all
    #[arg(long)]
    suite: String,
    /// Override every check tolerance in the suite
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the randomized point sets
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the report array as JSON to this path
    #[arg(long)]
    json: Option<String>,
    /// Write the report table as CSV to this path
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Args)]
struct SeriesArgs {
    /// e2 | h | h1 | funke | heights
    #[arg(long)]
    series: String,
    #[arg(long, default_value_t = 20)]
    n_max: i64,
    #[arg(long, default_value_t = 1.0)]
    v: f64,
}

fn init_thread_pool() {
    if let Ok(val) = std::env::var("KUDLA_LAB_THREADS") {
        if let Ok(n) = val.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::OnCycle { .. } => 3,
        CoreError::Truncation { .. } => 4,
        _ => 2,
    }
}

fn parse_point(args: &EvalArgs) -> Result<PointH2, String> {
    let z1 = parse_complex(args.z1.as_deref().ok_or("missing --z1")?)?;
    let z2 = parse_complex(args.z2.as_deref().ok_or("missing --z2")?)?;
    PointH2::from_complex(z1, z2).map_err(|e| e.to_string())
}

fn print_report(args: &EvalArgs, what: &str, rep: &TruncationReport) {
    if args.json {
        println!(
            "{{\"what\": \"{}\", \"value\": {}, \"tail_bound\": {}, \"terms_used\": {}}}",
            what, rep.value, rep.tail_bound, rep.terms_used
        );
    } else {
        println!("{what} = {:.15e}   (tail bound {:.3e}, {} terms)", rep.value, rep.tail_bound, rep.terms_used);
    }
}

fn print_scalar(args: &EvalArgs, what: &str, value: Complex64) {
    if args.json {
        println!("{{\"what\": \"{}\", \"re\": {}, \"im\": {}}}", what, value.re, value.im);
    } else {
        println!("{what} = {:.15e} + {:.15e} i", value.re, value.im);
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<(), u8> {
    let fail = |msg: String, code: u8| -> u8 {
        eprintln!("error: {msg}");
        code
    };
    match args.what.as_str() {
        "green" => {
            let z = parse_point(args).map_err(|m| fail(m, 2))?;
            let rep = kudla_green(args.v, &z, args.m, args.eps)
                .map_err(|e| fail(e.to_string(), exit_code_for(&e)))?;
            print_report(args, "green", &rep);
        }
        "green-mod" => {
            let z = parse_point(args).map_err(|m| fail(m, 2))?;
            let spec = CutoffSpec::new(args.rho_t0, args.rho_t1)
                .map_err(|e| fail(e.to_string(), 2))?;
            let rep = green_modified(args.v, &z, args.m, &spec, args.eps)
                .map_err(|e| fail(e.to_string(), exit_code_for(&e)))?;
            print_report(args, "green-mod", &rep);
        }
        "green-zero" => {
            let z = parse_point(args).map_err(|m| fail(m, 2))?;
            let rep = green_zero(args.v, &z, args.eps)
                .map_err(|e| fail(e.to_string(), exit_code_for(&e)))?;
            print_report(args, "green-zero", &rep);
        }
        "e2" => {
            let tau = parse_complex(args.tau.as_deref().ok_or_else(|| fail("missing --tau".into(), 2))?)
                .map_err(|m| fail(m, 2))?;
            print_scalar(args, "e2", eisenstein_e2(tau, args.cutoff.max(1) as usize));
        }
        "height" => {
            let h = height_closed(args.m, args.v);
            if args.json {
                println!("{{\"what\": \"height\", \"m\": {}, \"value\": {}}}", h.m, h.value);
            } else {
                println!("height(m={}) = {:.15e}", h.m, h.value);
            }
        }
        w if w.starts_with("theta:") => {
            let kind = ThetaKind::parse(&w["theta:".len()..])
                .ok_or_else(|| fail(format!("unknown theta kind '{w}'"), 2))?;
            let tau = parse_complex(args.tau.as_deref().ok_or_else(|| fail("missing --tau".into(), 2))?)
                .map_err(|m| fail(m, 2))?;
            let z = if kind.needs_point() {
                Some(parse_point(args).map_err(|m| fail(m, 2))?)
            } else {
                None
            };
            let val = theta_eval(kind, tau, z.as_ref(), args.cutoff)
                .map_err(|e| fail(e.to_string(), exit_code_for(&e)))?;
            match val {
                ThetaValue::Scalar(c) => print_scalar(args, kind.name(), c),
                ThetaValue::Form(f) => {
                    if args.json {
                        println!(
                            "{{\"what\": \"{}\", \"c11\": [{}, {}], \"c22\": [{}, {}], \"c12\": [{}, {}], \"c21\": [{}, {}]}}",
                            kind.name(),
                            f.c11.re, f.c11.im, f.c22.re, f.c22.im,
                            f.c12.re, f.c12.im, f.c21.re, f.c21.im
                        );
                    } else {
                        println!(
                            "{} = [c11 {} + {}i, c22 {} + {}i, c12 {} + {}i, c21 {} + {}i]",
                            kind.name(),
                            f.c11.re, f.c11.im, f.c22.re, f.c22.im,
                            f.c12.re, f.c12.im, f.c21.re, f.c21.im
                        );
                    }
                }
            }
        }
        other => return Err(fail(format!("unknown --what '{other}'"), 2)),
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), u8> {
    let cfg = SuiteConfig { tol_override: args.tol, seed: args.seed };
    let reports: Vec<Report> = match run_suite(&args.suite, &cfg) {
        Some(r) => r,
        None => {
            eprintln!("error: unknown suite '{}'", args.suite);
            return Err(2);
        }
    };
    print_table(&reports);
    if let Some(path) = &args.json {
        std::fs::write(path, to_json(&reports)).map_err(|e| {
            eprintln!("error: cannot write {path}: {e}");
            2u8
        })?;
    }
    if let Some(path) = &args.csv {
        std::fs::write(path, to_csv(&reports)).map_err(|e| {
            eprintln!("error: cannot write {path}: {e}");
            2u8
        })?;
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(1)
    }
}

fn cmd_series(args: &SeriesArgs) -> Result<(), u8> {
    let n_max = args.n_max.max(0);
    let mut out = String::from("n,value\n");
    match args.series.as_str() {
        "e2" => {
            for n in 0..=n_max {
                if n == 0 {
                    out.push_str(&format!("0,{}\n", -1.0 / 24.0 + 1.0 / (8.0 * PI * args.v)));
                } else {
                    out.push_str(&format!("{n},{}\n", sigma1(n).unwrap()));
                }
            }
        }
        "h" => {
            for n in 0..=n_max {
                out.push_str(&format!("{n},{}\n", hurwitz_h(n).unwrap()));
            }
        }
        "h1" => {
            for n in 0..=n_max {
                out.push_str(&format!("{n},{}\n", hurwitz_h1(n).unwrap()));
            }
        }
        "funke" => {
            // q^n coefficient of the class-number form at the given v:
            // H_1(n) + (1/(8 pi sqrt v)) sum_{-bc=n} B(pi v (b+c)^2)
            for n in 0..=n_max {
                let h1 = hurwitz_h1(n).unwrap();
                let mut bsum = 0.0;
                if n == 0 {
                    // axis terms b = 0 or c = 0, truncated like the library
                    bsum += kudla_core::special::cap_b(0.0).unwrap();
                    for b in 1..=60i64 {
                        bsum += 4.0
                            * kudla_core::special::cap_b(PI * args.v * (b * b) as f64).unwrap();
                    }
                } else {
                    for b in 1..=n {
                        if n % b == 0 {
                            let c = n / b;
                            bsum += 2.0
                                * kudla_core::special::cap_b(
                                    PI * args.v * ((b - c) * (b - c)) as f64,
                                )
                                .unwrap();
                        }
                    }
                }
                let coef = *h1.numer() as f64 / *h1.denom() as f64
                    + bsum / (8.0 * PI * args.v.sqrt());
                out.push_str(&format!("{n},{coef}\n"));
            }
        }
        "heights" => {
            for n in 0..=n_max {
                out.push_str(&format!("{n},{}\n", height_closed(n, args.v).value));
            }
        }
        other => {
            eprintln!("error: unknown series '{other}'");
            return Err(2);
        }
    }
    print!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Series(a) => cmd_series(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
