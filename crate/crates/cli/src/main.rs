//! Command line surface for the theta sum library and its experiment
//! harness.
//!
//! Exit codes: 0 success, 2 guard violation or bad input, 3 numerical
//! breakdown, 4 verification failure.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use siegel_theta::reduction::ReduceContext;
use siegel_theta::symplectic::iwasawa;
use siegel_theta::theta::{
    dyadic_height_bound, jacobi_of_query, theta_auto, theta_direct_box, theta_direct_schwartz,
    theta_fast_modulus,
};
use siegel_theta::Error;

use siegel_theta_cli::config::HarnessConfig;
use siegel_theta_cli::experiments::{
    bound_sweep, flow_excursion, flow_to_csv, log_grid, sweep_to_csv, tail_to_csv, volume_tail,
    SweepParams, HAAR_CSV_SCHEMA,
};
use siegel_theta_cli::json::{
    iwasawa_response, IntSpJson, MatJson, ReduceResponse, SpJson, ThetaRequest, ThetaResponse,
};
use siegel_theta_cli::sample::haar_sample_region;
use siegel_theta_cli::verify::run_suite;

const USAGE: &str = "\
siegel-theta: symplectic reduction and theta sum toolkit

USAGE:
  siegel-theta <COMMAND> [FLAGS]

COMMANDS:
  reduce        reduce a symplectic matrix into the fundamental domain
  iwasawa       print Iwasawa coordinates of a symplectic matrix
  theta         evaluate a theta sum (mode: direct | auto | fast)
  dyadic-bound  dyadic height bound for a box-truncated sum
  haar-sample   sample group coordinates from the restricted Haar density
  volume-tail   Monte Carlo tail of the height function
  flow          heights along the diagonal flow
  sweep         growth-exponent sweep against the psi envelope
  verify        run an invariant suite (linalg | symplectic | jacobi |
                reduction | weil | theta | cutoff | all)

GLOBAL FLAGS:
  --config <path>    key = value file of tolerances and bounds
  --seed <u64>       seed for all randomness (default 1)
  --threads <k>      accepted for compatibility; outputs never depend on it
  --out <path>       write output here instead of stdout
  --format <fmt>     json | csv (default json)
  --in <path>        input file (default: stdin) for matrix/query commands

COMMAND FLAGS:
  --n <rank>          rank for sampling commands (default 1)
  --count <N>         sample count (default 10000)
  --r-min/--r-max     tail grid range (defaults 10 / 200)
  --r-points <k>      tail grid size (default 8)
  --s-max/--ds        flow range and step (defaults 6.0 / 0.25)
  --x-count <k>       sweep ensemble size including the control row
  --m-pow-min/max     sweep scale range as powers of two (defaults 4 / 10)
  --m-steps-per-octave  scale-grid resolution (default 1)
  --xy-samples <k>    shift samples per cell (default 8)
  --box-count <k>     box samples per cell (default 2)
  --suite <name>      verify suite name (default all)
  --mutate-theta-phase  verification hook: flip the automorphic phase sign
";

struct Args {
    command: String,
    config: Option<PathBuf>,
    seed: u64,
    out: Option<PathBuf>,
    format: String,
    input: Option<PathBuf>,
    n: usize,
    count: usize,
    r_min: f64,
    r_max: f64,
    r_points: usize,
    s_max: f64,
    ds: f64,
    x_count: usize,
    m_pow_min: u32,
    m_pow_max: u32,
    m_steps_per_octave: u32,
    xy_samples: usize,
    box_count: usize,
    suite: String,
    mutate_phase: bool,
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let command = argv.next().ok_or_else(|| USAGE.to_string())?;
    let mut args = Args {
        command,
        config: None,
        seed: 1,
        out: None,
        format: "json".into(),
        input: None,
        n: 1,
        count: 10_000,
        r_min: 10.0,
        r_max: 200.0,
        r_points: 8,
        s_max: 6.0,
        ds: 0.25,
        x_count: 10,
        m_pow_min: 4,
        m_pow_max: 10,
        m_steps_per_octave: 1,
        xy_samples: 8,
        box_count: 2,
        suite: "all".into(),
        mutate_phase: false,
    };
    while let Some(flag) = argv.next() {
        let mut take = || argv.next().ok_or_else(|| format!("{flag} needs a value"));
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(take()?)),
            "--seed" => args.seed = take()?.parse().map_err(|e| format!("--seed: {e}"))?,
            "--threads" => {
                let _ = take()?; // accepted; results are thread-count independent
            }
            "--out" => args.out = Some(PathBuf::from(take()?)),
            "--format" => args.format = take()?,
            "--in" => args.input = Some(PathBuf::from(take()?)),
            "--n" => args.n = take()?.parse().map_err(|e| format!("--n: {e}"))?,
            "--count" => args.count = take()?.parse().map_err(|e| format!("--count: {e}"))?,
            "--r-min" => args.r_min = take()?.parse().map_err(|e| format!("--r-min: {e}"))?,
            "--r-max" => args.r_max = take()?.parse().map_err(|e| format!("--r-max: {e}"))?,
            "--r-points" => {
                args.r_points = take()?.parse().map_err(|e| format!("--r-points: {e}"))?
            }
            "--s-max" => args.s_max = take()?.parse().map_err(|e| format!("--s-max: {e}"))?,
            "--ds" => args.ds = take()?.parse().map_err(|e| format!("--ds: {e}"))?,
            "--x-count" => {
                args.x_count = take()?.parse().map_err(|e| format!("--x-count: {e}"))?
            }
            "--m-pow-min" => {
                args.m_pow_min = take()?.parse().map_err(|e| format!("--m-pow-min: {e}"))?
            }
            "--m-pow-max" => {
                args.m_pow_max = take()?.parse().map_err(|e| format!("--m-pow-max: {e}"))?
            }
            "--m-steps-per-octave" => {
                args.m_steps_per_octave =
                    take()?.parse().map_err(|e| format!("--m-steps-per-octave: {e}"))?
            }
            "--xy-samples" => {
                args.xy_samples = take()?.parse().map_err(|e| format!("--xy-samples: {e}"))?
            }
            "--box-count" => {
                args.box_count = take()?.parse().map_err(|e| format!("--box-count: {e}"))?
            }
            "--suite" => args.suite = take()?,
            "--mutate-theta-phase" => args.mutate_phase = true,
            "--help" | "-h" => return Err(USAGE.to_string()),
            other => return Err(format!("unknown flag {other}\n\n{USAGE}")),
        }
    }
    Ok(args)
}

fn read_input(args: &Args) -> Result<String, String> {
    match &args.input {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| format!("stdin: {e}"))?;
            Ok(buf)
        }
    }
}

fn emit(args: &Args, text: &str) -> Result<(), String> {
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            let r = out
                .write_all(text.as_bytes())
                .and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") });
            match r {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(format!("stdout: {e}")),
                Ok(()) => Ok(()),
            }
        }
    }
}

fn guard_exit(e: &Error) -> ExitCode {
    match e {
        Error::TooLarge(_)
        | Error::DimensionMismatch
        | Error::OddDimension
        | Error::EntryOverflow
        | Error::InsufficientSamples => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn run(args: &Args) -> Result<ExitCode, String> {
    let cfg = match &args.config {
        Some(path) => HarnessConfig::from_file(path)?,
        None => HarnessConfig::default(),
    };
    match args.command.as_str() {
        "reduce" => {
            let text = read_input(args)?;
            let g: SpJson = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let g = g.to_sp()?;
            let ctx = ReduceContext::new(g.n(), cfg.reduce_config());
            match ctx.siegel_reduce(&g) {
                Err(e) => {
                    eprintln!("reduce: {e}");
                    Ok(guard_exit(&e))
                }
                Ok(res) => {
                    let uv = res.reduced.y.uv();
                    let resp = ReduceResponse {
                        gamma0: IntSpJson::from_int(&res.gamma0),
                        x: MatJson::from_rmat(res.reduced.x.mat()).rows,
                        v: uv.v().to_vec(),
                        u: MatJson::from_rmat(uv.u()).rows,
                        det_v: res.det_v,
                        iterations: res.iterations,
                    };
                    emit(args, &serde_json::to_string_pretty(&resp).unwrap())?;
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        "iwasawa" => {
            let text = read_input(args)?;
            let g: SpJson = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let g = g.to_sp()?;
            match iwasawa(&g) {
                Err(e) => {
                    eprintln!("iwasawa: {e}");
                    Ok(guard_exit(&e))
                }
                Ok(c) => {
                    emit(
                        args,
                        &serde_json::to_string_pretty(&iwasawa_response(&c)).unwrap(),
                    )?;
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        "theta" => {
            let text = read_input(args)?;
            let req: ThetaRequest = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let query = req.query.to_query()?;
            let started = Instant::now();
            let outcome = match req.mode.as_str() {
                "direct" => match (&req.box_spec(), &req.packet) {
                    (Some(spec), None) => theta_direct_box(&query, spec)
                        .map(|v| (v.value, v.value.norm(), v.terms)),
                    (None, Some(p)) => {
                        let f = p.to_packet()?;
                        theta_direct_schwartz(&query, &f, cfg.tail_tol)
                            .map(|v| (v.value, v.value.norm(), v.terms))
                    }
                    _ => return Err("direct mode needs exactly one of box | packet".into()),
                },
                "auto" => {
                    let p = req.packet.as_ref().ok_or("auto mode needs a packet")?;
                    let f = p.to_packet()?;
                    let (h, g) = jacobi_of_query(&query);
                    theta_auto(&h, &g, &f, cfg.tail_tol).map(|v| {
                        let scaled = v
                            .value
                            .scale(query.m_scale.powf(0.5 * query.n() as f64));
                        (scaled, scaled.norm(), v.terms)
                    })
                }
                "fast" => {
                    let p = req.packet.as_ref().ok_or("fast mode needs a packet")?;
                    let f = p.to_packet()?;
                    let (h, g) = jacobi_of_query(&query);
                    let ctx = ReduceContext::new(query.n(), cfg.reduce_config());
                    theta_fast_modulus(&ctx, &h, &g, &f, cfg.tail_tol).map(|v| {
                        let m = v.modulus * query.m_scale.powf(0.5 * query.n() as f64);
                        (siegel_theta::Complex64::new(f64::NAN, f64::NAN), m, v.terms)
                    })
                }
                other => return Err(format!("unknown mode {other}")),
            };
            match outcome {
                Err(e) => {
                    eprintln!("theta: {e}");
                    Ok(guard_exit(&e))
                }
                Ok((value, modulus, terms)) => {
                    let resp = ThetaResponse {
                        value_re: value.re,
                        value_im: value.im,
                        modulus,
                        terms_used: terms,
                        seconds: started.elapsed().as_secs_f64(),
                    };
                    emit(args, &serde_json::to_string_pretty(&resp).unwrap())?;
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        "dyadic-bound" => {
            let text = read_input(args)?;
            let req: ThetaRequest = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let query = req.query.to_query()?;
            let spec = req.box_spec().ok_or("dyadic-bound needs a box")?;
            let ctx = ReduceContext::new(query.n(), cfg.reduce_config());
            match dyadic_height_bound(&ctx, &query, &spec, cfg.dyadic_scale) {
                Err(e) => {
                    eprintln!("dyadic-bound: {e}");
                    Ok(guard_exit(&e))
                }
                Ok(b) => {
                    emit(
                        args,
                        &serde_json::to_string_pretty(&serde_json::json!({
                            "bound": b.value,
                            "heights": b.heights,
                        }))
                        .unwrap(),
                    )?;
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        "haar-sample" => {
            if args.n == 0 || args.n > 3 {
                eprintln!("haar-sample: rank must be 1..3");
                return Ok(ExitCode::from(2));
            }
            let ctx = ReduceContext::new(args.n, cfg.reduce_config());
            let samples = haar_sample_region(args.n, args.count, args.seed, &ctx, cfg.domain_tol);
            if args.format == "csv" {
                let mut out = String::from(HAAR_CSV_SCHEMA);
                out.push('\n');
                for (i, s) in samples.iter().enumerate() {
                    out.push_str(&format!(
                        "{},{:.17e},{},{}\n",
                        i, s.det_v, s.weight, s.in_domain as u8
                    ));
                }
                emit(args, &out)?;
            } else {
                let rows: Vec<serde_json::Value> = samples
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        serde_json::json!({
                            "index": i,
                            "det_v": s.det_v,
                            "weight": s.weight,
                            "in_domain": s.in_domain,
                        })
                    })
                    .collect();
                emit(args, &serde_json::to_string_pretty(&rows).unwrap())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        "volume-tail" => {
            if args.n == 0 || args.n > 3 {
                eprintln!("volume-tail: rank must be 1..3");
                return Ok(ExitCode::from(2));
            }
            let ctx = ReduceContext::new(args.n, cfg.reduce_config());
            let grid = log_grid(args.r_min, args.r_max, args.r_points);
            match volume_tail(args.n, args.count, &grid, args.seed, &ctx, &cfg) {
                Err(e) => {
                    eprintln!("volume-tail: {e}");
                    Ok(guard_exit(&e))
                }
                Ok(tail) => {
                    if args.format == "csv" {
                        emit(args, &tail_to_csv(&tail))?;
                    } else {
                        emit(args, &serde_json::to_string_pretty(&tail).unwrap())?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        "flow" => {
            let text = read_input(args)?;
            let g: SpJson = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let g = g.to_sp()?;
            let ctx = ReduceContext::new(g.n(), cfg.reduce_config());
            match flow_excursion(&g, args.s_max, args.ds, &ctx) {
                Err(e) => {
                    eprintln!("flow: {e}");
                    Ok(guard_exit(&e))
                }
                Ok(flow) => {
                    if args.format == "csv" {
                        emit(args, &flow_to_csv(&flow))?;
                    } else {
                        emit(args, &serde_json::to_string_pretty(&flow).unwrap())?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        "sweep" => {
            if args.n == 0 || args.n > 2 {
                eprintln!("sweep: rank must be 1 or 2");
                return Ok(ExitCode::from(2));
            }
            let params = SweepParams {
                n: args.n,
                x_count: args.x_count,
                m_pow_min: args.m_pow_min,
                m_pow_max: args.m_pow_max,
                m_steps_per_octave: args.m_steps_per_octave,
                xy_samples: args.xy_samples,
                box_count: args.box_count,
                seed: args.seed,
            };
            let ctx = ReduceContext::new(args.n, cfg.reduce_config());
            match bound_sweep(&params, &ctx, &cfg) {
                Err(e) => {
                    eprintln!("sweep: {e}");
                    Ok(guard_exit(&e))
                }
                Ok(sweep) => {
                    if args.format == "csv" {
                        emit(args, &sweep_to_csv(&sweep))?;
                    } else {
                        emit(args, &serde_json::to_string_pretty(&sweep).unwrap())?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        "verify" => {
            if args.mutate_phase {
                siegel_theta::theta::set_phase_mutation(true);
            }
            let report = run_suite(&args.suite, args.seed, &cfg)?;
            siegel_theta::theta::set_phase_mutation(false);
            emit(args, &serde_json::to_string_pretty(&report).unwrap())?;
            if report.pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(4))
            }
        }
        other => Err(format!("unknown command {other}\n\n{USAGE}")),
    }
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match run(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
