//! Batch harness for fixed-point experiments.
//!
//! Subcommands:
//!   geofirm run <config|preset:NAME>   run an experiment, write trace CSV
//!   geofirm verify [samples] [seed]    invariant sweeps over the model spaces
//!   geofirm certify <trace> <params>   certify a previously written trace
//!   geofirm presets list               list built-in presets
//!
//! GEOFIRM_SEED overrides the config seed. Exit codes: 0 ok, 2 config
//! error, 3 solver failure, 4 certification failed.

use std::path::Path;
use std::process::ExitCode;

use geofirm::config;
use geofirm::error::Error;

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::InvalidParameter(_) | Error::Io(_) => 2,
        Error::SolverFailure { .. } => 3,
        Error::NotCertified(_) => 4,
        _ => 2,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn cmd_run(arg: &str) -> ExitCode {
    let text = if let Some(name) = arg.strip_prefix("preset:") {
        match config::preset_config(name) {
            Some(t) => t.to_string(),
            None => {
                eprintln!("error: unknown preset `{name}`");
                return ExitCode::from(2);
            }
        }
    } else {
        match std::fs::read_to_string(arg) {
            Ok(t) => t,
            Err(e) => return fail(Error::Io(e)),
        }
    };
    let cfg = match config::parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    match config::run_experiment(&cfg, Path::new(".")) {
        Ok(outcome) => {
            println!(
                "wrote {} ({} iterates, final residual {:e}, stopped by {})",
                outcome.trace_path.display(),
                outcome.trace.len(),
                outcome.trace.final_residual(),
                outcome.trace.stop_reason.as_str()
            );
            if let Some(rec) = &outcome.certification {
                println!(
                    "certification: {} ({})",
                    if rec.certified { "ok" } else { "FAILED" },
                    outcome
                        .cert_path
                        .as_ref()
                        .map(|p| p.display().to_string())
                        .unwrap_or_default()
                );
                if !rec.certified {
                    return ExitCode::from(4);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn cmd_verify(args: &[String]) -> ExitCode {
    let samples = args
        .first()
        .and_then(|v| v.parse().ok())
        .unwrap_or(2000usize);
    let seed = std::env::var(config::SEED_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .or_else(|| args.get(1).and_then(|v| v.parse().ok()))
        .unwrap_or(1u64);
    match config::verify_suite(&config::default_spaces(), samples, seed) {
        Ok(rows) => {
            print!("{}", config::verify_rows_to_csv(&rows));
            if rows.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => fail(e),
    }
}

fn cmd_certify(trace_path: &str, params_path: &str) -> ExitCode {
    let csv = match std::fs::read_to_string(trace_path) {
        Ok(t) => t,
        Err(e) => return fail(Error::Io(e)),
    };
    let params_text = match std::fs::read_to_string(params_path) {
        Ok(t) => t,
        Err(e) => return fail(Error::Io(e)),
    };
    let params = match config::parse_certify_params(&params_text) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    match config::certify_trace_file(&csv, &params) {
        Ok(record) => {
            print!("{}", record.to_text());
            if record.certified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            }
        }
        Err(e) => fail(e),
    }
}

fn cmd_presets_list() -> ExitCode {
    for (name, description, _) in config::presets() {
        println!("{name}\t{description}");
    }
    ExitCode::SUCCESS
}

fn usage() -> ExitCode {
    eprintln!(
        "usage: geofirm run <config|preset:NAME>\n       geofirm verify [samples] [seed]\n       geofirm certify <trace.csv> <params>\n       geofirm presets list"
    );
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") if args.len() == 2 => cmd_run(&args[1]),
        Some("verify") => cmd_verify(&args[1..]),
        Some("certify") if args.len() == 3 => cmd_certify(&args[1], &args[2]),
        Some("presets") if args.len() == 2 && args[1] == "list" => cmd_presets_list(),
        _ => usage(),
    }
}
