mod args;
mod commands;
mod input;

use std::process::ExitCode;

use chabauty::report::{all_pass, Check};
use chabauty::{Error, Result};
use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use args::{BoundCmd, Cli, Command, CountCmd, FgroupCmd, JetsCmd};
use commands::Outcome;

/// Everything needed to reproduce a run.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    params: Value,
    version: &'static str,
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

fn params(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn dispatch(cli: &Cli) -> (String, Value, Result<Outcome>) {
    let json = cli.json.as_ref();
    match &cli.cmd {
        Command::Fgroup(FgroupCmd::Exp(a)) => ("fgroup exp".into(), params(a), commands::fgroup_exp(a)),
        Command::Zeros(a) => ("zeros".into(), params(a), commands::zeros(a)),
        Command::DiskBound(a) => ("disk-bound".into(), params(a), commands::disk(a)),
        Command::Jets(JetsCmd::Mx(a)) => ("jets mx".into(), params(a), commands::jets_mx(a, json)),
        Command::Count(CountCmd::Zeta(a)) => ("count zeta".into(), params(a), commands::count_zeta(a)),
        Command::Count(CountCmd::Weil(a)) => ("count weil".into(), params(a), commands::count_weil(a, json)),
        Command::Bound(BoundCmd::Surface(a)) => ("bound surface".into(), params(a), commands::bound_surface(a)),
        Command::Bound(BoundCmd::Sym2(a)) => ("bound sym2".into(), params(a), commands::bound_sym2(a)),
        Command::Bound(BoundCmd::Coleman(a)) => ("bound coleman".into(), params(a), commands::bound_coleman(a)),
        Command::Selftest(a) => ("selftest".into(), params(a), commands::run_selftest(a)),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Usage(_) => "usage",
        Error::Parse(_) => "parse",
        Error::DivisionByZero => "division_by_zero",
        Error::Precision(_) => "precision",
        Error::Resource(_) => "resource",
        Error::Hypothesis { .. } => "hypothesis",
        Error::Inconclusive(_) => "inconclusive",
        Error::Consistency(_) => "consistency",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, params, outcome) = dispatch(&cli);
    let timestamp = cli.stamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let (doc, code) = match outcome {
        Ok(o) => {
            let code = if o.inconclusive {
                3
            } else if all_pass(&o.checks) {
                0
            } else {
                2
            };
            let manifest = RunManifest {
                command,
                params,
                version: env!("CARGO_PKG_VERSION"),
                seed: o.seed,
                timestamp,
            };
            let doc = json!({
                "manifest": manifest,
                "inputs_echo": o.inputs_echo,
                "result": o.result,
                "checks": o.checks,
            });
            (doc, code)
        }
        Err(e) => {
            eprintln!("chabauty: {e}");
            let manifest = RunManifest {
                command,
                params,
                version: env!("CARGO_PKG_VERSION"),
                seed: None,
                timestamp,
            };
            let doc = json!({
                "manifest": manifest,
                "inputs_echo": Value::Null,
                "result": Value::Null,
                "error": {"kind": error_kind(&e), "message": e.to_string()},
                "checks": Vec::<Check>::new(),
            });
            (doc, e.exit_code())
        }
    };
    let text = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("chabauty: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code as u8)
}
