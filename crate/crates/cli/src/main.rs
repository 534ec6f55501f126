use std::process::ExitCode;

use clap::Parser;
use galqr_cli::{run, Cli};

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "GALQR_THREADS";

fn error_record(command: &str, err: &anyhow::Error) -> serde_json::Value {
    serde_json::json!({
        "error": {
            "command": command,
            "message": err.to_string(),
            "causes": err.chain().skip(1).map(|c| c.to_string()).collect::<Vec<_>>(),
        }
    })
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = cli.command.name();
    let result = configure_threads().and_then(|()| run(cli, &args));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", error_record(name, &err));
            ExitCode::FAILURE
        }
    }
}
