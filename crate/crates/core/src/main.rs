// Errors carry exact rationals for diagnostics and are off the hot path.
#![allow(clippy::result_large_err)]

use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pqlift::io::{emit_outputs, parse_input, run_pipeline, JobSpec, LiftReport, Targets};
use pqlift::Error;

/// Exact moment webs and 3D lifts for toric Calabi–Yau threefolds.
#[derive(Parser)]
#[command(name = "pqlift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the input and print the Kähler and closure verdicts.
    Check(Common),
    /// Run the full pipeline and write the requested outputs.
    Lift {
        #[command(flatten)]
        common: Common,
        /// Write the JSON report here.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Write an SVG drawing of the planar web here.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
        /// Write 3D polylines here.
        #[arg(long, value_name = "PATH")]
        lines3d: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Job file, or `-` for standard input.
    input: PathBuf,
    /// Exit with status 2 unless the lift closes.
    #[arg(long)]
    require_closed: bool,
    /// Accept classes with non-positive curve degrees.
    #[arg(long)]
    allow_non_kaehler: bool,
}

const OUTPUT_DIR_VAR: &str = "PQLIFT_OUTPUT_DIR";

fn read_spec(common: &Common) -> Result<JobSpec, Error> {
    let text = if common.input == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|source| Error::Read {
            path: common.input.clone(),
            source,
        })?;
        buf
    } else {
        std::fs::read_to_string(&common.input).map_err(|source| Error::Read {
            path: common.input.clone(),
            source,
        })?
    };
    let mut spec = parse_input(&text)?;
    spec.flags.require_closed |= common.require_closed;
    spec.flags.allow_non_kaehler |= common.allow_non_kaehler;
    Ok(spec)
}

fn output_path(path: Option<PathBuf>) -> Option<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_VAR);
    path.map(|p| match &dir {
        Some(d) if p.is_relative() => Path::new(d).join(p),
        _ => p,
    })
}

fn run(cli: Cli) -> Result<(LiftReport, bool), Error> {
    match cli.command {
        Command::Check(common) => {
            let spec = read_spec(&common)?;
            let report = run_pipeline(&spec)?;
            print!("{}", report.summary());
            Ok((report, spec.flags.require_closed))
        }
        Command::Lift {
            common,
            json,
            svg,
            lines3d,
        } => {
            let spec = read_spec(&common)?;
            let report = run_pipeline(&spec)?;
            let targets = Targets {
                json: output_path(json),
                svg: output_path(svg),
                lines3d: output_path(lines3d),
            };
            emit_outputs(&report, &targets)?;
            print!("{}", report.summary());
            Ok((report, spec.flags.require_closed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((report, require_closed)) => {
            if require_closed && !report.closed {
                eprintln!("error: lift does not close");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
