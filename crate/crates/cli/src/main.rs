use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pcca_cli::{cmd_run, cmd_sweep, CliError, RunOptions, RunReport};

#[derive(Parser)]
#[command(name = "pcca", version, about = "Run multi-agent collision-avoidance scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write trace.csv and metrics.json.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Fail unless the estimate identity holds for every PCCA pair.
        #[arg(long)]
        assert_theorem2: bool,
        /// Fail if any two agent footprints overlap.
        #[arg(long)]
        assert_no_collision: bool,
        /// Also write trajectory.svg and barrier.svg.
        #[arg(long)]
        svg: bool,
    },
    /// Find the required radius margin for each sampling time.
    Sweep {
        scenario: PathBuf,
        /// Sampling times in seconds, comma separated.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        dts: Vec<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn summarize(report: &RunReport) {
    if let Some(m) = &report.metrics {
        println!("min h_r0: {} m^2 (collision free: {})", m.min_h_r0_m2, m.collision_free);
    }
    if let Some(s) = &report.sweep {
        for r in &s.rows {
            println!("dt {} s: margin {} m, min h {} m^2", r.dt_s, r.margin_m, r.min_h_m2);
        }
        if let Some(ratio) = s.margin_ratio_first_last {
            println!("margin ratio first/last: {ratio:.3}");
        }
    }
    for a in &report.assertions {
        println!("assert {}: {} ({})", a.name, if a.passed { "pass" } else { "FAIL" }, a.detail);
    }
    for f in &report.files {
        println!("wrote {f}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<RunReport, CliError> = match cli.command {
        Command::Run {
            scenario,
            out,
            assert_theorem2,
            assert_no_collision,
            svg,
        } => cmd_run(
            &scenario,
            &out,
            &RunOptions {
                assert_theorem2,
                assert_no_collision,
                svg,
            },
        ),
        Command::Sweep { scenario, dts, out } => cmd_sweep(&scenario, &dts, &out),
    };
    match result {
        Ok(report) => {
            summarize(&report);
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
