//! `epspy`: seeded experiments on eps-truncated Pitman-Yor processes.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on numerical
//! failure diagnostics (for example a rejection-cap hit).

use epspy::config::{parse_args, Experiment};
use epspy::{experiments, output};
use std::process::ExitCode;

const USAGE: &str = "\
epspy <experiment> [flags]

EXPERIMENTS:
  table1         truncation-level summaries, exact vs asymptotic
  table2         F(1/3) summaries against the closed-form law (alpha = 1/2)
  table3         mean-functional summaries against a simulated reference
  fig1           binned density data for the asymptotic truncation level
  fig2           binned density data for F(1/2) with the reference law
  tilted-stable  raw draws of the tilted positive stable variable
  sample-exact   realizations from the stopping-rule sampler
  sample-approx  realizations from the asymptotic-level sampler
  tau-dist       raw draws of the asymptotic truncation level
  functional     one functional value (F12 | F13 | mean) per replication

FLAGS:
  --alpha A        discount parameter, 0 <= A < 1 (default 0.5)
  --theta T1,T2    concentration list (experiment-specific default)
  --eps E1,E2      truncation-level list (experiment-specific default)
  --n N            replications per cell (default 10000; 1 for sample-*)
  --seed S         master seed, decimal 64-bit (default 42)
  --out PATH       write to PATH instead of stdout
  --format F       csv | json (default csv)
  --which W        F12 | F13 | mean, for `functional` (default mean)
  --method M       exact | approx, for `functional` (default exact)
  --bins B         fixed histogram bin count (default Freedman-Diaconis)
  --config FILE    JSON file with the flag values; flags override it
  --help           print this text
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let cfg = match parse_args(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("epspy: {e}\n\n{USAGE}");
            return ExitCode::from(2);
        }
    };

    let result = match cfg.experiment {
        Experiment::Table1 => {
            experiments::run_table1(&cfg).map(|rows| output::write_summary_rows(&cfg, &rows))
        }
        Experiment::Table2 => {
            experiments::run_table2(&cfg).map(|rows| output::write_summary_rows(&cfg, &rows))
        }
        Experiment::Table3 => {
            experiments::run_table3(&cfg).map(|rows| output::write_summary_rows(&cfg, &rows))
        }
        Experiment::Fig1 => {
            experiments::run_fig1(&cfg).map(|rows| output::write_histogram_rows(&cfg, &rows))
        }
        Experiment::Fig2 => {
            experiments::run_fig2(&cfg).map(|rows| output::write_histogram_rows(&cfg, &rows))
        }
        Experiment::TiltedStable => experiments::run_tilted_stable(&cfg)
            .map(|vals| output::write_draws(&cfg, "t", &vals)),
        Experiment::SampleExact => experiments::run_realizations(&cfg, true)
            .map(|rs| output::write_realizations(&cfg, &rs)),
        Experiment::SampleApprox => experiments::run_realizations(&cfg, false)
            .map(|rs| output::write_realizations(&cfg, &rs)),
        Experiment::TauDist => {
            experiments::run_tau_dist(&cfg).map(|vals| output::write_tau_draws(&cfg, &vals))
        }
        Experiment::Functional => experiments::run_functional(&cfg)
            .map(|vals| output::write_draws(&cfg, "value", &vals)),
    };

    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(io_err)) => {
            eprintln!("epspy: output failed: {io_err}");
            ExitCode::FAILURE
        }
        Err(core_err) => {
            eprintln!("epspy: {core_err}");
            ExitCode::from(3)
        }
    }
}
