use std::process::ExitCode;

use clap::Parser;
use misinfo_abm::expcli::cli::Cli;
use misinfo_abm::expcli::run_batch;
use misinfo_abm::Error;

fn main() -> ExitCode {
    let plan = match Cli::parse().into_plan() {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let runs = plan.runs().len();
    eprintln!(
        "running {runs} simulations ({} steps each) with {} job(s) into {}",
        plan.base.timesteps,
        plan.jobs,
        plan.out_dir.display()
    );
    match run_batch(&plan) {
        Ok(report) => {
            println!("algorithm,mean_msp,mean_mrd,mean_mc,rank_msp,rank_mrd,rank_mc");
            for s in &report.aggregates {
                println!(
                    "{},{:.4},{:.4},{:.4},{},{},{}",
                    s.algorithm,
                    s.mean_msp,
                    s.mean_mrd,
                    s.mean_mc,
                    s.rank_msp.unwrap_or(0),
                    s.rank_mrd.unwrap_or(0),
                    s.rank_mc.unwrap_or(0)
                );
            }
            ExitCode::SUCCESS
        }
        Err(e @ (Error::InvalidConfig(_) | Error::Usage(_) | Error::Parse { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
