//! Runs every acceptance criterion and prints one line per criterion.
//! Exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cayley_cli::verify::{run_one, CRITERIA};

const SUITE_BUDGET: Duration = Duration::from_secs(300);

fn main() -> ExitCode {
    let started = Instant::now();
    let results: Vec<_> = (1..=CRITERIA).map(run_one).collect();
    for r in &results {
        println!("{}", r.line());
    }
    let total = started.elapsed();
    let in_budget = total < SUITE_BUDGET;
    println!(
        "suite {} in {:.1}s (budget {}s)",
        if in_budget { "ran" } else { "OVER BUDGET" },
        total.as_secs_f64(),
        SUITE_BUDGET.as_secs()
    );
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() && in_budget {
        println!("acceptance: all {CRITERIA} criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
