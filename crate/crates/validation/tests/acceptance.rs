use std::process::ExitCode;
use std::time::Instant;

use painleve_validation::{evaluate_all, Context};

fn main() -> ExitCode {
    let started = Instant::now();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let ctx = Context::compute(workers);
    let verdicts = evaluate_all(&ctx);
    println!();
    for v in &verdicts {
        println!("{}", v.line());
    }
    let failed: Vec<String> = verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| v.criterion.to_string())
        .collect();
    println!(
        "\nacceptance: {} of {} criteria pass ({:.1} s)",
        verdicts.len() - failed.len(),
        verdicts.len(),
        started.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
