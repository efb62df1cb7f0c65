use std::process::ExitCode;

use qcdual::suite::{run_criterion, SuiteOptions};

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let mut failed = Vec::new();
    for id in 1..=9 {
        let out = run_criterion(id, &opts);
        println!("{}", out.line());
        if !out.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
