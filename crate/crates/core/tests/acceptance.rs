use std::process::ExitCode;

use qgroupoid::selftest::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let outcome = run_criterion(c);
        println!("{outcome}");
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
