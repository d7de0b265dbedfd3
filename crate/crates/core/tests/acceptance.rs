//! Acceptance run: one verdict line per criterion, with supporting numbers
//! indented below it. Exits non-zero when any criterion fails.

use std::process::ExitCode;

use leomec::params::{ConfigDocument, REFERENCE_TOML};
use leomec::validate::{
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, reference_run,
    CriterionReport, ValidateOptions,
};

fn main() -> ExitCode {
    let base = ConfigDocument::parse(REFERENCE_TOML).expect("bundled scenario parses");
    let opts = ValidateOptions::default();
    let mc = reference_run(&base, &opts);
    let checks: [&dyn Fn() -> CriterionReport; 8] = [
        &|| criterion_1(&mc, &opts),
        &|| criterion_2(&base, &mc),
        &|| criterion_3(&opts),
        &|| criterion_4(&base),
        &|| criterion_5(&base),
        &|| criterion_6(&base),
        &|| criterion_7(&base, &opts),
        &|| criterion_8(&base, &opts),
    ];
    let mut failed = 0;
    for check in checks {
        let r = check();
        println!("{}", r.line());
        for d in &r.details {
            println!("    {d}");
        }
        failed += usize::from(!r.passed);
    }
    println!("acceptance: {} of 8 criteria pass", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
