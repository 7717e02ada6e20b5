//! Runs a reduced lifelong suite and prints the per-cell table.

use stemos::metrics::{run_suite, SuiteConfig};

fn main() {
    let mut cfg = SuiteConfig::lifelong();
    cfg.trials = 12;
    cfg.sqs = vec![1, 5];
    let report = run_suite(&cfg);
    print!("{}", report.table());
    for level in ["L1", "L2"] {
        let cell = format!("{level}/SQ5");
        if let (Some(m), Some(b)) = (report.get(&cell, "memory"), report.get(&cell, "baseline")) {
            println!("{cell}: MSR {:.1} vs {:.1}", m.msr, b.msr);
        }
    }
}
