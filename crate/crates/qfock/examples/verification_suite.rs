//! Runs the quick verification suite end to end and prints one line per
//! claim, the same registry the `qfock check` subcommand uses.

use qfock::suite::{run_all, Profile, DEFAULT_SEED};

fn main() {
    let records = run_all(Profile::Quick, DEFAULT_SEED);
    let mut failures = 0;
    for r in &records {
        println!(
            "{} {:<30} residual {:.3e}  bound {:.3e}  {:>5} ms  seed {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.residual,
            r.bound,
            r.runtime_ms,
            r.seed
        );
        if !r.pass {
            failures += 1;
        }
    }
    println!("\n{} checks, {} failures", records.len(), failures);
    assert_eq!(failures, 0);
}
