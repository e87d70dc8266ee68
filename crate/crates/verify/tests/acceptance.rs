//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::time::Instant;

use cpg_verify::{run_suite, Suite};

fn main() {
    let start = Instant::now();
    let checks = run_suite(Suite::All, |c| println!("{c}"));
    let failed: Vec<u8> = checks.iter().filter(|c| !c.pass).map(|c| c.criterion).collect();
    println!(
        "\n{} of {} criteria passed in {:.1} s",
        checks.len() - failed.len(),
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
