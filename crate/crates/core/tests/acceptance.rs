//! Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use nervecov::acceptance::{run_all, AcceptanceConfig};

fn main() {
    let mut cfg = AcceptanceConfig::default();
    if let Some(w) = std::env::var("NERVECOV_WORKERS").ok().and_then(|v| v.parse().ok()) {
        cfg.workers = w;
    }
    let results = run_all(&cfg);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
