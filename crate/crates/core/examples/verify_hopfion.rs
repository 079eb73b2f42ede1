//! Runs the full identity battery on the built-in hopfion.

use knotlight::fields::hopf_ranada;
use knotlight::verify::{run_battery, BatteryConfig};

fn main() -> knotlight::Result<()> {
    let report = run_battery(&hopf_ranada(), &BatteryConfig::default())?;
    for c in &report.checks {
        println!(
            "{:<16} max {:.2e}  tol {:.0e}  {}",
            c.name,
            c.max_residual,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    println!(
        "{} samples, {} resampled, pass = {}",
        report.samples, report.resampled, report.pass
    );
    Ok(())
}
