//! Builds a field from expression strings and reports which identities fail.
//!
//! Usage: cargo run --example custom_pair -- "ALPHA" "BETA"

use knotlight::fields::BatemanField;
use knotlight::verify::{run_battery, BatteryConfig};

fn main() -> knotlight::Result<()> {
    let mut args = std::env::args().skip(1);
    let alpha = args.next().unwrap_or_else(|| "x+i*y".into());
    let beta = args.next().unwrap_or_else(|| "t+i*z".into());
    let field = BatemanField::from_expressions(&alpha, &beta, false)?;
    let local = field.local(&[0.1, 0.2, 0.3, 0.4])?;
    let s = local.sample();
    println!("at (0.1, 0.2, 0.3, 0.4): E = {:?}, B = {:?}", s.e, s.b);

    let cfg = BatteryConfig {
        samples: 200,
        ..Default::default()
    };
    let report = run_battery(&field, &cfg)?;
    for c in report.failing() {
        println!(
            "fails {:<16} max residual {:.3e} at {:?}",
            c.name, c.max_residual, c.worst_point
        );
    }
    println!("pass = {}", report.pass);
    Ok(())
}
