//! A grid scan through the harness: every order assignment up to k0 on a
//! few bases, with the median zeta-mode residual per decade.
//!
//!     cargo run --release --example scan

use zlab::harness::{run_scan, ModeSelection, RunConfig};
use zlab::ladder::LadderContext;

fn main() -> zlab::Result<()> {
    let cfg = RunConfig {
        family: vec!["pow(0.4)+pow(0.3)".into(), "pow(0.4)".into(), "pow(0.3)".into()],
        grid: vec![300.0, 3000.0, 30000.0],
        u: 0.5,
        k0: Some(2),
        mode: ModeSelection::Both,
        ..RunConfig::default()
    };
    let ctx = LadderContext::new(cfg.quadrature_tol)?;
    let report = run_scan(&cfg, &ctx)?;
    if let Some(cert) = &report.certificate {
        println!("{}", cert.text);
    }
    for row in &report.rows {
        println!(
            "start {:>8}  orders {:?}  exact {:>9.2e}  zeta {:>9.2e}  band {:.3}",
            row.start,
            row.orders.values().collect::<Vec<_>>(),
            row.exact.unwrap_or(f64::NAN),
            row.zeta.unwrap_or(f64::NAN),
            row.zeta_band
        );
    }
    for d in &report.trend {
        println!("1e{}: {} rows, median zeta residual {:.2e}", d.decade, d.rows, d.median_zeta.unwrap_or(f64::NAN));
    }
    println!("passed: {}", report.passed);
    Ok(())
}
