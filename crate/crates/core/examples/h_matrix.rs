//! Ĥ in matrix form: row k holds (α₀, α₁…α_k, β₁…β_k) at order k, padded
//! with zeros. The α₀ column changes from row to row.
//!
//!     cargo run --release --example h_matrix -- 4

use zlab::falgebra::FunctionExpr;
use zlab::hop::{h_matrix, OffsetMode, SegmentSpec};
use zlab::ladder::LadderContext;

fn main() -> zlab::Result<()> {
    let k0: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let seg = SegmentSpec::new(200.0, 1.0, OffsetMode::PiL, None)?;
    let ctx = LadderContext::default();
    let m = h_matrix(&FunctionExpr::Sin2, &seg, k0, &ctx)?;
    let (rows, cols) = m.shape();
    println!("sin^2 on [200 pi, 200 pi + 1], shape {rows} x {cols}");
    for (i, row) in m.rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>11.5}")).collect();
        println!("k = {}: {}", i + 1, cells.join(" "));
    }
    Ok(())
}
