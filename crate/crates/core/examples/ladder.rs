//! The Hardy–Littlewood integral J(T), the ladder φ₁ = V⁻¹∘J, its inverse,
//! and one reverse iteration of a segment.
//!
//!     cargo run --release --example ladder -- 5000

use zlab::ladder::{Interval, LadderContext};

fn main() -> zlab::Result<()> {
    let t: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1000.0);
    let ctx = LadderContext::default();

    let j = ctx.hl_integral(t)?;
    let phi = ctx.ladder_phi1(t)?;
    println!("J({t}) = {j:.6}");
    println!("phi1({t}) = {phi:.6}   (gap {:.4})", t - phi);
    println!("phi1^-1({t}) = {:.6}", ctx.phi1_inverse(t)?);
    println!("Z~^2({t}) = {:.6}   Z^2({t}) = {:.6}", ctx.z_tilde_sq(t)?, ctx.z_squared(t)?);

    let s0 = Interval::new(t, t + 1.0)?;
    let s1 = ctx.reverse_segment(s0)?;
    println!("reverse iterate of [{}, {}] = [{:.6}, {:.6}], length {:.6}", s0.lo, s0.hi, s1.lo, s1.hi, s1.len());
    let back = ctx.push_forward(s1)?;
    println!("pushed forward again: [{:.9}, {:.9}]", back.lo, back.hi);
    println!("checkpoints computed: {}", ctx.checkpoint_count());
    Ok(())
}
