//! One application of Ĥ and both readings of the factorization identity:
//! the exact one with Z̃² and the zeta-modulus one.
//!
//!     cargo run --release --example factorize -- "pow(0.5)" 1000 2

use zlab::falgebra::{parse_function, Convention};
use zlab::hop::{apply_h, factorization_eval, Mode, OffsetMode, SegmentSpec};
use zlab::ladder::LadderContext;

fn main() -> zlab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let f = parse_function(args.first().map(String::as_str).unwrap_or("sin2"))?;
    let base: f64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(200.0);
    let k: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(2);

    let seg = match f.convention() {
        Convention::Trig => SegmentSpec::new(base, 1.0, OffsetMode::PiL, None)?,
        Convention::Power => SegmentSpec::new(base, 0.5, OffsetMode::L, Some(0.9))?,
    };
    let ctx = LadderContext::default();
    let data = apply_h(&f, &seg, k, &ctx)?;

    println!("f = {f} on [{:.6}, {:.6}], k = {k}", seg.start(), seg.start() + seg.u());
    println!("H = {:.12}, alpha0 = {:.9}, f(alpha0) = {:.9}", data.h_value, data.alpha[0], data.f_alpha0);
    for r in 1..=k {
        let s = data.segments[r];
        println!(
            "  r = {r}: S = [{:.6}, {:.6}]  A = {:.10}  B = {:.10}  alpha = {:.9}  beta = {:.9}",
            s.lo, s.hi, data.stage_a[r - 1], data.stage_b[r], data.alpha[r], data.beta[r - 1]
        );
    }
    for mode in [Mode::Exact, Mode::Zeta] {
        let rep = factorization_eval(&data, mode, &ctx)?;
        println!("{mode:>5}: product {:.12}  H/f(alpha0) {:.12}  residual {:.3e}", rep.lhs_product, rep.rhs, rep.residual);
    }
    Ok(())
}
