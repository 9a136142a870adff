//! Hardy's Z-function along the critical line: values, the two evaluation
//! routes, and a crude zero scan.
//!
//!     cargo run --example hardy_z -- 14 60

use zlab::zcore::{euler_maclaurin_z, hardy_z, riemann_siegel_theta, riemann_siegel_z, zeta_mod_sq_half, EvalAccuracy};

fn main() -> zlab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (lo, hi) = match args.as_slice() {
        [a, b] => (*a, *b),
        _ => (10.0, 50.0),
    };
    let acc = EvalAccuracy::default();

    for t in [20.0, 100.0, 1000.0] {
        let (rs, bound) = riemann_siegel_z(t)?;
        println!(
            "t = {t:>6}: theta = {:>12.6}  Z = {:>12.9}  |zeta|^2 = {:>10.6}  (RS {rs:.9}, bound {bound:.1e}; EM {:.9})",
            riemann_siegel_theta(t, &acc)?,
            hardy_z(t, &acc)?,
            zeta_mod_sq_half(t, &acc)?,
            euler_maclaurin_z(t, &acc)?,
        );
    }

    println!("\nsign changes of Z in [{lo}, {hi}]:");
    let step = 0.01;
    let mut t = lo;
    let mut prev = hardy_z(t, &acc)?;
    while t < hi {
        let next = hardy_z(t + step, &acc)?;
        if prev * next < 0.0 {
            // one secant step is enough for a listing
            let root = t + step * prev / (prev - next);
            println!("  ~{root:.4}");
        }
        prev = next;
        t += step;
    }
    Ok(())
}
