//! Persisting the J(T) checkpoint grid and reusing it in a later run.
//!
//!     cargo run --release --example checkpoint_cache -- /tmp/j.csv

use std::time::Instant;

use zlab::ladder::LadderContext;

fn main() -> zlab::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("zlab_j.csv").display().to_string());
    let path = std::path::Path::new(&path);

    let cold = LadderContext::default();
    let start = Instant::now();
    let j = cold.hl_integral(20_000.0)?;
    println!("cold: J(20000) = {j:.6} in {:.2?}, {} checkpoints", start.elapsed(), cold.checkpoint_count());
    cold.save_checkpoints(path)?;

    let warm = LadderContext::default();
    let loaded = warm.load_checkpoints(path)?;
    let start = Instant::now();
    let again = warm.hl_integral(20_000.0)?;
    println!("warm: J(20000) = {again:.6} in {:.2?} after loading {loaded} checkpoints", start.elapsed());
    println!("bit-identical: {}", j.to_bits() == again.to_bits());

    // a context with a different tolerance refuses the file
    match LadderContext::new(1e-6)?.load_checkpoints(path) {
        Ok(_) => println!("unexpected: mismatched cache accepted"),
        Err(e) => println!("tol 1e-6 context: {e}"),
    }
    Ok(())
}
