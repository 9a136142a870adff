//! The function DSL: parse, canonicalize, evaluate, and read off the closed
//! form of the mean value (the external function) and the structural factor.
//!
//!     cargo run --example dsl -- "0.5*cos2 + sin2"

use zlab::falgebra::{eval_function, mean_integral_symbolic, parse_function, structural_factor};

fn main() {
    let inputs: Vec<String> = std::env::args().skip(1).collect();
    let inputs = if inputs.is_empty() {
        ["sin2", "cos2", "pow(0.5)", "pow(0.3) + pow(0.4)", "2*sin2 + 2*cos2", "pow(0.4)+pow(0.4)", "sin2 + pow(1)"]
            .map(String::from)
            .to_vec()
    } else {
        inputs
    };
    for text in &inputs {
        match parse_function(text) {
            Ok(f) => {
                let ext = mean_integral_symbolic(&f);
                println!("{text:>22} -> {f}");
                println!("{:>22}    convention {:?}, E(U) = {ext}, E(0.5) = {:.9}", "", f.convention(), ext.eval(0.5));
                println!("{:>22}    F = {}, f(L + 0.25) = {:.6}", "", structural_factor(&f), eval_function(&f, 1000.25, 1000.0).unwrap_or(f64::NAN));
            }
            Err(e) => println!("{text:>22} -> error: {e}"),
        }
    }
}
