//! Function DSL, pointwise evaluation, and symbolic external functions.

mod decimal;
mod expr;
mod external;
mod parse;

pub use decimal::{format_rational, Decimal};
pub use expr::{eval_function, Convention, FunctionExpr};
pub use external::{mean_integral_symbolic, structural_factor, ExtAtom, ExternalExpr, StructuralFactor};
pub use parse::parse_function;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atom() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("sin2".to_string()),
            Just("cos2".to_string()),
            (1u32..999).prop_map(|n| format!("pow({}.{:03})", n / 1000, n % 1000)),
        ]
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(atoms in prop::collection::vec(atom(), 1..4), coeffs in prop::collection::vec(0u32..50, 4)) {
            let text = atoms.iter().zip(&coeffs).map(|(a, c)| if *c == 0 { a.clone() } else { format!("{}.{}*{a}", c / 10, c % 10) }).collect::<Vec<_>>().join("+");
            if let Ok(f) = parse_function(&text) {
                let printed = f.to_string();
                prop_assert_eq!(parse_function(&printed).unwrap(), f.clone());
                prop_assert_eq!(parse_function(&printed).unwrap().to_string(), printed);
            }
        }

        #[test]
        fn canonicalization_idempotent(atoms in prop::collection::vec(atom(), 1..4)) {
            let text = atoms.join("+");
            if let Ok(f) = parse_function(&text) {
                let e = mean_integral_symbolic(&f);
                let again = e.add(&ExternalExpr::zero());
                prop_assert_eq!(&again, &e);
                prop_assert_eq!(again.to_string(), e.to_string());
            }
        }
    }

    #[test]
    fn eval_cases() {
        let l = 200.0;
        let pl = std::f64::consts::PI * l;
        assert!(eval_function(&FunctionExpr::Sin2, pl, l).unwrap() < 1e-26);
        assert_eq!(eval_function(&FunctionExpr::pow("1").unwrap(), l + 0.25, l).unwrap(), 0.25);
        let f = parse_function("pow(0.4)+pow(0.3)").unwrap();
        assert_eq!(eval_function(&f, l + 1.0, l).unwrap(), 2.0);
        assert!(eval_function(&f, l - 0.1, l).is_err());
    }
}
