//! Crossbreeding a family of functions: factorization formulas, the
//! elimination trail, the certificate, and its numeric check.
//!
//!     cargo run --release --example crossbreed -- "pow(0.7)" "pow(0.4)" "pow(0.3)"

use zlab::crossbreed::kindred_verdict;
use zlab::falgebra::{parse_function, Convention};
use zlab::hop::{OffsetMode, SegmentSpec};
use zlab::ladder::LadderContext;

fn main() -> zlab::Result<()> {
    let mut texts: Vec<String> = std::env::args().skip(1).collect();
    if texts.is_empty() {
        texts = vec!["sin2".into(), "cos2".into()];
    }
    let functions = texts.iter().map(|t| parse_function(t)).collect::<zlab::Result<Vec<_>>>()?;
    let seg = if functions.iter().all(|f| f.convention() == Convention::Trig) {
        SegmentSpec::new(200.0, 1.0, OffsetMode::PiL, None)?
    } else {
        SegmentSpec::new(1000.0, 0.5, OffsetMode::L, Some(0.9))?
    };
    let ctx = LadderContext::default();
    let verdict = kindred_verdict(&functions, &seg, &vec![1; functions.len()], Some(&ctx))?;

    for f in &verdict.report.formulas {
        println!("{f}");
    }
    if let Some(cert) = &verdict.certificate {
        for s in &cert.stages {
            let gone: Vec<String> = s.eliminated.iter().map(|a| a.to_string()).collect();
            println!("stage {} ({:?}) on {:?}: eliminates [{}], leaves {}", s.index, s.kind, s.participants, gone.join(", "), s.remaining);
        }
        println!("certificate: {}", cert.text);
        println!("complete: {}", cert.complete);
    }
    for c in &verdict.report.checks {
        println!("{} check: value {:.12}, residual {:.3e}", c.mode, c.value, c.residual);
    }
    for n in &verdict.report.notes {
        println!("note: {n}");
    }
    println!("kindred: {}", verdict.kindred);
    Ok(())
}
