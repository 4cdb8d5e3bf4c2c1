//! Sharp embedding decisions in exact arithmetic.
//!
//! cargo run --example decide_embedding

use alphamod::index_calculus::{embedding_decide, index_a, region_classify, wang_han_decide};
use alphamod::cli_reports::parse_space;

fn main() -> alphamod::Result<()> {
    let pairs = [
        ("p=2,q=2,s=0,alpha=0", "p=2,q=1,s=0,alpha=0"),
        ("p=2,q=2,s=1,alpha=0", "p=2,q=1,s=0,alpha=0"),
        ("p=1,q=inf,s=1/2,alpha=0", "p=inf,q=inf,s=0,alpha=1/2"),
        ("p=4/3,q=3,s=3/4,alpha=1", "p=4,q=3,s=0,alpha=1/3"),
        ("p=inf,q=2,s=5,alpha=1/2", "p=2,q=2,s=0,alpha=1/2"),
    ];
    for (a, b) in pairs {
        let (src, tgt) = (parse_space(a)?, parse_space(b)?);
        let v = embedding_decide(&src, &tgt)?;
        println!("{a:<28} -> {b:<28} embeds={:<5} margin={:<6} {:?} ({})", v.embeds, v.margin, v.q_case, v.reason);
    }

    // equal exponents reduce to the classical threshold
    let (src, tgt) = (parse_space("p=3,q=3/2,s=1/4,alpha=1/4")?, parse_space("p=3,q=3/2,s=0,alpha=3/4")?);
    println!(
        "\nequal exponents: sharp {} classical {}",
        embedding_decide(&src, &tgt)?.embeds,
        wang_han_decide(&src, &tgt)?.embeds
    );

    let ib = index_a(1, 1.0, 0.0, 0.0, 0.0, 0.5)?;
    let regions = region_classify(1.0, 0.0, 0.0, ib.branch)?;
    println!("A(1, 0; q=inf; 0, 1/2) = {} via terms {:?}, regions {:?}", ib.value, ib.argmax, regions);
    Ok(())
}
