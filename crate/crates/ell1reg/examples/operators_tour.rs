//! Tour of the operator zoo: forward application, adjoints, source
//! elements, the link condition, and column-norm behavior.
//!
//! ```bash
//! cargo run --example operators_tour
//! ```

use ell1reg::{OperatorSpec, Result, TruncatedSequence};

fn main() -> Result<()> {
    let n = 8;
    let x = TruncatedSequence::new(vec![1.0, 1.0, 1.0, 0.0, 2.0, 0.0, 0.0, -1.0])?;

    println!("=== Cesàro averaging operator ===\n");
    let cesaro = OperatorSpec::cesaro(n)?;
    let y = cesaro.apply(&x)?;
    println!("x      = {:?}", x.values());
    println!("Ax     = {:?}", y.values());
    let w = cesaro.apply_adjoint(&y)?;
    println!("A*(Ax) = {:?}\n", w.values());

    println!("source elements f_k with A* f_k = e_k (support <= 2):");
    for k in [1, 2, 5] {
        let f = cesaro.source_element(k)?;
        println!("  f_{k} = {:?}", f.coeffs);
        assert!(cesaro.verify_link_condition(k, 1e-12)?);
    }
    println!("link condition verified to 1e-12 for k = 1..{n}\n");

    println!("column norms ||A e_k|| (decay to zero despite noncompactness):");
    for k in [1, 2, 10, 100, 1000] {
        println!("  k = {k:4}: {:.8}", cesaro.column_norm(k)?);
    }

    println!("\n=== diagonal operator (sigma_k = 1/k) ===\n");
    let diagonal = OperatorSpec::diagonal_power(1.0, n)?;
    println!("Ax = {:?}", diagonal.apply(&x)?.values());
    println!("f_3 = {:?} (inverse singular value)", diagonal.source_element(3)?.coeffs);
    println!(
        "column norms equal sigma_k: k=4 -> {}",
        diagonal.column_norm(4)?
    );

    println!("\n=== embedding into l^4 ===\n");
    let embedding = OperatorSpec::embedding(4.0, n)?;
    println!("Ax = x entrywise: {:?}", embedding.apply(&x)?.values());
    println!(
        "column norms stay at {} for every k: the decay condition fails here",
        embedding.column_norm(123)?
    );
    println!(
        "dual exponent of l^4 is q' = {} (norm used for the f_k)",
        embedding.dual_exponent()
    );
    Ok(())
}
