//! Pucci extremal operators of a few symmetric matrices, with the duality
//! `P-(X) = -P+(-X)` and a comparison against the operator family they bound.

use obstacle::operators::{pucci_extremal, PucciSign, SymMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (lambda, big_lambda) = (1.0, 3.0);
    let samples = [
        ("identity", SymMatrix::identity(2)),
        ("saddle", SymMatrix::diag(&[1.0, -2.0])),
        ("sheared", SymMatrix::new2(0.5, 1.5, -0.25)),
        ("negative", SymMatrix::new2(-2.0, 0.3, -1.0)),
    ];
    println!("{:>10} {:>12} {:>12} {:>12}", "matrix", "P+", "P-", "-P+(-X)");
    for (name, x) in samples {
        let plus = pucci_extremal(PucciSign::Plus, &x, lambda, big_lambda)?;
        let minus = pucci_extremal(PucciSign::Minus, &x, lambda, big_lambda)?;
        let dual = -pucci_extremal(PucciSign::Plus, &(x * -1.0), lambda, big_lambda)?;
        println!("{name:>10} {plus:>12.6} {minus:>12.6} {dual:>12.6}");

        // every A with lambda I <= A <= Lambda I gives -Tr(AX) between the two
        for a in [lambda, 0.5 * (lambda + big_lambda), big_lambda] {
            let value = -(SymMatrix::identity(2) * a).trace_product(&x);
            assert!(minus - 1e-12 <= value && value <= plus + 1e-12);
        }
    }
    Ok(())
}
