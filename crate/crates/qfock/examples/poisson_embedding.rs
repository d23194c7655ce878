//! The Poisson embedding of a pure contractive tuple: an isometry (up to
//! the purity tail) into the truncated Fock space tensored with the defect
//! space, implementing every word compression and landing inside the
//! deformed subspace when the tuple q-commutes.

use qfock::dilation::{enumerate_words, fock_shift_blocks, poisson_embedding, purity_deficit, weyl_pair_generator};
use qfock::fock::{FockContext, QFock};
use qfock::linalg::{kron, matmul, ComplexMatrix};

fn main() {
    let (t, q) = weyl_pair_generator(2, 0.7).expect("valid order");
    let level = 6;
    let eps = 0.49f64.powi((level + 1) as i32) * 4.0;
    println!(
        "purity deficit at stage {}: {:.3e} (allowance {eps:.3e})",
        level + 1,
        purity_deficit(&t, level + 1).unwrap()
    );

    let (a, basis) = poisson_embedding(&t, level, eps).expect("pure enough");
    let d0 = basis.cols;
    println!("embedding: C^{} -> {} Fock words x {} defect directions", t.dim, a.rows / d0, d0);

    let gram = matmul(&a.adjoint(), &a).unwrap();
    let iso = gram.sub(&ComplexMatrix::identity(t.dim)).max_abs();
    println!("isometry deficit: {iso:.3e}");
    assert!(iso < eps);

    // word compressions through the embedding recover the tuple
    let fock = FockContext::new(t.n, level);
    let mut worst = 0.0f64;
    for w in enumerate_words(t.n, 2) {
        let mut shifted = a.clone();
        for &i in w.iter().rev() {
            shifted = fock_shift_blocks(&shifted, &fock, d0, i);
        }
        let lhs = matmul(&a.adjoint(), &shifted).unwrap();
        let mut rhs = ComplexMatrix::identity(t.dim);
        for &i in &w {
            rhs = matmul(&rhs, &t.matrices[i]).unwrap();
        }
        worst = worst.max(lhs.sub(&rhs).max_abs());
    }
    println!("word compression residual (lengths <= 2): {worst:.3e}");
    assert!(worst < eps);

    // the range sits inside the deformed Fock subspace
    let qf = QFock::build(&fock, &q).expect("space");
    let proj = matmul(&qf.basis, &qf.basis.adjoint()).unwrap();
    let qa = matmul(&kron(&proj, &ComplexMatrix::identity(d0)), &a).unwrap();
    let range = qa.sub(&a).max_abs();
    println!("distance of the range from the deformed subspace: {range:.3e}");
    assert!(range < eps);
}
