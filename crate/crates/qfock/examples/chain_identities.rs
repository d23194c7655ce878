//! Chain vectors for a norm-preserving q-commuting pair (a scaled pair of
//! clock and shift unitaries): the telescoping identities that relate
//! consecutive chain vectors through the dilated tuple, and the uniform
//! norm bound that keeps the whole chain within twice the seed norm.

use num_complex::Complex64 as C64;
use qfock::dilation::{amplified_tau, chain_vectors, popescu_block_d, weyl_pair_generator};
use qfock::linalg::{hermitian_min_eig, matmul, ComplexMatrix};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for order in [2usize, 3, 4] {
        let (t, q) = weyl_pair_generator(order, 1.0).expect("valid order");
        println!("root order {order}: q_12 = {:.3}{:+.3}i", q.get(0, 1).re, q.get(0, 1).im);

        // the block defect is a projection for norm-preserving tuples
        let d = popescu_block_d(&t).expect("contractive");
        let idem = d.sub(&matmul(&d, &d).unwrap()).max_abs();
        println!("  block defect projection residual: {idem:.3e}");

        // the amplified positive map stays dominated by the identity
        for m in [1usize, 3, 5] {
            let td = amplified_tau(&t, &d, m).unwrap();
            let gap = ComplexMatrix::identity(2 * order).sub(&td);
            let min = hermitian_min_eig(&gap, 1e-9).unwrap();
            println!("  stage {m}: min eig of (I - amplified map) = {min:+.3e}");
            assert!(min > -1e-10);
        }

        // chain vectors from a random seed
        let seed: Vec<C64> = (0..2 * order)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let chain = chain_vectors(&t, &q, &seed, 5).expect("contractive");
        let report = chain.identities_check(&t, &q);
        println!("  telescoping identity residual: {:.3e}", report.max_residual);
        assert!(report.pass);

        let x0: f64 = chain.x[0].iter().map(|z| z.norm_sqr()).sum();
        for (m, xm) in chain.x.iter().enumerate() {
            let sq: f64 = xm.iter().map(|z| z.norm_sqr()).sum();
            println!("  ||x_{m}||^2 = {sq:.6} (cap {:.6})", 2.0 * x0);
            assert!(sq <= 2.0 * x0 + 1e-9);
        }
        println!();
    }
}
