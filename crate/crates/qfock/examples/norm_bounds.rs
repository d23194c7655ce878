//! The two-sided operator-space bound: for matrix coefficients a_i, the
//! coupled norm || sum a_i (x) (S_i + S_i^*) || is squeezed between the
//! row/column max norm and twice it. The scalar single-generator case
//! shows the truncated norm creeping up to the free value 2.

use num_complex::Complex64 as C64;
use qfock::fock::{FockContext, QFock};
use qfock::linalg::{kron, operator_norm, ComplexMatrix};
use qfock::moments::{en_embed, max_norm, coupled_norm_bounds};
use qfock::qcoeff::QParams;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    // truncated scalar case: tridiagonal norm 2 cos(pi / (M + 2)) -> 2
    println!("single generator, scalar coefficient 1:");
    let q1 = QParams::trivial(1);
    for level in [2usize, 4, 6, 8] {
        let qf = QFock::build(&FockContext::new(1, level), &q1).expect("space");
        let b = coupled_norm_bounds(&[ComplexMatrix::identity(1)], &qf, 1e-9).expect("in budget");
        println!(
            "  level {level}: coupled norm {:.6} (free value 2, max norm {:.3})",
            b.coupled_norm, b.max_norm
        );
    }

    // random 2x2 coefficient pairs
    println!("\nrandom 2x2 coefficient pairs at level 5:");
    let q = QParams::uniform_theta(2, 0.35);
    let qf = QFock::build(&FockContext::new(2, 5), &q).expect("space");
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for trial in 0..4 {
        let a: Vec<ComplexMatrix> = (0..2)
            .map(|_| {
                ComplexMatrix::from_fn(2, 2, |_, _| {
                    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                })
            })
            .collect();
        let b = coupled_norm_bounds(&a, &qf, 1e-8).expect("in budget");
        println!(
            "  trial {trial}: {:.4} <= {:.4} <= {:.4}",
            b.max_norm,
            b.coupled_norm,
            2.0 * b.max_norm
        );
        for r in &b.reports {
            assert!(r.pass, "{} failed", r.check);
        }

        // the max norm is exactly the norm of sum a_i (x) delta_i in the
        // row-plus-column model space
        let mut coupled = ComplexMatrix::zeros(8, 8);
        for (i, ai) in a.iter().enumerate() {
            let mut e = vec![C64::new(0.0, 0.0); 2];
            e[i] = C64::new(1.0, 0.0);
            coupled = coupled.add(&kron(ai, &en_embed(&e)));
        }
        let model = operator_norm(&coupled, 1e-11).expect("converges");
        let direct = max_norm(&a).expect("same dims");
        println!("    row-plus-column model norm {model:.6} vs direct {direct:.6}");
        assert!((model - direct).abs() < 1e-8);
    }
}
