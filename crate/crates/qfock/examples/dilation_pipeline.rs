//! Dilates a strictly contractive q-commuting pair and verifies the whole
//! chain: the block dilation extends the adjoints exactly, compressions of
//! words reproduce the original tuple, the maximal q-commuting piece of
//! the dilation contains the original space, and its compressed moments
//! agree with the reference realization on the deformed Fock space.

use qfock::dilation::{
    enumerate_words, dilation_pipeline_check, noncommuting_dilation, purity_deficit,
    weyl_pair_generator,
};
use qfock::linalg::matmul;

fn main() {
    let scale = 0.75;
    let level = 5;
    let (t, q) = weyl_pair_generator(2, scale).expect("valid order");
    println!(
        "tuple: root-of-unity pair on C^2 scaled by {scale}, q_12 = {:.3}{:+.3}i",
        q.get(0, 1).re,
        q.get(0, 1).im
    );

    let deficit = purity_deficit(&t, level + 1).expect("contractive");
    println!("purity deficit at stage {}: {deficit:.3e}", level + 1);

    let (space, v) = noncommuting_dilation(&t, level).expect("contractive");
    println!(
        "dilation space: {} = {} (original) + {} Fock words x {} defect directions",
        space.total_dim(),
        space.h_dim,
        space.fock.dim(),
        space.defect_rank
    );

    // the adjoint extension property is exact, not approximate
    let e_h = space.embed_h();
    let mut worst = 0.0f64;
    for i in 0..2 {
        let lhs = matmul(&v.matrices[i].adjoint(), &e_h).unwrap();
        let rhs = matmul(&e_h, &t.matrices[i].adjoint()).unwrap();
        worst = worst.max(lhs.sub(&rhs).max_abs());
    }
    println!("adjoint restriction residual: {worst:.3e}");
    assert!(worst < 1e-14);

    // compressions of every short word reproduce the original tuple
    let mut worst = 0.0f64;
    for w in enumerate_words(2, 3) {
        let mut on_h = e_h.clone();
        let mut on_t = qfock::linalg::ComplexMatrix::identity(t.dim);
        for &i in w.iter().rev() {
            on_h = matmul(&v.matrices[i], &on_h).unwrap();
            on_t = matmul(&t.matrices[i], &on_t).unwrap();
        }
        for r in 0..t.dim {
            for c in 0..t.dim {
                worst = worst.max((on_h[(r, c)] - on_t[(r, c)]).norm());
            }
        }
    }
    println!("word compression residual (lengths <= 3): {worst:.3e}");

    // full comparison against the reference deformed-Fock realization
    let eps_tail = (scale * scale).powi((level + 1) as i32) * 8.0;
    println!("\npipeline stages (tail allowance {eps_tail:.3e}):");
    let reports = dilation_pipeline_check(&t, &q, level, eps_tail).expect("pipeline");
    for r in &reports {
        println!(
            "  {:<24} residual {:.3e}  bound {:.3e}  {}",
            r.check,
            r.max_residual,
            r.bound,
            if r.pass { "ok" } else { "FAIL" }
        );
        assert!(r.pass);
    }
}
