//! Builds a truncated deformed Fock space, prints its level structure,
//! and verifies the monomial norm formula `||S^k w||^2 = k_1!...k_n!/|k|!`
//! on every multi-index below the truncation level.

use qfock::fock::{monomial_norm_sq, FockContext, QFock};
use qfock::qcoeff::{MultiIndex, QParams};

fn main() {
    let n = 2;
    let level = 4;
    let q = QParams::uniform_theta(n, std::f64::consts::FRAC_PI_2);
    let ctx = FockContext::new(n, level);
    let qf = QFock::build(&ctx, &q).expect("space construction");

    println!("generators: {n}, truncation level: {level}");
    println!("ambient (free) dimension: {}", ctx.dim());
    println!("deformed subspace dimension: {}", qf.qdim());
    for m in 0..=level {
        let count = qf.basis_levels.iter().filter(|&&l| l == m).count();
        println!("  level {m}: {count} of {} free words", ctx.level_size(m));
    }

    println!("\nmonomial norms (computed vs k_1!...k_n!/|k|!):");
    let mut worst = 0.0f64;
    for k in MultiIndex::enumerate_up_to(n, level - 1) {
        let v = qf.monomial_vector(&k).expect("within level");
        let got: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let want = monomial_norm_sq(&k);
        worst = worst.max((got - want).abs());
        if k.degree() > 0 {
            println!("  k = {:?}: {:.6} vs {:.6}", k.0, got, want);
        }
    }
    println!("worst deviation: {worst:.3e}");
    assert!(worst < 1e-12);
}
