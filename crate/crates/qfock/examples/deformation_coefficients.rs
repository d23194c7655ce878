//! Walks through the two equivalent definitions of the deformation
//! coefficient of a permutation acting on a word: the substitution chain
//! along an adjacent-transposition decomposition, and the closed product
//! over inversions. Any decomposition of the same permutation gives the
//! same scalar.

use qfock::qcoeff::{q_coeff_chain, q_coeff_closed, Permutation, QParams, Word};

fn main() {
    let q = QParams::uniform_theta(2, 0.7);
    let x = Word(vec![0, 1, 1]);

    for sigma in Permutation::all(3) {
        let decomp = sigma.bubble_decomposition();
        let chain = q_coeff_chain(&q, &x, &decomp).expect("valid word");
        let closed = q_coeff_closed(&q, &x, &sigma).expect("valid word");
        println!(
            "sigma = {:?}  decomposition = {:?}  chain = {:.4}{:+.4}i  closed = {:.4}{:+.4}i",
            sigma, decomp, chain.re, chain.im, closed.re, closed.im
        );
        assert!((chain - closed).norm() < 1e-14);
    }

    // a padded decomposition of the identity: t t = id, so inserting any
    // transposition twice leaves the coefficient unchanged
    let sigma = Permutation::new(vec![1, 2, 0]).expect("a bijection");
    let mut padded = sigma.bubble_decomposition();
    padded.extend([0, 0]);
    let a = q_coeff_chain(&q, &x, &sigma.bubble_decomposition()).unwrap();
    let b = q_coeff_chain(&q, &x, &padded).unwrap();
    println!("\npadding with a double transposition changes nothing: {:.12}", (a - b).norm());
    assert!((a - b).norm() < 1e-14);

    // every coefficient is unimodular
    let modulus: f64 = a.norm();
    println!("coefficients stay on the unit circle: |c| = {modulus:.12}");
    assert!((modulus - 1.0).abs() < 1e-14);
}
