//! Test oracles for synpar that share no code with it: random grammars in
//! their own representation, a brute-force multitree enumerator, and a
//! classical inside-outside trainer.

pub mod brute;
pub mod classic;
pub mod random;

pub use brute::{goal_values, item_values, Values};
pub use random::{random_grammar, random_input, RGrammar, RRule, Spec};

/// Catalan numbers by the recurrence C(0) = 1, C(n+1) = Σ C(i) C(n-i).
pub fn catalan(n: usize) -> u128 {
    let mut c = vec![1u128];
    for m in 1..=n {
        c.push((0..m).map(|i| c[i] * c[m - 1 - i]).sum());
    }
    c[n]
}
