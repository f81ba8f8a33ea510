use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synpar::dspan::{DSpan, PrecedenceArray};

/// Two disjoint, non-touching-within-themselves d-spans drawn by assigning
/// each of `n` positions to the first span, the second, or neither.
pub fn disjoint_pair(rng: &mut impl Rng, n: u32) -> (DSpan, DSpan) {
    let owner: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
    let runs = |who: u8| {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for (i, &o) in owner.iter().enumerate() {
            let i = i as u32;
            if o == who {
                match out.last_mut() {
                    Some(last) if last.1 == i => last.1 = i + 1,
                    _ => out.push((i, i + 1)),
                }
            }
        }
        DSpan::new(out).unwrap()
    };
    (runs(1), runs(2))
}

#[test]
fn worked_examples() {
    let a: DSpan = "(1,3;8,9)".parse().unwrap();
    let b: DSpan = "(7,8)".parse().unwrap();
    assert_eq!(a.concat(&b).unwrap().to_string(), "(1,3;7,9)");
    assert_eq!(a.relativize(&b).unwrap().to_string(), "[1;2,1]");
}

#[test]
fn randomized_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut nontrivial = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=14);
        let (a, b) = disjoint_pair(&mut rng, n);
        let sum = a.concat(&b).unwrap();
        assert_eq!(sum, b.concat(&a).unwrap());
        assert_eq!(sum.subtract(&b).unwrap(), a, "({sum}) - ({b})");
        assert_eq!(sum.subtract(&a).unwrap(), b, "({sum}) - ({a})");
        assert_eq!(sum.rev_relativize(&b).unwrap(), a.relativize(&b).unwrap());
        assert_eq!(sum.width(), a.width() + b.width());
        if !a.is_empty() && !b.is_empty() {
            nontrivial += 1;
            let array = a.relativize(&b).unwrap();
            assert_eq!(array.fan_out(), sum.fan_out());
            assert_eq!(array.count_of(1), a.fan_out());
            assert_eq!(array.count_of(2), b.fan_out());
            let back: PrecedenceArray = array.to_string().parse().unwrap();
            assert_eq!(back, array);
        }
        let back: DSpan = sum.to_string().parse().unwrap();
        assert_eq!(back, sum);
    }
    assert!(nontrivial > 7_000, "{nontrivial}");
}

#[test]
fn subtraction_needs_cover() {
    let nu: DSpan = "(0,4)".parse().unwrap();
    assert!(nu.subtract(&"(3,5)".parse().unwrap()).is_err());
    assert_eq!(
        nu.subtract(&"(1,2)".parse().unwrap()).unwrap().to_string(),
        "(0,1;2,4)"
    );
}
