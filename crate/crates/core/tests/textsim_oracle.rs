mod common;

use common::{ratcliff_obershelp, test_rng};
use lsq_core::textsim::similarity_ratio;
use rand::Rng;

fn random_text(rng: &mut impl Rng, alphabet: &[char], max_len: usize) -> String {
    (0..rng.random_range(0..=max_len))
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}

#[test]
fn agrees_with_brute_force_on_random_pairs() {
    let mut rng = test_rng(5);
    let alphabets: [&[char]; 3] = [
        &['a', 'b'],
        &['a', 'b', 'c', 'd', ' '],
        &['x', 'y', 'é', '字', '🙂', 'z'],
    ];
    for n in 0..1_000 {
        let alphabet = alphabets[n % alphabets.len()];
        let a = random_text(&mut rng, alphabet, 40);
        let b = random_text(&mut rng, alphabet, 40);
        let (got, want) = (similarity_ratio(&a, &b), ratcliff_obershelp(&a, &b));
        assert!((got - want).abs() <= 1e-12, "{a:?} {b:?}: {got} vs {want}");
    }
}

#[test]
fn hand_cases() {
    assert_eq!(similarity_ratio("abcd", "bcda"), 0.75);
    assert_eq!(similarity_ratio("", ""), 1.0);
    assert_eq!(similarity_ratio("abc", ""), 0.0);
    assert_eq!(similarity_ratio("abc", "abc"), 1.0);
    assert_eq!(ratcliff_obershelp("abcd", "bcda"), 0.75);
}
