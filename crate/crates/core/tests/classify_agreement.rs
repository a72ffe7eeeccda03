use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssvpkit::classify::{classify_ssvp, ClosedVerdict};
use ssvpkit::numerics::DenseMatrix;
use ssvpkit::pattern::{term_rank, Pattern};
use ssvpkit::verify::{check_ssvp, CheckMode};

fn random_integer_matrix(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize, range: i32) -> DenseMatrix {
    let m = rng.random_range(1..=max_m);
    let n = rng.random_range(1..=max_n);
    DenseMatrix::from_fn(m, n, |_, _| rng.random_range(-range..=range) as f64)
}

#[test]
fn classifier_never_contradicts_verifier() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut decided = 0;
    for _ in 0..3000 {
        let a = random_integer_matrix(&mut rng, 4, 5, 2);
        let truth = check_ssvp(&a, CheckMode::ExactWhenRational).unwrap().has_ssvp();
        let v = classify_ssvp(&a);
        match v.verdict {
            ClosedVerdict::Has => assert!(truth, "{a:?} {v:?}"),
            ClosedVerdict::Lacks => assert!(!truth, "{a:?} {v:?}"),
            ClosedVerdict::NoRule => continue,
        }
        decided += 1;
        if truth {
            let (m, n) = a.shape();
            assert_eq!(term_rank(&Pattern::support(&a)).0, m.min(n));
        }
    }
    assert!(decided > 1500);
}

#[test]
fn numeric_and_exact_modes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let a = random_integer_matrix(&mut rng, 5, 6, 3);
        let exact = check_ssvp(&a, CheckMode::ExactWhenRational).unwrap();
        let numeric = check_ssvp(&a, CheckMode::Numeric).unwrap();
        assert_eq!(exact.verdict, numeric.verdict, "{a:?}");
        assert_eq!(exact.rank, numeric.rank);
    }
}
