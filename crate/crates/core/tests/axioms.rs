mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vbs_core::axioms::{removal_round_trip_deviation, run_axiom_suite, Axiom, Sampler, SuiteConfig};
use vbs_core::random::{random_subset, BooleanSampler, CommonalitySampler, ProbabilitySampler};
use vbs_core::{BooleanAlgebra, CommonalityAlgebra, Frames, ProbabilityAlgebra, ValuationAlgebra};

fn mixed_frames() -> Frames {
    let mut f = Frames::binary(&["a", "b", "c"]).unwrap();
    f.add("d", ["x", "y", "z"]).unwrap();
    f
}

/// Small enough that every combined scope stays within the subset-lattice
/// limit.
fn small_frames() -> Frames {
    let mut f = Frames::binary(&["a", "b"]).unwrap();
    f.add("d", ["x", "y", "z"]).unwrap();
    f
}

#[test]
fn probability_satisfies_every_axiom() {
    let alg = ProbabilityAlgebra::new(mixed_frames());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let report = run_axiom_suite(&alg, &ProbabilitySampler::default(), SuiteConfig::default(), &mut rng);
    assert!(report.all_passed(), "{report}");
    assert!(report.outcomes.iter().all(|o| o.cases == 200 && !o.skipped));
}

#[test]
fn commonality_satisfies_every_axiom() {
    let alg = CommonalityAlgebra::new(small_frames());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let report = run_axiom_suite(&alg, &CommonalitySampler::default(), SuiteConfig::default(), &mut rng);
    assert!(report.all_passed(), "{report}");
    assert!(report.outcomes.iter().all(|o| o.cases == 200 && !o.skipped));
}

#[test]
fn boolean_satisfies_the_axioms_without_removal() {
    let alg = BooleanAlgebra::new(mixed_frames());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let report = run_axiom_suite(&alg, &BooleanSampler::default(), SuiteConfig::default(), &mut rng);
    assert!(report.all_passed(), "{report}");
    for o in &report.outcomes {
        assert_eq!(o.skipped, o.axiom.needs_removal());
    }
    assert!(report.outcome(Axiom::CR).unwrap().skipped);
}

fn round_trip<A: ValuationAlgebra, S: Sampler<A>>(alg: &A, sampler: &S, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = alg.frames().all();
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let scope = random_subset(&mut rng, &all, 1, 3);
        let rho = sampler.sample_normal(alg, &scope, &mut rng).unwrap();
        worst = worst.max(removal_round_trip_deviation(alg, &rho).unwrap());
    }
    worst
}

#[test]
fn removing_a_marginal_and_restoring_it() {
    let p = ProbabilityAlgebra::new(mixed_frames());
    assert!(round_trip(&p, &ProbabilitySampler::default(), 4) <= 1e-9);
    let q = CommonalityAlgebra::new(small_frames());
    assert!(round_trip(&q, &CommonalitySampler::default(), 5) <= 1e-9);
}
