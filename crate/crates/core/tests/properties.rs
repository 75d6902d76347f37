mod common;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{integrate_support, mixture_pdf, oracle_kl, oracle_tv};
use tvbounds::cli::experiment::{
    random_gamma_mixture, random_gmm, random_rayleigh_mixture, trial_rng, Dataset, PrecisionPrior,
};
use tvbounds::envelope::{decompose, refine};
use tvbounds::envelope_bounds::{
    basic_envelope_bounds, celb_ceub, celb_ceub_with, ratio_bounds, BoundsConfig, ReferenceChoice,
};
use tvbounds::estimators::{mc_kl, mc_tv};
use tvbounds::quantization::{cgqlb, Partition};
use tvbounds::{Component, Mixture};

fn gmm_pair(seed: u64, dataset: Dataset, k: usize) -> (Mixture, Mixture) {
    let prior = PrecisionPrior::default();
    let mut rng = trial_rng(seed, 0);
    (random_gmm(&mut rng, dataset, k, &prior), random_gmm(&mut rng, dataset, k, &prior))
}

fn mixed_pairs(seed: u64, n: u64) -> Vec<(Mixture, Mixture)> {
    (0..n)
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let k = 1 + (i as usize % 4);
            match i % 3 {
                0 => {
                    let p = PrecisionPrior::default();
                    (random_gmm(&mut rng, Dataset::One, k, &p), random_gmm(&mut rng, Dataset::One, k, &p))
                }
                1 => (random_gamma_mixture(&mut rng, k), random_gamma_mixture(&mut rng, k)),
                _ => (random_rayleigh_mixture(&mut rng, k), random_rayleigh_mixture(&mut rng, k)),
            }
        })
        .collect()
}

#[test]
fn seeded_two_component_pair_is_bracketed() {
    let (m, mp) = gmm_pair(11, Dataset::One, 2);
    let tv = oracle_tv(&m, &mp);
    let dec = refine(&decompose(&m, &mp), 10).unwrap();
    let basic = basic_envelope_bounds(&dec, &m, &mp).unwrap();
    assert!(basic.l <= tv + 1e-9 && tv <= basic.u + 1e-9, "{basic:?} vs {tv}");
    let ratio = ratio_bounds(&dec, &m, &mp).unwrap().unwrap();
    assert!(ratio.lower <= tv + 1e-9 && tv <= ratio.upper + 1e-9);
}

#[test]
fn seeded_five_component_pair_is_bracketed_and_informative() {
    let (m, mp) = gmm_pair(42, Dataset::One, 5);
    let tv = oracle_tv(&m, &mp);
    let r = celb_ceub(&m, &mp, 10);
    assert!(r.celb <= tv + 1e-9 && tv <= r.ceub + 1e-9);
    assert!(r.ceub - r.celb < 1.0);
}

#[test]
fn far_apart_gaussians() {
    let m = Mixture::single(Component::gaussian(0.0, 1.0).unwrap());
    let mp = Mixture::single(Component::gaussian(100.0, 1.0).unwrap());
    let r = celb_ceub(&m, &mp, 10);
    assert!(r.celb >= 0.99 && r.ceub >= r.celb);
}

#[test]
fn duality_identity_holds() {
    for (m, mp) in mixed_pairs(21, 45) {
        let h = 1.0 - oracle_tv(&m, &mp);
        let r = celb_ceub(&m, &mp, 10);
        assert!(r.a <= r.b);
        assert!(r.a.max(2.0 - r.b) <= h + 1e-9, "A={} B={} h={h}", r.a, r.b);
        assert!(h <= r.b.min(2.0 - r.a) + 1e-9, "A={} B={} h={h}", r.a, r.b);
    }
}

#[test]
fn bounds_are_symmetric() {
    for (m, mp) in mixed_pairs(22, 45) {
        let (a, b) = (celb_ceub(&m, &mp, 10), celb_ceub(&mp, &m, 10));
        assert!((a.celb - b.celb).abs() <= 1e-12, "{} vs {}", a.celb, b.celb);
        assert!((a.ceub - b.ceub).abs() <= 1e-12, "{} vs {}", a.ceub, b.ceub);
    }
}

#[test]
fn every_reference_choice_brackets() {
    for (m, mp) in mixed_pairs(23, 30) {
        let tv = oracle_tv(&m, &mp);
        for reference in [ReferenceChoice::FirstUpper, ReferenceChoice::JointUpper, ReferenceChoice::BestOfBoth] {
            let r = celb_ceub_with(&m, &mp, &BoundsConfig { refine_factor: 10, reference });
            assert!(r.celb <= tv + 1e-9 && tv <= r.ceub + 1e-9, "{reference:?}");
        }
    }
}

#[test]
fn report_invariants() {
    for (m, mp) in mixed_pairs(24, 30) {
        let r = celb_ceub(&m, &mp, 10);
        assert!(0.0 <= r.celb && r.celb <= r.ceub && r.ceub <= 1.0);
        assert_eq!(r.bayes_error_lo, 0.5 * (1.0 - r.ceub));
        assert_eq!(r.bayes_error_hi, 0.5 * (1.0 - r.celb));
        assert_eq!(r.refine_factor, 10);
        assert_eq!(r.per_interval.len(), r.interval_count);
    }
}

#[test]
fn envelope_indices_match_dense_grid() {
    let mut rng = trial_rng(7, 0);
    let m = random_gamma_mixture(&mut rng, 2);
    let mp = random_gamma_mixture(&mut rng, 2);
    let dec = decompose(&m, &mp);
    let argext = |mix: &Mixture, x: f64| {
        let v: Vec<f64> = (0..mix.len()).map(|i| mix.weighted_ln_pdf(i, x)).collect();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (v, lo, hi)
    };
    for j in 1..=10_000 {
        let x = 20.0 * j as f64 / 10_000.0;
        let iv = dec.intervals().iter().find(|iv| iv.a < x && x < iv.b);
        let Some(iv) = iv else { continue };
        for (mix, l, u) in [(&m, iv.lower, iv.upper), (&mp, iv.lower_prime, iv.upper_prime)] {
            let (v, lo, hi) = argext(mix, x);
            assert!((v[l] - lo).abs() <= 1e-12 * lo.abs().max(1.0), "x={x}");
            assert!((v[u] - hi).abs() <= 1e-12 * hi.abs().max(1.0), "x={x}");
        }
    }
}

#[test]
fn envelope_indices_at_interior_probes() {
    for (m, mp) in mixed_pairs(25, 30) {
        let dec = refine(&decompose(&m, &mp), 3).unwrap();
        for iv in dec.intervals() {
            let (a, b) = (iv.a.max(-50.0), iv.b.min(80.0));
            if a >= b {
                continue;
            }
            for j in 1..=32 {
                let x = a + (b - a) * j as f64 / 33.0;
                for (mix, l, u) in [(&m, iv.lower, iv.upper), (&mp, iv.lower_prime, iv.upper_prime)] {
                    let v: Vec<f64> = (0..mix.len()).map(|i| mix.weighted_ln_pdf(i, x).exp()).collect();
                    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = v.iter().copied().fold(0.0, f64::max);
                    assert!(v[l] <= lo * (1.0 + 1e-12) + f64::MIN_POSITIVE);
                    assert!(v[u] >= hi * (1.0 - 1e-12));
                }
            }
        }
    }
}

#[test]
fn decomposition_is_symmetric() {
    for (m, mp) in mixed_pairs(26, 30) {
        let (d1, d2) = (decompose(&m, &mp), decompose(&mp, &m));
        assert_eq!(d1.len(), d2.len());
        for (x, y) in d1.intervals().iter().zip(d2.intervals()) {
            assert_eq!((x.a, x.b), (y.a, y.b));
            assert_eq!((x.lower, x.upper), (y.lower_prime, y.upper_prime));
        }
    }
}

#[test]
fn mixture_mass_is_additive_and_normalized() {
    for (m, _) in mixed_pairs(27, 24) {
        let cuts = [-3.0, -0.5, 0.0, 0.2, 1.0, 2.5, 7.0];
        let mut total = m.mass(f64::NEG_INFINITY, cuts[0]).unwrap();
        for w in cuts.windows(2) {
            total += m.mass(w[0], w[1]).unwrap();
        }
        total += m.mass(cuts[cuts.len() - 1], f64::INFINITY).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
        let q = integrate_support(&m, &m, |x| mixture_pdf(&m, x), None, 1e-12);
        assert!((q.value - 1.0).abs() < 1e-8);
    }
}

#[test]
fn sampling_splits_symmetric_pair() {
    let m = Mixture::new(
        vec![Component::gaussian(-5.0, 1.0).unwrap(), Component::gaussian(5.0, 1.0).unwrap()],
        vec![0.5, 0.5],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let xs = m.sample(&mut rng, 100_000);
    let below = xs.iter().filter(|x| **x < 0.0).count() as f64 / 1e5;
    assert!((below - 0.5).abs() < 0.01);
    assert!(m.sample(&mut rng, 0).is_empty());
    let again = m.sample(&mut ChaCha8Rng::seed_from_u64(99), 100_000);
    assert_eq!(xs, again);
}

#[test]
fn cgqlb_is_monotone_under_refinement() {
    for (i, (m, mp)) in mixed_pairs(28, 30).into_iter().enumerate() {
        let tv = oracle_tv(&m, &mp);
        let mut rng = trial_rng(280, i as u64);
        let fine: Vec<f64> = (0..40).map(|_| rng.random_range(-6.0..12.0)).collect();
        let fine = Partition::from_unsorted(fine).unwrap();
        // every other cut of the fine partition gives a coarser one
        let coarse = Partition::new(fine.cuts().iter().step_by(2).copied().collect()).unwrap();
        assert!(fine.refines(&coarse));
        let (c, f) = (cgqlb(&m, &mp, &coarse), cgqlb(&m, &mp, &fine));
        assert!(f >= c - 1e-12);
        assert!(f <= tv + 1e-9);
        assert_eq!(f, cgqlb(&mp, &m, &fine));
    }
}

#[test]
fn mc_tv_converges() {
    let (m, mp) = gmm_pair(3, Dataset::One, 2);
    let tv = oracle_tv(&m, &mp);
    let better = (0..100u64)
        .filter(|&s| {
            let small = mc_tv(&m, &mp, 100, 10 * s, None).unwrap();
            let large = mc_tv(&m, &mp, 100_000, 10 * s + 1, None).unwrap();
            assert!(small.mean >= 0.0 && large.mean >= 0.0);
            (large.mean - tv).abs() < (small.mean - tv).abs()
        })
        .count();
    assert!(better >= 95, "{better}/100");
}

#[test]
fn seeded_mc_estimates_match_quadrature() {
    let (m, mp) = gmm_pair(3, Dataset::One, 2);
    let tv = mc_tv(&m, &mp, 10_000, 3, None).unwrap();
    assert!((tv.mean - oracle_tv(&m, &mp)).abs() < 3.5 * tv.std_error);
    let kl = mc_kl(&m, &mp, 10_000, 3).unwrap();
    assert!((kl.mean - oracle_kl(&m, &mp)).abs() < 3.5 * kl.std_error);
}
