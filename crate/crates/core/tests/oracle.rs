mod common;

use common::{oracle_kl, oracle_mass, oracle_tv, oracle_tv_with_error};
use tvbounds::{Component, Mixture};

fn single(c: Component) -> Mixture {
    Mixture::single(c)
}

#[test]
fn reproduces_closed_forms() {
    let a = single(Component::gaussian(0.0, 1.0).unwrap());
    let b = single(Component::gaussian(1.0, 1.0).unwrap());
    // erf(1 / (2 sqrt 2))
    assert!((oracle_tv(&a, &b) - 0.382924922548026).abs() < 1e-12);
    assert!((oracle_kl(&a, &b) - 0.5).abs() < 1e-9);
    let c = single(Component::gaussian(0.0, 2.0).unwrap());
    assert!((oracle_tv(&a, &c) - 0.322674568834768665).abs() < 1e-11);
}

#[test]
fn half_line_masses_are_one() {
    for c in [
        Component::gamma(0.2, 3.0).unwrap(),
        Component::gamma(5.0, 0.2).unwrap(),
        Component::rayleigh(0.2).unwrap(),
        Component::rayleigh(5.0).unwrap(),
    ] {
        assert!((oracle_mass(&single(c)) - 1.0).abs() < 1e-11, "{c:?}");
    }
}

#[test]
fn error_estimate_is_small_on_kinked_integrands() {
    let m = Mixture::new(
        vec![Component::gaussian(-1.0, 0.5).unwrap(), Component::gaussian(2.0, 1.0).unwrap()],
        vec![0.5, 0.5],
    )
    .unwrap();
    let mp = single(Component::gaussian(0.5, 1.5).unwrap());
    let q = oracle_tv_with_error(&m, &mp);
    assert!(q.error < 1e-10, "{q:?}");
    // an identical pair integrates exactly to zero
    assert_eq!(oracle_tv(&m, &m), 0.0);
}
