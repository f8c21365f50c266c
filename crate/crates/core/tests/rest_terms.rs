mod common;

use smolflow::fluid::VelocityField;
use smolflow::kinetic::PhaseField;
use smolflow::monitor::{rest_decomposition, RestDecomposer};

#[test]
fn identities_hold_on_random_pairs() {
    let pg = common::phase_grid(32, 16);
    let m = common::model(&pg, 1.0);
    let mut rng = common::rng(7);
    let v = common::random_velocity(pg.grid(), 8, &mut rng);
    let f = common::random_density(&pg, 8, &mut rng);
    let d = RestDecomposer::new(&m, &v, &f).unwrap();
    for q in pg.grid().ladder().blocks() {
        let r = d.at(q);
        assert!(r.transport_relative < 1e-10, "q = {q}: {}", r.transport_relative);
        assert!(r.drift_relative < 1e-10, "q = {q}: {}", r.drift_relative);
    }
}

#[test]
fn zero_velocity_kills_transport_terms() {
    let pg = common::phase_grid(16, 16);
    let m = common::model(&pg, 1.0);
    let mut rng = common::rng(3);
    let f = common::random_density(&pg, 4, &mut rng);
    let v = VelocityField::zeros(pg.grid());
    let r = rest_decomposition(&m, &v, &f, 1).unwrap();
    for l in 0..3 {
        assert_eq!(r.term_norms[l], 0.0);
    }
    assert_eq!(r.transport_residual, 0.0);
    let z = PhaseField::zeros(&pg);
    let v = common::random_velocity(pg.grid(), 4, &mut rng);
    let r = rest_decomposition(&m, &v, &z, 1).unwrap();
    assert!(r.term_norms.iter().all(|&n| n == 0.0));
}
