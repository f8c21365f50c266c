mod common;

use common::{grid, random_field, rng};
use proptest::prelude::*;
use smolflow::lp::{besov_norm, delta_q, lebesgue_norm, paraproduct, remainder, s_q, BesovKind, BonySplit, SpectralField2D};

fn pow2() -> impl Strategy<Value = usize> {
    (3u32..8).prop_map(|e| 1usize << e)
}

#[test]
fn blocks_reassemble_the_field() {
    let g = grid(64, 32);
    let u = random_field(&g, 10, 0.5, &mut rng(1));
    let mut sum = SpectralField2D::zeros(&g);
    for q in g.ladder().blocks() {
        sum.axpy(1.0, &delta_q(&u, q)).unwrap();
    }
    assert!(sum.minus(&u).unwrap().max_abs_coeff() < 1e-15);
}

#[test]
fn low_pass_telescopes() {
    let g = grid(32, 32);
    let u = random_field(&g, 10, 0.5, &mut rng(2));
    for q in 0..=g.ladder().q_max() {
        let d = s_q(&u, q + 1).minus(&s_q(&u, q)).unwrap().minus(&delta_q(&u, q)).unwrap();
        assert!(d.max_abs_coeff() < 1e-15, "q {q}");
    }
}

#[test]
fn paraproduct_of_constant_multiplies() {
    // T_c v = c (v minus its lowest block), T_v c = 0 and R(c, v) = c Delta_{-1} v
    let g = grid(32, 32);
    let v = random_field(&g, 10, 0.5, &mut rng(3));
    let c = SpectralField2D::from_fn(&g, |_, _| 2.5);
    let t = paraproduct(&c, &v).unwrap();
    let r = remainder(&c, &v).unwrap();
    assert!(paraproduct(&v, &c).unwrap().max_abs_coeff() < 1e-15);
    let sum = t.plus(&r).unwrap();
    assert!(sum.minus(&v.scaled(2.5)).unwrap().max_abs_coeff() < 1e-14);
}

#[test]
fn besov_sup_matches_blocks() {
    let g = grid(32, 32);
    let u = random_field(&g, 10, 0.5, &mut rng(4));
    let s = 0.7;
    let want = g.ladder().blocks().filter(|&q| q >= 0).map(|q| (f64::from(q) * s).exp2() * lebesgue_norm(&delta_q(&u, q), f64::INFINITY)).fold(0.0, f64::max);
    let got = besov_norm(&u, s, f64::INFINITY, f64::INFINITY, BesovKind::Homogeneous);
    assert!((got - want).abs() <= 1e-14 * want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn partition_of_unity_on_any_grid(nx in pow2(), ny in pow2()) {
        let g = grid(nx, ny);
        prop_assert!(g.ladder().partition_residual() <= 1e-14);
        prop_assert!(g.ladder().overlap_residual() <= 1e-14);
    }

    #[test]
    fn bony_split_is_exact(seed in any::<u64>()) {
        let g = grid(32, 32);
        let mut r = rng(seed);
        let u = random_field(&g, 10, 0.0, &mut r);
        let v = random_field(&g, 10, 0.0, &mut r);
        let split = BonySplit::compute(&u, &v).unwrap();
        prop_assert!(split.residual_l2() <= 1e-12 * split.product.l2_norm_sq().sqrt());
    }

    #[test]
    fn blocks_are_orthogonal_in_energy(seed in any::<u64>()) {
        // sum_q |Delta_q u|^2 <= |u|^2 since sum_q phi_q^2 <= (sum_q phi_q)^2 = 1
        let g = grid(32, 32);
        let u = random_field(&g, 10, 0.0, &mut rng(seed));
        let parts: f64 = g.ladder().blocks().map(|q| delta_q(&u, q).l2_norm_sq()).sum();
        prop_assert!(parts <= u.l2_norm_sq() * (1.0 + 1e-14));
        prop_assert!(parts >= 0.5 * u.l2_norm_sq());
    }
}
