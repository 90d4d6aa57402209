mod common;

use mgl::fixtures::{random_diamagnetic_with, random_graph, scalar_fixtures};
use mgl::form::{assemble_magnetic_form, assemble_scalar_form, FormOperator};
use mgl::random::{self, seeded};
use mgl::spectral::{
    laplace_check, markov_check, positivity_check, resolvent_apply, semigroup_apply,
};
use mgl::WeightedGraph;
use num_complex::Complex64;
use proptest::prelude::*;

fn random_form(seed: u64, n: usize, rank: usize) -> (FormOperator, Vec<Complex64>, Vec<Complex64>) {
    let mut rng = seeded(seed);
    let bundle = random_diamagnetic_with(&mut rng, n, rank);
    let form = assemble_magnetic_form(&bundle).unwrap();
    let u = random::section(&mut rng, n, rank).values().to_vec();
    let v = random::section(&mut rng, n, rank).values().to_vec();
    (form, u, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn semigroup_matches_taylor_exponential(seed in any::<u64>(), n in 1usize..9, rank in 1usize..3, t in 0.0f64..3.0) {
        let (form, u, _) = random_form(seed, n, rank);
        let p = semigroup_apply(&form, t, &u).unwrap();
        let e = common::expm_generator(form.matrix(), form.measure(), t);
        let oracle: Vec<_> = (e * nalgebra::DVector::from_column_slice(&u)).iter().copied().collect();
        let scale = u.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(common::max_abs_diff(p.as_slice(), &oracle) <= 1e-9 * scale);
    }

    #[test]
    fn resolvent_matches_lu_solve(seed in any::<u64>(), n in 1usize..12, rank in 1usize..3, alpha in 0.1f64..20.0) {
        let (form, u, _) = random_form(seed, n, rank);
        let r = resolvent_apply(&form, alpha, &u).unwrap();
        let oracle = common::resolvent_lu(form.matrix(), form.measure(), alpha, &u);
        let scale = oracle.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(common::max_abs_diff(r.as_slice(), &oracle) <= 1e-10 * scale);
    }

    #[test]
    fn semigroup_law_and_symmetry(seed in any::<u64>(), n in 1usize..10, rank in 1usize..3, s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let (form, u, v) = random_form(seed, n, rank);
        let pt = semigroup_apply(&form, t, &u).unwrap();
        let ps_pt = semigroup_apply(&form, s, pt.as_slice()).unwrap();
        let pst = semigroup_apply(&form, s + t, &u).unwrap();
        prop_assert!(common::max_abs_diff(ps_pt.as_slice(), pst.as_slice()) <= 1e-11 * form.norm(&u).max(1.0));

        let p0 = semigroup_apply(&form, 0.0, &u).unwrap();
        prop_assert!(common::max_abs_diff(p0.as_slice(), &u) <= 1e-12 * form.norm(&u));

        let ptv = semigroup_apply(&form, t, &v).unwrap();
        let lhs = form.inner(pt.as_slice(), &v);
        let rhs = form.inner(&u, ptv.as_slice());
        prop_assert!((lhs - rhs).norm() <= 1e-11 * (form.norm(&u) * form.norm(&v)).max(1.0));
    }

    #[test]
    fn resolvent_identity(seed in any::<u64>(), n in 1usize..10, rank in 1usize..3, a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let (form, u, _) = random_form(seed, n, rank);
        let ra = resolvent_apply(&form, a, &u).unwrap();
        let rb = resolvent_apply(&form, b, &u).unwrap();
        let rarb = resolvent_apply(&form, a, rb.as_slice()).unwrap();
        let lhs = &ra - &rb;
        let rhs = rarb * Complex64::new(b - a, 0.0);
        prop_assert!(common::max_abs_diff(lhs.as_slice(), rhs.as_slice()) <= 1e-10 * form.norm(&u).max(1.0));
    }

    #[test]
    fn random_graphs_satisfy_beurling_deny(seed in any::<u64>(), n in 1usize..15) {
        let mut rng = seeded(seed);
        let g = random_graph(&mut rng, n, 0.4, true);
        let form = assemble_scalar_form(&g).unwrap();
        let p = positivity_check(&form, &[0.1, 1.0], 10, &mut rng).unwrap();
        prop_assert!(p.semigroup_pass && p.form_pass);
        let m = markov_check(&form, &[0.1, 1.0], 10, &mut rng).unwrap();
        prop_assert!(m.passed);
    }
}

#[test]
fn laplace_transform_on_every_fixture_at_small_alpha() {
    let mut rng = seeded(5);
    for (name, g) in scalar_fixtures() {
        let form = assemble_scalar_form(&g).unwrap();
        let u = random::complex_vector(&mut rng, g.n());
        let c = laplace_check(&form, 0.5, u.as_slice()).unwrap();
        assert!(c.residual <= 1e-6 * c.input_norm, "{name}: {c:?}");
    }
}

#[test]
fn killing_drains_mass_where_it_acts() {
    let g = WeightedGraph::new(2, [(0, 1, 1.0)], vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
    let form = assemble_scalar_form(&g).unwrap();
    let one = common::as_complex(&[1.0, 1.0]);
    for t in [0.01, 0.5, 3.0] {
        let p = semigroup_apply(&form, t, &one).unwrap();
        assert!(p[0].re < 1.0 && p[1].re < 1.0 && p[0].re >= 0.0, "t = {t}: {p:?}");
    }
    let free = assemble_scalar_form(&mgl::fixtures::p3()).unwrap();
    let ones = common::as_complex(&[1.0; 3]);
    let p = semigroup_apply(&free, 2.0, &ones).unwrap();
    assert!(common::max_abs_diff(p.as_slice(), &ones) <= 1e-14);
}
