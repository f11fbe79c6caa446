use proptest::prelude::*;

use super::*;
use crate::analysis::{named_series, PowerSeries, TruncationPolicy};
use crate::circulant::gamma;
use crate::dense::DenseMatrix;
use crate::products::power;
use crate::random;
use crate::scalar::{Modular, Real};

fn dims(m: usize, n: usize, s: usize) -> Dims {
    Dims { m, n, s }
}

fn z12() -> Modular {
    Modular::new(12).unwrap()
}

fn game_e() -> CubicMatrix<Modular> {
    let slices: [[[u64; 3]; 2]; 4] = [
        [[0, 8, 0], [0, 4, 0]],
        [[0, 4, 0], [0, 8, 0]],
        [[4, 0, 4], [8, 0, 8]],
        [[8, 0, 8], [4, 0, 4]],
    ];
    CubicMatrix::from_fn(z12(), dims(2, 3, 4), |i, j, k| slices[k][i][j])
}

fn rel(a: &CubicMatrix<Real>, b: &CubicMatrix<Real>) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

fn continuous(kind: ProductKind, a: CubicMatrix<Real>, state: Dims) -> SystemSpec<Real> {
    SystemSpec::autonomous(kind, Time::Continuous, a, state)
}

/// Unfold-coordinate solution chained piece by piece through
/// `exp([[L, G], [0, 0]] h)` applied to `[X; I]`.
fn dense_solution(spec: &SystemSpec<Real>, x0: &CubicMatrix<Real>, u: &InputSignal<Real>, t: f64) -> CubicMatrix<Real> {
    let sys = to_classical(spec).unwrap();
    let l = &sys.a;
    let n = l.rows();
    let q = x0.dims().n;
    let term = |v: &InputValue<Real>| -> DenseMatrix<Real> {
        match (&sys.input, v) {
            (ClassicalInput::Directions(gs), InputValue::Scalars(us)) => {
                gs.iter().zip(us).fold(DenseMatrix::zeros(Real, n, q), |acc, (g, &u)| acc.add(&g.scale(u)).unwrap())
            }
            (ClassicalInput::Operator { matrix, .. }, InputValue::Cubic(c)) => matrix.matmul(&c.unfold()).unwrap(),
            _ => panic!("input mismatch"),
        }
    };
    let mut grid = vec![0.0];
    grid.extend(u.breakpoints().iter().copied().filter(|&b| b > 0.0 && b < t));
    grid.push(t);
    let mut x = x0.unfold();
    for w in grid.windows(2) {
        let g = u.value_at(w[0]).unwrap().map(term).unwrap_or_else(|| DenseMatrix::zeros(Real, n, q));
        let h = w[1] - w[0];
        let mut aug = DenseMatrix::zeros(Real, n + q, n + q);
        aug.set_block(0, 0, &l.scale(h));
        aug.set_block(0, n, &g.scale(h));
        let mut z = DenseMatrix::zeros(Real, n + q, q);
        z.set_block(0, 0, &x);
        z.set_block(n, 0, &DenseMatrix::identity(Real, q));
        x = aug.expm().unwrap().matmul(&z).unwrap().block(0, 0, n, q).unwrap();
    }
    CubicMatrix::fold(&x, spec.state_dims).unwrap()
}

#[test]
fn identity_system_is_constant() {
    let mut rng = random::rng(1);
    let x0 = random::real_cubic_unit(&mut rng, dims(2, 3, 2));
    let spec = SystemSpec::autonomous(ProductKind::TProduct, Time::Discrete, CubicMatrix::identity_t(Real, 2, 2), x0.dims());
    let traj = simulate_discrete(&spec, &x0, &InputSignal::None, 5).unwrap();
    assert_eq!(traj.len(), 6);
    assert!(traj.states.iter().all(|x| *x == x0));
    let cont = continuous(ProductKind::TProduct, CubicMatrix::zeros(Real, dims(2, 2, 2)), x0.dims());
    let traj = simulate_continuous(&cont, &x0, &InputSignal::None, 0.5, 0.1).unwrap();
    assert!(traj.states.iter().all(|x| *x == x0));
}

#[test]
fn nilpotent_closed_loop_reaches_zero() {
    let e = game_e();
    let spec = SystemSpec::autonomous(ProductKind::TStp, Time::Discrete, e.clone(), e.dims());
    let mut rng = random::rng(2);
    for _ in 0..20 {
        let x0 = random::mod_cubic(&mut rng, e.dims(), z12());
        let traj = simulate_discrete(&spec, &x0, &InputSignal::None, 2).unwrap();
        assert!(traj.states[2].is_zero());
    }
}

#[test]
fn discrete_matches_powers() {
    let z = z12();
    let mut rng = random::rng(3);
    for kind in ProductKind::ALL {
        let (a_dims, x_dims) = match kind {
            ProductKind::TProduct => (dims(3, 3, 2), dims(3, 2, 2)),
            _ => (dims(3, 2, 2), dims(3, 4, 4)),
        };
        let a = random::mod_cubic(&mut rng, a_dims, z);
        let x0 = random::mod_cubic(&mut rng, x_dims, z);
        let spec = SystemSpec::autonomous(kind, Time::Discrete, a, x_dims);
        let traj = simulate_discrete(&spec, &x0, &InputSignal::None, 5).unwrap();
        let ar = spec.a_replicated().unwrap();
        for k in 1..=5 {
            let want = kind.apply(&power(&ar, k, kind).unwrap(), &x0).unwrap();
            assert_eq!(traj.states[k], want, "{kind} step {k}");
        }
    }
}

#[test]
fn discrete_inputs_and_outputs() {
    let z = z12();
    let a = CubicMatrix::zeros(z, dims(2, 2, 2));
    let b = CubicMatrix::from_fn(z, dims(2, 1, 2), |i, _, k| (i + k + 1) as u64);
    let c = CubicMatrix::identity_t(z, 2, 2).scale(3);
    let spec = SystemSpec {
        kind: ProductKind::TProduct,
        time: Time::Discrete,
        a,
        input: InputMap::Directions(vec![b.clone()]),
        c: Some(c),
        state_dims: b.dims(),
    };
    let u = InputSignal::Samples(vec![InputValue::Scalars(vec![5]), InputValue::Scalars(vec![7])]);
    let x0 = CubicMatrix::zeros(z, b.dims());
    let traj = simulate_discrete(&spec, &x0, &u, 2).unwrap();
    assert_eq!(traj.states[2], b.scale(7));
    assert_eq!(traj.outputs.as_ref().unwrap()[2], b.scale(21));
    assert!(matches!(simulate_discrete(&spec, &x0, &u, 3), Err(Error::Shape { .. })));
    let bad = InputSignal::Samples(vec![InputValue::Scalars(vec![1, 2]); 2]);
    assert!(matches!(simulate_discrete(&spec, &x0, &bad, 2), Err(Error::Shape { .. })));
}

#[test]
fn spec_validation() {
    let a = CubicMatrix::zeros(Real, dims(2, 3, 2));
    let spec = SystemSpec::autonomous(ProductKind::TProduct, Time::Discrete, a.clone(), dims(3, 1, 2));
    assert!(matches!(spec.validate(), Err(Error::Shape { op: "system A", .. })));
    let spec = SystemSpec::autonomous(ProductKind::TStp, Time::Discrete, a.clone(), dims(2, 1, 3));
    assert!(spec.validate().is_err(), "slice count 2 does not divide 3");
    let spec = SystemSpec::autonomous(ProductKind::TStp, Time::Discrete, a, dims(2, 5, 4));
    spec.validate().unwrap();
    let zm = CubicMatrix::zeros(z12(), dims(2, 2, 1));
    let spec = SystemSpec::autonomous(ProductKind::TProduct, Time::Continuous, zm, dims(2, 1, 1));
    assert!(matches!(spec.validate(), Err(Error::Unsupported(_))));
}

#[test]
fn schedule_validation_and_lookup() {
    let v = |x: f64| InputValue::<Real>::Scalars(vec![x]);
    let bad = InputSignal::PiecewiseConstant { breakpoints: vec![0.0, 0.0], values: vec![v(1.0), v(2.0)] };
    assert!(bad.validate().is_err());
    let ok = InputSignal::PiecewiseConstant { breakpoints: vec![0.5, 1.0], values: vec![v(1.0), v(2.0)] };
    ok.validate().unwrap();
    assert_eq!(ok.value_at(0.2).unwrap(), None);
    assert_eq!(ok.value_at(0.5).unwrap(), Some(&v(1.0)));
    assert_eq!(ok.value_at(7.0).unwrap(), Some(&v(2.0)));
}

#[test]
fn sample_grid() {
    assert_eq!(sample_times(1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(sample_times(0.3, 0.25).unwrap(), vec![0.0, 0.25, 0.3]);
    let t = sample_times(1.0, 1e-3).unwrap();
    assert_eq!(t.len(), 1001);
    assert_eq!(*t.last().unwrap(), 1.0);
    assert!(sample_times(1.0, 0.0).is_err());
}

#[test]
fn drift_free_integrates_input() {
    let mut rng = random::rng(4);
    let sd = dims(2, 2, 2);
    let b1 = random::real_cubic_unit(&mut rng, sd);
    let b2 = random::real_cubic_unit(&mut rng, sd);
    let x0 = random::real_cubic_unit(&mut rng, sd);
    let spec = SystemSpec {
        kind: ProductKind::TStp,
        time: Time::Continuous,
        a: CubicMatrix::zeros(Real, sd),
        input: InputMap::Directions(vec![b1.clone(), b2.clone()]),
        c: None,
        state_dims: sd,
    };
    // u = (1, 1) on [0.3, 0.7), then (2, 2)
    let u = InputSignal::PiecewiseConstant {
        breakpoints: vec![0.3, 0.7],
        values: vec![InputValue::Scalars(vec![1.0, 1.0]), InputValue::Scalars(vec![2.0, 2.0])],
    };
    let traj = simulate_continuous(&spec, &x0, &u, 1.0, 0.25).unwrap();
    let integral = 0.4 + 2.0 * 0.3;
    let want = x0.add(&b1.add(&b2).unwrap().scale(integral)).unwrap();
    assert!(traj.last().unwrap().max_abs_diff(&want) < 1e-14);
}

#[test]
fn rk4_endpoint_matches_closed_form() {
    let mut rng = random::rng(5);
    let a = random::real_cubic(&mut rng, dims(2, 2, 3), 1.0);
    let x0 = random::real_cubic_unit(&mut rng, dims(2, 2, 3));
    let spec = continuous(ProductKind::TProduct, a, x0.dims());
    let traj = simulate_continuous(&spec, &x0, &InputSignal::None, 1.0, 1e-3).unwrap();
    let exact = closed_form(&spec, &x0, &InputSignal::None, &TruncationPolicy::default()).unwrap().at(1.0).unwrap();
    assert!(rel(traj.last().unwrap(), &exact) <= 1e-6);
}

#[test]
fn rk4_is_fourth_order() {
    let mut rng = random::rng(6);
    let a = random::real_cubic(&mut rng, dims(2, 2, 2), 1.0);
    let x0 = random::real_cubic_unit(&mut rng, dims(2, 1, 2));
    let spec = continuous(ProductKind::TProduct, a, x0.dims());
    let exact = closed_form(&spec, &x0, &InputSignal::None, &TruncationPolicy::default()).unwrap().at(1.0).unwrap();
    let err = |dt| rel(simulate_continuous(&spec, &x0, &InputSignal::None, 1.0, dt).unwrap().last().unwrap(), &exact);
    let ratio = err(0.1) / err(0.05);
    assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn dk_trajectory_is_per_slice() {
    let mut rng = random::rng(7);
    let a = random::real_cubic(&mut rng, dims(2, 3, 3), 1.0);
    let x0 = random::real_cubic_unit(&mut rng, dims(2, 2, 3));
    let spec = continuous(ProductKind::DkStp, a.clone(), x0.dims());
    let joint = simulate_continuous(&spec, &x0, &InputSignal::None, 0.5, 0.01).unwrap();
    for k in 0..3 {
        let ak = CubicMatrix::from_slices(&[a.frontal_slice(k).unwrap()]).unwrap();
        let xk = CubicMatrix::from_slices(&[x0.frontal_slice(k).unwrap()]).unwrap();
        let single = continuous(ProductKind::DkStp, ak, xk.dims());
        let part = simulate_continuous(&single, &xk, &InputSignal::None, 0.5, 0.01).unwrap();
        for (full, one) in joint.states.iter().zip(&part.states) {
            let got = full.frontal_slice(k).unwrap();
            let want = one.frontal_slice(0).unwrap();
            assert!(got.max_abs_diff(&want) <= 1e-12);
        }
    }
}

#[test]
fn closed_form_basics() {
    let mut rng = random::rng(8);
    let a = random::real_cubic(&mut rng, dims(2, 3, 2), 1.0);
    let x0 = random::real_cubic_unit(&mut rng, dims(2, 2, 4));
    let policy = TruncationPolicy::default();
    for kind in [ProductKind::TStp, ProductKind::DkStp] {
        let spec = continuous(kind, a.clone(), x0.dims());
        let cf = closed_form(&spec, &x0, &InputSignal::None, &policy).unwrap();
        assert_eq!(cf.at(0.0).unwrap(), x0);
        let want = dense_solution(&spec, &x0, &InputSignal::None, 0.8);
        assert!(cf.at(0.8).unwrap().max_abs_diff(&want) <= 1e-9, "{kind}");
    }
}

#[test]
fn closed_form_with_held_input() {
    let mut rng = random::rng(9);
    let policy = TruncationPolicy::default();
    let sd = dims(2, 2, 2);
    for kind in ProductKind::ALL {
        let a = random::real_cubic(&mut rng, dims(2, 2, 2), 1.0);
        let b = random::real_cubic_unit(&mut rng, dims(2, 3, 1));
        let x0 = random::real_cubic_unit(&mut rng, sd);
        let input_dims = if kind == ProductKind::TProduct { dims(2, 2, 2) } else { dims(3, 2, 2) };
        let b = if kind == ProductKind::TProduct { random::real_cubic_unit(&mut rng, dims(2, 2, 2)) } else { b };
        let u1 = random::real_cubic_unit(&mut rng, input_dims);
        let u2 = random::real_cubic_unit(&mut rng, input_dims);
        let spec = SystemSpec {
            kind,
            time: Time::Continuous,
            a,
            input: InputMap::Operator { b, input_dims },
            c: None,
            state_dims: sd,
        };
        let u = InputSignal::PiecewiseConstant {
            breakpoints: vec![0.2, 0.9],
            values: vec![InputValue::Cubic(u1), InputValue::Cubic(u2)],
        };
        let cf = closed_form(&spec, &x0, &u, &policy).unwrap();
        for t in [0.1, 0.5, 1.3] {
            let want = dense_solution(&spec, &x0, &u, t);
            assert!(cf.at(t).unwrap().max_abs_diff(&want) <= 1e-9, "{kind} t={t}");
        }
        let traj = simulate_continuous(&spec, &x0, &u, 1.3, 0.01).unwrap();
        assert!(rel(traj.last().unwrap(), &cf.at(1.3).unwrap()) <= 1e-8, "{kind}");
    }
}

#[test]
fn classical_state_matrices() {
    let mut rng = random::rng(10);
    let a = random::real_cubic_unit(&mut rng, dims(3, 3, 2));
    let spec = continuous(ProductKind::TProduct, a.clone(), dims(3, 2, 2));
    assert_eq!(to_classical(&spec).unwrap().a, gamma(&a));
    let a1 = random::real_cubic_unit(&mut rng, dims(3, 3, 1));
    let spec = continuous(ProductKind::TStp, a1.clone(), dims(3, 2, 1));
    assert_eq!(to_classical(&spec).unwrap().a, a1.frontal_slice(0).unwrap());
}

#[test]
fn left_operator_matches_products() {
    let mut rng = random::rng(11);
    let cases = [
        (ProductKind::TProduct, dims(2, 3, 2), dims(3, 2, 2)),
        (ProductKind::TStp, dims(2, 3, 2), dims(2, 2, 4)),
        (ProductKind::TStp, dims(2, 4, 4), dims(3, 2, 2)),
        (ProductKind::TStp, dims(3, 2, 2), dims(2, 1, 3)),
        (ProductKind::DkStp, dims(2, 3, 2), dims(4, 2, 6)),
        (ProductKind::DkStp, dims(2, 2, 3), dims(3, 2, 2)),
    ];
    for (kind, da, dx) in cases {
        let a = random::real_cubic_unit(&mut rng, da);
        let x = random::real_cubic_unit(&mut rng, dx);
        let l = left_operator(kind, &a, dx).unwrap();
        let want = kind.apply(&a, &x).unwrap().unfold();
        assert!(l.matmul(&x.unfold()).unwrap().max_abs_diff(&want) <= 1e-13, "{kind} {da} {dx}");
    }
}

#[test]
fn bisimulation_reports() {
    let mut rng = random::rng(12);
    let x0 = random::real_cubic_unit(&mut rng, dims(2, 2, 2));
    let id = continuous(ProductKind::TProduct, CubicMatrix::identity_t(Real, 2, 2), x0.dims());
    let rep = bisimulation_check(&id, &x0, &InputSignal::None, 1.0, 0.1, 1e-8).unwrap();
    assert_eq!(rep.max_deviation, 0.0);
    assert!(rep.passed);

    let a = random::real_cubic(&mut rng, dims(2, 2, 2), 1.0);
    let b = random::real_cubic_unit(&mut rng, dims(2, 2, 2));
    let spec = SystemSpec {
        kind: ProductKind::TProduct,
        time: Time::Continuous,
        a,
        input: InputMap::Directions(vec![b]),
        c: None,
        state_dims: x0.dims(),
    };
    let u = InputSignal::PiecewiseConstant {
        breakpoints: vec![0.0, 0.55],
        values: vec![InputValue::Scalars(vec![1.0]), InputValue::Scalars(vec![-0.5])],
    };
    let rep = bisimulation_check(&spec, &x0, &u, 2.0, 1e-2, 1e-8).unwrap();
    assert!(rep.passed, "{rep:?}");

    let mut image = gamma_image(&spec).unwrap();
    let v = image.a.get(0, 1);
    image.a.set(0, 1, v + 1e-3);
    let rep = bisimulate_against(&spec, &image, &x0, &u, 2.0, 1e-2, 1e-8).unwrap();
    assert!(!rep.passed);
}

#[test]
fn nonlinear_trivial_cases() {
    let z = z12();
    let zero = PowerSeries::polynomial(0.0, vec![]);
    let spec = NonlinearSpec {
        kind: ProductKind::TStp,
        time: Time::Discrete,
        f: zero.clone(),
        g: vec![],
        drift: Some(CubicMatrix::zeros(z, dims(2, 3, 1))),
        output: None,
        policy: TruncationPolicy::default(),
    };
    let mut rng = random::rng(13);
    let x0 = random::mod_cubic(&mut rng, dims(2, 3, 2), z);
    let traj = simulate_nonlinear(&spec, &x0, &InputSignal::None, Horizon::Steps(3)).unwrap();
    assert!(traj.states[1..].iter().all(|x| x.is_zero()));

    let identity_map = NonlinearSpec { f: PowerSeries::polynomial(0.0, vec![1.0]), drift: None, ..spec.clone() };
    let traj = simulate_nonlinear(&identity_map, &x0, &InputSignal::None, Horizon::Steps(3)).unwrap();
    assert!(traj.states.iter().all(|x| *x == x0));

    let quadratic = NonlinearSpec { f: PowerSeries::polynomial(0.0, vec![0.0, 1.0]), ..spec };
    let origin = CubicMatrix::zeros(z, dims(2, 3, 2));
    let traj = simulate_nonlinear(&quadratic, &origin, &InputSignal::None, Horizon::Steps(4)).unwrap();
    assert!(traj.states.iter().all(|x| x.is_zero()));
}

#[test]
fn nonlinear_quadratic_map_two_paths() {
    let z = z12();
    let mut rng = random::rng(14);
    let a = random::mod_cubic(&mut rng, dims(2, 3, 4), z);
    let w0 = random::mod_cubic(&mut rng, dims(2, 3, 4), z);
    let spec = NonlinearSpec {
        kind: ProductKind::TStp,
        time: Time::Discrete,
        f: PowerSeries::polynomial(0.0, vec![0.0, 1.0]),
        g: vec![],
        drift: Some(a.clone()),
        output: None,
        policy: TruncationPolicy::default(),
    };
    let traj = simulate_nonlinear(&spec, &w0, &InputSignal::None, Horizon::Steps(4)).unwrap();
    let mut w = w0;
    for k in 1..=4 {
        let sq = crate::products::t_stp_via_gamma(&w, &w).unwrap();
        w = sq.add(&crate::products::t_stp_via_gamma(&a, &w).unwrap()).unwrap();
        assert_eq!(traj.states[k], w);
    }
}

#[test]
fn nonlinear_radius_violation_names_step() {
    let x0 = CubicMatrix::from_fn(Real, dims(1, 1, 1), |_, _, _| 0.3);
    let spec = NonlinearSpec {
        kind: ProductKind::TStp,
        time: Time::Discrete,
        f: named_series("log1p", None, 400).unwrap(),
        g: vec![],
        drift: Some(CubicMatrix::from_fn(Real, dims(1, 1, 1), |_, _, _| 2.0)),
        output: None,
        policy: TruncationPolicy { atol: 1e-12, max_terms: 4096 },
    };
    // log1p(x) + 2x grows past the unit radius
    match simulate_nonlinear(&spec, &x0, &InputSignal::None, Horizon::Steps(10)) {
        Err(Error::Radius { step: Some(k), norm, .. }) => assert!(k >= 1 && norm >= 1.0),
        other => panic!("expected radius error, got {other:?}"),
    }
}

#[test]
fn nonlinear_continuous_linear_case() {
    // f(x) = 0.5·x is linear, so the flow is exp(0.5 t)·x0
    let mut rng = random::rng(15);
    let x0 = random::real_cubic_unit(&mut rng, dims(2, 3, 2));
    let spec = NonlinearSpec {
        kind: ProductKind::DkStp,
        time: Time::Continuous,
        f: PowerSeries::polynomial(0.0, vec![0.5]),
        g: vec![PowerSeries::polynomial(1.0, vec![])],
        drift: None,
        output: Some(NonlinearOutput::Series(PowerSeries::polynomial(0.0, vec![2.0]))),
        policy: TruncationPolicy::default(),
    };
    let nonsquare = simulate_nonlinear(&spec, &x0, &InputSignal::None, Horizon::Time { t_final: 1.0, dt: 0.01 }).unwrap();
    let want = x0.scale(0.5f64.exp());
    assert!(rel(nonsquare.last().unwrap(), &want) < 1e-9);
    assert!(rel(&nonsquare.outputs.unwrap()[100], &want.scale(2.0)) < 1e-9);
    let u = InputSignal::PiecewiseConstant { breakpoints: vec![0.0], values: vec![InputValue::Scalars(vec![1.0])] };
    // g has a constant term, which needs square slices
    assert!(simulate_nonlinear(&spec, &x0, &u, Horizon::Time { t_final: 1.0, dt: 0.01 }).is_err());
}

#[test]
fn s_system_axioms() {
    for kind in [ProductKind::TProduct, ProductKind::TStp, ProductKind::DkStp] {
        let rep = s_system_check(Real, kind, 2, 3, 2, 50, 16).unwrap();
        assert!(rep.passed, "{rep:?}");
        let rep = s_system_check(z12(), kind, 3, 2, 2, 50, 17).unwrap();
        assert!(rep.passed && rep.max_rel_error == 0.0);
    }
}

#[test]
fn csv_layout() {
    let z = z12();
    let x = CubicMatrix::from_fn(z, dims(1, 2, 2), |_, j, k| (j + 10 * k) as u64 % 12);
    let traj = Trajectory::new(vec![0.0, 1.0], vec![x.clone(), x.scale(2)], None).unwrap();
    assert_eq!(traj.to_csv(), "t,x_1_1_1,x_1_2_1,x_1_1_2,x_1_2_2\n0,0,1,10,11\n1,0,2,8,10\n");
    let r = CubicMatrix::from_fn(Real, dims(1, 1, 1), |_, _, _| 0.1);
    let traj = Trajectory::new(vec![0.5], vec![r], None).unwrap();
    assert_eq!(traj.to_csv(), "t,x_1_1_1\n0.5,0.1\n");
    assert!(Trajectory::new(vec![0.0], vec![], None::<Vec<CubicMatrix<Real>>>).is_err());
}

fn arb_mod(d: Dims) -> impl Strategy<Value = CubicMatrix<Modular>> {
    proptest::collection::vec(0u64..12, d.len()).prop_map(move |v| CubicMatrix::new(z12(), d, v).unwrap())
}

fn arb_real(d: Dims) -> impl Strategy<Value = CubicMatrix<Real>> {
    proptest::collection::vec(-0.5f64..0.5, d.len()).prop_map(move |v| CubicMatrix::new(Real, d, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discrete_semigroup(a in arb_mod(dims(2, 3, 2)), x0 in arb_mod(dims(2, 2, 4)), j in 0usize..4, k in 0usize..4) {
        let spec = SystemSpec::autonomous(ProductKind::TStp, Time::Discrete, a, x0.dims());
        let long = simulate_discrete(&spec, &x0, &InputSignal::None, j + k).unwrap();
        let mid = simulate_discrete(&spec, &x0, &InputSignal::None, j).unwrap();
        let rest = simulate_discrete(&spec, mid.last().unwrap(), &InputSignal::None, k).unwrap();
        prop_assert_eq!(long.last().unwrap(), rest.last().unwrap());
    }

    #[test]
    fn flow_is_linear(a in arb_real(dims(2, 2, 2)), x in arb_real(dims(2, 1, 2)), y in arb_real(dims(2, 1, 2)),
                      c1 in -2.0f64..2.0, c2 in -2.0f64..2.0) {
        for kind in ProductKind::ALL {
            let spec = continuous(kind, a.clone(), x.dims());
            let run = |x0: &CubicMatrix<Real>| simulate_continuous(&spec, x0, &InputSignal::None, 0.5, 0.05).unwrap();
            let combo = x.scale(c1).add(&y.scale(c2)).unwrap();
            let (tx, ty, tc) = (run(&x), run(&y), run(&combo));
            for k in 0..tc.len() {
                let want = tx.states[k].scale(c1).add(&ty.states[k].scale(c2)).unwrap();
                prop_assert!(tc.states[k].max_abs_diff(&want) <= 1e-9);
            }
        }
    }

    #[test]
    fn dk_slices_do_not_interact(a in arb_mod(dims(2, 3, 3)), x0 in arb_mod(dims(3, 2, 3)),
                                 bump in arb_mod(dims(2, 3, 1)), j in 0usize..3) {
        let spec = SystemSpec::autonomous(ProductKind::DkStp, Time::Discrete, a.clone(), dims(2, 2, 3));
        let x0 = CubicMatrix::from_fn(z12(), dims(2, 2, 3), |i, jj, k| x0.get(i + 1, jj, k));
        let base = simulate_discrete(&spec, &x0, &InputSignal::None, 3).unwrap();
        let mut slices = a.slices();
        slices[j] = slices[j].add(&bump.frontal_slice(0).unwrap()).unwrap();
        let perturbed = SystemSpec { a: CubicMatrix::from_slices(&slices).unwrap(), ..spec };
        let other = simulate_discrete(&perturbed, &x0, &InputSignal::None, 3).unwrap();
        for (p, q) in base.states.iter().zip(&other.states) {
            for i in (0..3).filter(|&i| i != j) {
                prop_assert_eq!(p.frontal_slice(i).unwrap(), q.frontal_slice(i).unwrap());
            }
        }
    }
}
