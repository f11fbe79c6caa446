use crate::cubic::CubicMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, Ring, ScalarDomain};

use super::{InputSignal, SystemSpec, Trajectory};

/// Iterates `x(t+1) = A * x(t) + input(t)` for `steps` steps.
pub fn simulate_discrete<R: Ring>(
    spec: &SystemSpec<R>,
    x0: &CubicMatrix<R>,
    u: &InputSignal<R>,
    steps: usize,
) -> Result<Trajectory<R>> {
    spec.validate()?;
    spec.check_state(x0)?;
    u.validate()?;
    if let InputSignal::Samples(v) = u {
        if v.len() < steps {
            return Err(Error::shape("simulate_discrete", format!("{} input samples for {steps} steps", v.len())));
        }
    }
    let mut states = Vec::with_capacity(steps + 1);
    let mut outputs = spec.c.as_ref().map(|_| Vec::with_capacity(steps + 1));
    let mut x = x0.clone();
    for k in 0..=steps {
        if let Some(ys) = outputs.as_mut() {
            ys.push(spec.output(&x)?.expect("output map present"));
        }
        if k == steps {
            states.push(x);
            break;
        }
        let mut next = spec.kind.apply(&spec.a, &x)?;
        if let Some(v) = u.sample(k)? {
            next = next.add(&spec.input_term(v)?)?;
        }
        states.push(std::mem::replace(&mut x, next));
    }
    let times = (0..=steps).map(|k| k as f64).collect();
    Trajectory::new(times, states, outputs)
}

/// Sample times `0, dt, 2dt, …` up to and including `t_final`.
pub fn sample_times(t_final: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidValue(format!("dt must be positive and finite, got {dt}")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidValue(format!("t_final must be non-negative and finite, got {t_final}")));
    }
    let ratio = t_final / dt;
    let whole = ratio.round();
    let mut times: Vec<f64>;
    if (ratio - whole).abs() <= 1e-9 * whole.max(1.0) {
        times = (0..=whole as usize).map(|k| k as f64 * dt).collect();
        *times.last_mut().unwrap() = t_final;
    } else {
        times = (0..=ratio.floor() as usize).map(|k| k as f64 * dt).collect();
        times.push(t_final);
    }
    Ok(times)
}

/// `[t0, t1]` split at the breakpoints strictly inside it.
pub(crate) fn zoh_pieces(t0: f64, t1: f64, breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut pieces = Vec::new();
    let mut start = t0;
    for &b in breakpoints.iter().filter(|&&b| b > t0 && b < t1) {
        pieces.push((start, b));
        start = b;
    }
    pieces.push((start, t1));
    pieces
}

/// States the fixed-step integrator can advance.
pub(crate) trait OdeState: Sized {
    /// `self + h·k`
    fn axpy(&self, h: f64, k: &Self) -> Result<Self>;
}

impl<R: Ring> OdeState for CubicMatrix<R> {
    fn axpy(&self, h: f64, k: &Self) -> Result<Self> {
        let ring = self.ring();
        let c = ring
            .from_f64_exact(h)
            .ok_or_else(|| Error::Unsupported(format!("step {h} has no image in {}", ring.domain())))?;
        self.add(&k.scale(c))
    }
}

impl OdeState for DenseMatrix<Real> {
    fn axpy(&self, h: f64, k: &Self) -> Result<Self> {
        self.add(&k.scale(h))
    }
}

/// One classical Runge–Kutta step with a fixed summation order.
pub(crate) fn rk4_step<S: OdeState>(f: &impl Fn(&S) -> Result<S>, x: &S, h: f64) -> Result<S> {
    let k1 = f(x)?;
    let k2 = f(&x.axpy(0.5 * h, &k1)?)?;
    let k3 = f(&x.axpy(0.5 * h, &k2)?)?;
    let k4 = f(&x.axpy(h, &k3)?)?;
    let sum = k1.axpy(2.0, &k2)?.axpy(2.0, &k3)?.axpy(1.0, &k4)?;
    x.axpy(h / 6.0, &sum)
}

/// Integrates `x' = rhs(x, t_piece_start)` over the sample grid, splitting
/// steps at input breakpoints so the input is constant on every substep.
pub(crate) fn integrate<S: OdeState + Clone>(
    x0: S,
    times: &[f64],
    breakpoints: &[f64],
    rhs: impl Fn(&S, f64) -> Result<S>,
) -> Result<Vec<S>> {
    let mut states = Vec::with_capacity(times.len());
    let mut x = x0;
    states.push(x.clone());
    for w in times.windows(2) {
        for (a, b) in zoh_pieces(w[0], w[1], breakpoints) {
            x = rk4_step(&|y: &S| rhs(y, a), &x, b - a)?;
        }
        states.push(x.clone());
    }
    Ok(states)
}

/// Fourth-order Runge–Kutta integration of `ẋ = A * x + input(t)`.
pub fn simulate_continuous<R: Ring>(
    spec: &SystemSpec<R>,
    x0: &CubicMatrix<R>,
    u: &InputSignal<R>,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory<R>> {
    spec.validate()?;
    spec.check_state(x0)?;
    u.validate()?;
    if spec.domain() != ScalarDomain::Real {
        return Err(Error::Unsupported(format!("continuous simulation needs real scalars, got {}", spec.domain())));
    }
    let times = sample_times(t_final, dt)?;
    let rhs = |x: &CubicMatrix<R>, t: f64| -> Result<CubicMatrix<R>> {
        let ax = spec.kind.apply(&spec.a, x)?;
        match u.value_at(t)? {
            Some(v) => ax.add(&spec.input_term(v)?),
            None => Ok(ax),
        }
    };
    let states = integrate(x0.clone(), &times, u.breakpoints(), rhs)?;
    let outputs = match spec.c {
        Some(_) => Some(states.iter().map(|x| spec.output(x).map(Option::unwrap)).collect::<Result<Vec<_>>>()?),
        None => None,
    };
    Trajectory::new(times, states, outputs)
}
