use crate::analysis::{analytic_eval, check_radius, PowerSeries, TruncationPolicy};
use crate::cubic::CubicMatrix;
use crate::error::{Error, Result};
use crate::products::ProductKind;
use crate::scalar::{Ring, ScalarDomain};

use super::simulate::{integrate, sample_times};
use super::{InputSignal, InputValue, Time, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearOutput<R: Ring> {
    Series(PowerSeries),
    Operator(CubicMatrix<R>),
}

/// `x⁺ = f_*(x) + A * x + Σ (g_i)_*(x) u_i` (or `ẋ = …`), with analytic
/// functions evaluated under `kind`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearSpec<R: Ring> {
    pub kind: ProductKind,
    pub time: Time,
    pub f: PowerSeries,
    pub g: Vec<PowerSeries>,
    /// Optional linear part `A * x`.
    pub drift: Option<CubicMatrix<R>>,
    pub output: Option<NonlinearOutput<R>>,
    pub policy: TruncationPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Steps(usize),
    Time { t_final: f64, dt: f64 },
}

impl<R: Ring> NonlinearSpec<R> {
    fn validate(&self) -> Result<()> {
        if self.kind == ProductKind::TProduct {
            return Err(Error::Unsupported("nonlinear systems are defined for dkstp and tstp".into()));
        }
        self.f.validate()?;
        for g in &self.g {
            g.validate()?;
        }
        Ok(())
    }

    /// Evaluates an analytic function at `x`; radius failures carry `step`.
    fn eval(&self, f: &PowerSeries, x: &CubicMatrix<R>, step: usize) -> Result<CubicMatrix<R>> {
        check_radius(f, x).map_err(|e| at_step(e, step))?;
        analytic_eval(f, x, self.kind, &self.policy).map_err(|e| at_step(e, step))
    }

    fn rhs(&self, x: &CubicMatrix<R>, u: Option<&InputValue<R>>, step: usize) -> Result<CubicMatrix<R>> {
        let mut out = self.eval(&self.f, x, step)?;
        if let Some(a) = &self.drift {
            out = out.add(&self.kind.apply(a, x)?)?;
        }
        match u {
            None => {}
            Some(InputValue::Scalars(us)) if us.len() == self.g.len() => {
                for (g, &ui) in self.g.iter().zip(us) {
                    out = out.add(&self.eval(g, x, step)?.scale(ui))?;
                }
            }
            Some(InputValue::Scalars(us)) => {
                return Err(Error::shape("nonlinear input", format!("{} input maps but {} inputs", self.g.len(), us.len())));
            }
            Some(InputValue::Cubic(_)) => {
                return Err(Error::shape("nonlinear input", "inputs to g_i must be scalars"));
            }
        }
        if out.dims() != x.dims() {
            return Err(Error::shape("nonlinear system", format!("right-hand side is {}, state is {}", out.dims(), x.dims())));
        }
        Ok(out)
    }

    fn output(&self, x: &CubicMatrix<R>, step: usize) -> Result<Option<CubicMatrix<R>>> {
        match &self.output {
            None => Ok(None),
            Some(NonlinearOutput::Series(h)) => self.eval(h, x, step).map(Some),
            Some(NonlinearOutput::Operator(c)) => self.kind.apply(c, x).map(Some),
        }
    }
}

fn at_step(e: Error, step: usize) -> Error {
    match e {
        Error::Radius { norm, radius, .. } => Error::Radius { norm, radius, step: Some(step) },
        other => other,
    }
}

/// Discrete maps are iterated directly; continuous systems use RK4 with
/// the same grid rules as the linear simulator.
pub fn simulate_nonlinear<R: Ring>(
    spec: &NonlinearSpec<R>,
    x0: &CubicMatrix<R>,
    u: &InputSignal<R>,
    horizon: Horizon,
) -> Result<Trajectory<R>> {
    spec.validate()?;
    u.validate()?;
    if let Some(a) = &spec.drift {
        a.ring().check_same(&x0.ring(), "nonlinear drift")?;
    }
    let (times, states) = match (spec.time, horizon) {
        (Time::Discrete, Horizon::Steps(steps)) => {
            let mut states = Vec::with_capacity(steps + 1);
            states.push(x0.clone());
            for k in 0..steps {
                let next = spec.rhs(&states[k], u.sample(k)?, k)?;
                states.push(next);
            }
            ((0..=steps).map(|k| k as f64).collect(), states)
        }
        (Time::Continuous, Horizon::Time { t_final, dt }) => {
            if x0.ring().domain() != ScalarDomain::Real {
                return Err(Error::Unsupported(format!("continuous time needs real scalars, got {}", x0.ring().domain())));
            }
            let times = sample_times(t_final, dt)?;
            // step index of a substep start, for error reports
            let step_of = |t: f64| (t / dt).floor() as usize;
            let states = integrate(x0.clone(), &times, u.breakpoints(), |x, t| spec.rhs(x, u.value_at(t)?, step_of(t)))?;
            (times, states)
        }
        (time, horizon) => {
            return Err(Error::InvalidValue(format!("horizon {horizon:?} does not fit {time:?} time")));
        }
    };
    let outputs = match spec.output {
        Some(_) => Some(
            states
                .iter()
                .enumerate()
                .map(|(k, x)| spec.output(x, k).map(Option::unwrap))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    Trajectory::new(times, states, outputs)
}
