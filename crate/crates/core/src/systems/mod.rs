//! Linear and nonlinear dynamic systems over cubic matrices: simulation,
//! closed-form solutions, classical forms and bi-simulation checks.

mod classical;
mod nonlinear;
mod simulate;
mod ssystem;
mod trajectory;

pub use classical::{
    bisimulate_against, bisimulation_check, closed_form, gamma_image, left_operator, to_classical, BisimReport,
    ClassicalInput, ClassicalSystem, ClosedForm, DenseImage, ImageCoords,
};
pub use nonlinear::{simulate_nonlinear, Horizon, NonlinearOutput, NonlinearSpec};
pub use simulate::{sample_times, simulate_continuous, simulate_discrete};
pub use ssystem::{s_system_check, SSystemReport};
pub use trajectory::Trajectory;

use serde::{Deserialize, Serialize};

use crate::cubic::{CubicMatrix, Dims};
use crate::error::{Error, Result};
use crate::products::ProductKind;
use crate::scalar::{Ring, ScalarDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Time {
    Discrete,
    Continuous,
}

/// How inputs enter the state equation.
#[derive(Debug, Clone, PartialEq)]
pub enum InputMap<R: Ring> {
    None,
    /// `Σ B_i u_i` with scalar `u_i`; every `B_i` has the state dims.
    Directions(Vec<CubicMatrix<R>>),
    /// `B * u` with a cubic input of `input_dims`.
    Operator { b: CubicMatrix<R>, input_dims: Dims },
}

/// `x⁺ = A * x + input`, `y = C * x`, with `*` the declared product.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec<R: Ring> {
    pub kind: ProductKind,
    pub time: Time,
    pub a: CubicMatrix<R>,
    pub input: InputMap<R>,
    pub c: Option<CubicMatrix<R>>,
    pub state_dims: Dims,
}

impl<R: Ring> SystemSpec<R> {
    pub fn autonomous(kind: ProductKind, time: Time, a: CubicMatrix<R>, state_dims: Dims) -> Self {
        SystemSpec { kind, time, a, input: InputMap::None, c: None, state_dims }
    }

    pub fn domain(&self) -> ScalarDomain {
        self.a.ring().domain()
    }

    pub fn validate(&self) -> Result<()> {
        let ring = self.a.ring();
        let next = self.kind.result_dims(self.a.dims(), self.state_dims).map_err(|e| relabel(e, "system A"))?;
        if next != self.state_dims {
            return Err(Error::shape(
                "system A",
                format!("A {} acting on state {} under {} gives {next}", self.a.dims(), self.state_dims, self.kind),
            ));
        }
        match &self.input {
            InputMap::None => {}
            InputMap::Directions(bs) => {
                if bs.is_empty() {
                    return Err(Error::shape("system B", "empty list of input directions"));
                }
                for (i, b) in bs.iter().enumerate() {
                    ring.check_same(&b.ring(), "system B")?;
                    if b.dims() != self.state_dims {
                        return Err(Error::shape(
                            "system B",
                            format!("direction B_{} is {}, state is {}", i + 1, b.dims(), self.state_dims),
                        ));
                    }
                }
            }
            InputMap::Operator { b, input_dims } => {
                ring.check_same(&b.ring(), "system B")?;
                let out = self.kind.result_dims(b.dims(), *input_dims).map_err(|e| relabel(e, "system B"))?;
                if out != self.state_dims {
                    return Err(Error::shape(
                        "system B",
                        format!("B {} acting on input {input_dims} gives {out}, state is {}", b.dims(), self.state_dims),
                    ));
                }
            }
        }
        if let Some(c) = &self.c {
            ring.check_same(&c.ring(), "system C")?;
            self.kind.result_dims(c.dims(), self.state_dims).map_err(|e| relabel(e, "system C"))?;
        }
        if self.time == Time::Continuous && self.domain() != ScalarDomain::Real {
            return Err(Error::Unsupported(format!("continuous time needs real scalars, got {}", self.domain())));
        }
        Ok(())
    }

    pub(crate) fn check_state(&self, x: &CubicMatrix<R>) -> Result<()> {
        self.a.ring().check_same(&x.ring(), "initial state")?;
        if x.dims() != self.state_dims {
            return Err(Error::shape("initial state", format!("x0 is {}, spec declares {}", x.dims(), self.state_dims)));
        }
        Ok(())
    }

    /// `B * u` or `Σ B_i u_i` for one input value.
    pub fn input_term(&self, value: &InputValue<R>) -> Result<CubicMatrix<R>> {
        let ring = self.a.ring();
        match (&self.input, value) {
            (InputMap::Directions(bs), InputValue::Scalars(us)) => {
                if bs.len() != us.len() {
                    return Err(Error::shape("input", format!("{} directions but {} scalar inputs", bs.len(), us.len())));
                }
                let mut acc = CubicMatrix::zeros(ring, self.state_dims);
                for (b, &u) in bs.iter().zip(us) {
                    acc = acc.add(&b.scale(u))?;
                }
                Ok(acc)
            }
            (InputMap::Operator { b, input_dims }, InputValue::Cubic(u)) => {
                ring.check_same(&u.ring(), "input")?;
                if u.dims() != *input_dims {
                    return Err(Error::shape("input", format!("u is {}, spec declares {input_dims}", u.dims())));
                }
                self.kind.apply(b, u)
            }
            (InputMap::None, _) => Err(Error::shape("input", "system has no input map but an input was supplied")),
            (InputMap::Directions(_), InputValue::Cubic(_)) => {
                Err(Error::shape("input", "direction inputs need scalar values, got a cubic matrix"))
            }
            (InputMap::Operator { .. }, InputValue::Scalars(_)) => {
                Err(Error::shape("input", "operator input needs a cubic value, got scalars"))
            }
        }
    }

    pub(crate) fn output(&self, x: &CubicMatrix<R>) -> Result<Option<CubicMatrix<R>>> {
        self.c.as_ref().map(|c| self.kind.apply(c, x)).transpose()
    }

    /// `A` replicated to the slice count of the state, so that products
    /// with `A` and its powers stay associative.
    pub(crate) fn a_replicated(&self) -> Result<CubicMatrix<R>> {
        match self.kind {
            ProductKind::TProduct => Ok(self.a.clone()),
            _ => self.a.replicate_slices(self.state_dims.s / self.a.dims().s),
        }
    }
}

fn relabel(e: Error, op: &'static str) -> Error {
    match e {
        Error::Shape { detail, .. } => Error::Shape { op, detail },
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputValue<R: Ring> {
    Scalars(Vec<R::Elem>),
    Cubic(CubicMatrix<R>),
}

/// Input schedule. Piecewise-constant values hold on `[b_i, b_{i+1})`, the
/// last one indefinitely; before the first breakpoint the input is zero.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal<R: Ring> {
    None,
    Samples(Vec<InputValue<R>>),
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<InputValue<R>> },
}

impl<R: Ring> InputSignal<R> {
    pub fn validate(&self) -> Result<()> {
        if let InputSignal::PiecewiseConstant { breakpoints, values } = self {
            if breakpoints.len() != values.len() {
                return Err(Error::shape(
                    "input schedule",
                    format!("{} breakpoints but {} values", breakpoints.len(), values.len()),
                ));
            }
            if breakpoints.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidValue("breakpoints must be finite".into()));
            }
            if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
                return Err(Error::InvalidValue(format!(
                    "breakpoints must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    /// Value held at time `t`, `None` meaning zero input.
    pub fn value_at(&self, t: f64) -> Result<Option<&InputValue<R>>> {
        match self {
            InputSignal::None => Ok(None),
            InputSignal::Samples(_) => {
                Err(Error::Unsupported("sampled inputs are discrete; use a piecewise-constant schedule".into()))
            }
            InputSignal::PiecewiseConstant { breakpoints, values } => {
                let held = breakpoints.partition_point(|&b| b <= t);
                Ok(held.checked_sub(1).map(|i| &values[i]))
            }
        }
    }

    /// Value applied at discrete step `k`.
    pub fn sample(&self, k: usize) -> Result<Option<&InputValue<R>>> {
        match self {
            InputSignal::Samples(v) => v
                .get(k)
                .map(Some)
                .ok_or(Error::IndexOutOfRange { what: "input samples", index: k, len: v.len() }),
            other => other.value_at(k as f64),
        }
    }

    pub(crate) fn breakpoints(&self) -> &[f64] {
        match self {
            InputSignal::PiecewiseConstant { breakpoints, .. } => breakpoints,
            _ => &[],
        }
    }
}

#[cfg(test)]
mod tests;
