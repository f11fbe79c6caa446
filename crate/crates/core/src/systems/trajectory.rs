use std::fmt::Write as _;

use crate::cubic::{CubicMatrix, Dims};
use crate::error::{Error, Result};
use crate::scalar::Ring;

/// Sampled states (and outputs) of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<R: Ring> {
    pub times: Vec<f64>,
    pub states: Vec<CubicMatrix<R>>,
    pub outputs: Option<Vec<CubicMatrix<R>>>,
}

impl<R: Ring> Trajectory<R> {
    pub fn new(times: Vec<f64>, states: Vec<CubicMatrix<R>>, outputs: Option<Vec<CubicMatrix<R>>>) -> Result<Self> {
        if times.len() != states.len() || outputs.as_ref().is_some_and(|o| o.len() != states.len()) {
            return Err(Error::shape(
                "trajectory",
                format!(
                    "{} times, {} states, {} outputs",
                    times.len(),
                    states.len(),
                    outputs.as_ref().map_or(0, Vec::len)
                ),
            ));
        }
        for series in std::iter::once(&states).chain(outputs.as_ref()) {
            if let Some(first) = series.first() {
                if let Some(bad) = series.iter().find(|x| x.dims() != first.dims() || x.ring() != first.ring()) {
                    return Err(Error::shape("trajectory", format!("mixed samples {} and {}", first.dims(), bad.dims())));
                }
            }
        }
        Ok(Trajectory { times, states, outputs })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&CubicMatrix<R>> {
        self.states.last()
    }

    /// CSV with header `t,x_i_j_k,…` (1-based, slice-major) followed by the
    /// `y_i_j_k` output columns when present.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        if let Some(x) = self.states.first() {
            push_header(&mut out, 'x', x.dims());
        }
        if let Some(y) = self.outputs.as_ref().and_then(|o| o.first()) {
            push_header(&mut out, 'y', y.dims());
        }
        out.push('\n');
        for (k, (t, x)) in self.times.iter().zip(&self.states).enumerate() {
            write!(out, "{t}").unwrap();
            push_row(&mut out, x);
            if let Some(ys) = &self.outputs {
                push_row(&mut out, &ys[k]);
            }
            out.push('\n');
        }
        out
    }
}

fn push_header(out: &mut String, tag: char, d: Dims) {
    for k in 0..d.s {
        for i in 0..d.m {
            for j in 0..d.n {
                write!(out, ",{tag}_{}_{}_{}", i + 1, j + 1, k + 1).unwrap();
            }
        }
    }
}

fn push_row<R: Ring>(out: &mut String, x: &CubicMatrix<R>) {
    let ring = x.ring();
    for &v in x.data() {
        out.push(',');
        out.push_str(&ring.format_elem(v));
    }
}
