use crate::analysis::{analytic_eval_extended, named_series, PowerSeries, TruncationPolicy};
use crate::circulant::{gamma, gamma_inverse};
use crate::cubic::{CubicMatrix, Dims};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::products::ProductKind;
use crate::psi::psi;
use crate::scalar::{Real, Ring};

use super::simulate::{integrate, sample_times, simulate_continuous};
use super::{InputMap, InputSignal, InputValue, SystemSpec};

/// Dense matrix `L` with `unfold(A * x) = L · unfold(x)` for every `x` of
/// `x_dims`: `Γ(A)` for the t-product, `Γ(Ã)(I ⊗ Ψ)` for the t-STP and
/// `diag(Ã^(k) Ψ)` for the DK-STP, composed with the slice replication of
/// `x` when the product needs more slices than `x` has.
pub fn left_operator<R: Ring>(kind: ProductKind, a: &CubicMatrix<R>, x_dims: Dims) -> Result<DenseMatrix<R>> {
    let ring = a.ring();
    let out = kind.result_dims(a.dims(), x_dims)?;
    let theta = out.s;
    let core = match kind {
        ProductKind::TProduct => return Ok(gamma(a)),
        ProductKind::TStp => {
            let ar = a.replicate_slices(theta / a.dims().s)?;
            let coupling = DenseMatrix::identity(ring, theta).kron(&psi(ring, a.dims().n, x_dims.m)?)?;
            gamma(&ar).matmul(&coupling)?
        }
        ProductKind::DkStp => {
            let ar = a.replicate_slices(theta / a.dims().s)?;
            let p = psi(ring, a.dims().n, x_dims.m)?;
            let blocks = ar.slices().iter().map(|s| s.matmul(&p)).collect::<Result<Vec<_>>>()?;
            DenseMatrix::block_diag(ring, &blocks)?
        }
    };
    if theta == x_dims.s {
        return Ok(core);
    }
    let (r, m) = (theta / x_dims.s, x_dims.m);
    let rep = DenseMatrix::from_fn(ring, theta * m, x_dims.s * m, |row, col| {
        let (k, i) = (row / m, row % m);
        if col == (k / r) * m + i {
            ring.one()
        } else {
            ring.zero()
        }
    });
    core.matmul(&rep)
}

/// How the input enters a dense state equation.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalInput<R: Ring> {
    None,
    /// One dense direction per scalar input.
    Directions(Vec<DenseMatrix<R>>),
    /// Dense operator applied to the (lifted) cubic input.
    Operator { matrix: DenseMatrix<R>, input_dims: Dims },
}

/// `Ẋ = A·X + input`, `Y = C·X` on unfolded coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSystem<R: Ring> {
    pub a: DenseMatrix<R>,
    pub input: ClassicalInput<R>,
    pub c: Option<DenseMatrix<R>>,
    pub state_dims: Dims,
}

pub fn to_classical<R: Ring>(spec: &SystemSpec<R>) -> Result<ClassicalSystem<R>> {
    spec.validate()?;
    let input = match &spec.input {
        InputMap::None => ClassicalInput::None,
        InputMap::Directions(bs) => ClassicalInput::Directions(bs.iter().map(CubicMatrix::unfold).collect()),
        InputMap::Operator { b, input_dims } => ClassicalInput::Operator {
            matrix: left_operator(spec.kind, b, *input_dims)?,
            input_dims: *input_dims,
        },
    };
    let c = spec.c.as_ref().map(|c| left_operator(spec.kind, c, spec.state_dims)).transpose()?;
    Ok(ClassicalSystem { a: left_operator(spec.kind, &spec.a, spec.state_dims)?, input, c, state_dims: spec.state_dims })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageCoords {
    /// State carried as `Γ(x)`.
    Gamma,
    /// State carried as `unfold(x)`.
    Unfold,
}

/// A dense system whose trajectories should shadow the cubic one.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseImage<R: Ring> {
    pub coords: ImageCoords,
    pub a: DenseMatrix<R>,
    pub input: ClassicalInput<R>,
    pub state_dims: Dims,
}

impl<R: Ring> DenseImage<R> {
    pub fn lift(&self, x: &CubicMatrix<R>) -> DenseMatrix<R> {
        match self.coords {
            ImageCoords::Gamma => gamma(x),
            ImageCoords::Unfold => x.unfold(),
        }
    }

    pub fn pull_back(&self, x: &DenseMatrix<R>) -> Result<CubicMatrix<R>> {
        match self.coords {
            ImageCoords::Gamma => gamma_inverse(x, self.state_dims, false),
            ImageCoords::Unfold => CubicMatrix::fold(x, self.state_dims),
        }
    }

    pub fn input_term(&self, value: &InputValue<R>) -> Result<DenseMatrix<R>> {
        match (&self.input, value) {
            (ClassicalInput::Directions(gs), InputValue::Scalars(us)) if gs.len() == us.len() => {
                let mut acc = gs[0].scale(us[0]);
                for (g, &u) in gs.iter().zip(us).skip(1) {
                    acc = acc.add(&g.scale(u))?;
                }
                Ok(acc)
            }
            (ClassicalInput::Operator { matrix, input_dims }, InputValue::Cubic(u)) if u.dims() == *input_dims => {
                let lifted = match self.coords {
                    ImageCoords::Gamma => gamma(&u.replicate_slices(self.state_dims.s / input_dims.s)?),
                    ImageCoords::Unfold => u.unfold(),
                };
                matrix.matmul(&lifted)
            }
            _ => Err(Error::shape("dense image input", "input value does not match the input map")),
        }
    }

    fn rhs(&self, x: &DenseMatrix<R>, value: Option<&InputValue<R>>) -> Result<DenseMatrix<R>> {
        let ax = self.a.matmul(x)?;
        match value {
            Some(v) => ax.add(&self.input_term(v)?),
            None => Ok(ax),
        }
    }
}

/// The dense system on `Γ(x)` for the t-product and t-STP, or on
/// `unfold(x)` for the DK-STP (where `Γ` is not multiplicative).
pub fn gamma_image<R: Ring>(spec: &SystemSpec<R>) -> Result<DenseImage<R>> {
    let classical = to_classical(spec)?;
    if spec.kind == ProductKind::DkStp {
        return Ok(DenseImage {
            coords: ImageCoords::Unfold,
            a: classical.a,
            input: classical.input,
            state_dims: spec.state_dims,
        });
    }
    let input = match &spec.input {
        InputMap::None => ClassicalInput::None,
        InputMap::Directions(bs) => ClassicalInput::Directions(bs.iter().map(gamma).collect()),
        InputMap::Operator { b, input_dims } => {
            let lifted = Dims { s: spec.state_dims.s, ..*input_dims };
            ClassicalInput::Operator { matrix: left_operator(spec.kind, b, lifted)?, input_dims: *input_dims }
        }
    };
    Ok(DenseImage { coords: ImageCoords::Gamma, a: classical.a, input, state_dims: spec.state_dims })
}

/// Exact solution `x(t) = exp_*(At) * x0 + ∫ exp_*(A(t−τ)) * input(τ) dτ`
/// for a piecewise-constant input.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    kind: ProductKind,
    a: CubicMatrix<Real>,
    x0: CubicMatrix<Real>,
    image: DenseImage<Real>,
    /// `(start, end, lifted input term)` for every nonzero piece.
    pieces: Vec<(f64, f64, DenseMatrix<Real>)>,
    exp: PowerSeries,
    policy: TruncationPolicy,
}

pub fn closed_form(
    spec: &SystemSpec<Real>,
    x0: &CubicMatrix<Real>,
    u: &InputSignal<Real>,
    policy: &TruncationPolicy,
) -> Result<ClosedForm> {
    spec.validate()?;
    spec.check_state(x0)?;
    u.validate()?;
    let image = gamma_image(spec)?;
    let mut pieces = Vec::new();
    match u {
        InputSignal::None => {}
        InputSignal::Samples(_) => {
            return Err(Error::Unsupported("closed form needs a piecewise-constant input".into()));
        }
        InputSignal::PiecewiseConstant { breakpoints, values } => {
            for (i, (&start, v)) in breakpoints.iter().zip(values).enumerate() {
                let end = breakpoints.get(i + 1).copied().unwrap_or(f64::INFINITY);
                pieces.push((start.max(0.0), end, image.input_term(v)?));
            }
            pieces.retain(|(a, b, _)| a < b);
        }
    }
    Ok(ClosedForm {
        kind: spec.kind,
        a: spec.a_replicated()?,
        x0: x0.clone(),
        image,
        pieces,
        exp: named_series("exp", None, policy.max_terms)?,
        policy: *policy,
    })
}

impl ClosedForm {
    pub fn at(&self, t: f64) -> Result<CubicMatrix<Real>> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidValue(format!("closed form needs finite t >= 0, got {t}")));
        }
        let flow = analytic_eval_extended(&self.exp, &self.a.scale(t), self.kind, &self.policy)?;
        let free = flow.act_on(&self.x0, self.kind)?;
        let mut forced: Option<DenseMatrix<Real>> = None;
        for (start, end, g) in self.pieces.iter().filter(|p| p.0 < t) {
            let stop = end.min(t);
            let mut part = self.held_integral(stop - start, g)?;
            if stop < t {
                part = self.image.a.scale(t - stop).expm()?.matmul(&part)?;
            }
            forced = Some(match forced {
                Some(acc) => acc.add(&part)?,
                None => part,
            });
        }
        match forced {
            Some(f) => free.add(&self.image.pull_back(&f)?),
            None => Ok(free),
        }
    }

    /// `∫_0^h exp(Lσ) dσ · G` from the exponential of `[[Lh, Gh], [0, 0]]`.
    fn held_integral(&self, h: f64, g: &DenseMatrix<Real>) -> Result<DenseMatrix<Real>> {
        let n = self.image.a.rows();
        let q = g.cols();
        let mut aug = DenseMatrix::zeros(Real, n + q, n + q);
        aug.set_block(0, 0, &self.image.a.scale(h));
        aug.set_block(0, n, &g.scale(h));
        aug.expm()?.block(0, n, n, q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisimReport {
    pub samples: usize,
    pub max_deviation: f64,
    pub worst_time: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Simulates the cubic system and its dense image on the same grid and
/// compares the lifted cubic states with the dense ones.
pub fn bisimulation_check(
    spec: &SystemSpec<Real>,
    x0: &CubicMatrix<Real>,
    u: &InputSignal<Real>,
    t_final: f64,
    dt: f64,
    tol: f64,
) -> Result<BisimReport> {
    let image = gamma_image(spec)?;
    bisimulate_against(spec, &image, x0, u, t_final, dt, tol)
}

/// Like [`bisimulation_check`] with a caller-supplied image.
pub fn bisimulate_against(
    spec: &SystemSpec<Real>,
    image: &DenseImage<Real>,
    x0: &CubicMatrix<Real>,
    u: &InputSignal<Real>,
    t_final: f64,
    dt: f64,
    tol: f64,
) -> Result<BisimReport> {
    let traj = simulate_continuous(spec, x0, u, t_final, dt)?;
    let times = sample_times(t_final, dt)?;
    let dense = integrate(image.lift(x0), &times, u.breakpoints(), |x, t| image.rhs(x, u.value_at(t)?))?;
    let mut report = BisimReport { samples: times.len(), max_deviation: 0.0, worst_time: 0.0, tol, passed: true };
    for ((t, x), y) in times.iter().zip(&traj.states).zip(&dense) {
        let dev = image.lift(x).max_abs_diff(y);
        if dev > report.max_deviation || dev.is_nan() {
            report.max_deviation = dev;
            report.worst_time = *t;
        }
    }
    report.passed = report.max_deviation <= tol;
    Ok(report)
}
