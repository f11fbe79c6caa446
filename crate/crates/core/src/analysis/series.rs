use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::cubic::CubicMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::products::{ExtendedCubic, ProductKind};
use crate::scalar::{Real, Ring};

/// `f(x) = constant + Σ_{k≥1} coeffs[k-1]·x^k`, convergent for `|x| < radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub constant: f64,
    pub coeffs: Vec<f64>,
    #[serde(serialize_with = "ser_radius", deserialize_with = "de_radius")]
    pub radius: f64,
    /// The coefficient list is a truncation of an infinite series, so
    /// running out of terms before convergence is an error.
    #[serde(default)]
    pub truncated: bool,
}

fn ser_radius<S: Serializer>(r: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*r)
    }
}

fn de_radius<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Radius {
        Num(f64),
        Text(String),
    }
    match Radius::deserialize(d)? {
        Radius::Num(r) if r > 0.0 => Ok(r),
        Radius::Num(r) => Err(de::Error::custom(format!("radius must be positive, got {r}"))),
        Radius::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Radius::Text(t) => Err(de::Error::custom(format!("radius must be a number or \"inf\", got {t:?}"))),
    }
}

impl PowerSeries {
    /// An exact polynomial (not a truncation).
    pub fn polynomial(constant: f64, coeffs: Vec<f64>) -> Self {
        PowerSeries { name: None, constant, coeffs, radius: f64::INFINITY, truncated: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.constant.is_finite() || self.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidValue("series coefficients must be finite".into()));
        }
        if self.radius.is_nan() || self.radius <= 0.0 {
            return Err(Error::InvalidValue(format!("series radius must be positive, got {}", self.radius)));
        }
        Ok(())
    }

    pub fn eval_scalar(&self, x: f64) -> f64 {
        let tail = self.coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * x);
        self.constant + tail
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub atol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { atol: 1e-14, max_terms: 128 }
    }
}

pub const SERIES_NAMES: [&str; 7] = ["exp", "sin", "cos", "cosh", "sinh", "log1p", "binomial"];

/// Taylor series at 0 of a named function, `terms` coefficients past the constant.
/// `binomial` is `(1+x)^α` and needs `alpha`.
pub fn named_series(name: &str, alpha: Option<f64>, terms: usize) -> Result<PowerSeries> {
    let mut coeffs = Vec::with_capacity(terms);
    let mut fact = 1.0;
    let (constant, radius) = match name {
        "exp" | "sin" | "cos" | "cosh" | "sinh" => {
            for k in 1..=terms {
                fact /= k as f64;
                let c = match (name, k % 4) {
                    ("exp", _) => fact,
                    ("cosh", r) => if r % 2 == 0 { fact } else { 0.0 },
                    ("sinh", r) => if r % 2 == 1 { fact } else { 0.0 },
                    ("sin", 1) => fact,
                    ("sin", 3) => -fact,
                    ("cos", 2) => -fact,
                    ("cos", 0) => fact,
                    _ => 0.0,
                };
                coeffs.push(c);
            }
            let c0 = if matches!(name, "sin" | "sinh") { 0.0 } else { 1.0 };
            (c0, f64::INFINITY)
        }
        "log1p" => {
            for k in 1..=terms {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                coeffs.push(sign / k as f64);
            }
            (0.0, 1.0)
        }
        "binomial" => {
            let alpha = alpha.ok_or_else(|| Error::InvalidValue("binomial series needs alpha".into()))?;
            if !alpha.is_finite() {
                return Err(Error::InvalidValue(format!("alpha must be finite, got {alpha}")));
            }
            let mut c = 1.0;
            for k in 1..=terms {
                c *= (alpha - (k - 1) as f64) / k as f64;
                coeffs.push(c);
            }
            (1.0, 1.0)
        }
        other => {
            return Err(Error::InvalidValue(format!(
                "unknown series {other:?}; expected one of {}",
                SERIES_NAMES.join(", ")
            )))
        }
    };
    // A binomial series with non-negative integer α terminates exactly.
    let exact = name == "binomial" && alpha.is_some_and(|a| a >= 0.0 && a.fract() == 0.0 && a <= terms as f64);
    if exact {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
    }
    Ok(PowerSeries { name: Some(name.to_string()), constant, coeffs, radius, truncated: !exact })
}

fn coeff_in<R: Ring>(ring: R, c: f64) -> Result<R::Elem> {
    ring.from_f64_exact(c).ok_or_else(|| {
        Error::Unsupported(format!("coefficient {c} has no exact image in {}", ring.domain()))
    })
}

/// Norm test `‖A‖ < radius`, skipped for infinite radius.
pub(crate) fn check_radius<R: Ring>(f: &PowerSeries, a: &CubicMatrix<R>) -> Result<()> {
    if f.radius.is_infinite() {
        return Ok(());
    }
    let norm = a.try_frobenius_norm()?;
    if norm >= f.radius {
        return Err(Error::Radius { norm, radius: f.radius, step: None });
    }
    Ok(())
}

/// `f_*(A)` with the constant term kept symbolic: `(f(0), Σ c_k A^k)`.
pub fn analytic_eval_extended<R: Ring>(
    f: &PowerSeries,
    a: &CubicMatrix<R>,
    kind: ProductKind,
    policy: &TruncationPolicy,
) -> Result<ExtendedCubic<R>> {
    f.validate()?;
    check_radius(f, a)?;
    let ring = a.ring();
    let exact = ring.is_exact();
    if exact && f.truncated {
        return Err(Error::Unsupported(format!(
            "truncated series cannot be evaluated exactly over {}",
            ring.domain()
        )));
    }
    if kind == ProductKind::TProduct && !a.dims().is_square() {
        return Err(Error::shape("analytic_eval", format!("t-product powers need square slices, got {}", a.dims())));
    }
    let constant = coeff_in(ring, f.constant)?;
    let mut sum = CubicMatrix::zeros(ring, a.dims());
    let mut pow = a.clone();
    let mut last_norm = f64::INFINITY;
    for (k, &c) in f.coeffs.iter().enumerate() {
        if k >= policy.max_terms {
            return Err(Error::Convergence {
                what: format!("series {} after {} terms", f.name.as_deref().unwrap_or("<anonymous>"), policy.max_terms),
                last_term_norm: last_norm,
            });
        }
        if k > 0 {
            pow = kind.apply(&pow, a)?;
        }
        if c == 0.0 {
            continue;
        }
        let term = pow.scale(coeff_in(ring, c)?);
        sum = sum.add(&term)?;
        if !exact {
            last_norm = term.try_frobenius_norm()?;
            if last_norm <= policy.atol {
                return Ok(ExtendedCubic::new(constant, sum));
            }
            if !last_norm.is_finite() {
                return Err(Error::Convergence {
                    what: format!("series {} diverged at term {}", f.name.as_deref().unwrap_or("<anonymous>"), k + 1),
                    last_term_norm: last_norm,
                });
            }
        }
    }
    if f.truncated && !exact {
        return Err(Error::Convergence {
            what: format!(
                "series {} exhausted {} coefficients above atol {:e}",
                f.name.as_deref().unwrap_or("<anonymous>"),
                f.coeffs.len(),
                policy.atol
            ),
            last_term_norm: last_norm,
        });
    }
    Ok(ExtendedCubic::new(constant, sum))
}

/// `f_*(A)` as a concrete cubic matrix. A nonzero constant term needs
/// square slices.
pub fn analytic_eval<R: Ring>(
    f: &PowerSeries,
    a: &CubicMatrix<R>,
    kind: ProductKind,
    policy: &TruncationPolicy,
) -> Result<CubicMatrix<R>> {
    analytic_eval_extended(f, a, kind, policy)?.materialize(kind)
}

/// Sum of the first `terms` coefficients with no convergence test.
pub fn partial_sum(f: &PowerSeries, a: &CubicMatrix<Real>, kind: ProductKind, terms: usize) -> Result<CubicMatrix<Real>> {
    let cut = PowerSeries {
        coeffs: f.coeffs.iter().copied().take(terms).collect(),
        truncated: false,
        ..f.clone()
    };
    analytic_eval(&cut, a, kind, &TruncationPolicy { atol: 0.0, max_terms: usize::MAX })
}

/// `f(M)` for a square dense matrix by the same truncation rule; the
/// reference used when checking Γ-naturality.
pub fn dense_series_eval(f: &PowerSeries, m: &DenseMatrix<Real>, policy: &TruncationPolicy) -> Result<DenseMatrix<Real>> {
    if !m.is_square() {
        return Err(Error::shape("dense_series_eval", format!("matrix is {}x{}, not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    let mut sum = DenseMatrix::identity(Real, n).scale(f.constant);
    let mut pow = m.clone();
    for (k, &c) in f.coeffs.iter().enumerate().take(policy.max_terms) {
        if k > 0 {
            pow = pow.matmul(m)?;
        }
        if c == 0.0 {
            continue;
        }
        let term = pow.scale(c);
        sum = sum.add(&term)?;
        if term.frobenius_norm() <= policy.atol {
            break;
        }
    }
    Ok(sum)
}
