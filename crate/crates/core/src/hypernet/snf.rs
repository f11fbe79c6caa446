//! Smith normal form over the integers and linear congruence solving.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dense::{mod_inverse, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Modular;

/// `U·L·V = D` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub diag: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// row[dst] -= q * row[src]
fn row_axpy(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    let src_row = a[src].clone();
    for (x, y) in a[dst].iter_mut().zip(src_row) {
        *x -= q * y;
    }
}

fn col_axpy(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let y = row[src].clone();
        row[dst] -= q * y;
    }
}

pub fn smith_normal_form(l: &[Vec<BigInt>], rows: usize, cols: usize) -> SmithForm {
    smith_core(l, rows, cols, None)
}

/// Smith form over `Z_m`: `U·L·V ≡ D (mod m)` with `U`, `V` invertible mod
/// `m` and every diagonal entry a divisor of `m` (or zero). Entries stay
/// below `m`, so this is the one to use on large systems.
pub fn smith_normal_form_mod(l: &[Vec<BigInt>], rows: usize, cols: usize, m: u64) -> SmithForm {
    smith_core(l, rows, cols, Some(&BigInt::from(m)))
}

fn reduce_all(a: &mut [Vec<BigInt>], m: Option<&BigInt>) {
    if let Some(m) = m {
        for x in a.iter_mut().flatten() {
            *x = x.mod_floor(m);
        }
    }
}

fn reduce_row(a: &mut [Vec<BigInt>], i: usize, m: Option<&BigInt>) {
    if let Some(m) = m {
        for x in a[i].iter_mut() {
            *x = x.mod_floor(m);
        }
    }
}

fn reduce_col(a: &mut [Vec<BigInt>], j: usize, m: Option<&BigInt>) {
    if let Some(m) = m {
        for row in a.iter_mut() {
            row[j] = row[j].mod_floor(m);
        }
    }
}

/// A unit `w` mod `m` with `w·a ≡ gcd(a, m)`.
fn normalizing_unit(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.gcd(m);
    let (a1, m1) = (a / &g, m / &g);
    if m1.is_one() {
        return BigInt::one();
    }
    // a1 is a unit mod m1; lift its inverse to a unit mod m
    let e = a1.extended_gcd(&m1);
    let mut w = e.x.mod_floor(&m1);
    while !w.gcd(m).is_one() {
        w += &m1;
    }
    w
}

fn smith_core(l: &[Vec<BigInt>], rows: usize, cols: usize, modulus: Option<&BigInt>) -> SmithForm {
    let mut a: Vec<Vec<BigInt>> = l.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    reduce_all(&mut a, modulus);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero magnitude in the trailing block
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i1, j1), &(i2, j2)| a[i1][j1].abs().cmp(&a[i2][j2].abs()));
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            if let Some(m) = modulus {
                let w = normalizing_unit(&a[t][t], m);
                if !w.is_one() {
                    for x in a[t].iter_mut().chain(u[t].iter_mut()) {
                        *x = (&*x * &w).mod_floor(m);
                    }
                }
            }
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    row_axpy(&mut a, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    reduce_row(&mut a, i, modulus);
                    reduce_row(&mut u, i, modulus);
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        u.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    col_axpy(&mut a, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    reduce_col(&mut a, j, modulus);
                    reduce_col(&mut v, j, modulus);
                    if !a[t][j].is_zero() {
                        swap_cols(&mut a, t, j);
                        swap_cols(&mut v, t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &a[t][t]).is_zero());
            match offender {
                Some((i, _)) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                    reduce_row(&mut a, t, modulus);
                    reduce_row(&mut u, t, modulus);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let diag = (0..rows.min(cols)).map(|i| a[i][i].clone()).collect();
    SmithForm { u, v, diag, rows, cols }
}

/// Certificate that `L·x ≡ b (mod m)` has no solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Infeasibility {
    pub modulus: u64,
    /// `(index, divisor d_i, transformed right-hand side (U·b)_i mod m)`
    pub violations: Vec<(usize, String, u64)>,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} divisor condition(s) fail mod {}:", self.violations.len(), self.modulus)?;
        for (i, d, c) in self.violations.iter().take(8) {
            write!(f, " [i={i}: gcd({d}, {}) does not divide {c}]", self.modulus)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CongruenceSolution {
    pub x: Vec<u64>,
    pub rank: usize,
    /// Nonzero invariant factors over `Z_m`, in order; each divides `m`.
    pub invariant_factors: Vec<String>,
}

fn mod_big(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("reduced value fits in u64")
}

/// Solves `L·x ≡ b (mod m)`; free variables are set to zero.
pub fn solve_congruence(l: &DenseMatrix<Modular>, b: &[u64]) -> Result<CongruenceSolution> {
    let ring = l.ring();
    let m = ring.modulus();
    let (rows, cols) = l.shape();
    if b.len() != rows {
        return Err(Error::shape("solve_congruence", format!("system has {rows} rows, rhs has {}", b.len())));
    }
    let big: Vec<Vec<BigInt>> = l.to_rows().iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let snf = smith_normal_form_mod(&big, rows, cols, m);
    let ub: Vec<u64> = (0..rows)
        .map(|i| {
            let acc = snf.u[i].iter().zip(b).fold(BigInt::zero(), |acc, (u, &bj)| acc + u * BigInt::from(bj));
            mod_big(&acc, m)
        })
        .collect();
    let mut y = vec![0u64; cols];
    let mut violations = Vec::new();
    for i in 0..rows {
        let d = if i < snf.diag.len() { mod_big(&snf.diag[i], m) } else { 0 };
        let c = ub[i];
        let g = d.gcd(&m);
        if c % g != 0 {
            let label = if i < snf.diag.len() { snf.diag[i].to_string() } else { "0".into() };
            violations.push((i, label, c));
            continue;
        }
        if d == 0 {
            continue;
        }
        let mg = m / g;
        if mg > 1 {
            let inv = mod_inverse((d / g) % mg, mg).expect("d/g is a unit mod m/g");
            y[i] = ((c / g) as u128 * inv as u128 % mg as u128) as u64;
        }
    }
    if !violations.is_empty() {
        return Err(Error::Infeasible(Infeasibility { modulus: m, violations }));
    }
    let x = (0..cols)
        .map(|i| {
            let acc = snf.v[i].iter().zip(&y).fold(BigInt::zero(), |acc, (v, &yj)| acc + v * BigInt::from(yj));
            mod_big(&acc, m)
        })
        .collect();
    Ok(CongruenceSolution {
        x,
        rank: snf.rank(),
        invariant_factors: snf.diag.iter().filter(|d| !d.is_zero()).map(|d| d.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::Rng;

    fn to_big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let k = b.len();
        let c = b[0].len();
        a.iter()
            .map(|row| (0..c).map(|j| (0..k).fold(BigInt::zero(), |acc, l| acc + &row[l] * &b[l][j])).collect())
            .collect()
    }

    #[test]
    fn snf_textbook() {
        let l = to_big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&l, 3, 3);
        let diag: Vec<i64> = s.diag.iter().map(|d| d.to_i64().unwrap()).collect();
        assert_eq!(diag, vec![2, 6, 12]);
        let d = mul(&mul(&s.u, &l), &s.v);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(x, &s.diag[i]);
                } else {
                    assert!(x.is_zero());
                }
            }
        }
    }

    #[test]
    fn modular_form_is_diagonal_mod_m() {
        let mut rng = random::rng(12);
        let m = BigInt::from(12);
        for _ in 0..10 {
            let (r, c) = (rng.gen_range(1..30), rng.gen_range(1..30));
            let l: Vec<Vec<BigInt>> =
                (0..r).map(|_| (0..c).map(|_| BigInt::from(rng.gen_range(0..12))).collect()).collect();
            let s = smith_normal_form_mod(&l, r, c, 12);
            let d = mul(&mul(&s.u, &l), &s.v);
            for (i, row) in d.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    let want = if i == j { s.diag[i].clone() } else { BigInt::zero() };
                    assert_eq!(x.mod_floor(&m), want);
                }
            }
            assert!(s.diag.iter().all(|d| d.is_zero() || (&m % d).is_zero()));
        }
    }

    #[test]
    fn congruence_identity_and_infeasible() {
        let z = Modular::new(12).unwrap();
        let id = DenseMatrix::identity(z, 3);
        let sol = solve_congruence(&id, &[1, 5, 11]).unwrap();
        assert_eq!(sol.x, vec![1, 5, 11]);
        assert_eq!(sol.rank, 3);
        let two = id.scale(2);
        match solve_congruence(&two, &[1, 2, 4]) {
            Err(Error::Infeasible(inf)) => assert_eq!(inf.violations.len(), 1),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn construct_then_solve() {
        let z = Modular::new(12).unwrap();
        let mut rng = random::rng(11);
        for _ in 0..40 {
            let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let l = random::mod_dense(&mut rng, r, c, z);
            let x0: Vec<u64> = (0..c).map(|_| rng.gen_range(0..12)).collect();
            let x0m = DenseMatrix::new(z, c, 1, x0).unwrap();
            let b = l.matmul(&x0m).unwrap().into_data();
            let sol = solve_congruence(&l, &b).unwrap();
            let xm = DenseMatrix::new(z, c, 1, sol.x).unwrap();
            assert_eq!(l.matmul(&xm).unwrap().into_data(), b);
        }
    }
}
