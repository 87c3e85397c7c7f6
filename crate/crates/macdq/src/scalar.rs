//! Scalar abstraction shared by the exact and numeric evaluation paths.
//!
//! Provides:
//! * `Scalar` - the field operations needed by coefficient kernels, generic
//!   over exact rationals (`Rat`) and arbitrary-precision complex (`Cx`)
//! * `determinant` - exact cofactor expansion for small matrices with
//!   fraction-free elimination behind the same interface for larger ones
//!
//! Coefficient formulas (Pieri, recursion, inverse-matrix entries, series
//! summands) are written once against this trait and evaluated exactly over
//! `Rat` or numerically over `Cx` without duplication.

use num::rational::BigRational;
use num::Zero as NumZero;
use num_traits::{One, Zero};

use crate::complex::Cx;
use crate::error::{QError, QResult};

/// Exact rational scalar used everywhere a closed form is asserted exactly.
pub type Rat = BigRational;

/// Field operations used by the shared coefficient kernels.
pub trait Scalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Zero
    + One
    + std::ops::Sub<Output = Self>
    + std::ops::Neg<Output = Self>
{
    /// Division with an explicit pole on zero denominators.
    fn div_checked(&self, den: &Self) -> QResult<Self>;

    /// Integer power with negative exponents; pole on `0^(e<0)`.
    fn powi(&self, e: i64) -> QResult<Self>;

    /// `true` for exact arithmetic (rationals), `false` for floating point.
    fn is_exact() -> bool;
}

impl Scalar for Rat {
    fn div_checked(&self, den: &Self) -> QResult<Self> {
        if den.is_zero() {
            return Err(QError::Pole("exact division by zero".into()));
        }
        Ok(self / den)
    }

    fn powi(&self, e: i64) -> QResult<Self> {
        if e == 0 {
            return Ok(Rat::one());
        }
        if self.is_zero() {
            if e < 0 {
                return Err(QError::Pole("0 raised to a negative power".into()));
            }
            return Ok(Rat::zero());
        }
        let e32 = i32::try_from(e).map_err(|_| QError::Domain(format!("exponent {e} too large")))?;
        Ok(self.pow(e32))
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for Cx {
    fn div_checked(&self, den: &Self) -> QResult<Self> {
        self.div_ref(den)
    }

    fn powi(&self, e: i64) -> QResult<Self> {
        self.powi_ref(e)
    }

    fn is_exact() -> bool {
        false
    }
}

// ---------------------------------------------------------------------------
// determinants
// ---------------------------------------------------------------------------

/// Determinant of a square matrix.
///
/// Cofactor expansion up to 4x4 (all desk-scale uses); fraction-free
/// Bareiss elimination beyond that.
pub fn determinant<S: Scalar>(m: &[Vec<S>]) -> QResult<S> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(QError::Domain("determinant of a non-square matrix".into()));
        }
    }
    match n {
        0 => Ok(S::one()),
        1 => Ok(m[0][0].clone()),
        2 => Ok(m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone()),
        3 | 4 => Ok(cofactor(m, &(0..n).collect::<Vec<_>>())),
        _ => bareiss(m),
    }
}

fn cofactor<S: Scalar>(m: &[Vec<S>], cols: &[usize]) -> S {
    let row = m.len() - cols.len();
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = S::zero();
    for (pos, &c) in cols.iter().enumerate() {
        if m[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let sub = m[row][c].clone() * cofactor(m, &rest);
        acc = if pos % 2 == 0 { acc + sub } else { acc - sub };
    }
    acc
}

fn bareiss<S: Scalar>(m: &[Vec<S>]) -> QResult<S> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut sign = false;
    let mut prev = S::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !a[r][k].is_zero());
            match swap {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(S::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num.div_checked(&prev)?;
            }
            a[i][k] = S::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign { -det } else { det })
}

/// Solves the (possibly rectangular) exact linear system A x = b.
///
/// Gaussian elimination with exact pivoting. Errors:
/// * `Degenerate` when the solution is not unique (free columns)
/// * `Singular` when the system is inconsistent
pub fn solve_linear<S: Scalar>(a: &[Vec<S>], b: &[S]) -> QResult<Vec<S>> {
    let rows = a.len();
    if b.len() != rows {
        return Err(QError::Length("right-hand side length mismatch".into()));
    }
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = S::one().div_checked(&m[rank][col])?;
        for j in col..=cols {
            m[rank][j] = m[rank][j].clone() * inv.clone();
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=cols {
                    m[r][j] = m[r][j].clone() - f.clone() * m[rank][j].clone();
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    if m.iter().skip(rank).any(|r| !r[cols].is_zero()) {
        return Err(QError::Singular("inconsistent linear system".into()));
    }
    if pivot_of_col.iter().any(|p| p.is_none()) {
        return Err(QError::Degenerate("underdetermined linear system".into()));
    }
    Ok((0..cols).map(|c| m[pivot_of_col[c].unwrap()][cols].clone()).collect())
}
