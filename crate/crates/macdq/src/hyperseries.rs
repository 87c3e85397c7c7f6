//! Registered summation identities for very-well-poised basic hypergeometric
//! series, in one and several dimensions.
//!
//! * every identity carries an exact rational summand over an explicit index
//!   region, together with a closed form: exact for terminating sums, a
//!   certified quotient of infinite products for nonterminating ones
//! * terminating sums are evaluated entirely in `Rat`; both sides of the
//!   identity are compared for literal equality
//! * nonterminating sums accumulate exact partial sums shell by shell (total
//!   degree, lexicographic within a shell) and stop once enough consecutive
//!   shells fall below the truncation target; the closed form is then matched
//!   within `max(target * |rhs|, 10 * tail estimate)`
//! * `check_identity` draws admissible parameters from a seeded stream,
//!   rejects degenerate draws (poles, tied coordinates, slowly converging
//!   arguments), and reports one record per draw; a check passes only if
//!   every draw agrees
//!
//! Box-shaped regions bring structural `0/0` corners: a vanishing factorial
//! factor in the prefactor against a vanishing row denominator inside the
//! determinant.  Those rows are evaluated in cancelled form, so the summand
//! stays an exact rational function of the remaining data.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{bf_le, rat_to_bf, rel_err, Cx};
use crate::error::{QError, QResult};
use crate::partitions::{tuples_in_box, tuples_with_sum};
use crate::qkernel::{draws, poch_inf, poch_int, poch_multi, poch_quot};
use crate::scalar::{determinant, Rat, Scalar};

// ---------------------------------------------------------------------------
// parameters
// ---------------------------------------------------------------------------

/// A point at which an identity is evaluated: the dimension `n`, the base
/// `q`, and named scalar, vector and integer-bound data as demanded by the
/// identity schema.  Vectors always have length `n`; the partition bound
/// `lambda` has length `n + 1` and is weakly decreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub n: usize,
    pub q: Rat,
    pub scalars: BTreeMap<String, Rat>,
    pub vectors: BTreeMap<String, Vec<Rat>>,
    pub bounds: BTreeMap<String, Vec<i64>>,
}

impl Params {
    pub fn new(n: usize, q: Rat) -> Self {
        Params {
            n,
            q,
            scalars: BTreeMap::new(),
            vectors: BTreeMap::new(),
            bounds: BTreeMap::new(),
        }
    }

    pub fn with_scalar(mut self, name: &str, v: Rat) -> Self {
        self.scalars.insert(name.to_string(), v);
        self
    }

    pub fn with_vector(mut self, name: &str, v: Vec<Rat>) -> Self {
        self.vectors.insert(name.to_string(), v);
        self
    }

    pub fn with_bound(mut self, name: &str, v: i64) -> Self {
        self.bounds.insert(name.to_string(), vec![v]);
        self
    }

    pub fn with_bound_list(mut self, name: &str, v: Vec<i64>) -> Self {
        self.bounds.insert(name.to_string(), v);
        self
    }

    pub fn scalar(&self, name: &str) -> QResult<&Rat> {
        self.scalars
            .get(name)
            .ok_or_else(|| QError::Domain(format!("missing scalar parameter {name}")))
    }

    pub fn vector(&self, name: &str) -> QResult<&[Rat]> {
        let v = self
            .vectors
            .get(name)
            .ok_or_else(|| QError::Domain(format!("missing vector parameter {name}")))?;
        if v.len() != self.n {
            return Err(QError::Length(format!(
                "vector {name} has length {}, expected {}",
                v.len(),
                self.n
            )));
        }
        Ok(v)
    }

    pub fn bound(&self, name: &str) -> QResult<i64> {
        let v = self
            .bounds
            .get(name)
            .ok_or_else(|| QError::Domain(format!("missing bound parameter {name}")))?;
        if v.len() != 1 {
            return Err(QError::Length(format!("bound {name} is not a single value")));
        }
        Ok(v[0])
    }

    pub fn bound_list(&self, name: &str) -> QResult<&[i64]> {
        self.bounds
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| QError::Domain(format!("missing bound list {name}")))
    }

    /// The full parameter point as sorted (name, value) string pairs, with
    /// rationals rendered as "num/den".
    pub fn display_entries(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("n".to_string(), self.n.to_string()),
            ("q".to_string(), rat_str(&self.q)),
        ];
        for (k, v) in &self.scalars {
            out.push((k.clone(), rat_str(v)));
        }
        for (k, v) in &self.vectors {
            let items: Vec<String> = v.iter().map(rat_str).collect();
            out.push((k.clone(), items.join(",")));
        }
        for (k, v) in &self.bounds {
            let items: Vec<String> = v.iter().map(|b| b.to_string()).collect();
            out.push((k.clone(), items.join(",")));
        }
        out
    }
}

/// "num/den" rendering of a rational, the one format the tooling boundary
/// accepts and emits.
pub fn rat_str(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// What a schema entry stands for when parameters are drawn or validated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    /// one free rational scalar
    Scalar,
    /// `n` free rational coordinates, pairwise distinct
    Vector,
    /// one nonnegative integer truncation bound
    Bound,
    /// `n` nonnegative integer bounds, one per coordinate
    BoundVector,
    /// a weakly decreasing list of `n + 1` nonnegative integers
    PartitionBound,
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
}

const fn ps(name: &'static str, kind: ParamKind) -> ParamSpec {
    ParamSpec { name, kind }
}

// ---------------------------------------------------------------------------
// summation regions
// ---------------------------------------------------------------------------

/// Index region of a sum over `k` in `N^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    /// `|k| <= M` for the named bound
    Simplex(&'static str),
    /// `|k| = M` for the named bound
    Shell(&'static str),
    /// `0 <= k_i <= m_i` for the named bound vector
    Box(&'static str),
    /// `|k| <= lambda_(n+1)` for the named partition bound
    LastPartSimplex(&'static str),
    /// all of `N^n`, summed by shells of growing total degree
    Infinite,
}

fn shells_up_to(n: usize, cap: i64) -> QResult<Vec<Vec<i64>>> {
    if cap < 0 {
        return Err(QError::Domain(format!("negative truncation bound {cap}")));
    }
    let mut out = Vec::new();
    for s in 0..=cap {
        for t in tuples_with_sum(n, s as u32) {
            out.push(t.into_iter().map(|v| v as i64).collect());
        }
    }
    Ok(out)
}

/// All index tuples of a finite region, shells iterated by total degree and
/// lexicographically within a shell.
pub fn region_indices(region: RegionKind, p: &Params) -> QResult<Vec<Vec<i64>>> {
    match region {
        RegionKind::Simplex(name) => shells_up_to(p.n, p.bound(name)?),
        RegionKind::Shell(name) => {
            let m = p.bound(name)?;
            if m < 0 {
                return Err(QError::Domain(format!("negative shell bound {m}")));
            }
            Ok(tuples_with_sum(p.n, m as u32)
                .into_iter()
                .map(|t| t.into_iter().map(|v| v as i64).collect())
                .collect())
        }
        RegionKind::Box(name) => {
            let ms = p.bound_list(name)?;
            if ms.len() != p.n {
                return Err(QError::Length(format!(
                    "bound vector has length {}, expected {}",
                    ms.len(),
                    p.n
                )));
            }
            let mut bounds = Vec::with_capacity(ms.len());
            for &m in ms {
                if m < 0 {
                    return Err(QError::Domain(format!("negative box bound {m}")));
                }
                bounds.push(m as u32);
            }
            Ok(tuples_in_box(&bounds)
                .into_iter()
                .map(|t| t.into_iter().map(|v| v as i64).collect())
                .collect())
        }
        RegionKind::LastPartSimplex(name) => {
            let lam = p.bound_list(name)?;
            if lam.len() != p.n + 1 {
                return Err(QError::Length(format!(
                    "partition bound has length {}, expected {}",
                    lam.len(),
                    p.n + 1
                )));
            }
            shells_up_to(p.n, lam[p.n])
        }
        RegionKind::Infinite => Err(QError::Domain(
            "an infinite region has no finite index list".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// truncation policy
// ---------------------------------------------------------------------------

/// Stopping rule for nonterminating sums.
///
/// ```text
/// stop after the first run of quiet_shells consecutive shells with
/// |shell| <= target * max(1, |partial|),  total degree <= shell_cap
/// ```
#[derive(Clone, Debug)]
pub struct TruncationPolicy {
    /// relative error target, positive
    pub target: Rat,
    /// consecutive quiet shells required, at least 2
    pub quiet_shells: usize,
    /// hard cap on the total degree
    pub shell_cap: i64,
}

impl TruncationPolicy {
    pub fn validate(&self) -> QResult<()> {
        if self.target <= Rat::zero() {
            return Err(QError::Domain("truncation target must be positive".into()));
        }
        if self.quiet_shells < 2 {
            return Err(QError::Domain(
                "at least two consecutive quiet shells are required".into(),
            ));
        }
        if self.shell_cap < 1 {
            return Err(QError::Domain("shell cap must be positive".into()));
        }
        Ok(())
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            target: rat_pow10_neg(18),
            quiet_shells: 3,
            shell_cap: 300,
        }
    }
}

/// `10^(-e)` as an exact rational.
pub fn rat_pow10_neg(e: u32) -> Rat {
    Rat::new(1.into(), num::BigInt::from(10u32).pow(e))
}

// ---------------------------------------------------------------------------
// identity table
// ---------------------------------------------------------------------------

pub type SummandFn = fn(&Params, &[i64]) -> QResult<Rat>;
pub type ClosedExactFn = fn(&Params) -> QResult<Rat>;
pub type ClosedNumericFn = fn(&Params, usize) -> QResult<Cx>;
pub type SeriesArgFn = fn(&Params) -> QResult<Rat>;

/// One registered summation identity.
///
/// ```text
/// sum over region of summand(params, k)  =  closed form(params)
/// ```
///
/// Terminating identities expose `closed_exact`; nonterminating ones expose
/// `closed_numeric` together with `series_arg`, whose modulus must be below
/// one for the sum to converge.
pub struct IdentitySpec {
    pub id: &'static str,
    pub summary: &'static str,
    /// fixed dimension, if the identity is one-dimensional by nature
    pub n_fixed: Option<usize>,
    pub region: RegionKind,
    pub schema: &'static [ParamSpec],
    pub terminating: bool,
    pub summand: SummandFn,
    pub closed_exact: Option<ClosedExactFn>,
    pub closed_numeric: Option<ClosedNumericFn>,
    pub series_arg: Option<SeriesArgFn>,
}

// ---------------------------------------------------------------------------
// shared factors
// ---------------------------------------------------------------------------

fn total(ks: &[i64]) -> i64 {
    ks.iter().sum()
}

fn prod_rat(v: &[Rat]) -> Rat {
    v.iter().fold(Rat::one(), |acc, x| acc * x.clone())
}

/// ```text
/// prod_(i<j) (u_i q^(k_i) - u_j q^(k_j)) / (u_i - u_j)
/// ```
fn vandermonde_shift_ratio(us: &[Rat], q: &Rat, ks: &[i64]) -> QResult<Rat> {
    let n = us.len();
    let mut acc = Rat::one();
    for i in 0..n {
        let xi = us[i].clone() * q.powi(ks[i])?;
        for j in (i + 1)..n {
            let xj = us[j].clone() * q.powi(ks[j])?;
            let num = xi.clone() - xj;
            let den = us[i].clone() - us[j].clone();
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// ```text
/// prod_i (1 - a u_i q^(k_i + |k|)) / (1 - a u_i)
/// ```
fn well_poised_ratio(a: &Rat, us: &[Rat], q: &Rat, ks: &[i64]) -> QResult<Rat> {
    let kk = total(ks);
    let mut acc = Rat::one();
    for (i, u) in us.iter().enumerate() {
        let num = Rat::one() - a.clone() * u.clone() * q.powi(ks[i] + kk)?;
        let den = Rat::one() - a.clone() * u.clone();
        acc = acc * num.div_checked(&den)?;
    }
    Ok(acc)
}

/// Determinant kernel shared by the `an87n` family:
///
/// ```text
/// det[ (u_i q^(k_i))^(n-j) (1 - t_i^(j-n-1) W_i) ],
/// W_i = (1 - t_0 u_i q^(k_i)) / (1 - t_0 u_i q^(k_i)/t_i)
///       * prod_s (u_i q^(k_i) - u_s) / (u_i q^(k_i)/t_i - u_s)
/// ```
///
/// Rows with `k_i = 0` carry the identically zero factor `u_i - u_s` at
/// `s = i`, so `W_i = 0` and the entry is the plain power.
fn shifted_power_det(t0: &Rat, ts: &[Rat], us: &[Rat], q: &Rat, ks: &[i64]) -> QResult<Rat> {
    let n = us.len();
    let mut m: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        let x = us[i].clone() * q.powi(ks[i])?;
        let y = x.clone().div_checked(&ts[i])?;
        let mut num = Rat::one() - t0.clone() * x.clone();
        let mut den = Rat::one() - t0.clone() * y.clone();
        for s in 0..n {
            num = num * (x.clone() - us[s].clone());
            den = den * (y.clone() - us[s].clone());
        }
        let w = num.div_checked(&den)?;
        let mut row = Vec::with_capacity(n);
        for j0 in 0..n {
            let tw = ts[i].powi(j0 as i64 - n as i64)?;
            row.push(x.powi((n - 1 - j0) as i64)? * (Rat::one() - tw * w.clone()));
        }
        m.push(row);
    }
    determinant(&m)
}

// ---------------------------------------------------------------------------
// one-dimensional series
// ---------------------------------------------------------------------------

/// ```text
/// sum_k (a;q)_k / (q;q)_k z^k = (az;q)_inf / (z;q)_inf,  |z| < 1
/// ```
fn qbinomial_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let k = ks[0];
    let a = p.scalar("a")?;
    let z = p.scalar("z")?;
    Ok(poch_quot(&[a.clone()], &[p.q.clone()], &p.q, k)? * z.powi(k)?)
}

fn qbinomial_closed(p: &Params, prec: usize) -> QResult<Cx> {
    let a = p.scalar("a")?;
    let z = p.scalar("z")?;
    let num = poch_inf(&Cx::from_rat(&(a.clone() * z.clone()), prec), &p.q, prec)?;
    let den = poch_inf(&Cx::from_rat(z, prec), &p.q, prec)?;
    num.div_ref(&den)
}

fn qbinomial_arg(p: &Params) -> QResult<Rat> {
    Ok(p.scalar("z")?.clone())
}

/// ```text
/// sum_k (a,b;q)_k / (q,c;q)_k (c/ab)^k
///   = (c/a, c/b;q)_inf / (c, c/ab;q)_inf,  |c/ab| < 1
/// ```
fn qgauss_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let k = ks[0];
    let (a, b, c) = (p.scalar("a")?, p.scalar("b")?, p.scalar("c")?);
    let arg = c.clone().div_checked(&(a.clone() * b.clone()))?;
    Ok(poch_quot(
        &[a.clone(), b.clone()],
        &[p.q.clone(), c.clone()],
        &p.q,
        k,
    )? * arg.powi(k)?)
}

fn qgauss_closed(p: &Params, prec: usize) -> QResult<Cx> {
    let (a, b, c) = (p.scalar("a")?, p.scalar("b")?, p.scalar("c")?);
    let ab = a.clone() * b.clone();
    inf_product_quotient(
        &[
            c.clone().div_checked(a)?,
            c.clone().div_checked(b)?,
        ],
        &[c.clone(), c.clone().div_checked(&ab)?],
        &p.q,
        prec,
    )
}

fn qgauss_arg(p: &Params) -> QResult<Rat> {
    let (a, b, c) = (p.scalar("a")?, p.scalar("b")?, p.scalar("c")?);
    c.clone().div_checked(&(a.clone() * b.clone()))
}

/// ```text
/// sum_(k<=M) (a;q)_k (1-aq^(2k))/(1-a) (b,c,q^(-M);q)_k
///   / (q, aq/b, aq/c, aq^(1+M);q)_k (aq^(1+M)/bc)^k
///   = (aq, aq/bc;q)_M / (aq/b, aq/c;q)_M
/// ```
fn sixfive_term_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let k = ks[0];
    let q = &p.q;
    let (a, b, c) = (p.scalar("a")?, p.scalar("b")?, p.scalar("c")?);
    let big_m = p.bound("M")?;
    let aq = a.clone() * q.clone();
    let vwp_num = Rat::one() - a.clone() * q.powi(2 * k)?;
    let vwp_den = Rat::one() - a.clone();
    let poch = poch_quot(
        &[a.clone(), b.clone(), c.clone(), q.powi(-big_m)?],
        &[
            q.clone(),
            aq.clone().div_checked(b)?,
            aq.clone().div_checked(c)?,
            a.clone() * q.powi(1 + big_m)?,
        ],
        q,
        k,
    )?;
    let arg = (aq * q.powi(big_m)?).div_checked(&(b.clone() * c.clone()))?;
    Ok(poch * vwp_num.div_checked(&vwp_den)? * arg.powi(k)?)
}

fn sixfive_term_closed(p: &Params) -> QResult<Rat> {
    let q = &p.q;
    let (a, b, c) = (p.scalar("a")?, p.scalar("b")?, p.scalar("c")?);
    let big_m = p.bound("M")?;
    let aq = a.clone() * q.clone();
    poch_quot(
        &[
            aq.clone(),
            aq.clone().div_checked(&(b.clone() * c.clone()))?,
        ],
        &[aq.clone().div_checked(b)?, aq.div_checked(c)?],
        q,
        big_m,
    )
}

/// ```text
/// sum_k (a,b,c,d;q)_k / (q, aq/b, aq/c, aq/d;q)_k (1-aq^(2k))/(1-a)
///   (aq/bcd)^k
///   = (aq, aq/bc, aq/bd, aq/cd;q)_inf / (aq/b, aq/c, aq/d, aq/bcd;q)_inf
/// ```
fn sixfive_nonterm_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let k = ks[0];
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let aq = a.clone() * q.clone();
    let vwp_num = Rat::one() - a.clone() * q.powi(2 * k)?;
    let vwp_den = Rat::one() - a.clone();
    let poch = poch_quot(
        &[a.clone(), b.clone(), c.clone(), d.clone()],
        &[
            q.clone(),
            aq.clone().div_checked(b)?,
            aq.clone().div_checked(c)?,
            aq.clone().div_checked(d)?,
        ],
        q,
        k,
    )?;
    let arg = aq.div_checked(&(b.clone() * c.clone() * d.clone()))?;
    Ok(poch * vwp_num.div_checked(&vwp_den)? * arg.powi(k)?)
}

fn sixfive_nonterm_closed(p: &Params, prec: usize) -> QResult<Cx> {
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let aq = a.clone() * q.clone();
    inf_product_quotient(
        &[
            aq.clone(),
            aq.clone().div_checked(&(b.clone() * c.clone()))?,
            aq.clone().div_checked(&(b.clone() * d.clone()))?,
            aq.clone().div_checked(&(c.clone() * d.clone()))?,
        ],
        &[
            aq.clone().div_checked(b)?,
            aq.clone().div_checked(c)?,
            aq.clone().div_checked(d)?,
            aq.div_checked(&(b.clone() * c.clone() * d.clone()))?,
        ],
        q,
        prec,
    )
}

fn sixfive_nonterm_arg(p: &Params) -> QResult<Rat> {
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    (a.clone() * p.q.clone()).div_checked(&(b.clone() * c.clone() * d.clone()))
}

/// ```text
/// sum_(k<=M) (a,b,c,d,a^2 q^(1+M)/bcd, q^(-M);q)_k
///   / (q, aq/b, aq/c, aq/d, bcd q^(-M)/a, aq^(1+M);q)_k
///   (1-aq^(2k))/(1-a) q^k
///   = (aq, aq/bc, aq/bd, aq/cd;q)_M / (aq/b, aq/c, aq/d, aq/bcd;q)_M
/// ```
fn jackson_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let k = ks[0];
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let big_m = p.bound("M")?;
    let aq = a.clone() * q.clone();
    let bcd = b.clone() * c.clone() * d.clone();
    let e = (a.clone() * a.clone() * q.powi(1 + big_m)?).div_checked(&bcd)?;
    let vwp_num = Rat::one() - a.clone() * q.powi(2 * k)?;
    let vwp_den = Rat::one() - a.clone();
    let poch = poch_quot(
        &[
            a.clone(),
            b.clone(),
            c.clone(),
            d.clone(),
            e,
            q.powi(-big_m)?,
        ],
        &[
            q.clone(),
            aq.clone().div_checked(b)?,
            aq.clone().div_checked(c)?,
            aq.clone().div_checked(d)?,
            (bcd * q.powi(-big_m)?).div_checked(a)?,
            a.clone() * q.powi(1 + big_m)?,
        ],
        q,
        k,
    )?;
    Ok(poch * vwp_num.div_checked(&vwp_den)? * q.powi(k)?)
}

fn jackson_closed(p: &Params) -> QResult<Rat> {
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let big_m = p.bound("M")?;
    let aq = a.clone() * q.clone();
    poch_quot(
        &[
            aq.clone(),
            aq.clone().div_checked(&(b.clone() * c.clone()))?,
            aq.clone().div_checked(&(b.clone() * d.clone()))?,
            aq.clone().div_checked(&(c.clone() * d.clone()))?,
        ],
        &[
            aq.clone().div_checked(b)?,
            aq.clone().div_checked(c)?,
            aq.clone().div_checked(d)?,
            aq.div_checked(&(b.clone() * c.clone() * d.clone()))?,
        ],
        q,
        big_m,
    )
}

// ---------------------------------------------------------------------------
// plain A-type series
// ---------------------------------------------------------------------------

/// ```text
/// sum_(|k|=M) prod_(i<j) (u_i q^(k_i) - u_j q^(k_j))/(u_i - u_j)
///   prod_(i,j) (a_j u_i/u_j;q)_(k_i) / (q u_i/u_j;q)_(k_i)
///   = (a_1 ... a_n;q)_M / (q;q)_M
/// ```
fn milne_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let al = p.vector("a")?;
    let us = p.vector("u")?;
    let mut acc = vandermonde_shift_ratio(us, q, ks)?;
    for i in 0..n {
        for j in 0..n {
            let r = us[i].clone().div_checked(&us[j])?;
            acc = acc
                * poch_quot(&[al[j].clone() * r.clone()], &[q.clone() * r], q, ks[i])?;
        }
    }
    Ok(acc)
}

fn milne_closed(p: &Params) -> QResult<Rat> {
    let al = p.vector("a")?;
    let big_m = p.bound("M")?;
    poch_quot(&[prod_rat(al)], &[p.q.clone()], &p.q, big_m)
}

/// ```text
/// sum_k prod_(i<j) ... prod_(i,j) (a_j u_i/u_j;q)_(k_i)/(q u_i/u_j;q)_(k_i)
///   z^|k| = (a_1 ... a_n z;q)_inf / (z;q)_inf,  |z| < 1
/// ```
fn an_qbinomial_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let z = p.scalar("z")?.clone();
    Ok(milne_summand(p, ks)? * z.powi(total(ks))?)
}

fn an_qbinomial_closed(p: &Params, prec: usize) -> QResult<Cx> {
    let al = p.vector("a")?;
    let z = p.scalar("z")?;
    inf_product_quotient(&[prod_rat(al) * z.clone()], &[z.clone()], &p.q, prec)
}

fn an_qbinomial_arg(p: &Params) -> QResult<Rat> {
    Ok(p.scalar("z")?.clone())
}

/// ```text
/// sum_k vand * (b;q)_|k| / (c;q)_|k|
///   prod_(i,j) (a_j u_i/u_j;q)_(k_i)/(q u_i/u_j;q)_(k_i) (c/(a_1..a_n b))^|k|
///   = (c/a_1..a_n, c/b;q)_inf / (c, c/(a_1..a_n b);q)_inf
/// ```
fn annt21_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let q = &p.q;
    let al = p.vector("a")?;
    let (b, c) = (p.scalar("b")?, p.scalar("c")?);
    let kk = total(ks);
    let arg = c
        .clone()
        .div_checked(&(prod_rat(al) * b.clone()))?;
    Ok(milne_summand(p, ks)?
        * poch_quot(&[b.clone()], &[c.clone()], q, kk)?
        * arg.powi(kk)?)
}

fn annt21_closed(p: &Params, prec: usize) -> QResult<Cx> {
    let al = p.vector("a")?;
    let (b, c) = (p.scalar("b")?, p.scalar("c")?);
    let pa = prod_rat(al);
    inf_product_quotient(
        &[
            c.clone().div_checked(&pa)?,
            c.clone().div_checked(b)?,
        ],
        &[
            c.clone(),
            c.clone().div_checked(&(pa.clone() * b.clone()))?,
        ],
        &p.q,
        prec,
    )
}

fn annt21_arg(p: &Params) -> QResult<Rat> {
    let al = p.vector("a")?;
    let (b, c) = (p.scalar("b")?, p.scalar("c")?);
    c.clone().div_checked(&(prod_rat(al) * b.clone()))
}

/// Shared core of the three very-well-poised A-type sums: the Vandermonde
/// quotient, the well-poised quotient, the `|k|`-order column and the
/// `(c_j u_i/u_j)` grid.
fn an_core(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let a = p.scalar("a")?;
    let cs = p.vector("c")?;
    let us = p.vector("u")?;
    let kk = total(ks);
    let mut acc = vandermonde_shift_ratio(us, q, ks)?;
    acc = acc * well_poised_ratio(a, us, q, ks)?;
    for i in 0..n {
        let au = a.clone() * us[i].clone();
        acc = acc
            * poch_quot(
                &[au.clone()],
                &[(au * q.clone()).div_checked(&cs[i])?],
                q,
                kk,
            )?;
        for j in 0..n {
            let r = us[i].clone().div_checked(&us[j])?;
            acc = acc
                * poch_quot(&[cs[j].clone() * r.clone()], &[q.clone() * r], q, ks[i])?;
        }
    }
    Ok(acc)
}

/// ```text
/// sum_(|k|<=M) core * prod_i (b u_i;q)_(k_i)/(a u_i q^(1+M);q)_(k_i)
///   (q^(-M);q)_|k| / (aq/b;q)_|k| (aq^(1+M)/(b c_1..c_n))^|k|
///   = (aq/(b c_1..c_n);q)_M / (aq/b;q)_M
///     prod_i (a u_i q;q)_M / (a u_i q/c_i;q)_M
/// ```
fn an65_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let (a, b) = (p.scalar("a")?, p.scalar("b")?);
    let cs = p.vector("c")?;
    let us = p.vector("u")?;
    let big_m = p.bound("M")?;
    let kk = total(ks);
    let aq = a.clone() * q.clone();
    let mut acc = an_core(p, ks)?;
    for i in 0..n {
        acc = acc
            * poch_quot(
                &[b.clone() * us[i].clone()],
                &[a.clone() * us[i].clone() * q.powi(1 + big_m)?],
                q,
                ks[i],
            )?;
    }
    acc = acc * poch_quot(&[q.powi(-big_m)?], &[aq.clone().div_checked(b)?], q, kk)?;
    let arg = (aq * q.powi(big_m)?).div_checked(&(b.clone() * prod_rat(cs)))?;
    Ok(acc * arg.powi(kk)?)
}

fn an65_closed(p: &Params) -> QResult<Rat> {
    let q = &p.q;
    let (a, b) = (p.scalar("a")?, p.scalar("b")?);
    let cs = p.vector("c")?;
    let us = p.vector("u")?;
    let big_m = p.bound("M")?;
    let aq = a.clone() * q.clone();
    let mut acc = poch_quot(
        &[aq.clone().div_checked(&(b.clone() * prod_rat(cs)))?],
        &[aq.clone().div_checked(b)?],
        q,
        big_m,
    )?;
    for i in 0..p.n {
        let auq = a.clone() * us[i].clone() * q.clone();
        acc = acc
            * poch_quot(
                &[auq.clone()],
                &[auq.div_checked(&cs[i])?],
                q,
                big_m,
            )?;
    }
    Ok(acc)
}

/// ```text
/// sum_k core * prod_i (b u_i;q)_(k_i)/(a u_i q/d;q)_(k_i)
///   (d;q)_|k| / (aq/b;q)_|k| (aq/(b c_1..c_n d))^|k|
///   = (aq/(b c_1..c_n), aq/bd;q)_inf / (aq/b, aq/(b c_1..c_n d);q)_inf
///     prod_i (a u_i q, a u_i q/(c_i d);q)_inf
///            / (a u_i q/c_i, a u_i q/d;q)_inf
/// ```
fn annt65_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let (a, b, d) = (p.scalar("a")?, p.scalar("b")?, p.scalar("d")?);
    let cs = p.vector("c")?;
    let us = p.vector("u")?;
    let kk = total(ks);
    let aq = a.clone() * q.clone();
    let mut acc = an_core(p, ks)?;
    for i in 0..n {
        acc = acc
            * poch_quot(
                &[b.clone() * us[i].clone()],
                &[(a.clone() * us[i].clone() * q.clone()).div_checked(d)?],
                q,
                ks[i],
            )?;
    }
    acc = acc * poch_quot(&[d.clone()], &[aq.clone().div_checked(b)?], q, kk)?;
    let arg = aq.div_checked(&(b.clone() * prod_rat(cs) * d.clone()))?;
    Ok(acc * arg.powi(kk)?)
}

fn annt65_closed(p: &Params, prec: usize) -> QResult<Cx> {
    let q = &p.q;
    let (a, b, d) = (p.scalar("a")?, p.scalar("b")?, p.scalar("d")?);
    let cs = p.vector("c")?;
    let us = p.vector("u")?;
    let aq = a.clone() * q.clone();
    let pc = prod_rat(cs);
    let mut num = vec![
        aq.clone().div_checked(&(b.clone() * pc.clone()))?,
        aq.clone().div_checked(&(b.clone() * d.clone()))?,
    ];
    let mut den = vec![
        aq.clone().div_checked(b)?,
        aq.clone()
            .div_checked(&(b.clone() * pc * d.clone()))?,
    ];
    for i in 0..p.n {
        let auq = a.clone() * us[i].clone() * q.clone();
        num.push(auq.clone());
        num.push(auq.clone().div_checked(&(cs[i].clone() * d.clone()))?);
        den.push(auq.clone().div_checked(&cs[i])?);
        den.push(auq.div_checked(d)?);
    }
    inf_product_quotient(&num, &den, q, prec)
}

fn annt65_arg(p: &Params) -> QResult<Rat> {
    let (a, b, d) = (p.scalar("a")?, p.scalar("b")?, p.scalar("d")?);
    let cs = p.vector("c")?;
    (a.clone() * p.q.clone()).div_checked(&(b.clone() * prod_rat(cs) * d.clone()))
}

/// ```text
/// sum_(|k|<=M) core
///   * prod_i (b u_i, a^2 u_i q^(1+M)/(b c_1..c_n d);q)_(k_i)
///            / (a u_i q/d, a u_i q^(1+M);q)_(k_i)
///   (d, q^(-M);q)_|k| / (aq/b, b c_1..c_n d q^(-M)/a;q)_|k| q^|k|
///   = (aq/bd, aq/(b c_1..c_n);q)_M / (aq/b, aq/(b c_1..c_n d);q)_M
///     prod_i (a u_i q, a u_i q/(c_i d);q)_M / (a u_i q/c_i, a u_i q/d;q)_M
/// ```
fn an87_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let (a, b, d) = (p.scalar("a")?, p.scalar("b")?, p.scalar("d")?);
    let cs = p.vector("c")?;
    let us = p.vector("u")?;
    let big_m = p.bound("M")?;
    let kk = total(ks);
    let aq = a.clone() * q.clone();
    let bcd = b.clone() * prod_rat(cs) * d.clone();
    let mut acc = an_core(p, ks)?;
    for i in 0..n {
        let au = a.clone() * us[i].clone();
        acc = acc
            * poch_quot(
                &[
                    b.clone() * us[i].clone(),
                    (a.clone() * au.clone() * q.powi(1 + big_m)?).div_checked(&bcd)?,
                ],
                &[
                    (au.clone() * q.clone()).div_checked(d)?,
                    au * q.powi(1 + big_m)?,
                ],
                q,
                ks[i],
            )?;
    }
    acc = acc
        * poch_quot(
            &[d.clone(), q.powi(-big_m)?],
            &[
                aq.clone().div_checked(b)?,
                (bcd * q.powi(-big_m)?).div_checked(a)?,
            ],
            q,
            kk,
        )?;
    Ok(acc * q.powi(kk)?)
}

fn an87_closed(p: &Params) -> QResult<Rat> {
    let q = &p.q;
    let (a, b, d) = (p.scalar("a")?, p.scalar("b")?, p.scalar("d")?);
    let cs = p.vector("c")?;
    let us = p.vector("u")?;
    let big_m = p.bound("M")?;
    let aq = a.clone() * q.clone();
    let pc = prod_rat(cs);
    let mut acc = poch_quot(
        &[
            aq.clone().div_checked(&(b.clone() * d.clone()))?,
            aq.clone().div_checked(&(b.clone() * pc.clone()))?,
        ],
        &[
            aq.clone().div_checked(b)?,
            aq.clone().div_checked(&(b.clone() * pc * d.clone()))?,
        ],
        q,
        big_m,
    )?;
    for i in 0..p.n {
        let auq = a.clone() * us[i].clone() * q.clone();
        acc = acc
            * poch_quot(
                &[
                    auq.clone(),
                    auq.clone().div_checked(&(cs[i].clone() * d.clone()))?,
                ],
                &[auq.clone().div_checked(&cs[i])?, auq.div_checked(d)?],
                q,
                big_m,
            )?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// C-type series
// ---------------------------------------------------------------------------

/// ```text
/// sum_(0<=k_i<=m_i) vand * prod_(i<=j) (1-a u_i u_j q^(k_i+k_j))/(1-a u_i u_j)
///   prod_(i,j) (q^(-m_j) u_i/u_j, a u_i u_j;q)_(k_i)
///              / (a u_i u_j q^(1+m_j), q u_i/u_j;q)_(k_i)
///   prod_i (b u_i, c u_i, d u_i, a^2 u_i q^(1+|m|)/bcd;q)_(k_i)
///          / (a u_i q/b, a u_i q/c, a u_i q/d, bcd u_i q^(-|m|)/a;q)_(k_i)
///   q^|k|
///   = prod_(i<j) (a u_i u_j q;q)_(m_i+m_j)^(-1)
///     prod_(i,j) (a u_i u_j q;q)_(m_i)
///     (aq/bc, aq/bd, aq/cd;q)_|m|
///     / prod_i (a u_i q/b, a u_i q/c, a u_i q/d,
///               a q^(1+|m|-m_i)/(bcd u_i);q)_(m_i)
/// ```
fn cn87_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let us = p.vector("u")?;
    let ms = p.bound_list("m")?;
    let mm = total(ms);
    let kk = total(ks);
    let bcd = b.clone() * c.clone() * d.clone();
    let mut acc = vandermonde_shift_ratio(us, q, ks)?;
    for i in 0..n {
        for j in i..n {
            let auu = a.clone() * us[i].clone() * us[j].clone();
            let num = Rat::one() - auu.clone() * q.powi(ks[i] + ks[j])?;
            let den = Rat::one() - auu;
            acc = acc * num.div_checked(&den)?;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let r = us[i].clone().div_checked(&us[j])?;
            let auu = a.clone() * us[i].clone() * us[j].clone();
            acc = acc
                * poch_quot(
                    &[q.powi(-ms[j])? * r.clone(), auu.clone()],
                    &[auu * q.powi(1 + ms[j])?, q.clone() * r],
                    q,
                    ks[i],
                )?;
        }
    }
    for i in 0..n {
        let u = &us[i];
        let au = a.clone() * u.clone();
        acc = acc
            * poch_quot(
                &[
                    b.clone() * u.clone(),
                    c.clone() * u.clone(),
                    d.clone() * u.clone(),
                    (a.clone() * au.clone() * q.powi(1 + mm)?).div_checked(&bcd)?,
                ],
                &[
                    (au.clone() * q.clone()).div_checked(b)?,
                    (au.clone() * q.clone()).div_checked(c)?,
                    (au.clone() * q.clone()).div_checked(d)?,
                    (bcd.clone() * u.clone() * q.powi(-mm)?).div_checked(a)?,
                ],
                q,
                ks[i],
            )?;
    }
    Ok(acc * q.powi(kk)?)
}

fn cn87_closed(p: &Params) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let us = p.vector("u")?;
    let ms = p.bound_list("m")?;
    let mm = total(ms);
    let bcd = b.clone() * c.clone() * d.clone();
    let aq = a.clone() * q.clone();
    let mut acc = Rat::one();
    for i in 0..n {
        for j in 0..n {
            let auuq = a.clone() * us[i].clone() * us[j].clone() * q.clone();
            acc = acc * poch_int(&auuq, q, ms[i])?;
            if i < j {
                let den = poch_int(&auuq, q, ms[i] + ms[j])?;
                acc = acc.div_checked(&den)?;
            }
        }
    }
    acc = acc
        * poch_multi(
            &[
                aq.clone().div_checked(&(b.clone() * c.clone()))?,
                aq.clone().div_checked(&(b.clone() * d.clone()))?,
                aq.clone().div_checked(&(c.clone() * d.clone()))?,
            ],
            q,
            mm,
        )?;
    for i in 0..n {
        let auq = a.clone() * us[i].clone() * q.clone();
        let den = poch_multi(
            &[
                auq.clone().div_checked(b)?,
                auq.clone().div_checked(c)?,
                auq.div_checked(d)?,
                (a.clone() * q.powi(1 + mm - ms[i])?)
                    .div_checked(&(bcd.clone() * us[i].clone()))?,
            ],
            q,
            ms[i],
        )?;
        acc = acc.div_checked(&den)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// determinant-kernel series with free column parameters
// ---------------------------------------------------------------------------

/// Factors shared by the `an87n` family before the choice of column:
/// the `(q u_i/(t_i u_j))` grid, the skew pair factors of order
/// `k_i - k_j`, the plain Vandermonde denominator and the determinant.
fn an87n_core(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let t0 = p.scalar("t0")?;
    let ts = p.vector("t")?;
    let us = p.vector("u")?;
    let mut acc = Rat::one();
    for i in 0..n {
        for j in 0..n {
            let r = us[i].clone().div_checked(&us[j])?;
            acc = acc
                * poch_quot(
                    &[(q.clone() * r.clone()).div_checked(&ts[i])?],
                    &[q.clone() * r],
                    q,
                    ks[i],
                )?;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let r = us[i].clone().div_checked(&us[j])?;
            acc = acc
                * poch_quot(
                    &[ts[j].clone() * r.clone()],
                    &[(q.clone() * r).div_checked(&ts[i])?],
                    q,
                    ks[i] - ks[j],
                )?;
            acc = acc.div_checked(&(us[i].clone() - us[j].clone()))?;
        }
    }
    Ok(acc * shifted_power_det(t0, ts, us, q, ks)?)
}

/// ```text
/// sum_(|k|<=M) core
///   * (d, q^(-M);q)_|k| / (bd q^(-M)/t_0, t_0 q/(b t_1..t_n);q)_|k|
///   prod_i (t_0 u_i q/t_i, b u_i, t_0^2 u_i q^(1+M)/(bd t_1..t_n);q)_(k_i)
///          / (t_0 u_i q, t_0 u_i q/(d t_i), t_0 u_i q^(1+M)/t_i;q)_(k_i)
///   prod_i (d q^(-M)/(t_0 u_i);q)_(|k|-k_i)
///          / (d t_i q^(-M)/(t_0 u_i);q)_(|k|-k_i)
///   q^(|k| + sum_i (1-i) k_i) prod_i t_i^((i-1) k_i + sum_(j>i) k_j)
///   = (t_0 q/b, t_0 q/(bd t_1..t_n);q)_M
///     / (t_0 q/bd, t_0 q/(b t_1..t_n);q)_M
///     prod_i (t_0 u_i q/t_i, t_0 u_i q/d;q)_M
///            / (t_0 u_i q, t_0 u_i q/(d t_i);q)_M
/// ```
fn an87n_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let t0 = p.scalar("t0")?;
    let (b, d) = (p.scalar("b")?, p.scalar("d")?);
    let ts = p.vector("t")?;
    let us = p.vector("u")?;
    let big_m = p.bound("M")?;
    let kk = total(ks);
    let tp = prod_rat(ts);
    let t0q = t0.clone() * q.clone();
    let mut acc = an87n_core(p, ks)?;
    acc = acc
        * poch_quot(
            &[d.clone(), q.powi(-big_m)?],
            &[
                (b.clone() * d.clone() * q.powi(-big_m)?).div_checked(t0)?,
                t0q.clone().div_checked(&(b.clone() * tp.clone()))?,
            ],
            q,
            kk,
        )?;
    for i in 0..n {
        let t0u = t0.clone() * us[i].clone();
        let t0uq = t0u.clone() * q.clone();
        acc = acc
            * poch_quot(
                &[
                    t0uq.clone().div_checked(&ts[i])?,
                    b.clone() * us[i].clone(),
                    (t0.clone() * t0u.clone() * q.powi(1 + big_m)?)
                        .div_checked(&(b.clone() * d.clone() * tp.clone()))?,
                ],
                &[
                    t0uq.clone(),
                    t0uq.clone().div_checked(&(d.clone() * ts[i].clone()))?,
                    (t0u.clone() * q.powi(1 + big_m)?).div_checked(&ts[i])?,
                ],
                q,
                ks[i],
            )?;
        let dq = d.clone() * q.powi(-big_m)?;
        acc = acc
            * poch_quot(
                &[dq.clone().div_checked(&t0u)?],
                &[(dq * ts[i].clone()).div_checked(&t0u)?],
                q,
                kk - ks[i],
            )?;
    }
    let mut qe = kk;
    for (i0, &k) in ks.iter().enumerate() {
        qe += (1 - (i0 as i64 + 1)) * k;
    }
    acc = acc * q.powi(qe)?;
    for i0 in 0..n {
        let tail: i64 = ks[(i0 + 1)..].iter().sum();
        acc = acc * ts[i0].powi(i0 as i64 * ks[i0] + tail)?;
    }
    Ok(acc)
}

fn an87n_closed(p: &Params) -> QResult<Rat> {
    let q = &p.q;
    let t0 = p.scalar("t0")?;
    let (b, d) = (p.scalar("b")?, p.scalar("d")?);
    let ts = p.vector("t")?;
    let us = p.vector("u")?;
    let big_m = p.bound("M")?;
    let tp = prod_rat(ts);
    let t0q = t0.clone() * q.clone();
    let mut acc = poch_quot(
        &[
            t0q.clone().div_checked(b)?,
            t0q.clone()
                .div_checked(&(b.clone() * d.clone() * tp.clone()))?,
        ],
        &[
            t0q.clone().div_checked(&(b.clone() * d.clone()))?,
            t0q.clone().div_checked(&(b.clone() * tp))?,
        ],
        q,
        big_m,
    )?;
    for i in 0..p.n {
        let t0uq = t0.clone() * us[i].clone() * q.clone();
        acc = acc
            * poch_quot(
                &[
                    t0uq.clone().div_checked(&ts[i])?,
                    t0uq.clone().div_checked(d)?,
                ],
                &[
                    t0uq.clone(),
                    t0uq.div_checked(&(d.clone() * ts[i].clone()))?,
                ],
                q,
                big_m,
            )?;
    }
    Ok(acc)
}

/// ```text
/// sum_k core * q^(sum_i (1-i) k_i)
///   prod_i (t_0 u_i q/t_i, b u_i;q)_(k_i)
///          / (t_0 u_i q, t_0 u_i q/(d t_i);q)_(k_i)
///          t_i^(i k_i - sum_(j<=i) k_j)
///   (d;q)_|k| / (t_0 q/(b t_1..t_n);q)_|k| (t_0 q/bd)^|k|
///   = (t_0 q/b, t_0 q/(bd t_1..t_n);q)_inf
///     / (t_0 q/bd, t_0 q/(b t_1..t_n);q)_inf
///     prod_i (t_0 u_i q/t_i, t_0 u_i q/d;q)_inf
///            / (t_0 u_i q, t_0 u_i q/(d t_i);q)_inf,  |t_0 q/bd| < 1
/// ```
fn an65nt_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let t0 = p.scalar("t0")?;
    let (b, d) = (p.scalar("b")?, p.scalar("d")?);
    let ts = p.vector("t")?;
    let us = p.vector("u")?;
    let kk = total(ks);
    let tp = prod_rat(ts);
    let t0q = t0.clone() * q.clone();
    let mut acc = an87n_core(p, ks)?;
    let mut qe = 0i64;
    for (i0, &k) in ks.iter().enumerate() {
        qe += (1 - (i0 as i64 + 1)) * k;
    }
    acc = acc * q.powi(qe)?;
    for i0 in 0..n {
        let t0uq = t0.clone() * us[i0].clone() * q.clone();
        acc = acc
            * poch_quot(
                &[
                    t0uq.clone().div_checked(&ts[i0])?,
                    b.clone() * us[i0].clone(),
                ],
                &[
                    t0uq.clone(),
                    t0uq.div_checked(&(d.clone() * ts[i0].clone()))?,
                ],
                q,
                ks[i0],
            )?;
        let head: i64 = ks[..=i0].iter().sum();
        acc = acc * ts[i0].powi((i0 as i64 + 1) * ks[i0] - head)?;
    }
    acc = acc
        * poch_quot(
            &[d.clone()],
            &[t0q.clone().div_checked(&(b.clone() * tp))?],
            q,
            kk,
        )?;
    let arg = t0q.div_checked(&(b.clone() * d.clone()))?;
    Ok(acc * arg.powi(kk)?)
}

fn an65nt_closed(p: &Params, prec: usize) -> QResult<Cx> {
    let q = &p.q;
    let t0 = p.scalar("t0")?;
    let (b, d) = (p.scalar("b")?, p.scalar("d")?);
    let ts = p.vector("t")?;
    let us = p.vector("u")?;
    let tp = prod_rat(ts);
    let t0q = t0.clone() * q.clone();
    let mut num = vec![
        t0q.clone().div_checked(b)?,
        t0q.clone()
            .div_checked(&(b.clone() * d.clone() * tp.clone()))?,
    ];
    let mut den = vec![
        t0q.clone().div_checked(&(b.clone() * d.clone()))?,
        t0q.clone().div_checked(&(b.clone() * tp))?,
    ];
    for i in 0..p.n {
        let t0uq = t0.clone() * us[i].clone() * q.clone();
        num.push(t0uq.clone().div_checked(&ts[i])?);
        num.push(t0uq.clone().div_checked(d)?);
        den.push(t0uq.clone());
        den.push(t0uq.div_checked(&(d.clone() * ts[i].clone()))?);
    }
    inf_product_quotient(&num, &den, q, prec)
}

fn an65nt_arg(p: &Params) -> QResult<Rat> {
    let t0 = p.scalar("t0")?;
    let (b, d) = (p.scalar("b")?, p.scalar("d")?);
    (t0.clone() * p.q.clone()).div_checked(&(b.clone() * d.clone()))
}

/// ```text
/// sum_(|k|<=M) core * q^(sum_i (1-i) k_i)
///   prod_i (t_0 u_i q/t_i, b u_i;q)_(k_i)
///          / (t_0 u_i q, t_0 u_i q^(1+M)/t_i;q)_(k_i)
///          t_i^(i k_i - sum_(j<=i) k_j)
///   (q^(-M);q)_|k| / (t_0 q/(b t_1..t_n);q)_|k| (t_0 q^(1+M)/b)^|k|
///   = (t_0 q/b;q)_M / (t_0 q/(b t_1..t_n);q)_M
///     prod_i (t_0 u_i q/t_i;q)_M / (t_0 u_i q;q)_M
/// ```
fn an65n_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let t0 = p.scalar("t0")?;
    let b = p.scalar("b")?;
    let ts = p.vector("t")?;
    let us = p.vector("u")?;
    let big_m = p.bound("M")?;
    let kk = total(ks);
    let tp = prod_rat(ts);
    let t0q = t0.clone() * q.clone();
    let mut acc = an87n_core(p, ks)?;
    let mut qe = 0i64;
    for (i0, &k) in ks.iter().enumerate() {
        qe += (1 - (i0 as i64 + 1)) * k;
    }
    acc = acc * q.powi(qe)?;
    for i0 in 0..n {
        let t0u = t0.clone() * us[i0].clone();
        let t0uq = t0u.clone() * q.clone();
        acc = acc
            * poch_quot(
                &[
                    t0uq.clone().div_checked(&ts[i0])?,
                    b.clone() * us[i0].clone(),
                ],
                &[
                    t0uq,
                    (t0u * q.powi(1 + big_m)?).div_checked(&ts[i0])?,
                ],
                q,
                ks[i0],
            )?;
        let head: i64 = ks[..=i0].iter().sum();
        acc = acc * ts[i0].powi((i0 as i64 + 1) * ks[i0] - head)?;
    }
    acc = acc
        * poch_quot(
            &[q.powi(-big_m)?],
            &[t0q.clone().div_checked(&(b.clone() * tp))?],
            q,
            kk,
        )?;
    let arg = (t0q * q.powi(big_m)?).div_checked(b)?;
    Ok(acc * arg.powi(kk)?)
}

fn an65n_closed(p: &Params) -> QResult<Rat> {
    let q = &p.q;
    let t0 = p.scalar("t0")?;
    let b = p.scalar("b")?;
    let ts = p.vector("t")?;
    let us = p.vector("u")?;
    let big_m = p.bound("M")?;
    let t0q = t0.clone() * q.clone();
    let mut acc = poch_quot(
        &[t0q.clone().div_checked(b)?],
        &[t0q.clone().div_checked(&(b.clone() * prod_rat(ts)))?],
        q,
        big_m,
    )?;
    for i in 0..p.n {
        let t0uq = t0.clone() * us[i].clone() * q.clone();
        acc = acc
            * poch_quot(
                &[t0uq.clone().div_checked(&ts[i])?],
                &[t0uq],
                q,
                big_m,
            )?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// determinant-kernel series over boxes
// ---------------------------------------------------------------------------

/// Determinant for the box-shaped A-type sum, rows cancelled as needed:
///
/// ```text
/// det[ (u_i q^(k_i))^(n-j) (1 - q^((j-n-1) m_i) W_i) ],
/// W_i = (1 - a u_i q^(k_i+|m|)) / (1 - a u_i q^(k_i+|m|-m_i))
///       * prod_s (u_i q^(k_i) - u_s) / (u_i q^(k_i-m_i) - u_s)
/// ```
///
/// * `k_i = 0`: `W_i` carries the identically zero factor `u_i - u_i`; the
///   entry is the plain power
/// * `k_i = m_i >= 1`: the row denominator vanishes against the dropped
///   factorial factor of the prefactor; the finite ratio of the two goes
///   into the returned scale and the row keeps only the subtracted part
fn an87np_det(a: &Rat, us: &[Rat], ms: &[i64], q: &Rat, ks: &[i64]) -> QResult<Rat> {
    let n = us.len();
    let mm = total(ms);
    let mut scale = Rat::one();
    let mut m: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        let (k, mi) = (ks[i], ms[i]);
        let x = us[i].clone() * q.powi(k)?;
        let mut row = Vec::with_capacity(n);
        if k == 0 {
            for j0 in 0..n {
                row.push(us[i].powi((n - 1 - j0) as i64)?);
            }
        } else if k == mi {
            let mut num = Rat::one() - a.clone() * us[i].clone() * q.powi(k + mm)?;
            let mut den =
                (Rat::one() - a.clone() * us[i].clone() * q.powi(k + mm - mi)?) * us[i].clone();
            for s in 0..n {
                num = num * (x.clone() - us[s].clone());
                if s != i {
                    den = den * (us[i].clone() * q.powi(k - mi)? - us[s].clone());
                }
            }
            scale = scale * num.div_checked(&den)?;
            for j0 in 0..n {
                row.push(x.powi((n - 1 - j0) as i64)? * q.powi((j0 as i64 - n as i64) * mi)?);
            }
        } else {
            let mut num = Rat::one() - a.clone() * us[i].clone() * q.powi(k + mm)?;
            let mut den = Rat::one() - a.clone() * us[i].clone() * q.powi(k + mm - mi)?;
            let y = us[i].clone() * q.powi(k - mi)?;
            for s in 0..n {
                num = num * (x.clone() - us[s].clone());
                den = den * (y.clone() - us[s].clone());
            }
            let w = num.div_checked(&den)?;
            for j0 in 0..n {
                let qw = q.powi((j0 as i64 - n as i64) * mi)?;
                row.push(x.powi((n - 1 - j0) as i64)? * (Rat::one() - qw * w.clone()));
            }
        }
        m.push(row);
    }
    Ok(determinant(&m)? * scale)
}

/// ```text
/// sum_(0<=k_i<=m_i)
///   prod_(i,j) (q^(1-m_i) u_i/u_j;q)_(k_i) / (q u_i/u_j;q)_(k_i)
///   prod_(i<j) (q^(m_j) u_i/u_j;q)_(k_i-k_j)
///              / (q^(1-m_i) u_i/u_j;q)_(k_i-k_j)
///   prod_(i<j) (u_i - u_j)^(-1) * det (cancelled form)
///   (c, d;q)_|k| / (bcd q^(-|m|)/a, aq/b;q)_|k|
///   prod_i (a u_i q^(1+|m|-m_i), b u_i, a^2 u_i q^(1+|m|)/bcd;q)_(k_i)
///          / (a u_i q^(1+|m|), a u_i q^(1+|m|-m_i)/c,
///             a u_i q^(1+|m|-m_i)/d;q)_(k_i)
///   prod_i (cd q^(-|m|)/(a u_i);q)_(|k|-k_i)
///          / (cd q^(m_i-|m|)/(a u_i);q)_(|k|-k_i)
///   q^(|k| + sum_i ((1-i) k_i + m_i ((i-1) k_i + sum_(j>i) k_j)))
///   = (aq/bc, aq/bd;q)_|m| / (aq/b, aq/bcd;q)_|m|
///     prod_i (a u_i q^(1+|m|-m_i), a u_i q^(1+|m|-m_i)/cd;q)_(m_i)
///            / (a u_i q^(1+|m|-m_i)/c, a u_i q^(1+|m|-m_i)/d;q)_(m_i)
/// ```
///
/// At a box corner `k_i = m_i >= 1` the diagonal factor
/// `(q^(1-m_i);q)_(k_i)` vanishes; it is replaced by its reduced form
/// `(q^(1-m_i);q)_(m_i-1)` and the dropped zero cancels inside the
/// determinant, see `an87np_det`.
fn an87np_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let us = p.vector("u")?;
    let ms = p.bound_list("m")?;
    let mm = total(ms);
    let kk = total(ks);
    let bcd = b.clone() * c.clone() * d.clone();
    let cd = c.clone() * d.clone();
    let aq = a.clone() * q.clone();
    let mut acc = Rat::one();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                let ord = if ks[i] == ms[i] && ms[i] >= 1 {
                    ms[i] - 1
                } else {
                    ks[i]
                };
                let numf = poch_int(&q.powi(1 - ms[i])?, q, ord)?;
                let denf = poch_int(q, q, ks[i])?;
                acc = acc * numf.div_checked(&denf)?;
            } else {
                let r = us[i].clone().div_checked(&us[j])?;
                acc = acc
                    * poch_quot(
                        &[q.powi(1 - ms[i])? * r.clone()],
                        &[q.clone() * r],
                        q,
                        ks[i],
                    )?;
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let r = us[i].clone().div_checked(&us[j])?;
            acc = acc
                * poch_quot(
                    &[q.powi(ms[j])? * r.clone()],
                    &[q.powi(1 - ms[i])? * r],
                    q,
                    ks[i] - ks[j],
                )?;
            acc = acc.div_checked(&(us[i].clone() - us[j].clone()))?;
        }
    }
    acc = acc * an87np_det(a, us, ms, q, ks)?;
    acc = acc
        * poch_quot(
            &[c.clone(), d.clone()],
            &[
                (bcd.clone() * q.powi(-mm)?).div_checked(a)?,
                aq.clone().div_checked(b)?,
            ],
            q,
            kk,
        )?;
    for i in 0..n {
        let au = a.clone() * us[i].clone();
        let base = au.clone() * q.powi(1 + mm - ms[i])?;
        acc = acc
            * poch_quot(
                &[
                    base.clone(),
                    b.clone() * us[i].clone(),
                    (a.clone() * au.clone() * q.powi(1 + mm)?).div_checked(&bcd)?,
                ],
                &[
                    au.clone() * q.powi(1 + mm)?,
                    base.clone().div_checked(c)?,
                    base.div_checked(d)?,
                ],
                q,
                ks[i],
            )?;
        acc = acc
            * poch_quot(
                &[(cd.clone() * q.powi(-mm)?).div_checked(&au)?],
                &[(cd.clone() * q.powi(ms[i] - mm)?).div_checked(&au)?],
                q,
                kk - ks[i],
            )?;
    }
    let mut qe = kk;
    for i0 in 0..n {
        let i1 = i0 as i64 + 1;
        let tail: i64 = ks[(i0 + 1)..].iter().sum();
        qe += (1 - i1) * ks[i0] + ms[i0] * ((i1 - 1) * ks[i0] + tail);
    }
    Ok(acc * q.powi(qe)?)
}

fn an87np_closed(p: &Params) -> QResult<Rat> {
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let us = p.vector("u")?;
    let ms = p.bound_list("m")?;
    let mm = total(ms);
    let aq = a.clone() * q.clone();
    let cd = c.clone() * d.clone();
    let mut acc = poch_quot(
        &[
            aq.clone().div_checked(&(b.clone() * c.clone()))?,
            aq.clone().div_checked(&(b.clone() * d.clone()))?,
        ],
        &[
            aq.clone().div_checked(b)?,
            aq.clone().div_checked(&(b.clone() * cd.clone()))?,
        ],
        q,
        mm,
    )?;
    for i in 0..p.n {
        let base = a.clone() * us[i].clone() * q.powi(1 + mm - ms[i])?;
        acc = acc
            * poch_quot(
                &[base.clone(), base.clone().div_checked(&cd)?],
                &[
                    base.clone().div_checked(c)?,
                    base.div_checked(d)?,
                ],
                q,
                ms[i],
            )?;
    }
    Ok(acc)
}

/// Determinant for the conjectured C-type box sum, rows cancelled as in
/// `an87np_det` but with the symmetric heads
///
/// ```text
/// A_i = u_i q^(k_i) + q^(-k_i-|m|)/(a u_i),
/// B_i = u_i q^(k_i-m_i) + q^(-k_i+m_i-|m|)/(a u_i),
/// entry = A_i^(n+1-j) - B_i^(n+1-j) W_i,
/// W_i = prod_s (u_i q^(k_i) - u_s)(1 - q^(-k_i-|m|)/(a u_i u_s))
///       / ((u_i q^(k_i-m_i) - u_s)(1 - q^(-k_i+m_i-|m|)/(a u_i u_s)))
/// ```
///
/// Both heads apply the same folding `z + 1/(a z q^(|m|))`, once at the
/// node `u_i q^(k_i)` and once at `u_i q^(k_i-m_i)`; the quotient `W_i` is
/// the matching quotient of folded differences from the grid `u_s`.
fn cn87n_det(a: &Rat, us: &[Rat], ms: &[i64], q: &Rat, ks: &[i64]) -> QResult<Rat> {
    let n = us.len();
    let mm = total(ms);
    let mut scale = Rat::one();
    let mut m: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        let (k, mi) = (ks[i], ms[i]);
        let au = a.clone() * us[i].clone();
        let head_a =
            us[i].clone() * q.powi(k)? + q.powi(-k - mm)?.div_checked(&au)?;
        let head_b =
            us[i].clone() * q.powi(k - mi)? + q.powi(-k + mi - mm)?.div_checked(&au)?;
        let mut row = Vec::with_capacity(n);
        if k == 0 {
            for j0 in 0..n {
                row.push(head_a.powi((n - j0) as i64)?);
            }
        } else if k == mi {
            let mut num = Rat::one();
            let mut den = (Rat::one()
                - q.powi(-k + mi - mm)?
                    .div_checked(&(au.clone() * us[i].clone()))?)
                * us[i].clone();
            for s in 0..n {
                num = num
                    * (us[i].clone() * q.powi(k)? - us[s].clone())
                    * (Rat::one()
                        - q.powi(-k - mm)?.div_checked(&(au.clone() * us[s].clone()))?);
                if s != i {
                    den = den
                        * (us[i].clone() * q.powi(k - mi)? - us[s].clone())
                        * (Rat::one()
                            - q.powi(-k + mi - mm)?
                                .div_checked(&(au.clone() * us[s].clone()))?);
                }
            }
            scale = scale * num.div_checked(&den)?;
            for j0 in 0..n {
                row.push(head_b.powi((n - j0) as i64)?);
            }
        } else {
            let mut num = Rat::one();
            let mut den = Rat::one();
            for s in 0..n {
                num = num
                    * (us[i].clone() * q.powi(k)? - us[s].clone())
                    * (Rat::one()
                        - q.powi(-k - mm)?.div_checked(&(au.clone() * us[s].clone()))?);
                den = den
                    * (us[i].clone() * q.powi(k - mi)? - us[s].clone())
                    * (Rat::one()
                        - q.powi(-k + mi - mm)?
                            .div_checked(&(au.clone() * us[s].clone()))?);
            }
            let w = num.div_checked(&den)?;
            for j0 in 0..n {
                let e = (n - j0) as i64;
                row.push(head_a.powi(e)? - head_b.powi(e)? * w.clone());
            }
        }
        m.push(row);
    }
    Ok(determinant(&m)? * scale)
}

/// ```text
/// sum_(0<=k_i<=m_i)
///   prod_(i,j) (q^(1-m_i) u_i/u_j, a u_i u_j q^(1+|m|-m_i);q)_(k_i)
///              (q^(m_j) u_i/u_j;q)_(k_i-k_j)
///              / ((q u_i/u_j, a u_i u_j q^(1+|m|);q)_(k_i)
///                 (q u_i/u_j;q)_(k_i-k_j))
///   prod_(i<j) (u_i q^(k_i) - u_j q^(k_j))/(u_i - u_j)
///   prod_(i<j) (a u_i u_j q^|m|;q)_(k_i+k_j)
///              / (a u_i u_j q^(1+|m|-m_i-m_j);q)_(k_i+k_j)
///   q^(|k| + (n-1) sum_i m_i k_i)
///   prod_(i<j) (u_i - u_j)^(-1) (1 - q^(-|m|)/(a u_i u_j))^(-1)
///   prod_i (u_i + q^(-|m|)/(a u_i))^(-1) * det (cancelled form)
///   prod_i (b u_i, c u_i, d u_i, a^2 u_i q^(1+|m|)/bcd;q)_(k_i)
///          / (a u_i q^(1+|m|-m_i)/b, a u_i q^(1+|m|-m_i)/c,
///             a u_i q^(1+|m|-m_i)/d, bcd u_i q^(-m_i)/a;q)_(k_i)
///   = prod_(i<j) (a u_i u_j q^(1+|m|-m_i-m_j);q)_(m_i+m_j)^(-1)
///     prod_(i,j) (a u_i u_j q^(1+|m|-m_i);q)_(m_i)
///     (aq/bc, aq/bd, aq/cd;q)_|m|
///     / prod_i (a u_i q^(1+|m|-m_i)/b, a u_i q^(1+|m|-m_i)/c,
///               a u_i q^(1+|m|-m_i)/d, aq/(bcd u_i);q)_(m_i)
/// ```
fn cn87n_summand(p: &Params, ks: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let us = p.vector("u")?;
    let ms = p.bound_list("m")?;
    let mm = total(ms);
    let kk = total(ks);
    let bcd = b.clone() * c.clone() * d.clone();
    let mut acc = Rat::one();
    for i in 0..n {
        for j in 0..n {
            let auu = a.clone() * us[i].clone() * us[j].clone();
            if i == j {
                let ord = if ks[i] == ms[i] && ms[i] >= 1 {
                    ms[i] - 1
                } else {
                    ks[i]
                };
                let numf = poch_int(&q.powi(1 - ms[i])?, q, ord)?;
                let denf = poch_int(q, q, ks[i])?;
                acc = acc * numf.div_checked(&denf)?;
            } else {
                let r = us[i].clone().div_checked(&us[j])?;
                acc = acc
                    * poch_quot(
                        &[q.powi(1 - ms[i])? * r.clone()],
                        &[q.clone() * r.clone()],
                        q,
                        ks[i],
                    )?;
                acc = acc
                    * poch_quot(
                        &[q.powi(ms[j])? * r.clone()],
                        &[q.clone() * r],
                        q,
                        ks[i] - ks[j],
                    )?;
            }
            acc = acc
                * poch_quot(
                    &[auu.clone() * q.powi(1 + mm - ms[i])?],
                    &[auu * q.powi(1 + mm)?],
                    q,
                    ks[i],
                )?;
        }
    }
    acc = acc * vandermonde_shift_ratio(us, q, ks)?;
    for i in 0..n {
        for j in (i + 1)..n {
            let auu = a.clone() * us[i].clone() * us[j].clone();
            acc = acc
                * poch_quot(
                    &[auu.clone() * q.powi(mm)?],
                    &[auu.clone() * q.powi(1 + mm - ms[i] - ms[j])?],
                    q,
                    ks[i] + ks[j],
                )?;
            let folded = Rat::one() - q.powi(-mm)?.div_checked(&auu)?;
            acc = acc.div_checked(&((us[i].clone() - us[j].clone()) * folded))?;
        }
    }
    for i in 0..n {
        let head = us[i].clone()
            + q.powi(-mm)?
                .div_checked(&(a.clone() * us[i].clone()))?;
        acc = acc.div_checked(&head)?;
    }
    acc = acc * cn87n_det(a, us, ms, q, ks)?;
    for i in 0..n {
        let u = &us[i];
        let au = a.clone() * u.clone();
        let base = au.clone() * q.powi(1 + mm - ms[i])?;
        acc = acc
            * poch_quot(
                &[
                    b.clone() * u.clone(),
                    c.clone() * u.clone(),
                    d.clone() * u.clone(),
                    (a.clone() * au * q.powi(1 + mm)?).div_checked(&bcd)?,
                ],
                &[
                    base.clone().div_checked(b)?,
                    base.clone().div_checked(c)?,
                    base.div_checked(d)?,
                    (bcd.clone() * u.clone() * q.powi(-ms[i])?).div_checked(a)?,
                ],
                q,
                ks[i],
            )?;
    }
    let mk: i64 = ms.iter().zip(ks).map(|(&m, &k)| m * k).sum();
    Ok(acc * q.powi(kk + (n as i64 - 1) * mk)?)
}

fn cn87n_closed(p: &Params) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let (a, b, c, d) = (
        p.scalar("a")?,
        p.scalar("b")?,
        p.scalar("c")?,
        p.scalar("d")?,
    );
    let us = p.vector("u")?;
    let ms = p.bound_list("m")?;
    let mm = total(ms);
    let bcd = b.clone() * c.clone() * d.clone();
    let aq = a.clone() * q.clone();
    let mut acc = Rat::one();
    for i in 0..n {
        for j in 0..n {
            let auu = a.clone() * us[i].clone() * us[j].clone();
            acc = acc * poch_int(&(auu.clone() * q.powi(1 + mm - ms[i])?), q, ms[i])?;
            if i < j {
                let den =
                    poch_int(&(auu * q.powi(1 + mm - ms[i] - ms[j])?), q, ms[i] + ms[j])?;
                acc = acc.div_checked(&den)?;
            }
        }
    }
    acc = acc
        * poch_multi(
            &[
                aq.clone().div_checked(&(b.clone() * c.clone()))?,
                aq.clone().div_checked(&(b.clone() * d.clone()))?,
                aq.clone().div_checked(&(c.clone() * d.clone()))?,
            ],
            q,
            mm,
        )?;
    for i in 0..n {
        let base = a.clone() * us[i].clone() * q.powi(1 + mm - ms[i])?;
        let den = poch_multi(
            &[
                base.clone().div_checked(b)?,
                base.clone().div_checked(c)?,
                base.div_checked(d)?,
                aq.clone()
                    .div_checked(&(bcd.clone() * us[i].clone()))?,
            ],
            q,
            ms[i],
        )?;
        acc = acc.div_checked(&den)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// principally specialized expansions
// ---------------------------------------------------------------------------

/// ```text
/// sum_(|th| <= la_(n+1))
///   prod_(i<j) (q^(la_i+th_i) t^(-i) - q^(la_j+th_j) t^(-j))
///              / (q^(la_i) t^(-i) - q^(la_j) t^(-j))
///   prod_i (1 - q^(la_i-la_(n+1)+th_i+|th|) t^(n+1-i))
///          / (1 - q^(la_i-la_(n+1)) t^(n+1-i))
///   prod_(i,j) (q^(la_i-la_j) t^(j-i+1);q)_(th_i)
///              / (q^(1+la_i-la_j) t^(j-i);q)_(th_i)
///   prod_i (q^(la_i-la_(n+1)) t^(n+1-i);q)_|th|
///          / (q^(1+la_i-la_(n+1)) t^(n-i);q)_|th|
///   prod_i (q^(la_i) u t^(1-i);q)_(th_i) / (q^(1+la_i) t^(n+1-i);q)_(th_i)
///   (q^(-la_(n+1));q)_|th| / (q^(1-la_(n+1)) t^n/u;q)_|th| (q/u)^|th|
///   = (q^(1-la_(n+1))/u;q)_(la_(n+1)) / (q^(1-la_(n+1)) t^n/u;q)_(la_(n+1))
///     prod_i (q^(1+la_i-la_(n+1)) t^(n+1-i);q)_(la_(n+1))
///            / (q^(1+la_i-la_(n+1)) t^(n-i);q)_(la_(n+1))
/// ```
fn pieri_specialized_summand(p: &Params, th: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let t = p.scalar("t")?;
    let u = p.scalar("u")?;
    let lam = p.bound_list("lambda")?;
    if lam.len() != n + 1 {
        return Err(QError::Length(format!(
            "partition bound has length {}, expected {}",
            lam.len(),
            n + 1
        )));
    }
    let last = lam[n];
    let tt = total(th);
    let nn = n as i64;
    let mono = |a: i64, b: i64| -> QResult<Rat> { Ok(q.powi(a)? * t.powi(b)?) };
    let mut acc = Rat::one();
    for i in 0..n {
        let i1 = i as i64 + 1;
        for j in (i + 1)..n {
            let j1 = j as i64 + 1;
            let num = mono(lam[i] + th[i], -i1)? - mono(lam[j] + th[j], -j1)?;
            let den = mono(lam[i], -i1)? - mono(lam[j], -j1)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    for i in 0..n {
        let i1 = i as i64 + 1;
        let num = Rat::one() - mono(lam[i] - last + th[i] + tt, nn + 1 - i1)?;
        let den = Rat::one() - mono(lam[i] - last, nn + 1 - i1)?;
        acc = acc * num.div_checked(&den)?;
    }
    for i in 0..n {
        let i1 = i as i64 + 1;
        for j in 0..n {
            let j1 = j as i64 + 1;
            acc = acc
                * poch_quot(
                    &[mono(lam[i] - lam[j], j1 - i1 + 1)?],
                    &[mono(1 + lam[i] - lam[j], j1 - i1)?],
                    q,
                    th[i],
                )?;
        }
        acc = acc
            * poch_quot(
                &[mono(lam[i] - last, nn + 1 - i1)?],
                &[mono(1 + lam[i] - last, nn - i1)?],
                q,
                tt,
            )?;
        acc = acc
            * poch_quot(
                &[mono(lam[i], 1 - i1)? * u.clone()],
                &[mono(1 + lam[i], nn + 1 - i1)?],
                q,
                th[i],
            )?;
    }
    acc = acc
        * poch_quot(
            &[q.powi(-last)?],
            &[(q.powi(1 - last)? * t.powi(nn)?).div_checked(u)?],
            q,
            tt,
        )?;
    Ok(acc * q.clone().div_checked(u)?.powi(tt)?)
}

fn pieri_specialized_closed(p: &Params) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let t = p.scalar("t")?;
    let u = p.scalar("u")?;
    let lam = p.bound_list("lambda")?;
    let last = lam[n];
    let nn = n as i64;
    let mono = |a: i64, b: i64| -> QResult<Rat> { Ok(q.powi(a)? * t.powi(b)?) };
    let mut acc = poch_quot(
        &[q.powi(1 - last)?.div_checked(u)?],
        &[(q.powi(1 - last)? * t.powi(nn)?).div_checked(u)?],
        q,
        last,
    )?;
    for i in 0..n {
        let i1 = i as i64 + 1;
        acc = acc
            * poch_quot(
                &[mono(1 + lam[i] - last, nn + 1 - i1)?],
                &[mono(1 + lam[i] - last, nn - i1)?],
                q,
                last,
            )?;
    }
    Ok(acc)
}

/// ```text
/// sum_th
///   prod_(i,j) (q^(1+la_i-la_j) t^(j-i-1);q)_(th_i)
///              / (q^(1+la_i-la_j) t^(j-i);q)_(th_i)
///   prod_(i<j) (q^(la_i-la_j) t^(j-i+1);q)_(th_i-th_j)
///              / (q^(1+la_i-la_j) t^(j-i-1);q)_(th_i-th_j)
///   prod_(i<j) (q^(la_i) t^(-i) - q^(la_j) t^(-j))^(-1)
///   det[ (q^(la_i+th_i) t^(-i))^(n-j) (1 - t^(j-1) V_i) ]
///   prod_i (q^(1+la_i-la_(n+1)) t^(n-i), q^(la_i) u t^(1-i);q)_(th_i)
///          / (q^(1+la_i-la_(n+1)) t^(1+n-i), q^(1+la_i) t^(n-i);q)_(th_i)
///   (q^(-la_(n+1));q)_|th| / (q^(1-la_(n+1))/u;q)_|th|
///   (qt/u)^|th| q^(sum_i (1-i) th_i) t^(sum_i 2(i-1) th_i)
///   = (q^(1-la_(n+1)) t^n/u;q)_(la_(n+1)) / (q^(1-la_(n+1))/u;q)_(la_(n+1))
///     prod_i (q^(1+la_i-la_(n+1)) t^(n-i);q)_(la_(n+1))
///            / (q^(1+la_i-la_(n+1)) t^(n+1-i);q)_(la_(n+1))
/// ```
///
/// with
///
/// ```text
/// V_i = (1 - q^(la_i-la_(n+1)+th_i) t^(n-i+1))
///       / (1 - q^(la_i-la_(n+1)+th_i) t^(n-i))
///       prod_s (q^(la_s) t^(-s) - q^(la_i+th_i) t^(-i))
///              / (q^(la_s) t^(1-s) - q^(la_i+th_i) t^(-i))
/// ```
///
/// Shifts that break monotonicity of the first `n` rows contribute zero:
/// the adjacent pair factor in the denominator acquires an infinite
/// q-shifted factorial.  Rows with `th_i = 0` reduce to the plain power,
/// which keeps repeated parts of `lambda` from producing spurious `0/0`.
fn recursion_specialized_summand(p: &Params, th: &[i64]) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let t = p.scalar("t")?;
    let u = p.scalar("u")?;
    let lam = p.bound_list("lambda")?;
    if lam.len() != n + 1 {
        return Err(QError::Length(format!(
            "partition bound has length {}, expected {}",
            lam.len(),
            n + 1
        )));
    }
    for i in 0..n.saturating_sub(1) {
        if lam[i] + th[i] < lam[i + 1] + th[i + 1] {
            return Ok(Rat::zero());
        }
    }
    let last = lam[n];
    let tt = total(th);
    let nn = n as i64;
    let mono = |a: i64, b: i64| -> QResult<Rat> { Ok(q.powi(a)? * t.powi(b)?) };
    let mut acc = Rat::one();
    for i in 0..n {
        let i1 = i as i64 + 1;
        for j in 0..n {
            let j1 = j as i64 + 1;
            acc = acc
                * poch_quot(
                    &[mono(1 + lam[i] - lam[j], j1 - i1 - 1)?],
                    &[mono(1 + lam[i] - lam[j], j1 - i1)?],
                    q,
                    th[i],
                )?;
        }
    }
    for i in 0..n {
        let i1 = i as i64 + 1;
        for j in (i + 1)..n {
            let j1 = j as i64 + 1;
            acc = acc
                * poch_quot(
                    &[mono(lam[i] - lam[j], j1 - i1 + 1)?],
                    &[mono(1 + lam[i] - lam[j], j1 - i1 - 1)?],
                    q,
                    th[i] - th[j],
                )?;
            acc = acc.div_checked(&(mono(lam[i], -i1)? - mono(lam[j], -j1)?))?;
        }
    }
    let mut m: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        let i1 = i as i64 + 1;
        let mut row = Vec::with_capacity(n);
        if th[i] == 0 {
            for j0 in 0..n {
                row.push(mono(lam[i], -i1)?.powi((n - 1 - j0) as i64)?);
            }
        } else {
            let v = mono(lam[i] + th[i], -i1)?;
            let mut num = Rat::one() - mono(lam[i] - last + th[i], nn - i1 + 1)?;
            let mut den = Rat::one() - mono(lam[i] - last + th[i], nn - i1)?;
            for s in 0..n {
                let s1 = s as i64 + 1;
                num = num * (mono(lam[s], -s1)? - v.clone());
                den = den * (mono(lam[s], 1 - s1)? - v.clone());
            }
            let w = num.div_checked(&den)?;
            for j0 in 0..n {
                row.push(
                    v.powi((n - 1 - j0) as i64)?
                        * (Rat::one() - t.powi(j0 as i64)? * w.clone()),
                );
            }
        }
        m.push(row);
    }
    acc = acc * determinant(&m)?;
    for i in 0..n {
        let i1 = i as i64 + 1;
        acc = acc
            * poch_quot(
                &[
                    mono(1 + lam[i] - last, nn - i1)?,
                    mono(lam[i], 1 - i1)? * u.clone(),
                ],
                &[
                    mono(1 + lam[i] - last, 1 + nn - i1)?,
                    mono(1 + lam[i], nn - i1)?,
                ],
                q,
                th[i],
            )?;
    }
    acc = acc
        * poch_quot(
            &[q.powi(-last)?],
            &[q.powi(1 - last)?.div_checked(u)?],
            q,
            tt,
        )?;
    acc = acc * (q.clone() * t.clone()).div_checked(u)?.powi(tt)?;
    let mut qe = 0i64;
    let mut te = 0i64;
    for (i0, &x) in th.iter().enumerate() {
        let i1 = i0 as i64 + 1;
        qe += (1 - i1) * x;
        te += 2 * (i1 - 1) * x;
    }
    Ok(acc * q.powi(qe)? * t.powi(te)?)
}

fn recursion_specialized_closed(p: &Params) -> QResult<Rat> {
    let n = p.n;
    let q = &p.q;
    let t = p.scalar("t")?;
    let u = p.scalar("u")?;
    let lam = p.bound_list("lambda")?;
    let last = lam[n];
    let nn = n as i64;
    let mono = |a: i64, b: i64| -> QResult<Rat> { Ok(q.powi(a)? * t.powi(b)?) };
    let mut acc = poch_quot(
        &[(q.powi(1 - last)? * t.powi(nn)?).div_checked(u)?],
        &[q.powi(1 - last)?.div_checked(u)?],
        q,
        last,
    )?;
    for i in 0..n {
        let i1 = i as i64 + 1;
        acc = acc
            * poch_quot(
                &[mono(1 + lam[i] - last, nn - i1)?],
                &[mono(1 + lam[i] - last, nn + 1 - i1)?],
                q,
                last,
            )?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

const SCHEMA_QBINOMIAL: &[ParamSpec] =
    &[ps("a", ParamKind::Scalar), ps("z", ParamKind::Scalar)];
const SCHEMA_QGAUSS: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Scalar),
];
const SCHEMA_SIXFIVE_TERM: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Scalar),
    ps("M", ParamKind::Bound),
];
const SCHEMA_SIXFIVE_NONTERM: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Scalar),
    ps("d", ParamKind::Scalar),
];
const SCHEMA_JACKSON: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Scalar),
    ps("d", ParamKind::Scalar),
    ps("M", ParamKind::Bound),
];
const SCHEMA_MILNE: &[ParamSpec] = &[
    ps("a", ParamKind::Vector),
    ps("u", ParamKind::Vector),
    ps("M", ParamKind::Bound),
];
const SCHEMA_AN_QBINOMIAL: &[ParamSpec] = &[
    ps("a", ParamKind::Vector),
    ps("u", ParamKind::Vector),
    ps("z", ParamKind::Scalar),
];
const SCHEMA_AN65: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Vector),
    ps("u", ParamKind::Vector),
    ps("M", ParamKind::Bound),
];
const SCHEMA_ANNT65: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Vector),
    ps("d", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
];
const SCHEMA_ANNT21: &[ParamSpec] = &[
    ps("a", ParamKind::Vector),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
];
const SCHEMA_AN87: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Vector),
    ps("d", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
    ps("M", ParamKind::Bound),
];
const SCHEMA_CN87: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Scalar),
    ps("d", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
    ps("m", ParamKind::BoundVector),
];
const SCHEMA_AN87N: &[ParamSpec] = &[
    ps("t0", ParamKind::Scalar),
    ps("t", ParamKind::Vector),
    ps("b", ParamKind::Scalar),
    ps("d", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
    ps("M", ParamKind::Bound),
];
const SCHEMA_AN87NP: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Scalar),
    ps("d", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
    ps("m", ParamKind::BoundVector),
];
const SCHEMA_AN65NT: &[ParamSpec] = &[
    ps("t0", ParamKind::Scalar),
    ps("t", ParamKind::Vector),
    ps("b", ParamKind::Scalar),
    ps("d", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
];
const SCHEMA_AN65N: &[ParamSpec] = &[
    ps("t0", ParamKind::Scalar),
    ps("t", ParamKind::Vector),
    ps("b", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
    ps("M", ParamKind::Bound),
];
const SCHEMA_CN87N: &[ParamSpec] = &[
    ps("a", ParamKind::Scalar),
    ps("b", ParamKind::Scalar),
    ps("c", ParamKind::Scalar),
    ps("d", ParamKind::Scalar),
    ps("u", ParamKind::Vector),
    ps("m", ParamKind::BoundVector),
];
const SCHEMA_SPECIALIZED: &[ParamSpec] = &[
    ps("lambda", ParamKind::PartitionBound),
    ps("t", ParamKind::Scalar),
    ps("u", ParamKind::Scalar),
];

fn registry_build() -> Vec<IdentitySpec> {
    vec![
        IdentitySpec {
            id: "q-binomial",
            summary: "q-binomial theorem",
            n_fixed: Some(1),
            region: RegionKind::Infinite,
            schema: SCHEMA_QBINOMIAL,
            terminating: false,
            summand: qbinomial_summand,
            closed_exact: None,
            closed_numeric: Some(qbinomial_closed),
            series_arg: Some(qbinomial_arg),
        },
        IdentitySpec {
            id: "q-gauss",
            summary: "q-Gauss sum",
            n_fixed: Some(1),
            region: RegionKind::Infinite,
            schema: SCHEMA_QGAUSS,
            terminating: false,
            summand: qgauss_summand,
            closed_exact: None,
            closed_numeric: Some(qgauss_closed),
            series_arg: Some(qgauss_arg),
        },
        IdentitySpec {
            id: "6phi5-term",
            summary: "terminating very-well-poised 6phi5 sum",
            n_fixed: Some(1),
            region: RegionKind::Simplex("M"),
            schema: SCHEMA_SIXFIVE_TERM,
            terminating: true,
            summand: sixfive_term_summand,
            closed_exact: Some(sixfive_term_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "6phi5-nonterm",
            summary: "nonterminating very-well-poised 6phi5 sum",
            n_fixed: Some(1),
            region: RegionKind::Infinite,
            schema: SCHEMA_SIXFIVE_NONTERM,
            terminating: false,
            summand: sixfive_nonterm_summand,
            closed_exact: None,
            closed_numeric: Some(sixfive_nonterm_closed),
            series_arg: Some(sixfive_nonterm_arg),
        },
        IdentitySpec {
            id: "8phi7-jackson",
            summary: "terminating very-well-poised balanced 8phi7 sum",
            n_fixed: Some(1),
            region: RegionKind::Simplex("M"),
            schema: SCHEMA_JACKSON,
            terminating: true,
            summand: jackson_summand,
            closed_exact: Some(jackson_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "milne-fundamental",
            summary: "A-type fundamental shell sum",
            n_fixed: None,
            region: RegionKind::Shell("M"),
            schema: SCHEMA_MILNE,
            terminating: true,
            summand: milne_summand,
            closed_exact: Some(milne_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "an-qbinomial",
            summary: "A-type q-binomial theorem",
            n_fixed: None,
            region: RegionKind::Infinite,
            schema: SCHEMA_AN_QBINOMIAL,
            terminating: false,
            summand: an_qbinomial_summand,
            closed_exact: None,
            closed_numeric: Some(an_qbinomial_closed),
            series_arg: Some(an_qbinomial_arg),
        },
        IdentitySpec {
            id: "an65",
            summary: "A-type terminating very-well-poised 6phi5 sum",
            n_fixed: None,
            region: RegionKind::Simplex("M"),
            schema: SCHEMA_AN65,
            terminating: true,
            summand: an65_summand,
            closed_exact: Some(an65_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "annt65",
            summary: "A-type nonterminating very-well-poised 6phi5 sum",
            n_fixed: None,
            region: RegionKind::Infinite,
            schema: SCHEMA_ANNT65,
            terminating: false,
            summand: annt65_summand,
            closed_exact: None,
            closed_numeric: Some(annt65_closed),
            series_arg: Some(annt65_arg),
        },
        IdentitySpec {
            id: "annt21",
            summary: "A-type nonterminating q-Gauss sum",
            n_fixed: None,
            region: RegionKind::Infinite,
            schema: SCHEMA_ANNT21,
            terminating: false,
            summand: annt21_summand,
            closed_exact: None,
            closed_numeric: Some(annt21_closed),
            series_arg: Some(annt21_arg),
        },
        IdentitySpec {
            id: "an87",
            summary: "A-type terminating very-well-poised 8phi7 sum",
            n_fixed: None,
            region: RegionKind::Simplex("M"),
            schema: SCHEMA_AN87,
            terminating: true,
            summand: an87_summand,
            closed_exact: Some(an87_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "cn87",
            summary: "C-type terminating very-well-poised 8phi7 sum",
            n_fixed: None,
            region: RegionKind::Box("m"),
            schema: SCHEMA_CN87,
            terminating: true,
            summand: cn87_summand,
            closed_exact: Some(cn87_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "an87n",
            summary: "A-type terminating 8phi7 sum with a determinant kernel",
            n_fixed: None,
            region: RegionKind::Simplex("M"),
            schema: SCHEMA_AN87N,
            terminating: true,
            summand: an87n_summand,
            closed_exact: Some(an87n_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "an87np",
            summary: "box-shaped A-type 8phi7 sum with a determinant kernel",
            n_fixed: None,
            region: RegionKind::Box("m"),
            schema: SCHEMA_AN87NP,
            terminating: true,
            summand: an87np_summand,
            closed_exact: Some(an87np_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "an65nt-new",
            summary: "A-type nonterminating 6phi5 sum with a determinant kernel",
            n_fixed: None,
            region: RegionKind::Infinite,
            schema: SCHEMA_AN65NT,
            terminating: false,
            summand: an65nt_summand,
            closed_exact: None,
            closed_numeric: Some(an65nt_closed),
            series_arg: Some(an65nt_arg),
        },
        IdentitySpec {
            id: "an65n-new",
            summary: "A-type terminating 6phi5 sum with a determinant kernel",
            n_fixed: None,
            region: RegionKind::Simplex("M"),
            schema: SCHEMA_AN65N,
            terminating: true,
            summand: an65n_summand,
            closed_exact: Some(an65n_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "cn87n-conjecture",
            summary: "conjectured C-type box sum with a determinant kernel",
            n_fixed: None,
            region: RegionKind::Box("m"),
            schema: SCHEMA_CN87N,
            terminating: true,
            summand: cn87n_summand,
            closed_exact: Some(cn87n_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "pieri-specialized",
            summary: "one-column product expansion under principal specialization",
            n_fixed: None,
            region: RegionKind::LastPartSimplex("lambda"),
            schema: SCHEMA_SPECIALIZED,
            terminating: true,
            summand: pieri_specialized_summand,
            closed_exact: Some(pieri_specialized_closed),
            closed_numeric: None,
            series_arg: None,
        },
        IdentitySpec {
            id: "recursion-specialized",
            summary: "row recursion under principal specialization, determinant form",
            n_fixed: None,
            region: RegionKind::LastPartSimplex("lambda"),
            schema: SCHEMA_SPECIALIZED,
            terminating: true,
            summand: recursion_specialized_summand,
            closed_exact: Some(recursion_specialized_closed),
            closed_numeric: None,
            series_arg: None,
        },
    ]
}

/// All registered identities, in registration order.
pub fn registry() -> &'static [IdentitySpec] {
    static TABLE: OnceLock<Vec<IdentitySpec>> = OnceLock::new();
    TABLE.get_or_init(registry_build)
}

/// Look an identity up by its id string.
pub fn find(id: &str) -> QResult<&'static IdentitySpec> {
    registry()
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| QError::Domain(format!("unknown identity {id}")))
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

fn inf_product_quotient(num: &[Rat], den: &[Rat], q: &Rat, prec: usize) -> QResult<Cx> {
    let mut acc = Cx::one_p(prec);
    for b in num {
        acc = acc.mul_ref(&poch_inf(&Cx::from_rat(b, prec), q, prec)?);
    }
    for b in den {
        acc = acc.div_ref(&poch_inf(&Cx::from_rat(b, prec), q, prec)?)?;
    }
    Ok(acc)
}

/// Exact evaluation of a terminating identity: the full sum over the finite
/// region and the exact closed form.
pub fn eval_terminating(spec: &IdentitySpec, p: &Params) -> QResult<(Rat, Rat)> {
    if !spec.terminating {
        return Err(QError::Domain(format!(
            "identity {} does not terminate",
            spec.id
        )));
    }
    let closed = spec
        .closed_exact
        .ok_or_else(|| QError::Domain(format!("identity {} has no exact closed form", spec.id)))?;
    let mut lhs = Rat::zero();
    for ks in region_indices(spec.region, p)? {
        lhs += (spec.summand)(p, &ks)?;
    }
    Ok((lhs, closed(p)?))
}

/// Result of a truncated evaluation of a nonterminating identity.
#[derive(Clone, Debug)]
pub struct NumericEval {
    /// exact partial sum of all evaluated shells
    pub partial: Rat,
    /// the partial sum as a complex value at the working precision
    pub lhs: Cx,
    /// the closed-form product quotient at the working precision
    pub rhs: Cx,
    /// geometric estimate for the dropped tail
    pub tail: Rat,
    /// total degree of the last evaluated shell
    pub shells_used: i64,
}

/// Shell-by-shell evaluation of a nonterminating identity.  The partial sum
/// stays exact; truncation stops after `quiet_shells` consecutive shells
/// below the target, and the tail is bounded by a geometric extrapolation
/// driven by the series argument.
pub fn eval_nonterminating(
    spec: &IdentitySpec,
    p: &Params,
    policy: &TruncationPolicy,
    prec: usize,
) -> QResult<NumericEval> {
    if spec.terminating {
        return Err(QError::Domain(format!(
            "identity {} terminates; evaluate it exactly",
            spec.id
        )));
    }
    policy.validate()?;
    let closed = spec.closed_numeric.ok_or_else(|| {
        QError::Domain(format!("identity {} has no numeric closed form", spec.id))
    })?;
    let arg = spec
        .series_arg
        .ok_or_else(|| QError::Domain(format!("identity {} has no series argument", spec.id)))?(
        p,
    )?;
    if arg.abs() >= Rat::one() {
        return Err(QError::Convergence(format!(
            "series argument {arg} is not inside the unit disc"
        )));
    }
    let mut partial = Rat::zero();
    let mut quiet = 0usize;
    let mut prev_abs = Rat::zero();
    let mut last_abs = Rat::zero();
    let mut stopped_at: Option<i64> = None;
    for s in 0..=policy.shell_cap {
        let mut shell = Rat::zero();
        for t in tuples_with_sum(p.n, s as u32) {
            let ks: Vec<i64> = t.into_iter().map(|v| v as i64).collect();
            shell += (spec.summand)(p, &ks)?;
        }
        partial += shell.clone();
        prev_abs = std::mem::replace(&mut last_abs, shell.abs());
        let mut scale = partial.abs();
        if scale < Rat::one() {
            scale = Rat::one();
        }
        if last_abs <= policy.target.clone() * scale {
            quiet += 1;
            if quiet >= policy.quiet_shells && s >= 1 {
                stopped_at = Some(s);
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let Some(shells_used) = stopped_at else {
        return Err(QError::Convergence(format!(
            "no {} quiet shells within total degree {}",
            policy.quiet_shells, policy.shell_cap
        )));
    };
    // geometric tail bound: base times rho/(1-rho) with rho between the
    // observed shell ratio and the series argument, capped below one
    let tail = {
        let base = if prev_abs > last_abs {
            prev_abs.clone()
        } else {
            last_abs.clone()
        };
        if base.is_zero() {
            Rat::zero()
        } else {
            let mut rho = (Rat::one() + arg.abs()) / Rat::new(2.into(), 1.into());
            if !prev_abs.is_zero() {
                let observed = last_abs.clone() / prev_abs.clone();
                if observed > rho {
                    rho = observed;
                }
            }
            let cap = Rat::new(9.into(), 10.into());
            if rho > cap {
                rho = cap;
            }
            base * rho.clone() / (Rat::one() - rho)
        }
    };
    Ok(NumericEval {
        lhs: Cx::from_rat(&partial, prec),
        rhs: closed(p, prec)?,
        partial,
        tail,
        shells_used,
    })
}

// ---------------------------------------------------------------------------
// randomized verification
// ---------------------------------------------------------------------------

/// Size prescription for the integer bounds of a draw.
#[derive(Clone, Debug)]
pub enum SizeSpec {
    /// each bound drawn uniformly from `0..=cap`
    Cap(i64),
    /// bounds fixed to the given values
    Exact(Vec<i64>),
}

/// Outcome of a single verified draw.
#[derive(Clone, Debug, PartialEq)]
pub enum DrawOutcome {
    ExactPass {
        value: String,
    },
    ExactFail {
        lhs: String,
        rhs: String,
    },
    NumericPass {
        lhs: String,
        rhs: String,
        rel_err: String,
        shells: i64,
    },
    NumericFail {
        lhs: String,
        rhs: String,
        rel_err: String,
        tail: String,
        shells: i64,
    },
    Failed {
        error: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrawRecord {
    pub index: u64,
    pub retries: u32,
    pub params: Vec<(String, String)>,
    pub outcome: DrawOutcome,
}

/// Report of a randomized identity check: one record per draw, and a global
/// verdict that holds only if every draw agrees.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub id: String,
    pub n: usize,
    pub seed: u64,
    pub draws: u64,
    pub passed: u64,
    pub pass: bool,
    pub records: Vec<DrawRecord>,
}

const DRAW_RETRIES: u32 = 200;
const CHECK_PRECISION: usize = 192;

fn max_series_arg() -> Rat {
    Rat::new(1.into(), 2.into())
}

fn draw_distinct_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rat> {
    let mut v: Vec<Rat> = Vec::with_capacity(n);
    while v.len() < n {
        let c = draws::small_ratio_nonunit(rng);
        if !v.contains(&c) {
            v.push(c);
        }
    }
    v
}

/// One admissible parameter point for an identity schema.  Bounds follow the
/// size prescription; scalars and vectors are small random rationals, with
/// the base and a companion scalar `t` drawn jointly generic for schemas
/// carrying a partition bound.  Draws whose series argument is too large for
/// comfortable truncation are rejected with a `Degenerate` error.
pub fn draw_params(
    spec: &IdentitySpec,
    rng: &mut ChaCha8Rng,
    n: usize,
    sizes: &SizeSpec,
) -> QResult<Params> {
    let mut p = Params::new(n, Rat::zero());
    let mut lambda: Option<Vec<i64>> = None;
    for s in spec.schema {
        match s.kind {
            ParamKind::Bound => {
                let v = match sizes {
                    SizeSpec::Cap(c) => {
                        if *c < 0 {
                            return Err(QError::Domain(format!("negative size cap {c}")));
                        }
                        rng.gen_range(0..=*c)
                    }
                    SizeSpec::Exact(v) => {
                        if v.len() != 1 {
                            return Err(QError::Length(
                                "exact sizes must hold a single bound".into(),
                            ));
                        }
                        v[0]
                    }
                };
                p = p.with_bound(s.name, v);
            }
            ParamKind::BoundVector => {
                let v = match sizes {
                    SizeSpec::Cap(c) => {
                        if *c < 0 {
                            return Err(QError::Domain(format!("negative size cap {c}")));
                        }
                        (0..n).map(|_| rng.gen_range(0..=*c)).collect()
                    }
                    SizeSpec::Exact(v) => {
                        if v.len() != n {
                            return Err(QError::Length(format!(
                                "exact sizes hold {} bounds, expected {n}",
                                v.len()
                            )));
                        }
                        v.clone()
                    }
                };
                p = p.with_bound_list(s.name, v);
            }
            ParamKind::PartitionBound => {
                let v: Vec<i64> = match sizes {
                    SizeSpec::Cap(c) => {
                        if *c < 0 {
                            return Err(QError::Domain(format!("negative size cap {c}")));
                        }
                        let mut v: Vec<i64> =
                            (0..=n).map(|_| rng.gen_range(0..=*c)).collect();
                        v.sort_unstable_by(|a, b| b.cmp(a));
                        v
                    }
                    SizeSpec::Exact(v) => {
                        if v.len() != n + 1 {
                            return Err(QError::Length(format!(
                                "exact sizes hold {} parts, expected {}",
                                v.len(),
                                n + 1
                            )));
                        }
                        if v.windows(2).any(|w| w[0] < w[1]) || v.iter().any(|&x| x < 0) {
                            return Err(QError::Domain(format!(
                                "sizes {v:?} are not a weakly decreasing nonnegative list"
                            )));
                        }
                        v.clone()
                    }
                };
                lambda = Some(v.clone());
                p = p.with_bound_list(s.name, v);
            }
            _ => {}
        }
    }
    if let Some(lam) = &lambda {
        let qw = 2 * (lam[0] + 2 * lam[n]) + 4;
        let tw = 2 * (n as i64) + 4;
        let pt = draws::qt_generic(rng, qw, tw);
        p.q = pt.q;
        p.scalars.insert("t".to_string(), pt.t);
    } else if spec.terminating {
        p.q = draws::small_ratio_nonunit(rng);
    } else {
        p.q = draws::q_in_unit(rng);
    }
    for s in spec.schema {
        match s.kind {
            ParamKind::Scalar => {
                if !p.scalars.contains_key(s.name) {
                    let v = draws::small_ratio_nonunit(rng);
                    p.scalars.insert(s.name.to_string(), v);
                }
            }
            ParamKind::Vector => {
                let v = draw_distinct_vector(rng, n);
                p.vectors.insert(s.name.to_string(), v);
            }
            _ => {}
        }
    }
    if let Some(arg_fn) = spec.series_arg {
        let arg = arg_fn(&p)?;
        if arg.abs() > max_series_arg() {
            return Err(QError::Degenerate(format!(
                "series argument {arg} is too large for quick truncation"
            )));
        }
    }
    Ok(p)
}

fn retryable(e: &QError) -> bool {
    matches!(e, QError::Pole(_) | QError::Degenerate(_) | QError::Singular(_))
}

fn run_draw(
    spec: &IdentitySpec,
    p: &Params,
    policy: &TruncationPolicy,
    prec: usize,
) -> QResult<DrawOutcome> {
    if spec.terminating {
        let (lhs, rhs) = eval_terminating(spec, p)?;
        if lhs == rhs {
            Ok(DrawOutcome::ExactPass {
                value: rat_str(&lhs),
            })
        } else {
            Ok(DrawOutcome::ExactFail {
                lhs: rat_str(&lhs),
                rhs: rat_str(&rhs),
            })
        }
    } else {
        let ev = eval_nonterminating(spec, p, policy, prec)?;
        let re = rel_err(&ev.lhs, &ev.rhs);
        let diff = ev.lhs.sub_ref(&ev.rhs).abs_val();
        let target_ok = bf_le(&re, &rat_to_bf(&policy.target, prec));
        let ten = Rat::new(10.into(), 1.into());
        let tail_ok = bf_le(&diff, &rat_to_bf(&(ev.tail.clone() * ten), prec));
        if target_ok || tail_ok {
            Ok(DrawOutcome::NumericPass {
                lhs: format!("{}", ev.lhs),
                rhs: format!("{}", ev.rhs),
                rel_err: format!("{re}"),
                shells: ev.shells_used,
            })
        } else {
            Ok(DrawOutcome::NumericFail {
                lhs: format!("{}", ev.lhs),
                rhs: format!("{}", ev.rhs),
                rel_err: format!("{re}"),
                tail: ev.tail.to_string(),
                shells: ev.shells_used,
            })
        }
    }
}

/// Randomized verification of a registered identity: `draws` independent
/// parameter draws from substreams of `seed`, each checked exactly or within
/// the truncation policy.  Degenerate draws are redrawn a bounded number of
/// times; anything else is recorded, never thrown.
pub fn check_identity(
    id: &str,
    n: usize,
    sizes: &SizeSpec,
    draws_count: u64,
    seed: u64,
    policy: Option<&TruncationPolicy>,
) -> QResult<IdentityCheck> {
    let spec = find(id)?;
    if let Some(nf) = spec.n_fixed {
        if n != nf {
            return Err(QError::Domain(format!(
                "identity {id} is defined for n = {nf}, not n = {n}"
            )));
        }
    }
    if n == 0 {
        return Err(QError::Domain("dimension must be positive".into()));
    }
    let default_policy = TruncationPolicy::default();
    let policy = policy.unwrap_or(&default_policy);
    policy.validate()?;
    let mut records = Vec::with_capacity(draws_count as usize);
    let mut passed = 0u64;
    for d in 0..draws_count {
        let mut rng = draws::substream(seed, d);
        let mut retries = 0u32;
        let (params, outcome) = loop {
            match draw_params(spec, &mut rng, n, sizes) {
                Ok(p) => match run_draw(spec, &p, policy) {
                    Ok(o) => break (p.display_entries(), o),
                    Err(e) if retryable(&e) && retries < DRAW_RETRIES => {
                        retries += 1;
                    }
                    Err(e) => {
                        break (
                            p.display_entries(),
                            DrawOutcome::Failed {
                                error: e.to_string(),
                            },
                        )
                    }
                },
                Err(e) if retryable(&e) && retries < DRAW_RETRIES => {
                    retries += 1;
                }
                Err(e) => {
                    break (
                        Vec::new(),
                        DrawOutcome::Failed {
                            error: e.to_string(),
                        },
                    )
                }
            }
        };
        if matches!(
            outcome,
            DrawOutcome::ExactPass { .. } | DrawOutcome::NumericPass { .. }
        ) {
            passed += 1;
        }
        records.push(DrawRecord {
            index: d,
            retries,
            params,
            outcome,
        });
    }
    Ok(IdentityCheck {
        id: id.to_string(),
        n,
        seed,
        draws: draws_count,
        passed,
        pass: passed == draws_count,
        records,
    })
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macdrec::{pieri_expand, recursion_coeff, standard_us};
    use crate::partitions::Partition;
    use crate::symfun::epsilon_value_q;

    fn quick_policy() -> TruncationPolicy {
        TruncationPolicy {
            target: rat_pow10_neg(14),
            quiet_shells: 3,
            shell_cap: 220,
        }
    }

    fn assert_check(id: &str, n: usize, sizes: SizeSpec, draws_count: u64, seed: u64) {
        let rep = check_identity(id, n, &sizes, draws_count, seed, Some(&quick_policy()))
            .unwrap_or_else(|e| panic!("{id} n={n}: {e}"));
        assert!(rep.pass, "{id} n={n}: {:#?}", rep.records);
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    // ---- registry ---------------------------------------------------------

    #[test]
    fn registry_is_complete_and_consistent() {
        let table = registry();
        assert_eq!(table.len(), 19);
        let mut ids: Vec<&str> = table.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 19, "duplicate identity ids");
        for s in table {
            assert_eq!(
                s.terminating,
                s.closed_exact.is_some(),
                "{}: terminating identities carry exact closed forms",
                s.id
            );
            assert_eq!(
                !s.terminating,
                s.closed_numeric.is_some() && s.series_arg.is_some(),
                "{}: nonterminating identities carry products and arguments",
                s.id
            );
            assert_eq!(
                s.terminating,
                s.region != RegionKind::Infinite,
                "{}: region shape matches termination",
                s.id
            );
        }
        assert!(find("no-such-identity").is_err());
    }

    // ---- classical series -------------------------------------------------

    #[test]
    fn classical_terminating_summations_hold_exactly() {
        assert_check("6phi5-term", 1, SizeSpec::Cap(5), 6, 11);
        assert_check("8phi7-jackson", 1, SizeSpec::Cap(5), 6, 12);
    }

    #[test]
    fn fundamental_shell_summation_holds_exactly() {
        for n in 1..=3 {
            assert_check("milne-fundamental", n, SizeSpec::Cap(4), 4, 13 + n as u64);
        }
    }

    #[test]
    fn a_type_terminating_summations_hold_exactly() {
        assert_check("an65", 1, SizeSpec::Cap(4), 4, 21);
        assert_check("an65", 2, SizeSpec::Cap(3), 4, 22);
        assert_check("an65", 3, SizeSpec::Cap(2), 3, 23);
        assert_check("an87", 1, SizeSpec::Cap(4), 4, 24);
        assert_check("an87", 2, SizeSpec::Cap(3), 4, 25);
        assert_check("an87", 3, SizeSpec::Cap(2), 3, 26);
    }

    #[test]
    fn c_type_terminating_summation_holds_exactly() {
        assert_check("cn87", 1, SizeSpec::Cap(3), 4, 31);
        assert_check("cn87", 2, SizeSpec::Cap(2), 4, 32);
        assert_check("cn87", 3, SizeSpec::Cap(1), 3, 33);
    }

    // ---- determinant kernels ----------------------------------------------

    #[test]
    fn determinant_kernel_terminating_summations_hold_exactly() {
        assert_check("an87n", 1, SizeSpec::Cap(3), 4, 41);
        assert_check("an87n", 2, SizeSpec::Cap(2), 4, 42);
        assert_check("an87n", 3, SizeSpec::Cap(1), 2, 43);
        assert_check("an65n-new", 1, SizeSpec::Cap(3), 4, 44);
        assert_check("an65n-new", 2, SizeSpec::Cap(2), 4, 45);
        assert_check("an65n-new", 3, SizeSpec::Cap(1), 2, 46);
    }

    #[test]
    fn box_shaped_determinant_summation_holds_exactly() {
        assert_check("an87np", 1, SizeSpec::Exact(vec![3]), 4, 51);
        assert_check("an87np", 2, SizeSpec::Cap(2), 4, 52);
        assert_check("an87np", 2, SizeSpec::Exact(vec![2, 1]), 3, 53);
        assert_check("an87np", 3, SizeSpec::Exact(vec![1, 1, 1]), 2, 54);
    }

    #[test]
    fn conjectured_c_type_determinant_summation_holds_exactly() {
        assert_check("cn87n-conjecture", 1, SizeSpec::Exact(vec![3]), 4, 61);
        assert_check("cn87n-conjecture", 2, SizeSpec::Exact(vec![1, 1]), 3, 62);
        assert_check("cn87n-conjecture", 2, SizeSpec::Exact(vec![2, 1]), 3, 63);
        assert_check("cn87n-conjecture", 2, SizeSpec::Exact(vec![2, 2]), 3, 64);
        assert_check("cn87n-conjecture", 3, SizeSpec::Exact(vec![1, 1, 1]), 2, 65);
    }

    // ---- nonterminating series --------------------------------------------

    #[test]
    fn nonterminating_series_match_their_products() {
        assert_check("q-binomial", 1, SizeSpec::Cap(0), 3, 71);
        assert_check("q-gauss", 1, SizeSpec::Cap(0), 3, 72);
        assert_check("6phi5-nonterm", 1, SizeSpec::Cap(0), 3, 73);
        assert_check("an-qbinomial", 2, SizeSpec::Cap(0), 2, 74);
        assert_check("annt21", 2, SizeSpec::Cap(0), 2, 75);
    }

    #[test]
    fn nonterminating_well_poised_series_match_their_products() {
        assert_check("annt65", 2, SizeSpec::Cap(0), 2, 76);
        assert_check("an65nt-new", 2, SizeSpec::Cap(0), 2, 77);
    }

    // ---- degenerations ------------------------------------------------------

    #[test]
    fn nonterminating_six_five_terminates_termwise() {
        let spec_nt = find("6phi5-nonterm").unwrap();
        let spec_t = find("6phi5-term").unwrap();
        let big_m = 3i64;
        let q = rat(1, 3);
        let p_t = Params::new(1, q.clone())
            .with_scalar("a", rat(2, 5))
            .with_scalar("b", rat(-3, 2))
            .with_scalar("c", rat(5, 7))
            .with_bound("M", big_m);
        let p_nt = Params::new(1, q.clone())
            .with_scalar("a", rat(2, 5))
            .with_scalar("b", rat(-3, 2))
            .with_scalar("c", rat(5, 7))
            .with_scalar("d", q.powi(-big_m).unwrap());
        for k in 0..=big_m {
            assert_eq!(
                (spec_nt.summand)(&p_nt, &[k]).unwrap(),
                (spec_t.summand)(&p_t, &[k]).unwrap(),
                "term {k}"
            );
        }
        for k in (big_m + 1)..=(big_m + 3) {
            assert!((spec_nt.summand)(&p_nt, &[k]).unwrap().is_zero());
        }
    }

    #[test]
    fn nonterminating_a_type_six_five_terminates_termwise() {
        let spec_nt = find("annt65").unwrap();
        let spec_t = find("an65").unwrap();
        let big_m = 2i64;
        let q = rat(1, 4);
        let us = vec![rat(2, 3), rat(-5, 4)];
        let cs = vec![rat(3, 7), rat(7, 5)];
        let base = Params::new(2, q.clone())
            .with_scalar("a", rat(3, 8))
            .with_scalar("b", rat(-4, 3))
            .with_vector("c", cs.clone())
            .with_vector("u", us.clone());
        let p_t = base.clone().with_bound("M", big_m);
        let p_nt = base.with_scalar("d", q.powi(-big_m).unwrap());
        for ks in region_indices(RegionKind::Simplex("M"), &p_t).unwrap() {
            assert_eq!(
                (spec_nt.summand)(&p_nt, &ks).unwrap(),
                (spec_t.summand)(&p_t, &ks).unwrap(),
                "term {ks:?}"
            );
        }
        for ks in [[3, 0], [0, 3], [2, 1], [1, 3]] {
            assert!((spec_nt.summand)(&p_nt, &ks).unwrap().is_zero());
        }
    }

    #[test]
    fn nonterminating_determinant_six_five_terminates_termwise() {
        let spec_nt = find("an65nt-new").unwrap();
        let spec_t = find("an65n-new").unwrap();
        let big_m = 2i64;
        let q = rat(1, 5);
        let base = Params::new(2, q.clone())
            .with_scalar("t0", rat(2, 7))
            .with_vector("t", vec![rat(3, 4), rat(-2, 5)])
            .with_scalar("b", rat(5, 3))
            .with_vector("u", vec![rat(1, 2), rat(-3, 7)]);
        let p_t = base.clone().with_bound("M", big_m);
        let p_nt = base.with_scalar("d", q.powi(-big_m).unwrap());
        for ks in region_indices(RegionKind::Simplex("M"), &p_t).unwrap() {
            assert_eq!(
                (spec_nt.summand)(&p_nt, &ks).unwrap(),
                (spec_t.summand)(&p_t, &ks).unwrap(),
                "term {ks:?}"
            );
        }
        for ks in [[3, 0], [1, 2], [0, 4]] {
            assert!((spec_nt.summand)(&p_nt, &ks).unwrap().is_zero());
        }
    }

    #[test]
    fn balanced_eight_seven_approaches_its_nonterminating_limit() {
        let spec_j = find("8phi7-jackson").unwrap();
        let spec_nt = find("6phi5-nonterm").unwrap();
        let q = rat(1, 3);
        let p_nt = Params::new(1, q.clone())
            .with_scalar("a", rat(1, 5))
            .with_scalar("b", rat(1, 4))
            .with_scalar("c", rat(1, 7))
            .with_scalar("d", rat(5, 1));
        let policy = TruncationPolicy {
            target: rat_pow10_neg(30),
            quiet_shells: 3,
            shell_cap: 260,
        };
        let limit = eval_nonterminating(spec_nt, &p_nt, &policy, 256).unwrap();
        let mut gaps: Vec<Rat> = Vec::new();
        for big_m in [10i64, 14, 18] {
            let p_j = Params::new(1, q.clone())
                .with_scalar("a", rat(1, 5))
                .with_scalar("b", rat(1, 4))
                .with_scalar("c", rat(1, 7))
                .with_scalar("d", rat(5, 1))
                .with_bound("M", big_m);
            let (lhs, rhs) = eval_terminating(spec_j, &p_j).unwrap();
            assert_eq!(lhs, rhs);
            gaps.push((lhs - limit.partial.clone()).abs());
        }
        assert!(
            gaps[0] > gaps[1] && gaps[1] > gaps[2],
            "gaps fail to shrink: {gaps:?}"
        );
    }

    // ---- one-variable reductions -------------------------------------------

    #[test]
    fn one_variable_reductions_match_the_classical_series() {
        let q = rat(2, 7);
        let big_m = 4i64;
        let (a, b, c1, d, u1) = (rat(3, 5), rat(-7, 4), rat(2, 9), rat(5, 6), rat(3, 2));

        let spec_an65 = find("an65").unwrap();
        let spec_65 = find("6phi5-term").unwrap();
        let p_v = Params::new(1, q.clone())
            .with_scalar("a", a.clone())
            .with_scalar("b", b.clone())
            .with_vector("c", vec![c1.clone()])
            .with_vector("u", vec![u1.clone()])
            .with_bound("M", big_m);
        let p_s = Params::new(1, q.clone())
            .with_scalar("a", a.clone() * u1.clone())
            .with_scalar("b", b.clone() * u1.clone())
            .with_scalar("c", c1.clone())
            .with_bound("M", big_m);
        for k in 0..=big_m {
            assert_eq!(
                (spec_an65.summand)(&p_v, &[k]).unwrap(),
                (spec_65.summand)(&p_s, &[k]).unwrap(),
                "an65 term {k}"
            );
        }

        let spec_an87 = find("an87").unwrap();
        let spec_87 = find("8phi7-jackson").unwrap();
        let p_v = Params::new(1, q.clone())
            .with_scalar("a", a.clone())
            .with_scalar("b", b.clone())
            .with_vector("c", vec![c1.clone()])
            .with_scalar("d", d.clone())
            .with_vector("u", vec![u1.clone()])
            .with_bound("M", big_m);
        let p_s = Params::new(1, q.clone())
            .with_scalar("a", a.clone() * u1.clone())
            .with_scalar("b", b.clone() * u1.clone())
            .with_scalar("c", c1.clone())
            .with_scalar("d", d.clone())
            .with_bound("M", big_m);
        for k in 0..=big_m {
            assert_eq!(
                (spec_an87.summand)(&p_v, &[k]).unwrap(),
                (spec_87.summand)(&p_s, &[k]).unwrap(),
                "an87 term {k}"
            );
        }

        let spec_cn87 = find("cn87").unwrap();
        let p_v = Params::new(1, q.clone())
            .with_scalar("a", a.clone())
            .with_scalar("b", b.clone())
            .with_scalar("c", c1.clone())
            .with_scalar("d", d.clone())
            .with_vector("u", vec![u1.clone()])
            .with_bound_list("m", vec![big_m]);
        let p_s = Params::new(1, q.clone())
            .with_scalar("a", a.clone() * u1.clone() * u1.clone())
            .with_scalar("b", b.clone() * u1.clone())
            .with_scalar("c", c1.clone() * u1.clone())
            .with_scalar("d", d.clone() * u1.clone())
            .with_bound("M", big_m);
        for k in 0..=big_m {
            assert_eq!(
                (spec_cn87.summand)(&p_v, &[k]).unwrap(),
                (spec_87.summand)(&p_s, &[k]).unwrap(),
                "cn87 term {k}"
            );
        }

        let spec_milne = find("milne-fundamental").unwrap();
        let p_v = Params::new(1, q.clone())
            .with_vector("a", vec![a.clone()])
            .with_vector("u", vec![u1])
            .with_bound("M", big_m);
        let lhs = (spec_milne.summand)(&p_v, &[big_m]).unwrap();
        let rhs = poch_quot(&[a], &[q.clone()], &q, big_m).unwrap();
        assert_eq!(lhs, rhs);
    }

    // ---- specialized expansions --------------------------------------------

    #[test]
    fn specialized_expansion_identities_hold_exactly() {
        assert_check("pieri-specialized", 2, SizeSpec::Cap(3), 4, 81);
        assert_check("pieri-specialized", 3, SizeSpec::Cap(2), 3, 82);
        assert_check(
            "pieri-specialized",
            2,
            SizeSpec::Exact(vec![2, 2, 1]),
            3,
            83,
        );
        assert_check("recursion-specialized", 2, SizeSpec::Cap(3), 4, 84);
        assert_check("recursion-specialized", 3, SizeSpec::Cap(2), 3, 85);
        assert_check(
            "recursion-specialized",
            2,
            SizeSpec::Exact(vec![2, 2, 1]),
            3,
            86,
        );
        assert_check(
            "recursion-specialized",
            3,
            SizeSpec::Exact(vec![3, 1, 1, 1]),
            2,
            87,
        );
    }

    #[test]
    fn pieri_specialization_matches_the_terminating_six_five_termwise() {
        let lam = [4i64, 2, 1];
        let n = 2usize;
        let mut rng = draws::substream(97, 0);
        let pt = draws::qt_generic(&mut rng, 24, 8);
        let u = draws::small_ratio_nonunit(&mut rng);
        let last = lam[n];
        let p_b = Params::new(n, pt.q.clone())
            .with_scalar("t", pt.t.clone())
            .with_scalar("u", u.clone())
            .with_bound_list("lambda", lam.to_vec());
        let us: Vec<Rat> = (0..n)
            .map(|i| {
                pt.monomial(lam[i] - last, (n - 1 - i) as i64).unwrap()
            })
            .collect();
        let p_v = Params::new(n, pt.q.clone())
            .with_scalar("a", pt.t.clone())
            .with_scalar(
                "b",
                pt.q.powi(last).unwrap() * u * pt.t.powi(1 - n as i64).unwrap(),
            )
            .with_vector("c", vec![pt.t.clone(); n])
            .with_vector("u", us)
            .with_bound("M", last);
        let spec_b = find("pieri-specialized").unwrap();
        let spec_v = find("an65").unwrap();
        for th in region_indices(spec_b.region, &p_b).unwrap() {
            assert_eq!(
                (spec_b.summand)(&p_b, &th).unwrap(),
                (spec_v.summand)(&p_v, &th).unwrap(),
                "term {th:?}"
            );
        }
        assert_eq!(
            pieri_specialized_closed(&p_b).unwrap(),
            an65_closed(&p_v).unwrap()
        );
    }

    #[test]
    fn recursion_specialization_matches_the_determinant_six_five_termwise() {
        let lam = [5i64, 3, 1];
        let n = 2usize;
        let mut rng = draws::substream(98, 0);
        let pt = draws::qt_generic(&mut rng, 28, 8);
        let u = draws::small_ratio_nonunit(&mut rng);
        let last = lam[n];
        let p_b = Params::new(n, pt.q.clone())
            .with_scalar("t", pt.t.clone())
            .with_scalar("u", u.clone())
            .with_bound_list("lambda", lam.to_vec());
        let us: Vec<Rat> = (0..n)
            .map(|i| {
                pt.monomial(lam[i] - last, (n - 1 - i) as i64).unwrap()
            })
            .collect();
        let p_v = Params::new(n, pt.q.clone())
            .with_scalar("t0", pt.t.clone())
            .with_vector("t", vec![pt.t.clone(); n])
            .with_scalar(
                "b",
                pt.q.powi(last).unwrap() * u * pt.t.powi(1 - n as i64).unwrap(),
            )
            .with_vector("u", us)
            .with_bound("M", last);
        let spec_b = find("recursion-specialized").unwrap();
        let spec_v = find("an65n-new").unwrap();
        for th in region_indices(spec_b.region, &p_b).unwrap() {
            assert_eq!(
                (spec_b.summand)(&p_b, &th).unwrap(),
                (spec_v.summand)(&p_v, &th).unwrap(),
                "term {th:?}"
            );
        }
        assert_eq!(
            recursion_specialized_closed(&p_b).unwrap(),
            an65n_closed(&p_v).unwrap()
        );
    }

    #[test]
    fn specialized_recursion_summand_carries_the_recursion_coefficient() {
        // summand * epsQ(last) * epsQ(inner) = c_theta * epsQ(last - |th|)
        //   * epsQ(inner + th), termwise, including repeated parts
        for lam in [vec![3i64, 1, 0], vec![2, 2, 1], vec![4, 2, 2]] {
            let n = lam.len() - 1;
            let last = lam[n];
            let mut rng = draws::substream(99, last as u64);
            let pt = draws::qt_generic(&mut rng, 24, 10);
            let u = draws::small_ratio_nonunit(&mut rng);
            let p_b = Params::new(n, pt.q.clone())
                .with_scalar("t", pt.t.clone())
                .with_scalar("u", u.clone())
                .with_bound_list("lambda", lam.clone());
            let inner_parts: Vec<u32> = lam[..n].iter().map(|&x| x as u32).collect();
            let inner = Partition::new(&inner_parts).unwrap();
            let us = standard_us(&inner, n, last as u32, &pt).unwrap();
            let full_parts: Vec<u32> = lam.iter().map(|&x| x as u32).collect();
            let full = Partition::new(&full_parts).unwrap();
            let eps_inner = epsilon_value_q(&inner, &pt, &u, n).unwrap();
            let eps_last =
                epsilon_value_q(&Partition::new(&[last as u32]).unwrap(), &pt, &u, 1).unwrap();
            let spec_b = find("recursion-specialized").unwrap();
            let mut chain = Rat::zero();
            for th in region_indices(spec_b.region, &p_b).unwrap() {
                let lhs = (spec_b.summand)(&p_b, &th).unwrap();
                let shifted: Vec<u32> = (0..n)
                    .map(|i| (lam[i] + th[i]) as u32)
                    .collect();
                let Ok(shifted_part) = Partition::new(&shifted) else {
                    assert!(lhs.is_zero(), "nonmonotone shift {th:?} must vanish");
                    continue;
                };
                let tt: i64 = th.iter().sum();
                let th_u: Vec<u32> = th.iter().map(|&x| x as u32).collect();
                let c = recursion_coeff(&th_u, &us, &pt.q, &pt.t).unwrap();
                let eps_shifted = epsilon_value_q(&shifted_part, &pt, &u, n).unwrap();
                let eps_rest = epsilon_value_q(
                    &Partition::new(&[(last - tt) as u32]).unwrap(),
                    &pt,
                    &u,
                    1,
                )
                .unwrap();
                let rhs = c * eps_rest * eps_shifted.clone();
                assert_eq!(
                    lhs.clone() * eps_last.clone() * eps_inner.clone(),
                    rhs.clone(),
                    "term {th:?} of {lam:?}"
                );
                chain += rhs;
            }
            let eps_full = epsilon_value_q(&full, &pt, &u, n + 1).unwrap();
            assert_eq!(
                chain,
                eps_full * eps_last.clone() * eps_inner.clone()
                    / (eps_last * eps_inner),
                "recursion chain for {lam:?}"
            );
        }
    }

    #[test]
    fn specialized_product_expansion_agrees_with_the_expansion_table() {
        // eps is an algebra map: eps(Q_mu) eps(Q_(m)) = sum of coefficients
        // times eps over the expansion of the product
        for (mu_parts, m) in [(vec![2u32, 1], 2u32), (vec![3u32, 1], 3), (vec![2u32, 2], 2)] {
            let mu = Partition::new(&mu_parts).unwrap();
            let n = mu.len();
            let mut rng = draws::substream(101, m as u64);
            let pt = draws::qt_generic_unit(&mut rng, 20, 8);
            let u = draws::small_ratio_nonunit(&mut rng);
            let table = pieri_expand(&mu, m, n, &pt).unwrap();
            let mut rhs = Rat::zero();
            for (nu, coeff) in &table {
                rhs += coeff.clone() * epsilon_value_q(nu, &pt, &u, n + 1).unwrap();
            }
            let lhs = epsilon_value_q(&mu, &pt, &u, n).unwrap()
                * epsilon_value_q(&Partition::new(&[m]).unwrap(), &pt, &u, 1).unwrap();
            assert_eq!(lhs, rhs, "product expansion for {mu_parts:?}, m = {m}");
        }
    }

    // ---- edge behavior ------------------------------------------------------

    #[test]
    fn zero_bounds_give_unit_sums() {
        let mut rng = draws::substream(103, 0);
        for id in [
            "6phi5-term",
            "8phi7-jackson",
            "milne-fundamental",
            "an65",
            "an87",
            "cn87",
            "an87n",
            "an87np",
            "an65n-new",
            "cn87n-conjecture",
            "pieri-specialized",
            "recursion-specialized",
        ] {
            let spec = find(id).unwrap();
            let n = spec.n_fixed.unwrap_or(2);
            let sizes = match spec
                .schema
                .iter()
                .find(|s| {
                    matches!(
                        s.kind,
                        ParamKind::Bound | ParamKind::BoundVector | ParamKind::PartitionBound
                    )
                })
                .map(|s| s.kind)
            {
                Some(ParamKind::BoundVector) => SizeSpec::Exact(vec![0; n]),
                Some(ParamKind::PartitionBound) => SizeSpec::Exact(vec![0; n + 1]),
                _ => SizeSpec::Exact(vec![0]),
            };
            let p = loop {
                match draw_params(spec, &mut rng, n, &sizes) {
                    Ok(p) => break p,
                    Err(e) if retryable(&e) => continue,
                    Err(e) => panic!("{id}: {e}"),
                }
            };
            let (lhs, rhs) = eval_terminating(spec, &p).unwrap();
            assert!(lhs.is_one(), "{id}: empty sum is one");
            assert!(rhs.is_one(), "{id}: empty product is one");
        }
    }

    #[test]
    fn truncation_budget_is_enforced() {
        let spec = find("q-binomial").unwrap();
        let p = Params::new(1, rat(1, 2))
            .with_scalar("a", rat(2, 3))
            .with_scalar("z", rat(1, 2));
        let policy = TruncationPolicy {
            target: rat_pow10_neg(30),
            quiet_shells: 3,
            shell_cap: 4,
        };
        let err = eval_nonterminating(spec, &p, &policy, 128).unwrap_err();
        assert!(matches!(err, QError::Convergence(_)), "got {err}");
    }

    #[test]
    fn seeded_checks_are_reproducible() {
        let a = check_identity("an65", 2, &SizeSpec::Cap(3), 3, 7, None).unwrap();
        let b = check_identity("an65", 2, &SizeSpec::Cap(3), 3, 7, None).unwrap();
        assert_eq!(a, b);
        assert!(a.pass);
    }

    #[test]
    fn conjectured_c_type_sum_reduces_to_the_balanced_sum_termwise() {
        let q = rat(1, 2);
        let (a, b, c, d, u) = (rat(1, 3), rat(2, 1), rat(3, 1), rat(5, 1), rat(1, 7));
        let big_m = 3i64;
        let spec_c = find("cn87n-conjecture").unwrap();
        let spec_j = find("8phi7-jackson").unwrap();
        let p_c = Params::new(1, q.clone())
            .with_scalar("a", a.clone())
            .with_scalar("b", b.clone())
            .with_scalar("c", c.clone())
            .with_scalar("d", d.clone())
            .with_vector("u", vec![u.clone()])
            .with_bound_list("m", vec![big_m]);
        let p_j = Params::new(1, q.clone())
            .with_scalar("a", a.clone() * u.clone() * u.clone())
            .with_scalar("b", b.clone() * u.clone())
            .with_scalar("c", c.clone() * u.clone())
            .with_scalar("d", d.clone() * u.clone())
            .with_bound("M", big_m);
        for k in 0..=big_m {
            assert_eq!(
                (spec_c.summand)(&p_c, &[k]).unwrap(),
                (spec_j.summand)(&p_j, &[k]).unwrap(),
                "term {k}"
            );
        }
        assert_eq!(cn87n_closed(&p_c).unwrap(), jackson_closed(&p_j).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = check_identity("q-gauss", 2, &SizeSpec::Cap(0), 1, 1, None).unwrap_err();
        assert!(matches!(err, QError::Domain(_)));
    }
}
