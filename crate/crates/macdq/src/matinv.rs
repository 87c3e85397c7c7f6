//! Multidimensional inverse pairs of infinite lower-triangular matrices.
//!
//! A matrix F = (f_mk) indexed by multi-integers m, k in Z^n is
//! lower-triangular when f_mk = 0 unless m >= k componentwise. With
//! nonzero diagonal it has a unique lower-triangular inverse G, fixed by
//!
//! ```text
//! sum_(m >= k >= l) f_mk g_kl = delta_ml.
//! ```
//!
//! This module provides explicit mutually inverse pairs:
//!
//! * `general_f` / `general_g` - entries built from arbitrary sequences
//!   a_i(y), c_i(y) and an auxiliary parameter b, with an n x n
//!   determinant inside f
//! * `folded_general_f` / `folded_general_g` - the variant whose entries
//!   are invariant under x -> b/x applied to the sequences
//! * `qshifted_f` / `qshifted_g` - the geometric specialization
//!   c_i(y) = u_i q^y, a_i(y) = u_i q^y / t_i, written in q-shifted
//!   factorials
//! * `folded_qshifted_f` / `folded_qshifted_g` - the geometric
//!   specialization of the folded pair, invariant under
//!   u_i q^y -> q^(-y)/(a u_i)
//! * `onedim_f` / `onedim_g` and the b -> infinity limit
//!   `onedim_limit_f` / `onedim_limit_g` - the classical one-dimensional
//!   pairs the others generalize
//!
//! plus drivers that check orthogonality on finite boxes and run the
//! associated inverse relations. All entries vanish outside the cone
//! m >= k by definition.

use num::{One, Zero};

use crate::error::{QError, QResult};
use crate::partitions::tuples_in_box;
use crate::qkernel::poch_int;
use crate::scalar::{determinant, Rat, Scalar};

/// componentwise m >= k
pub fn cone_ge(m: &[i64], k: &[i64]) -> bool {
    m.iter().zip(k).all(|(a, b)| a >= b)
}

fn check_dims(a: &[i64], b: &[i64]) -> QResult<()> {
    if a.len() != b.len() || a.is_empty() {
        return Err(QError::Length("index dimension mismatch".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// arbitrary-sequence pairs
// ---------------------------------------------------------------------------

/// F entry of the general pair: with C = prod_s c_s(k_s),
///
/// ```text
/// f_mk = prod_i c_i(k_i)^(-1) prod_(i<j) (c_i(k_i) - c_j(k_j))^(-1)
///   * det[ c_i(m_i)^(n+1-j)
///          - a_i(m_i)^(n+1-j) (c_i(m_i) - b/C)/(a_i(m_i) - b/C)
///            prod_s (c_i(m_i) - c_s(k_s))/(a_i(m_i) - c_s(k_s)) ]
///   * prod_i prod_(y=k_i+1..m_i) [ (a_i(y) - b/C)/(c_i(y) - b/C)
///            prod_j (a_i(y) - c_j(k_j))/(c_i(y) - c_j(k_j)) ].
/// ```
///
/// Sequence closures take the zero-based row index i and the integer
/// argument y.
pub fn general_f(
    m: &[i64],
    k: &[i64],
    b: &Rat,
    a: &impl Fn(usize, i64) -> Rat,
    c: &impl Fn(usize, i64) -> Rat,
) -> QResult<Rat> {
    check_dims(m, k)?;
    if !cone_ge(m, k) {
        return Ok(Rat::zero());
    }
    let n = m.len();
    let ck: Vec<Rat> = (0..n).map(|i| c(i, k[i])).collect();
    let mut cap = Rat::one();
    for v in &ck {
        cap *= v;
    }
    let bc = b.div_checked(&cap)?;
    let mut acc = Rat::one();
    for i in 0..n {
        acc = acc.div_checked(&ck[i])?;
        for j in (i + 1)..n {
            acc = acc.div_checked(&(&ck[i] - &ck[j]))?;
        }
    }
    let mut mat: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        let cm = c(i, m[i]);
        let am = a(i, m[i]);
        let mut corr = (&cm - &bc).div_checked(&(&am - &bc))?;
        for s in 0..n {
            corr = corr * (&cm - &ck[s]).div_checked(&(&am - &ck[s]))?;
        }
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let e = (n - j) as i64;
            row.push(cm.powi(e)? - am.powi(e)? * &corr);
        }
        mat.push(row);
    }
    acc = acc * determinant(&mat)?;
    for i in 0..n {
        for y in (k[i] + 1)..=m[i] {
            let ay = a(i, y);
            let cy = c(i, y);
            acc = acc * (&ay - &bc).div_checked(&(&cy - &bc))?;
            for j in 0..n {
                acc = acc * (&ay - &ck[j]).div_checked(&(&cy - &ck[j]))?;
            }
        }
    }
    Ok(acc)
}

/// G entry of the general pair: with C = prod_s c_s(k_s),
///
/// ```text
/// g_kl = prod_i prod_(y=l_i+1..k_i) [ (a_i(y) - b/C) prod_j (a_i(y) - c_j(k_j)) ]
///               / prod_(y=l_i..k_i-1) [ (c_i(y) - b/C) prod_j (c_i(y) - c_j(k_j)) ].
/// ```
pub fn general_g(
    k: &[i64],
    l: &[i64],
    b: &Rat,
    a: &impl Fn(usize, i64) -> Rat,
    c: &impl Fn(usize, i64) -> Rat,
) -> QResult<Rat> {
    check_dims(k, l)?;
    if !cone_ge(k, l) {
        return Ok(Rat::zero());
    }
    let n = k.len();
    let ck: Vec<Rat> = (0..n).map(|i| c(i, k[i])).collect();
    let mut cap = Rat::one();
    for v in &ck {
        cap *= v;
    }
    let bc = b.div_checked(&cap)?;
    let mut acc = Rat::one();
    for i in 0..n {
        for y in (l[i] + 1)..=k[i] {
            let ay = a(i, y);
            acc = acc * (&ay - &bc);
            for j in 0..n {
                acc = acc * (&ay - &ck[j]);
            }
        }
        for y in l[i]..=(k[i] - 1) {
            let cy = c(i, y);
            acc = acc.div_checked(&(&cy - &bc))?;
            for j in 0..n {
                acc = acc.div_checked(&(&cy - &ck[j]))?;
            }
        }
    }
    Ok(acc)
}

/// F entry of the folded pair, whose building blocks are x + b/x:
///
/// ```text
/// f_mk = prod_i [ c_i(m_i)^n / c_i(k_i)^n ] (c_i(k_i) + b/c_i(k_i))^(-1)
///   * prod_(i<j) [ (1 - b/(c_i(k_i) c_j(k_j))) (c_i(k_i) - c_j(k_j)) ]^(-1)
///   * det[ (c_i(m_i) + b/c_i(m_i))^(n+1-j) - (a_i(m_i) + b/a_i(m_i))^(n+1-j)
///          prod_s ((1 - b/(c_i(m_i) c_s(k_s))) (c_i(m_i) - c_s(k_s)))
///               / ((1 - b/(a_i(m_i) c_s(k_s))) (a_i(m_i) - c_s(k_s))) ]
///   * prod_(i,j) prod_(y=k_i+1..m_i)
///          ((a_i(y) - b/c_j(k_j)) (a_i(y) - c_j(k_j)))
///        / ((c_i(y) - b/c_j(k_j)) (c_i(y) - c_j(k_j))).
/// ```
pub fn folded_general_f(
    m: &[i64],
    k: &[i64],
    b: &Rat,
    a: &impl Fn(usize, i64) -> Rat,
    c: &impl Fn(usize, i64) -> Rat,
) -> QResult<Rat> {
    check_dims(m, k)?;
    if !cone_ge(m, k) {
        return Ok(Rat::zero());
    }
    let n = m.len();
    let ck: Vec<Rat> = (0..n).map(|i| c(i, k[i])).collect();
    let one = Rat::one();
    let mut acc = Rat::one();
    for i in 0..n {
        let cm = c(i, m[i]);
        acc = acc * cm.powi(n as i64)?.div_checked(&ck[i].powi(n as i64)?)?;
        acc = acc.div_checked(&(&ck[i] + b.div_checked(&ck[i])?))?;
        for j in (i + 1)..n {
            let fold = &one - b.div_checked(&(&ck[i] * &ck[j]))?;
            acc = acc.div_checked(&(fold * (&ck[i] - &ck[j])))?;
        }
    }
    let mut mat: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        let cm = c(i, m[i]);
        let am = a(i, m[i]);
        let cfold = &cm + b.div_checked(&cm)?;
        let afold = &am + b.div_checked(&am)?;
        let mut corr = Rat::one();
        for s in 0..n {
            let num = (&one - b.div_checked(&(&cm * &ck[s]))?) * (&cm - &ck[s]);
            let den = (&one - b.div_checked(&(&am * &ck[s]))?) * (&am - &ck[s]);
            corr = corr * num.div_checked(&den)?;
        }
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let e = (n - j) as i64;
            row.push(cfold.powi(e)? - afold.powi(e)? * &corr);
        }
        mat.push(row);
    }
    acc = acc * determinant(&mat)?;
    for i in 0..n {
        for y in (k[i] + 1)..=m[i] {
            let ay = a(i, y);
            let cy = c(i, y);
            for j in 0..n {
                let num = (&ay - b.div_checked(&ck[j])?) * (&ay - &ck[j]);
                let den = (&cy - b.div_checked(&ck[j])?) * (&cy - &ck[j]);
                acc = acc * num.div_checked(&den)?;
            }
        }
    }
    Ok(acc)
}

/// G entry of the folded pair:
///
/// ```text
/// g_kl = prod_(i,j) prod_(y=l_i+1..k_i) [ (a_i(y) - b/c_j(k_j)) (a_i(y) - c_j(k_j)) ]
///               / prod_(y=l_i..k_i-1) [ (c_i(y) - b/c_j(k_j)) (c_i(y) - c_j(k_j)) ].
/// ```
pub fn folded_general_g(
    k: &[i64],
    l: &[i64],
    b: &Rat,
    a: &impl Fn(usize, i64) -> Rat,
    c: &impl Fn(usize, i64) -> Rat,
) -> QResult<Rat> {
    check_dims(k, l)?;
    if !cone_ge(k, l) {
        return Ok(Rat::zero());
    }
    let n = k.len();
    let ck: Vec<Rat> = (0..n).map(|i| c(i, k[i])).collect();
    let mut acc = Rat::one();
    for i in 0..n {
        for j in 0..n {
            for y in (l[i] + 1)..=k[i] {
                let ay = a(i, y);
                acc = acc * (&ay - b.div_checked(&ck[j])?) * (&ay - &ck[j]);
            }
            for y in l[i]..=(k[i] - 1) {
                let cy = c(i, y);
                acc = acc
                    .div_checked(&(&cy - b.div_checked(&ck[j])?))?
                    .div_checked(&(&cy - &ck[j]))?;
            }
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// q-shifted pairs
// ---------------------------------------------------------------------------

/// Parameters of the q-shifted pairs: the base q, the deformation
/// parameters t_0, t_1, ..., t_n, and the grid offsets u_1, ..., u_n.
#[derive(Clone, Debug)]
pub struct QShiftedParams {
    pub q: Rat,
    pub ts: Vec<Rat>,
    pub us: Vec<Rat>,
}

impl QShiftedParams {
    pub fn new(q: Rat, ts: Vec<Rat>, us: Vec<Rat>) -> QResult<Self> {
        if ts.len() != us.len() + 1 {
            return Err(QError::Length(
                "need one more deformation parameter than grid offsets".into(),
            ));
        }
        Ok(QShiftedParams { q, ts, us })
    }

    pub fn dim(&self) -> usize {
        self.us.len()
    }

    /// t_i with the display's one-based numbering, so `t(0)` is t_0.
    fn t(&self, i: usize) -> &Rat {
        &self.ts[i]
    }

    fn u(&self, i: usize) -> &Rat {
        &self.us[i - 1]
    }
}

/// F entry of the q-shifted pair:
///
/// ```text
/// f_mk = q^((n-1)(|k|-|m|)) prod_i t_i^(n(m_i-k_i))
///   * prod_(i<j) (u_i q^(k_i) - u_j q^(k_j))^(-1)
///   * det[ (u_i q^(m_i))^(n-j) (1 - t_i^(j-n-1)
///            (1 - t_0 u_i q^(m_i+|k|)) / (1 - t_0 u_i q^(m_i+|k|)/t_i)
///            prod_s (u_i q^(m_i) - u_s q^(k_s)) / (u_i q^(m_i)/t_i - u_s q^(k_s))) ]
///   * prod_i (t_0 u_i q^(1+k_i+|k|)/t_i; q)_(m_i-k_i) / (t_0 u_i q^(1+k_i+|k|); q)_(m_i-k_i)
///   * prod_(i,j) (q^(1+k_i-k_j) u_i/(t_i u_j); q)_(m_i-k_i)
///               / (q^(1+k_i-k_j) u_i/u_j; q)_(m_i-k_i).
/// ```
pub fn qshifted_f(m: &[i64], k: &[i64], p: &QShiftedParams) -> QResult<Rat> {
    check_dims(m, k)?;
    let n = p.dim();
    if m.len() != n {
        return Err(QError::Length("index dimension mismatch".into()));
    }
    if !cone_ge(m, k) {
        return Ok(Rat::zero());
    }
    let q = &p.q;
    let ksum: i64 = k.iter().sum();
    let msum: i64 = m.iter().sum();
    let mut acc = q.powi((n as i64 - 1) * (ksum - msum))?;
    for i in 1..=n {
        acc = acc * p.t(i).powi(n as i64 * (m[i - 1] - k[i - 1]))?;
    }
    let zk: Vec<Rat> = (1..=n)
        .map(|i| Ok(p.u(i) * q.powi(k[i - 1])?))
        .collect::<QResult<_>>()?;
    for i in 0..n {
        for j in (i + 1)..n {
            acc = acc.div_checked(&(&zk[i] - &zk[j]))?;
        }
    }
    let mut mat: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 1..=n {
        let zm = p.u(i) * q.powi(m[i - 1])?;
        let ti = p.t(i);
        let head = p.t(0) * &zm * q.powi(ksum)?;
        let mut corr = (Rat::one() - &head).div_checked(&(Rat::one() - head.div_checked(ti)?))?;
        for s in 0..n {
            corr = corr * (&zm - &zk[s]).div_checked(&(zm.div_checked(ti)? - &zk[s]))?;
        }
        let mut row = Vec::with_capacity(n);
        for j in 1..=n {
            let e = (n - j) as i64;
            let tw = ti.powi(j as i64 - n as i64 - 1)?;
            row.push(zm.powi(e)? * (Rat::one() - tw * &corr));
        }
        mat.push(row);
    }
    acc = acc * determinant(&mat)?;
    for i in 1..=n {
        let ord = m[i - 1] - k[i - 1];
        let base = p.t(0) * p.u(i) * q.powi(1 + k[i - 1] + ksum)?;
        let num = poch_int(&base.div_checked(p.t(i))?, q, ord)?;
        let den = poch_int(&base, q, ord)?;
        acc = acc * num.div_checked(&den)?;
    }
    for i in 1..=n {
        let ord = m[i - 1] - k[i - 1];
        for j in 1..=n {
            let r = q.powi(1 + k[i - 1] - k[j - 1])? * p.u(i).div_checked(p.u(j))?;
            let num = poch_int(&r.div_checked(p.t(i))?, q, ord)?;
            let den = poch_int(&r, q, ord)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// G entry of the q-shifted pair:
///
/// ```text
/// g_kl = prod_(i,j) (q u_i/u_j; q)_(k_i-k_j) (t_j u_i/u_j; q)_(l_i-l_j)
///               / ((t_j u_i/u_j; q)_(k_i-k_j) (q u_i/u_j; q)_(l_i-l_j))
///   * prod_i (t_0 u_i q^(1+l_i+|k|)/t_i; q)_(k_i-l_i)
///           / (t_0 u_i q^(l_i+|k|); q)_(k_i-l_i)
///   * prod_(i,j) (q^(l_i-l_j) t_j u_i/u_j; q)_(k_i-l_i)
///               / (q^(1+l_i-l_j) u_i/u_j; q)_(k_i-l_i).
/// ```
pub fn qshifted_g(k: &[i64], l: &[i64], p: &QShiftedParams) -> QResult<Rat> {
    check_dims(k, l)?;
    let n = p.dim();
    if k.len() != n {
        return Err(QError::Length("index dimension mismatch".into()));
    }
    if !cone_ge(k, l) {
        return Ok(Rat::zero());
    }
    let q = &p.q;
    let ksum: i64 = k.iter().sum();
    let mut acc = Rat::one();
    for i in 1..=n {
        for j in 1..=n {
            let r = p.u(i).div_checked(p.u(j))?;
            let num = poch_int(&(q * &r), q, k[i - 1] - k[j - 1])?
                * poch_int(&(p.t(j) * &r), q, l[i - 1] - l[j - 1])?;
            let den = poch_int(&(p.t(j) * &r), q, k[i - 1] - k[j - 1])?
                * poch_int(&(q * &r), q, l[i - 1] - l[j - 1])?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    for i in 1..=n {
        let ord = k[i - 1] - l[i - 1];
        let base = p.t(0) * p.u(i) * q.powi(l[i - 1] + ksum)?;
        let num = poch_int(&(q * &base).div_checked(p.t(i))?, q, ord)?;
        let den = poch_int(&base, q, ord)?;
        acc = acc * num.div_checked(&den)?;
    }
    for i in 1..=n {
        let ord = k[i - 1] - l[i - 1];
        for j in 1..=n {
            let r = p.u(i).div_checked(p.u(j))?;
            let num = poch_int(&(q.powi(l[i - 1] - l[j - 1])? * p.t(j) * &r), q, ord)?;
            let den = poch_int(&(q.powi(1 + l[i - 1] - l[j - 1])? * &r), q, ord)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// Parameters of the folded q-shifted pair: q, t_1..t_n, u_1..u_n and the
/// folding parameter a (the pair is invariant under
/// u_i q^y -> q^(-y)/(a u_i)).
#[derive(Clone, Debug)]
pub struct FoldedQShiftedParams {
    pub q: Rat,
    pub a: Rat,
    pub ts: Vec<Rat>,
    pub us: Vec<Rat>,
}

impl FoldedQShiftedParams {
    pub fn new(q: Rat, a: Rat, ts: Vec<Rat>, us: Vec<Rat>) -> QResult<Self> {
        if ts.len() != us.len() {
            return Err(QError::Length(
                "need as many deformation parameters as grid offsets".into(),
            ));
        }
        Ok(FoldedQShiftedParams { q, a, ts, us })
    }

    pub fn dim(&self) -> usize {
        self.us.len()
    }

    fn t(&self, i: usize) -> &Rat {
        &self.ts[i - 1]
    }

    fn u(&self, i: usize) -> &Rat {
        &self.us[i - 1]
    }
}

/// F entry of the folded q-shifted pair:
///
/// ```text
/// f_mk = prod_i t_i^(n(m_i-k_i)) (u_i q^(k_i) + q^(-k_i)/(a u_i))^(-1)
///   * prod_(i<j) [ (u_i q^(k_i) - u_j q^(k_j)) (1 - q^(-k_i-k_j)/(a u_i u_j)) ]^(-1)
///   * det[ (u_i q^(m_i) + q^(-m_i)/(a u_i))^(n+1-j)
///          - (u_i q^(m_i)/t_i + t_i q^(-m_i)/(a u_i))^(n+1-j)
///          prod_s ((1 - q^(-m_i-k_s)/(a u_i u_s)) (u_i q^(m_i) - u_s q^(k_s)))
///               / ((1 - t_i q^(-m_i-k_s)/(a u_i u_s)) (u_i q^(m_i)/t_i - u_s q^(k_s))) ]
///   * prod_(i,j) (q^(1+k_i-k_j) u_i/(t_i u_j), a u_i u_j q^(1+k_i+k_j)/t_i; q)_(m_i-k_i)
///               / (q^(1+k_i-k_j) u_i/u_j, a u_i u_j q^(1+k_i+k_j); q)_(m_i-k_i).
/// ```
pub fn folded_qshifted_f(m: &[i64], k: &[i64], p: &FoldedQShiftedParams) -> QResult<Rat> {
    check_dims(m, k)?;
    let n = p.dim();
    if m.len() != n {
        return Err(QError::Length("index dimension mismatch".into()));
    }
    if !cone_ge(m, k) {
        return Ok(Rat::zero());
    }
    let q = &p.q;
    let one = Rat::one();
    let zk: Vec<Rat> = (1..=n)
        .map(|i| Ok(p.u(i) * q.powi(k[i - 1])?))
        .collect::<QResult<_>>()?;
    // q^(-k_i)/(a u_i), the folded image of u_i q^(k_i)
    let wk: Vec<Rat> = (1..=n)
        .map(|i| q.powi(-k[i - 1])?.div_checked(&(&p.a * p.u(i))))
        .collect::<QResult<_>>()?;
    let mut acc = Rat::one();
    for i in 1..=n {
        acc = acc * p.t(i).powi(n as i64 * (m[i - 1] - k[i - 1]))?;
        acc = acc.div_checked(&(&zk[i - 1] + &wk[i - 1]))?;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let fold = &one - &wk[i] * &wk[j] * &p.a;
            // 1 - q^(-k_i-k_j)/(a u_i u_j) written through the folded images
            acc = acc.div_checked(&((&zk[i] - &zk[j]) * fold))?;
        }
    }
    let mut mat: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 1..=n {
        let zm = p.u(i) * q.powi(m[i - 1])?;
        let wm = q.powi(-m[i - 1])?.div_checked(&(&p.a * p.u(i)))?;
        let ti = p.t(i);
        let mut corr = Rat::one();
        for s in 1..=n {
            let cross = q
                .powi(-m[i - 1] - k[s - 1])?
                .div_checked(&(&p.a * p.u(i) * p.u(s)))?;
            let num = (&one - &cross) * (&zm - &zk[s - 1]);
            let den = (&one - ti * &cross) * (zm.div_checked(ti)? - &zk[s - 1]);
            corr = corr * num.div_checked(&den)?;
        }
        let afold = &zm + &wm;
        let bfold = zm.div_checked(ti)? + ti * &wm;
        let mut row = Vec::with_capacity(n);
        for j in 1..=n {
            let e = (n + 1 - j) as i64;
            row.push(afold.powi(e)? - bfold.powi(e)? * &corr);
        }
        mat.push(row);
    }
    acc = acc * determinant(&mat)?;
    for i in 1..=n {
        let ord = m[i - 1] - k[i - 1];
        for j in 1..=n {
            let r = q.powi(1 + k[i - 1] - k[j - 1])? * p.u(i).div_checked(p.u(j))?;
            let s = &p.a * p.u(i) * p.u(j) * q.powi(1 + k[i - 1] + k[j - 1])?;
            let num = poch_int(&r.div_checked(p.t(i))?, q, ord)?
                * poch_int(&s.div_checked(p.t(i))?, q, ord)?;
            let den = poch_int(&r, q, ord)? * poch_int(&s, q, ord)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// G entry of the folded q-shifted pair:
///
/// ```text
/// g_kl = prod_(i,j) (q u_i/u_j; q)_(k_i-k_j) (a u_i u_j q/t_j; q)_(k_i+k_j)
///                   (t_j u_i/u_j; q)_(l_i-l_j) (a u_i u_j; q)_(l_i+l_j)
///               / ( (t_j u_i/u_j; q)_(k_i-k_j) (a u_i u_j; q)_(k_i+k_j)
///                   (q u_i/u_j; q)_(l_i-l_j) (a u_i u_j q/t_j; q)_(l_i+l_j) )
///   * prod_(i,j) (q^(l_i-l_j) t_j u_i/u_j, a u_i u_j q^(l_i+l_j); q)_(k_i-l_i)
///               / (q^(1+l_i-l_j) u_i/u_j, a u_i u_j q^(1+l_i+l_j)/t_j; q)_(k_i-l_i).
/// ```
///
/// The q-shift on the final t_j-divided factor is forced: it is the unique
/// choice under which this G inverts the F above (checked against the
/// folded arbitrary-sequence pair, whose inverse is unique).
pub fn folded_qshifted_g(k: &[i64], l: &[i64], p: &FoldedQShiftedParams) -> QResult<Rat> {
    check_dims(k, l)?;
    let n = p.dim();
    if k.len() != n {
        return Err(QError::Length("index dimension mismatch".into()));
    }
    if !cone_ge(k, l) {
        return Ok(Rat::zero());
    }
    let q = &p.q;
    let mut acc = Rat::one();
    for i in 1..=n {
        for j in 1..=n {
            let r = p.u(i).div_checked(p.u(j))?;
            let s = &p.a * p.u(i) * p.u(j);
            let num = poch_int(&(q * &r), q, k[i - 1] - k[j - 1])?
                * poch_int(&(&s * q).div_checked(p.t(j))?, q, k[i - 1] + k[j - 1])?
                * poch_int(&(p.t(j) * &r), q, l[i - 1] - l[j - 1])?
                * poch_int(&s, q, l[i - 1] + l[j - 1])?;
            let den = poch_int(&(p.t(j) * &r), q, k[i - 1] - k[j - 1])?
                * poch_int(&s, q, k[i - 1] + k[j - 1])?
                * poch_int(&(q * &r), q, l[i - 1] - l[j - 1])?
                * poch_int(&(&s * q).div_checked(p.t(j))?, q, l[i - 1] + l[j - 1])?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    for i in 1..=n {
        let ord = k[i - 1] - l[i - 1];
        for j in 1..=n {
            let r = p.u(i).div_checked(p.u(j))?;
            let s = &p.a * p.u(i) * p.u(j);
            let num = poch_int(&(q.powi(l[i - 1] - l[j - 1])? * p.t(j) * &r), q, ord)?
                * poch_int(&(&s * q.powi(l[i - 1] + l[j - 1])?), q, ord)?;
            let den = poch_int(&(q.powi(1 + l[i - 1] - l[j - 1])? * &r), q, ord)?
                * poch_int(
                    &(&s * q.powi(1 + l[i - 1] + l[j - 1])?).div_checked(p.t(j))?,
                    q,
                    ord,
                )?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// one-dimensional pairs
// ---------------------------------------------------------------------------

/// F entry of the classical one-dimensional pair:
///
/// ```text
/// f_mk = (b - a_m c_m)(a_m - c_m) / ((b - a_k c_k)(a_k - c_k))
///   * prod_(y=k..m-1) (a_y - b/c_k)(a_y - c_k)
///   / prod_(y=k+1..m) (c_y - b/c_k)(c_y - c_k).
/// ```
pub fn onedim_f(
    m: i64,
    k: i64,
    b: &Rat,
    a: &impl Fn(i64) -> Rat,
    c: &impl Fn(i64) -> Rat,
) -> QResult<Rat> {
    if m < k {
        return Ok(Rat::zero());
    }
    let cm = c(m);
    let am = a(m);
    let ck = c(k);
    let ak = a(k);
    let bc = b.div_checked(&ck)?;
    let mut acc = ((b - &am * &cm) * (&am - &cm))
        .div_checked(&((b - &ak * &ck) * (&ak - &ck)))?;
    for y in k..=(m - 1) {
        let ay = a(y);
        acc = acc * (&ay - &bc) * (&ay - &ck);
    }
    for y in (k + 1)..=m {
        let cy = c(y);
        acc = acc.div_checked(&((&cy - &bc) * (&cy - &ck)))?;
    }
    Ok(acc)
}

/// G entry of the classical one-dimensional pair:
///
/// ```text
/// g_kl = prod_(y=l+1..k) (a_y - b/c_k)(a_y - c_k)
///      / prod_(y=l..k-1) (c_y - b/c_k)(c_y - c_k).
/// ```
pub fn onedim_g(
    k: i64,
    l: i64,
    b: &Rat,
    a: &impl Fn(i64) -> Rat,
    c: &impl Fn(i64) -> Rat,
) -> QResult<Rat> {
    if k < l {
        return Ok(Rat::zero());
    }
    let ck = c(k);
    let bc = b.div_checked(&ck)?;
    let mut acc = Rat::one();
    for y in (l + 1)..=k {
        let ay = a(y);
        acc = acc * (&ay - &bc) * (&ay - &ck);
    }
    for y in l..=(k - 1) {
        let cy = c(y);
        acc = acc.div_checked(&((&cy - &bc) * (&cy - &ck)))?;
    }
    Ok(acc)
}

/// F entry of the one-dimensional pair in the b -> infinity limit:
///
/// ```text
/// f_mk = prod_(y=k..m-1) (a_y - c_k) / prod_(y=k+1..m) (c_y - c_k).
/// ```
pub fn onedim_limit_f(
    m: i64,
    k: i64,
    a: &impl Fn(i64) -> Rat,
    c: &impl Fn(i64) -> Rat,
) -> QResult<Rat> {
    if m < k {
        return Ok(Rat::zero());
    }
    let ck = c(k);
    let mut acc = Rat::one();
    for y in k..=(m - 1) {
        acc = acc * (a(y) - &ck);
    }
    for y in (k + 1)..=m {
        acc = acc.div_checked(&(c(y) - &ck))?;
    }
    Ok(acc)
}

/// G entry of the one-dimensional pair in the b -> infinity limit:
///
/// ```text
/// g_kl = (a_l - c_l)/(a_k - c_k)
///   * prod_(y=l+1..k) (a_y - c_k) / prod_(y=l..k-1) (c_y - c_k).
/// ```
pub fn onedim_limit_g(
    k: i64,
    l: i64,
    a: &impl Fn(i64) -> Rat,
    c: &impl Fn(i64) -> Rat,
) -> QResult<Rat> {
    if k < l {
        return Ok(Rat::zero());
    }
    let ck = c(k);
    let mut acc = (a(l) - c(l)).div_checked(&(a(k) - &ck))?;
    for y in (l + 1)..=k {
        acc = acc * (a(y) - &ck);
    }
    for y in l..=(k - 1) {
        acc = acc.div_checked(&(c(y) - &ck))?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// orthogonality and inverse relations
// ---------------------------------------------------------------------------

/// All k with l <= k <= m componentwise.
pub fn cone_box(l: &[i64], m: &[i64]) -> Vec<Vec<i64>> {
    let bounds: Vec<u32> = m.iter().zip(l).map(|(a, b)| (a - b) as u32).collect();
    tuples_in_box(&bounds)
        .into_iter()
        .map(|d| d.iter().zip(l).map(|(x, b)| *x as i64 + b).collect())
        .collect()
}

/// sum_(l <= k <= m) f(m, k) g(k, l) minus delta_ml; zero exactly when the
/// orthogonality relation holds at (m, l). Requires m >= l.
pub fn orthogonality_defect(
    f: &impl Fn(&[i64], &[i64]) -> QResult<Rat>,
    g: &impl Fn(&[i64], &[i64]) -> QResult<Rat>,
    m: &[i64],
    l: &[i64],
) -> QResult<Rat> {
    if !cone_ge(m, l) {
        return Err(QError::Support("orthogonality box needs m >= l".into()));
    }
    let mut acc = Rat::zero();
    for k in cone_box(l, m) {
        acc += f(m, &k)? * g(&k, l)?;
    }
    if m == l {
        acc -= Rat::one();
    }
    Ok(acc)
}

/// First failing pair of an orthogonality sweep: the sum at (m, l), which
/// should have been delta_ml, landed on `defect` away from it.
#[derive(Clone, Debug)]
pub struct OrthogonalityWitness {
    pub m: Vec<i64>,
    pub l: Vec<i64>,
    pub defect: Rat,
}

/// Exhaustive orthogonality sweep of an entry pair: checks
/// sum_k f_mk g_kl = delta_ml for every pair 0 <= l <= m <= window
/// (componentwise). Returns the first failing pair, or None when every
/// defect vanishes; entry poles propagate as errors.
pub fn verify_orthogonality(
    f: &impl Fn(&[i64], &[i64]) -> QResult<Rat>,
    g: &impl Fn(&[i64], &[i64]) -> QResult<Rat>,
    n: usize,
    window: i64,
) -> QResult<Option<OrthogonalityWitness>> {
    if n == 0 || window < 0 {
        return Err(QError::Domain(
            "orthogonality sweep needs n >= 1 and a nonnegative window".into(),
        ));
    }
    let zero = vec![0i64; n];
    for m in cone_box(&zero, &vec![window; n]) {
        for l in cone_box(&zero, &m) {
            let d = orthogonality_defect(f, g, &m, &l)?;
            if !d.is_zero() {
                return Ok(Some(OrthogonalityWitness { m, l, defect: d }));
            }
        }
    }
    Ok(None)
}

/// b_m = sum_(lo <= k <= m) f(m, k) a(k), the forward half of the inverse
/// relations; `lo` is the corner below which a vanishes.
pub fn apply_lower(
    f: &impl Fn(&[i64], &[i64]) -> QResult<Rat>,
    a: &impl Fn(&[i64]) -> Rat,
    lo: &[i64],
    m: &[i64],
) -> QResult<Rat> {
    if !cone_ge(m, lo) {
        return Ok(Rat::zero());
    }
    let mut acc = Rat::zero();
    for k in cone_box(lo, m) {
        acc += f(m, &k)? * a(&k);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::draws;
    use std::collections::HashMap;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    /// distinct-valued random sequences over i in 0..n, y in -1..=hi
    fn random_sequences(
        seed: u64,
        draw: u64,
        n: usize,
        hi: i64,
    ) -> (HashMap<(usize, i64), Rat>, HashMap<(usize, i64), Rat>) {
        let mut rng = draws::substream(seed, draw);
        let mut avals = HashMap::new();
        let mut cvals = HashMap::new();
        let mut seen: Vec<Rat> = Vec::new();
        let fresh = |rng: &mut rand_chacha::ChaCha8Rng, seen: &mut Vec<Rat>| loop {
            let v = draws::small_ratio_nonunit(rng);
            if !seen.contains(&v) {
                seen.push(v.clone());
                return v;
            }
        };
        for i in 0..n {
            for y in -1..=hi {
                avals.insert((i, y), fresh(&mut rng, &mut seen));
                cvals.insert((i, y), fresh(&mut rng, &mut seen));
            }
        }
        (avals, cvals)
    }

    fn assert_orthogonal_with_teeth(
        f: &impl Fn(&[i64], &[i64]) -> QResult<Rat>,
        g: &impl Fn(&[i64], &[i64]) -> QResult<Rat>,
        m: &[i64],
        l: &[i64],
    ) -> QResult<()> {
        let d = orthogonality_defect(f, g, m, l)?;
        if !d.is_zero() {
            return Err(QError::Domain(format!(
                "defect {d} at m = {m:?}, l = {l:?}"
            )));
        }
        // dual relation: summing over the first index instead
        let d = orthogonality_defect(g, f, m, l)?;
        if !d.is_zero() {
            return Err(QError::Domain(format!(
                "dual defect {d} at m = {m:?}, l = {l:?}"
            )));
        }
        Ok(())
    }

    /// retry draws that land on an accidental pole of the entry formulas
    fn with_generic_retries(mut body: impl FnMut(u64) -> QResult<()>) {
        let mut passes = 0;
        let mut draw = 0u64;
        while passes < 3 {
            match body(draw) {
                Ok(()) => passes += 1,
                Err(QError::Pole(_)) => {}
                Err(e) => panic!("{e}"),
            }
            draw += 1;
            assert!(draw < 40, "too many nongeneric draws");
        }
    }

    #[test]
    fn general_pair_is_orthogonal() {
        for (n, mtop) in [(1usize, vec![3i64]), (2, vec![2, 2]), (3, vec![1, 1, 1])] {
            with_generic_retries(|draw| {
                let (av, cv) = random_sequences(11_000 + n as u64, draw, n, 4);
                let mut rng = draws::substream(12_000 + n as u64, draw);
                let b = draws::small_ratio_nonunit(&mut rng);
                let a = |i: usize, y: i64| av[&(i, y)].clone();
                let c = |i: usize, y: i64| cv[&(i, y)].clone();
                let f = |m: &[i64], k: &[i64]| general_f(m, k, &b, &a, &c);
                let g = |k: &[i64], l: &[i64]| general_g(k, l, &b, &a, &c);
                for l in cone_box(&vec![0; n], &mtop) {
                    assert_orthogonal_with_teeth(&f, &g, &mtop, &l)?;
                }
                Ok(())
            });
        }
    }

    #[test]
    fn folded_general_pair_is_orthogonal() {
        for (n, mtop) in [(1usize, vec![3i64]), (2, vec![2, 2])] {
            with_generic_retries(|draw| {
                let (av, cv) = random_sequences(21_000 + n as u64, draw, n, 4);
                let mut rng = draws::substream(22_000 + n as u64, draw);
                let b = draws::small_ratio_nonunit(&mut rng);
                let a = |i: usize, y: i64| av[&(i, y)].clone();
                let c = |i: usize, y: i64| cv[&(i, y)].clone();
                let f = |m: &[i64], k: &[i64]| folded_general_f(m, k, &b, &a, &c);
                let g = |k: &[i64], l: &[i64]| folded_general_g(k, l, &b, &a, &c);
                for l in cone_box(&vec![0; n], &mtop) {
                    assert_orthogonal_with_teeth(&f, &g, &mtop, &l)?;
                }
                Ok(())
            });
        }
    }

    fn random_qshifted(seed: u64, draw: u64, n: usize) -> QResult<QShiftedParams> {
        let mut rng = draws::substream(seed, draw);
        let pt = draws::qt_generic(&mut rng, 10, 10);
        let ts: Vec<Rat> = (0..=n).map(|_| draws::small_ratio_nonunit(&mut rng)).collect();
        let us: Vec<Rat> = (0..n).map(|_| draws::small_ratio_nonunit(&mut rng)).collect();
        QShiftedParams::new(pt.q, ts, us)
    }

    #[test]
    fn qshifted_pair_is_orthogonal() {
        for (n, mtop) in [(1usize, vec![3i64]), (2, vec![2, 2]), (3, vec![1, 1, 1])] {
            with_generic_retries(|draw| {
                let p = random_qshifted(31_000 + n as u64, draw, n)?;
                let f = |m: &[i64], k: &[i64]| qshifted_f(m, k, &p);
                let g = |k: &[i64], l: &[i64]| qshifted_g(k, l, &p);
                for l in cone_box(&vec![0; n], &mtop) {
                    assert_orthogonal_with_teeth(&f, &g, &mtop, &l)?;
                }
                Ok(())
            });
        }
    }

    #[test]
    fn qshifted_pair_specializes_the_general_pair() {
        // same entries as the general pair at b = prod(u)/t_0,
        // a_i(y) = u_i q^y / t_i, c_i(y) = u_i q^y, up to the factor
        // prod_i (q/t_i)^(n(k_i - m_i)) on f and its k, l analogue on g
        for n in [1usize, 2] {
            with_generic_retries(|draw| {
                let p = random_qshifted(41_000 + n as u64, draw, n)?;
                let q = p.q.clone();
                let b = p.us.iter().fold(Rat::one(), |s, u| s * u).div_checked(&p.ts[0])?;
                let a = |i: usize, y: i64| {
                    &p.us[i] * p.q.powi(y).unwrap() / &p.ts[i + 1]
                };
                let c = |i: usize, y: i64| &p.us[i] * p.q.powi(y).unwrap();
                let transfer = |x: &[i64], y: &[i64]| -> QResult<Rat> {
                    let mut acc = Rat::one();
                    for i in 0..n {
                        let e = n as i64 * (x[i] - y[i]);
                        acc = acc * (&q).div_checked(&p.ts[i + 1])?.powi(e)?;
                    }
                    Ok(acc)
                };
                for m in cone_box(&vec![0; n], &vec![2; n]) {
                    for k in cone_box(&vec![0; n], &m) {
                        let lhs = qshifted_f(&m, &k, &p)?;
                        let rhs = general_f(&m, &k, &b, &a, &c)? * transfer(&k, &m)?;
                        if lhs != rhs {
                            return Err(QError::Domain(format!(
                                "f mismatch at m = {m:?}, k = {k:?}"
                            )));
                        }
                        let lhs = qshifted_g(&m, &k, &p)?;
                        let rhs = general_g(&m, &k, &b, &a, &c)? * transfer(&k, &m)?;
                        if lhs != rhs {
                            return Err(QError::Domain(format!(
                                "g mismatch at k = {m:?}, l = {k:?}"
                            )));
                        }
                    }
                }
                Ok(())
            });
        }
    }

    fn random_folded_qshifted(seed: u64, draw: u64, n: usize) -> QResult<FoldedQShiftedParams> {
        let mut rng = draws::substream(seed, draw);
        let pt = draws::qt_generic(&mut rng, 10, 10);
        let a = draws::small_ratio_nonunit(&mut rng);
        let ts: Vec<Rat> = (0..n).map(|_| draws::small_ratio_nonunit(&mut rng)).collect();
        let us: Vec<Rat> = (0..n).map(|_| draws::small_ratio_nonunit(&mut rng)).collect();
        FoldedQShiftedParams::new(pt.q, a, ts, us)
    }

    #[test]
    fn folded_qshifted_pair_is_orthogonal() {
        for (n, mtop) in [(1usize, vec![3i64]), (2, vec![2, 2])] {
            with_generic_retries(|draw| {
                let p = random_folded_qshifted(51_000 + n as u64, draw, n)?;
                let f = |m: &[i64], k: &[i64]| folded_qshifted_f(m, k, &p);
                let g = |k: &[i64], l: &[i64]| folded_qshifted_g(k, l, &p);
                for l in cone_box(&vec![0; n], &mtop) {
                    assert_orthogonal_with_teeth(&f, &g, &mtop, &l)?;
                }
                Ok(())
            });
        }
    }

    #[test]
    fn folded_qshifted_pair_specializes_the_folded_general_pair() {
        for n in [1usize, 2] {
            with_generic_retries(|draw| {
                let p = random_folded_qshifted(61_000 + n as u64, draw, n)?;
                let q = p.q.clone();
                let b = Rat::one().div_checked(&p.a)?;
                let a = |i: usize, y: i64| {
                    &p.us[i] * p.q.powi(y).unwrap() / &p.ts[i]
                };
                let c = |i: usize, y: i64| &p.us[i] * p.q.powi(y).unwrap();
                let transfer = |x: &[i64], y: &[i64]| -> QResult<Rat> {
                    let mut acc = Rat::one();
                    for i in 0..n {
                        let e = n as i64 * (x[i] - y[i]);
                        acc = acc * (&q).div_checked(&p.ts[i])?.powi(e)?;
                    }
                    Ok(acc)
                };
                for m in cone_box(&vec![0; n], &vec![2; n]) {
                    for k in cone_box(&vec![0; n], &m) {
                        let lhs = folded_qshifted_f(&m, &k, &p)?;
                        let rhs = folded_general_f(&m, &k, &b, &a, &c)? * transfer(&k, &m)?;
                        if lhs != rhs {
                            return Err(QError::Domain(format!(
                                "f mismatch at m = {m:?}, k = {k:?}"
                            )));
                        }
                        let lhs = folded_qshifted_g(&m, &k, &p)?;
                        let rhs = folded_general_g(&m, &k, &b, &a, &c)? * transfer(&k, &m)?;
                        if lhs != rhs {
                            return Err(QError::Domain(format!(
                                "g mismatch at k = {m:?}, l = {k:?}"
                            )));
                        }
                    }
                }
                Ok(())
            });
        }
    }

    #[test]
    fn onedim_pairs_are_orthogonal_and_equivalent() {
        with_generic_retries(|draw| {
            let (av, cv) = random_sequences(71_000, draw, 1, 6);
            let mut rng = draws::substream(72_000, draw);
            let b = draws::small_ratio_nonunit(&mut rng);
            let a = |y: i64| av[&(0usize, y)].clone();
            let c = |y: i64| cv[&(0usize, y)].clone();
            let f1 = |m: &[i64], k: &[i64]| onedim_f(m[0], k[0], &b, &a, &c);
            let g1 = |k: &[i64], l: &[i64]| onedim_g(k[0], l[0], &b, &a, &c);
            let f2 = |m: &[i64], k: &[i64]| onedim_limit_f(m[0], k[0], &a, &c);
            let g2 = |k: &[i64], l: &[i64]| onedim_limit_g(k[0], l[0], &a, &c);
            for l in 0..=4i64 {
                assert_orthogonal_with_teeth(&f1, &g1, &[4], &[l])?;
                assert_orthogonal_with_teeth(&f2, &g2, &[4], &[l])?;
            }
            // the full pair is the limit pair at folded sequences, up to a
            // diagonal similarity rho(m)/rho(k) on f and rho(k)/rho(l) on g
            let af = |y: i64| a(y) + &b / a(y);
            let cf = |y: i64| c(y) + &b / c(y);
            let rho = |y: i64| -> QResult<Rat> {
                let mut r = (&b - a(y) * c(y)) * (a(y) - c(y));
                for x in 0..y {
                    r = r * a(x).div_checked(&c(x + 1))?;
                }
                Ok(r)
            };
            for m in 0..=4i64 {
                for k in 0..=m {
                    let full = onedim_f(m, k, &b, &a, &c)?;
                    let lim = onedim_limit_f(m, k, &af, &cf)?;
                    let scale = rho(m)?.div_checked(&rho(k)?)?;
                    if full != lim * scale {
                        return Err(QError::Domain(format!("f relation at ({m}, {k})")));
                    }
                    let full = onedim_g(m, k, &b, &a, &c)?;
                    let lim = onedim_limit_g(m, k, &af, &cf)?;
                    let scale = rho(m)?.div_checked(&rho(k)?)?;
                    if full != lim * scale {
                        return Err(QError::Domain(format!("g relation at ({m}, {k})")));
                    }
                }
            }
            Ok(())
        });
    }

    #[test]
    fn qshifted_pair_reduces_to_the_onedim_pair() {
        // at n = 1 the q-shifted entries are the classical pair with
        // geometric sequences, b = u/t_0, and the diagonal transfer
        with_generic_retries(|draw| {
            let p = random_qshifted(81_000, draw, 1)?;
            let b = p.us[0].div_checked(&p.ts[0])?;
            let a = |y: i64| &p.us[0] * p.q.powi(y).unwrap() / &p.ts[1];
            let c = |y: i64| &p.us[0] * p.q.powi(y).unwrap();
            let qt = (&p.q).div_checked(&p.ts[1])?;
            for m in 0..=3i64 {
                for k in 0..=m {
                    let lhs = qshifted_f(&[m], &[k], &p)?;
                    let rhs = onedim_f(m, k, &b, &a, &c)? * qt.powi(k - m)?;
                    if lhs != rhs {
                        return Err(QError::Domain(format!("reduction at ({m}, {k})")));
                    }
                    let lhs = qshifted_g(&[m], &[k], &p)?;
                    let rhs = onedim_g(m, k, &b, &a, &c)? * qt.powi(k - m)?;
                    if lhs != rhs {
                        return Err(QError::Domain(format!("g reduction at ({m}, {k})")));
                    }
                }
            }
            Ok(())
        });
    }

    #[test]
    fn inverse_relations_round_trip() {
        // b_m = sum f_mk a_k, then a recovered through g, and back again
        with_generic_retries(|draw| {
            let n = 2usize;
            let (av, cv) = random_sequences(91_000, draw, n, 4);
            let mut rng = draws::substream(92_000, draw);
            let b = draws::small_ratio_nonunit(&mut rng);
            let mut coeffs: HashMap<Vec<i64>, Rat> = HashMap::new();
            for k in cone_box(&[0, 0], &[2, 2]) {
                coeffs.insert(k, draws::small_ratio(&mut rng));
            }
            let aseq = |i: usize, y: i64| av[&(i, y)].clone();
            let cseq = |i: usize, y: i64| cv[&(i, y)].clone();
            let f = |m: &[i64], k: &[i64]| general_f(m, k, &b, &aseq, &cseq);
            let g = |k: &[i64], l: &[i64]| general_g(k, l, &b, &aseq, &cseq);
            let avec = |k: &[i64]| coeffs.get(k).cloned().unwrap_or_else(Rat::zero);
            let mut image: HashMap<Vec<i64>, Rat> = HashMap::new();
            for m in cone_box(&[0, 0], &[2, 2]) {
                let v = apply_lower(&f, &avec, &[0, 0], &m)?;
                image.insert(m, v);
            }
            let bvec = |l: &[i64]| image.get(l).cloned().unwrap_or_else(Rat::zero);
            for k in cone_box(&[0, 0], &[2, 2]) {
                let back = apply_lower(&g, &bvec, &[0, 0], &k)?;
                if back != avec(&k) {
                    return Err(QError::Domain(format!("round trip failed at {k:?}")));
                }
            }
            Ok(())
        });
    }

    #[test]
    fn orthogonality_check_rejects_wrong_inverses() {
        // negative control: perturbing one entry must break the defect
        let (av, cv) = random_sequences(95_000, 0, 1, 4);
        let b = rat(7, 5);
        let a = |i: usize, y: i64| av[&(i, y)].clone();
        let c = |i: usize, y: i64| cv[&(i, y)].clone();
        let f = |m: &[i64], k: &[i64]| general_f(m, k, &b, &a, &c);
        let g = |k: &[i64], l: &[i64]| {
            let v = general_g(k, l, &b, &a, &c)?;
            Ok(if k[0] == 2 && l[0] == 1 { v + rat(1, 3) } else { v })
        };
        let defect = orthogonality_defect(&f, &g, &[3], &[1]).unwrap();
        assert!(!defect.is_zero());
    }

    #[test]
    fn entries_vanish_outside_the_cone_and_are_one_on_it() {
        let (av, cv) = random_sequences(97_000, 0, 2, 4);
        let b = rat(3, 8);
        let a = |i: usize, y: i64| av[&(i, y)].clone();
        let c = |i: usize, y: i64| cv[&(i, y)].clone();
        assert!(general_f(&[1, 0], &[0, 1], &b, &a, &c).unwrap().is_zero());
        assert!(general_g(&[0, 2], &[1, 0], &b, &a, &c).unwrap().is_zero());
        assert_eq!(general_f(&[1, 2], &[1, 2], &b, &a, &c).unwrap(), Rat::one());
        assert_eq!(general_g(&[1, 2], &[1, 2], &b, &a, &c).unwrap(), Rat::one());
        assert_eq!(
            folded_general_f(&[2, 1], &[2, 1], &b, &a, &c).unwrap(),
            Rat::one()
        );
        assert_eq!(
            folded_general_g(&[2, 1], &[2, 1], &b, &a, &c).unwrap(),
            Rat::one()
        );
    }
}
