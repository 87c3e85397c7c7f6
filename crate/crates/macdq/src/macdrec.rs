//! Pieri expansion and the determinant recursion for Macdonald polynomials.
//!
//! Provides:
//! * `pieri_coeff` - the expansion coefficient of Q_la Q_(m) on the Q basis
//! * `recursion_coeff` - the inverse coefficient, an n x n determinant with
//!   a Vandermonde-type prefactor, evaluated in a fully cancelled form that
//!   stays finite at the partition-indexed specialization of the u's
//! * `pieri_expand` - the full expansion of Q_la Q_(m)
//! * `RecursionTable` - Q_la built bottom-up from one-row polynomials by
//!   the recursion, and P_la by the conjugate (dual) recursion; both are
//!   independent of the Gram-Schmidt construction
//! * `restricted_pieri_expand` - the |theta| = m slice that survives when
//!   the variable set is cut down to n
//!
//! Summation convention: both expansions run over theta in N^n; summands
//! whose constructed index is not a partition contribute zero. This is
//! forced: such summands can carry nonzero coefficients (already at
//! la = (1), m = 3, theta = 0), and dropping them is exactly what makes
//! the expansions match the products.
//!
//! ```text
//! u_i = q^(la_i - la_(n+1)) t^(n - i),   1 <= i <= n
//! Q_(la_1..la_n) Q_(la_(n+1)) = sum_theta d_theta(u) Q_(la+theta, la_(n+1)-|theta|)
//! Q_(la_1..la_(n+1)) = sum_theta c_theta(u) Q_(la_(n+1)-|theta|) Q_(la+theta)
//! ```

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num::Zero;

use crate::error::{QError, QResult};
use crate::partitions::{tuples_with_sum, Partition};
use crate::qkernel::{poch_int, QtPoint};
use crate::scalar::{determinant, Rat, Scalar};
use crate::symfun::{elementary, modified_complete, SymPoly};

// ---------------------------------------------------------------------------
// coefficients
// ---------------------------------------------------------------------------

/// Pieri coefficient
///
/// ```text
/// d_theta(u) = prod_k (t, q^(|th|+1) u_k; q)_(th_k) / (q, q^|th| t u_k; q)_(th_k)
///   * prod_(i<j) (t u_i/u_j, q^(1-th_j) u_i/(t u_j); q)_(th_i)
///             / (q u_i/u_j, q^(-th_j) u_i/u_j; q)_(th_i)
/// ```
pub fn pieri_coeff<S: Scalar>(theta: &[u32], us: &[S], q: &S, t: &S) -> QResult<S> {
    let n = us.len();
    if theta.len() != n {
        return Err(QError::Length("theta and u length mismatch".into()));
    }
    let size: i64 = theta.iter().map(|&x| x as i64).sum();
    let mut acc = S::one();
    for k in 0..n {
        let ord = theta[k] as i64;
        let num = poch_int(t, q, ord)?
            * poch_int(&(q.powi(size + 1)? * us[k].clone()), q, ord)?;
        let den = poch_int(q, q, ord)?
            * poch_int(&(q.powi(size)? * t.clone() * us[k].clone()), q, ord)?;
        acc = acc * num.div_checked(&den)?;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let ord = theta[i] as i64;
            let r = us[i].div_checked(&us[j])?;
            let tj = theta[j] as i64;
            let num = poch_int(&(t.clone() * r.clone()), q, ord)?
                * poch_int(&(q.powi(1 - tj)? * r.clone().div_checked(t)?), q, ord)?;
            let den = poch_int(&(q.clone() * r.clone()), q, ord)?
                * poch_int(&(q.powi(-tj)? * r.clone()), q, ord)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// Recursion coefficient c_theta(u), the printed form being
///
/// ```text
/// c_theta(u) = prod_i t^(th_i) (q/t, q u_i; q)_(th_i) / (q, q t u_i; q)_(th_i)
///   * prod_(i<j) (q u_i/(t u_j), q^(-th_j) t u_i/u_j; q)_(th_i)
///             / (q u_i/u_j, q^(-th_j) u_i/u_j; q)_(th_i)
///   * det[ z_i^(n-j) (1 - t^(j-1) (1-t z_i)/(1-z_i) prod_s (u_s-z_i)/(t u_s-z_i)) ]
///     / prod_(i<j) (z_i - z_j),        z_i = q^(th_i) u_i.
/// ```
///
/// Evaluated here with all structural cancellations carried out first, so
/// that the 0/0 pairs forced by the specialization u_i = q^(la_i - la_(n+1))
/// t^(n-i) (repeated parts make z_i = u_i or collide factors) never
/// materialize:
/// * rows with th_i = 0 have z_i = u_i exactly, so the correction term
///   carries the identically-zero factor (u_i - z_i) and the entry is
///   u_i^(n-j)
/// * rows with th_i >= 1 use the cleared polynomial entry
///   z_i^(n-j) [(1-z_i) prod_s (t u_s - z_i) - t^(j-1) (1-t z_i) prod_s (u_s - z_i)];
///   the extracted row denominator (1-z_i) prod_s (t u_s - z_i) cancels
///   symbolically: (1-z_i) against the last factor of (q u_i; q)_(th_i),
///   each (t u_s - z_i) with s > i against the last factor of
///   (q u_i/(t u_s); q)_(th_i) leaving 1/(t u_s), while the s <= i factors
///   stay as explicit denominators (structurally nonzero at the
///   specialization; an accidental zero surfaces as a pole).
pub fn recursion_coeff<S: Scalar>(theta: &[u32], us: &[S], q: &S, t: &S) -> QResult<S> {
    let n = us.len();
    if theta.len() != n {
        return Err(QError::Length("theta and u length mismatch".into()));
    }
    let zs: Vec<S> = (0..n)
        .map(|i| Ok(q.powi(theta[i] as i64)? * us[i].clone()))
        .collect::<QResult<_>>()?;
    let q_over_t = q.div_checked(t)?;
    let mut acc = S::one();
    for i in 0..n {
        let ord = theta[i] as i64;
        if ord == 0 {
            continue;
        }
        let num = t.powi(ord)?
            * poch_int(&q_over_t, q, ord)?
            * poch_int(&(q.clone() * us[i].clone()), q, ord - 1)?;
        let den = poch_int(q, q, ord)?
            * poch_int(&(q.clone() * t.clone() * us[i].clone()), q, ord)?;
        acc = acc * num.div_checked(&den)?;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let ord = theta[i] as i64;
            let r = us[i].div_checked(&us[j])?;
            let tj = theta[j] as i64;
            let tu_j = t.clone() * us[j].clone();
            let first_num = if ord == 0 {
                S::one()
            } else {
                let reduced =
                    poch_int(&(q.clone() * r.clone().div_checked(t)?), q, ord - 1)?;
                reduced.div_checked(&tu_j)?
            };
            let num = first_num * poch_int(&(q.powi(-tj)? * t.clone() * r.clone()), q, ord)?;
            let den = poch_int(&(q.clone() * r.clone()), q, ord)?
                * poch_int(&(q.powi(-tj)? * r.clone()), q, ord)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    // Vandermonde-type prefactor and the uncancelled row denominators
    for i in 0..n {
        for j in (i + 1)..n {
            acc = acc.div_checked(&(zs[i].clone() - zs[j].clone()))?;
        }
        if theta[i] >= 1 {
            for s in 0..=i {
                let f = t.clone() * us[s].clone() - zs[i].clone();
                acc = acc.div_checked(&f)?;
            }
        }
    }
    // determinant of the cleared entries
    let mut m: Vec<Vec<S>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        if theta[i] == 0 {
            for j in 0..n {
                row.push(us[i].powi((n - 1 - j) as i64)?);
            }
        } else {
            let mut left = S::one() - zs[i].clone();
            let mut right = S::one() - t.clone() * zs[i].clone();
            for s in 0..n {
                left = left * (t.clone() * us[s].clone() - zs[i].clone());
                right = right * (us[s].clone() - zs[i].clone());
            }
            for j in 0..n {
                let tw = t.powi(j as i64)?;
                let e = zs[i].powi((n - 1 - j) as i64)? * (left.clone() - tw * right.clone());
                row.push(e);
            }
        }
        m.push(row);
    }
    Ok(acc * determinant(&m)?)
}

/// The specialized parameters u_i = q^(la_i - last) t^(n - i).
pub fn standard_us(la: &Partition, n: usize, last: u32, pt: &QtPoint) -> QResult<Vec<Rat>> {
    (1..=n)
        .map(|i| pt.monomial(la.part(i) as i64 - last as i64, (n - i) as i64))
        .collect()
}

// ---------------------------------------------------------------------------
// expansions
// ---------------------------------------------------------------------------

/// Expansion of Q_la Q_(m) on the Q basis over partitions of |la| + m with
/// at most n + 1 rows. Requires l(la) <= n.
pub fn pieri_expand(
    la: &Partition,
    m: u32,
    n: usize,
    pt: &QtPoint,
) -> QResult<BTreeMap<Partition, Rat>> {
    if la.len() > n {
        return Err(QError::Length(format!("{la} has more than {n} rows")));
    }
    let us = standard_us(la, n, m, pt)?;
    let mut out = BTreeMap::new();
    for size in 0..=m {
        for theta in tuples_with_sum(n, size) {
            let mut idx: Vec<u32> = (1..=n).map(|i| la.part(i) + theta[i - 1]).collect();
            idx.push(m - size);
            let Ok(nu) = Partition::new(&idx) else {
                continue;
            };
            let d = pieri_coeff(&theta, &us, &pt.q, &pt.t)?;
            if !d.is_zero() {
                *out.entry(nu).or_insert_with(Rat::zero) += d;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// The same expansion restricted to the slice |theta| = m, which is the
/// whole story in n variables: every summand with |theta| < m carries a
/// partition with n + 1 rows and vanishes there.
pub fn restricted_pieri_expand(
    la: &Partition,
    m: u32,
    n: usize,
    pt: &QtPoint,
) -> QResult<BTreeMap<Partition, Rat>> {
    if la.len() > n {
        return Err(QError::Length(format!("{la} has more than {n} rows")));
    }
    let us = standard_us(la, n, m, pt)?;
    let mut out = BTreeMap::new();
    for theta in tuples_with_sum(n, m) {
        let idx: Vec<u32> = (1..=n).map(|i| la.part(i) + theta[i - 1]).collect();
        let Ok(nu) = Partition::new(&idx) else {
            continue;
        };
        let d = pieri_coeff(&theta, &us, &pt.q, &pt.t)?;
        if !d.is_zero() {
            *out.entry(nu).or_insert_with(Rat::zero) += d;
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

// ---------------------------------------------------------------------------
// bottom-up construction
// ---------------------------------------------------------------------------

/// Macdonald polynomials built from the recursion alone: one-row Q's are
/// the modified complete functions, longer ones come from the determinant
/// recursion (strictly shortening), and P's follow the conjugate recursion
/// (strictly lowering the largest part). No scalar products involved.
pub struct RecursionTable {
    pt: QtPoint,
    q_memo: RefCell<HashMap<(Vec<u32>, usize), Rc<SymPoly>>>,
    p_memo: RefCell<HashMap<(Vec<u32>, usize), Rc<SymPoly>>>,
}

impl RecursionTable {
    pub fn new(pt: QtPoint) -> Self {
        RecursionTable {
            pt,
            q_memo: RefCell::new(HashMap::new()),
            p_memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn pt(&self) -> &QtPoint {
        &self.pt
    }

    /// Q_la in nvars variables by the recursion
    ///
    /// ```text
    /// Q_la = sum_theta c_theta(u) Q_(la_(n+1)-|theta|) Q_(la+theta),
    /// ```
    ///
    /// with n + 1 = l(la) and the summand convention from the module
    /// documentation.
    pub fn q(&self, la: &Partition, nvars: usize) -> QResult<SymPoly> {
        let key = (la.parts().to_vec(), nvars);
        if let Some(p) = self.q_memo.borrow().get(&key) {
            return Ok((**p).clone());
        }
        let val = self.q_uncached(la, nvars)?;
        self.q_memo.borrow_mut().insert(key, Rc::new(val.clone()));
        Ok(val)
    }

    fn q_uncached(&self, la: &Partition, nvars: usize) -> QResult<SymPoly> {
        let l = la.len();
        if l == 0 {
            return Ok(SymPoly::one(nvars));
        }
        if l == 1 {
            return modified_complete(la.part(1), nvars, &self.pt);
        }
        let n = l - 1;
        let last = la.part(l);
        let us = standard_us(la, n, last, &self.pt)?;
        let mut acc = SymPoly::zero(nvars);
        for size in 0..=last {
            for theta in tuples_with_sum(n, size) {
                let idx: Vec<u32> = (1..=n).map(|i| la.part(i) + theta[i - 1]).collect();
                let Ok(inner) = Partition::new(&idx) else {
                    continue;
                };
                let c = recursion_coeff(&theta, &us, &self.pt.q, &self.pt.t)?;
                if c.is_zero() {
                    continue;
                }
                let row = self.q(&Partition::new(&[last - size])?, nvars)?;
                let rest = self.q(&inner, nvars)?;
                acc = acc.add_ref(&row.mul_ref(&rest).scale(&c));
            }
        }
        Ok(acc)
    }

    /// P_la in nvars variables by the conjugate recursion
    ///
    /// ```text
    /// u_i = q^(n-i) t^(m_i + ... + m_n),
    /// P_la = sum_theta c^(t,q)_theta(u) e_(m_(n+1)-|theta|)
    ///        P_(1^(m_1+th_1-th_2), ..., (n-1)^(m_(n-1)+th_(n-1)-th_n), n^(m_n+m_(n+1)+th_n)),
    /// ```
    ///
    /// with n + 1 the largest part of la and m_i its multiplicities.
    pub fn p(&self, la: &Partition, nvars: usize) -> QResult<SymPoly> {
        let key = (la.parts().to_vec(), nvars);
        if let Some(p) = self.p_memo.borrow().get(&key) {
            return Ok((**p).clone());
        }
        let val = self.p_uncached(la, nvars)?;
        self.p_memo.borrow_mut().insert(key, Rc::new(val.clone()));
        Ok(val)
    }

    fn p_uncached(&self, la: &Partition, nvars: usize) -> QResult<SymPoly> {
        if la.is_empty() {
            return Ok(SymPoly::one(nvars));
        }
        let top = la.part(1);
        if top == 1 {
            return Ok(elementary(la.len() as u32, nvars));
        }
        let n = (top - 1) as usize;
        let mult = |i: usize| la.multiplicity(i as u32) as u32;
        let us: Vec<Rat> = (1..=n)
            .map(|i| {
                let texp: i64 = (i..=n).map(|j| mult(j) as i64).sum();
                self.pt.monomial((n - i) as i64, texp)
            })
            .collect::<QResult<_>>()?;
        let m_top = mult(n + 1);
        let mut acc = SymPoly::zero(nvars);
        for size in 0..=m_top {
            for theta in tuples_with_sum(n, size) {
                let mut inner_parts: Vec<u32> = Vec::new();
                let mut valid = true;
                for i in (1..=n).rev() {
                    let mi = if i == n {
                        mult(n) as i64 + m_top as i64 + theta[n - 1] as i64
                    } else {
                        mult(i) as i64 + theta[i - 1] as i64 - theta[i] as i64
                    };
                    if mi < 0 {
                        valid = false;
                        break;
                    }
                    for _ in 0..mi {
                        inner_parts.push(i as u32);
                    }
                }
                if !valid {
                    continue;
                }
                inner_parts.sort_unstable_by(|a, b| b.cmp(a));
                let inner = Partition::new(&inner_parts)?;
                // roles of q and t exchanged in the coefficient only
                let c = recursion_coeff(&theta, &us, &self.pt.t, &self.pt.q)?;
                if c.is_zero() {
                    continue;
                }
                let e = elementary(m_top - size, nvars);
                let rest = self.p(&inner, nvars)?;
                acc = acc.add_ref(&e.mul_ref(&rest).scale(&c));
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{partitions_of, tuples_in_box};
    use crate::qkernel::draws;
    use crate::symfun::MacdCache;
    use num::One;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn pt() -> QtPoint {
        QtPoint::new(rat(2, 7), rat(3, 5)).unwrap()
    }

    fn pn(parts: &[u32]) -> Partition {
        Partition::new(parts).unwrap()
    }

    /// The printed form of c_theta(u), evaluated term by term. Only valid
    /// away from the cancelling zeros, i.e. for generic u.
    fn recursion_coeff_printed(theta: &[u32], us: &[Rat], q: &Rat, t: &Rat) -> QResult<Rat> {
        let n = us.len();
        let zs: Vec<Rat> = (0..n).map(|i| q.powi(theta[i] as i64).unwrap() * &us[i]).collect();
        let mut acc = Rat::one();
        for i in 0..n {
            let ord = theta[i] as i64;
            let num = t.powi(ord)?
                * poch_int(&(q / t), q, ord)?
                * poch_int(&(q * &us[i]), q, ord)?;
            let den = poch_int(q, q, ord)? * poch_int(&(q * t * &us[i]), q, ord)?;
            acc = acc * num.div_checked(&den)?;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let ord = theta[i] as i64;
                let r = &us[i] / &us[j];
                let tj = theta[j] as i64;
                let num = poch_int(&(q * &r / t), q, ord)?
                    * poch_int(&(q.powi(-tj)? * t * &r), q, ord)?;
                let den = poch_int(&(q * &r), q, ord)?
                    * poch_int(&(q.powi(-tj)? * &r), q, ord)?;
                acc = acc * num.div_checked(&den)?;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                acc = acc.div_checked(&(&zs[i] - &zs[j]))?;
            }
        }
        let mut m: Vec<Vec<Rat>> = Vec::new();
        for i in 0..n {
            let mut row = Vec::new();
            let mut prod = Rat::one();
            for s in 0..n {
                let num = &us[s] - &zs[i];
                let den = t * &us[s] - &zs[i];
                prod = prod * num.div_checked(&den)?;
            }
            let ratio = (Rat::one() - t * &zs[i]).div_checked(&(Rat::one() - &zs[i]))?;
            for j in 0..n {
                let e = zs[i].powi((n - 1 - j) as i64)?
                    * (Rat::one() - t.powi(j as i64)? * &ratio * &prod);
                row.push(e);
            }
            m.push(row);
        }
        Ok(acc * determinant(&m)?)
    }

    #[test]
    fn cancelled_form_equals_printed_form_at_generic_points() {
        // exact agreement at random generic u, where no 0/0 appears
        for draw in 0..6u64 {
            let mut rng = draws::substream(20240814, draw);
            let pt = draws::qt_generic(&mut rng, 8, 8);
            for n in 1..=3usize {
                let us: Vec<Rat> = (0..n).map(|_| draws::small_ratio_nonunit(&mut rng)).collect();
                for theta in tuples_in_box(&vec![2u32; n]) {
                    let printed = match recursion_coeff_printed(&theta, &us, &pt.q, &pt.t) {
                        Ok(v) => v,
                        Err(QError::Pole(_)) => continue, // nongeneric collision, skip
                        Err(e) => panic!("unexpected error: {e}"),
                    };
                    let cancelled = recursion_coeff(&theta, &us, &pt.q, &pt.t).unwrap();
                    assert_eq!(cancelled, printed, "theta = {theta:?}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn one_row_closed_forms() {
        // the two printed closed forms of the single-u coefficient
        let pt = pt();
        let q = &pt.q;
        let t = &pt.t;
        let check = |u: &Rat, theta: u32, second_only: bool| {
            let ord = theta as i64;
            let got = recursion_coeff(&[theta], std::slice::from_ref(u), q, t).unwrap();
            if theta == 0 {
                // both closed forms degenerate to (1-u)/(1-u) here
                assert_eq!(got, Rat::one(), "theta = 0, u = {u}");
                return;
            }
            // t^th (q/t, qu; q)_th / (q, qtu; q)_th * (t-1)/(t-q^th) * (1-q^(2th)u)/(1-q^th u)
            let base = t.powi(ord).unwrap()
                * poch_int(&(q / t), q, ord).unwrap()
                * poch_int(&(q * u), q, ord).unwrap()
                / (poch_int(q, q, ord).unwrap() * poch_int(&(q * t * u), q, ord).unwrap());
            let second = base
                * ((t - Rat::one()) / (t - q.powi(ord).unwrap()))
                * (Rat::one() - q.powi(2 * ord).unwrap() * u)
                / (Rat::one() - q.powi(ord).unwrap() * u);
            assert_eq!(got, second, "second form, theta = {theta}, u = {u}");
            if !second_only {
                // t^th (1/t, u; q)_th / (q, qtu; q)_th * (1-q^(2th)u)/(1-u)
                let third = t.powi(ord).unwrap()
                    * poch_int(&t.recip(), q, ord).unwrap()
                    * poch_int(u, q, ord).unwrap()
                    / (poch_int(q, q, ord).unwrap() * poch_int(&(q * t * u), q, ord).unwrap())
                    * (Rat::one() - q.powi(2 * ord).unwrap() * u)
                    / (Rat::one() - u);
                assert_eq!(got, third, "third form, theta = {theta}, u = {u}");
            }
        };
        for theta in 0..=5u32 {
            check(&rat(5, 11), theta, false);
            check(&rat(-3, 2), theta, false);
            // u = 1 (repeated last parts): only the second form stays finite
            check(&Rat::one(), theta, true);
        }
    }

    #[test]
    fn pieri_expansion_matches_the_polynomial_product() {
        let pt = pt();
        let cache = MacdCache::new(pt.clone());
        let cases = [
            (pn(&[1]), 3u32, 1usize),
            (pn(&[2, 1]), 2, 2),
            (pn(&[2, 2]), 1, 2),
            (pn(&[1, 1]), 3, 2),
            (pn(&[2, 1]), 2, 3),
        ];
        for (la, m, n) in cases {
            let nv = (la.size() + m as u64) as usize;
            let lhs = cache
                .q(&la, nv)
                .unwrap()
                .mul_ref(&cache.q(&pn(&[m]), nv).unwrap());
            let mut rhs = SymPoly::zero(nv);
            for (nu, c) in pieri_expand(&la, m, n, &pt).unwrap() {
                rhs = rhs.add_ref(&cache.q(&nu, nv).unwrap().scale(&c));
            }
            assert_eq!(lhs, rhs, "{la} times row {m} with n = {n}");
        }
    }

    #[test]
    fn vanishing_coefficients_follow_the_horizontal_strips() {
        // nonzero coefficients appear exactly on horizontal strips
        // (conjugate columns grow by at most one)
        let pt = pt();
        let la = pn(&[2, 1]);
        let m = 2u32;
        let exp = pieri_expand(&la, m, 2, &pt).unwrap();
        for (nu, c) in &exp {
            assert!(!c.is_zero());
            assert!(nu.contains(&la), "{nu} contains {la}");
            let nuc = nu.conjugate();
            let lac = la.conjugate();
            for col in 1..=nuc.len() {
                assert!(
                    nuc.part(col) <= lac.part(col) + 1,
                    "{nu} adds two boxes to column {col}"
                );
            }
        }
        // (3,2,1)/(2,1) is not a horizontal strip: column 2 grows twice
        assert!(!exp.contains_key(&pn(&[3, 2, 1])));
        assert!(exp.contains_key(&pn(&[4, 1])));
    }

    #[test]
    fn recursion_rebuilds_gram_schmidt_polynomials() {
        let pt = pt();
        let cache = MacdCache::new(pt.clone());
        let table = RecursionTable::new(pt);
        for w in 1..=5u32 {
            for la in partitions_of(w) {
                if la.len() > 3 {
                    continue;
                }
                let nv = w as usize;
                let lhs = table.q(&la, nv).unwrap();
                let rhs = cache.q(&la, nv).unwrap();
                assert_eq!(lhs, rhs, "{la}");
            }
        }
    }

    #[test]
    fn dual_recursion_rebuilds_p_polynomials() {
        let pt = pt();
        let cache = MacdCache::new(pt.clone());
        let table = RecursionTable::new(pt);
        for w in 1..=5u32 {
            for la in partitions_of(w) {
                if la.part(1) > 3 {
                    continue;
                }
                let nv = w as usize;
                let lhs = table.p(&la, nv).unwrap();
                let rhs = cache.p(&la, nv).unwrap();
                assert_eq!(lhs, rhs, "{la}");
            }
        }
    }

    #[test]
    fn restricted_expansion_holds_in_few_variables() {
        let pt = pt();
        let cache = MacdCache::new(pt.clone());
        for (la, m, n) in [(pn(&[2, 1]), 2u32, 2usize), (pn(&[1]), 2, 2), (pn(&[3, 1]), 3, 2)] {
            let lhs = cache
                .q(&la, n)
                .unwrap()
                .mul_ref(&cache.q(&pn(&[m]), n).unwrap());
            let mut rhs = SymPoly::zero(n);
            for (nu, c) in restricted_pieri_expand(&la, m, n, &pt).unwrap() {
                rhs = rhs.add_ref(&cache.q(&nu, n).unwrap().scale(&c));
            }
            assert_eq!(lhs, rhs, "{la} times row {m} in {n} variables");
            // the dropped summands each vanish in n variables: they carry
            // partitions with n + 1 rows
            for (nu, _) in pieri_expand(&la, m, n, &pt).unwrap() {
                if nu.len() > n {
                    assert!(cache.q(&nu, n).unwrap().is_zero(), "{nu} in {n} variables");
                }
            }
        }
    }
}
