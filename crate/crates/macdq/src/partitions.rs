//! Integer partitions and the combinatorial constants attached to them.
//!
//! Provides:
//! * `Partition` - weakly decreasing parts in canonical form (no trailing
//!   zeros), with conjugation, containment, dominance, arms and legs
//! * `z_lambda` - the centralizer order of a permutation of cycle type
//!   lambda
//! * `b_lambda` - the norm constant relating the two Macdonald families,
//!   Q = b P, in its n-parameter product form
//! * enumeration helpers: all partitions of a weight, bounded variants,
//!   and integer tuples with a prescribed sum (summation supports)

use num::{BigInt, One};

use crate::error::{QError, QResult};
use crate::qkernel::{poch_int, QtPoint};
use crate::scalar::{Rat, Scalar};

// ---------------------------------------------------------------------------
// partitions
// ---------------------------------------------------------------------------

/// A partition: weakly decreasing positive parts, canonical (no zeros).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Canonicalizes by stripping trailing zeros; rejects increases.
    pub fn new(parts: &[u32]) -> QResult<Self> {
        let mut v = parts.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        if v.windows(2).any(|w| w[0] < w[1]) || v.contains(&0) {
            return Err(QError::Domain(format!("not weakly decreasing: {parts:?}")));
        }
        Ok(Partition { parts: v })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of positive parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the parts.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// The i-th part (1-indexed), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i >= 1 && i <= self.parts.len() {
            self.parts[i - 1]
        } else {
            0
        }
    }

    /// Multiplicity of k among the parts.
    pub fn multiplicity(&self, k: u32) -> usize {
        self.parts.iter().filter(|&&p| p == k).count()
    }

    /// Conjugate partition: column lengths of the diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = self.part(1) as usize;
        let mut parts = Vec::with_capacity(cols);
        for j in 1..=cols {
            parts.push(self.parts.iter().filter(|&&p| p as usize >= j).count() as u32);
        }
        Partition { parts }
    }

    /// Containment of diagrams: every part of `inner` fits under ours.
    pub fn contains(&self, inner: &Partition) -> bool {
        (1..=inner.len()).all(|i| inner.part(i) <= self.part(i))
    }

    /// Dominance: equal weight and no prefix sum falls below `other`'s.
    pub fn dominates(&self, other: &Partition) -> bool {
        if self.size() != other.size() {
            return false;
        }
        let n = self.len().max(other.len());
        let mut a = 0u64;
        let mut b = 0u64;
        for i in 1..=n {
            a += self.part(i) as u64;
            b += other.part(i) as u64;
            if a < b {
                return false;
            }
        }
        true
    }

    /// Cells (i, j) of the diagram, both 1-indexed.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p as usize).map(move |j| (i + 1, j)))
    }

    /// Arm length of cell (i, j): boxes strictly to the right.
    pub fn arm(&self, i: usize, j: usize) -> u32 {
        self.part(i) - j as u32
    }

    /// Leg length of cell (i, j): boxes strictly below.
    pub fn leg(&self, i: usize, j: usize) -> u32 {
        self.parts.iter().skip(i).filter(|&&p| p as usize >= j).count() as u32
    }

    /// The partition with `delta` added partwise; fails when the result is
    /// not weakly decreasing.
    pub fn add(&self, delta: &[u32]) -> QResult<Partition> {
        let n = self.len().max(delta.len());
        let sum: Vec<u32> =
            (1..=n).map(|i| self.part(i) + delta.get(i - 1).copied().unwrap_or(0)).collect();
        Partition::new(&sum)
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// enumeration
// ---------------------------------------------------------------------------

/// All partitions of weight `w` with parts at most `max_part` and length at
/// most `max_len`, in descending lexicographic order (a linear extension of
/// dominance: whoever dominates comes first).
pub fn partitions_of_bounded(w: u32, max_len: usize, max_part: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn rec(rem: u32, max_next: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        if slots == 0 {
            return;
        }
        let hi = rem.min(max_next);
        for p in (1..=hi).rev() {
            cur.push(p);
            rec(rem - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    rec(w, max_part, max_len, &mut cur, &mut out);
    out
}

/// All partitions of weight `w`, in descending lexicographic order.
pub fn partitions_of(w: u32) -> Vec<Partition> {
    partitions_of_bounded(w, w as usize, w)
}

/// All tuples in N^n with coordinate sum exactly `m`.
pub fn tuples_with_sum(n: usize, m: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = rem;
            out.push(cur.clone());
            return;
        }
        for v in 0..=rem {
            cur[i] = v;
            rec(i + 1, rem - v, cur, out);
        }
    }
    if n == 0 {
        if m == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, m, &mut cur, &mut out);
    out
}

/// All tuples in N^n with every coordinate at most the matching bound.
pub fn tuples_in_box(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
        for t in &out {
            for v in 0..=b {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

// ---------------------------------------------------------------------------
// combinatorial constants
// ---------------------------------------------------------------------------

/// z_lambda = prod over i of i^(m_i) m_i!, the centralizer order of a
/// permutation of cycle type lambda.
pub fn z_lambda(la: &Partition) -> Rat {
    let mut z = BigInt::one();
    let max = la.part(1);
    for k in 1..=max {
        let m = la.multiplicity(k) as u32;
        z *= BigInt::from(k).pow(m);
        for f in 1..=m {
            z *= BigInt::from(f);
        }
    }
    Rat::from_integer(z)
}

/// The norm constant b_lambda with an explicit number of rows n >= l(lambda)
/// (the value does not depend on n):
///
/// ```text
/// b = prod_{i=1}^{n} (t^(n+1-i); q)_(lambda_i) / (q t^(n-i); q)_(lambda_i)
///   * prod_{1<=i<j<=n} (q t^(j-i), t^(j-i); q)_(lambda_i - lambda_j)
///                    / (t^(j-i+1), q t^(j-i-1); q)_(lambda_i - lambda_j)
/// ```
pub fn b_lambda_with_n(la: &Partition, pt: &QtPoint, n: usize) -> QResult<Rat> {
    if n < la.len() {
        return Err(QError::Domain(format!("n = {n} below the length of {la}")));
    }
    let q = &pt.q;
    let mut acc = Rat::one();
    for i in 1..=n {
        let k = la.part(i) as i64;
        let num = poch_int(&pt.monomial(0, (n + 1 - i) as i64)?, q, k)?;
        let den = poch_int(&pt.monomial(1, (n - i) as i64)?, q, k)?;
        acc = acc * num.div_checked(&den)?;
    }
    for i in 1..n {
        for j in (i + 1)..=n {
            let k = (la.part(i) - la.part(j)) as i64;
            let d = (j - i) as i64;
            let num = poch_int(&pt.monomial(1, d)?, q, k)? * poch_int(&pt.monomial(0, d)?, q, k)?;
            let den = poch_int(&pt.monomial(0, d + 1)?, q, k)?
                * poch_int(&pt.monomial(1, d - 1)?, q, k)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// b_lambda at the smallest admissible n = l(lambda).
pub fn b_lambda(la: &Partition, pt: &QtPoint) -> QResult<Rat> {
    b_lambda_with_n(la, pt, la.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn pt() -> QtPoint {
        QtPoint::new(rat(2, 7), rat(3, 5)).unwrap()
    }

    fn pn(parts: &[u32]) -> Partition {
        Partition::new(parts).unwrap()
    }

    /// Alternative form over cell arms and legs, used as an oracle:
    /// b = prod over cells of (1 - q^arm t^(leg+1)) / (1 - q^(arm+1) t^leg).
    fn b_via_arms_and_legs(la: &Partition, pt: &QtPoint) -> Rat {
        let mut acc = Rat::one();
        for (i, j) in la.cells() {
            let a = la.arm(i, j) as i64;
            let l = la.leg(i, j) as i64;
            let num = Rat::one() - pt.monomial(a, l + 1).unwrap();
            let den = Rat::one() - pt.monomial(a + 1, l).unwrap();
            acc = acc * num / den;
        }
        acc
    }

    /// First display form, used as an oracle:
    /// prod_{1<=i<=j<=l} (q^(la_i-la_j) t^(j-i+1); q)_(la_j - la_(j+1))
    ///                 / (q^(la_i-la_j+1) t^(j-i); q)_(la_j - la_(j+1)).
    fn b_first_form(la: &Partition, pt: &QtPoint) -> Rat {
        let l = la.len();
        let mut acc = Rat::one();
        for i in 1..=l {
            for j in i..=l {
                let k = (la.part(j) - la.part(j + 1)) as i64;
                let e = (la.part(i) - la.part(j)) as i64;
                let d = (j - i) as i64;
                let num = poch_int(&pt.monomial(e, d + 1).unwrap(), &pt.q, k).unwrap();
                let den = poch_int(&pt.monomial(e + 1, d).unwrap(), &pt.q, k).unwrap();
                acc = acc * num / den;
            }
        }
        acc
    }

    /// Second display form, used as an oracle:
    /// prod_{1<=i<=j<=l} (q t^(j-i); q)_(la_i-la_j) (t^(j-i+1); q)_(la_i-la_(j+1))
    ///                 / (t^(j-i+1); q)_(la_i-la_j) (q t^(j-i); q)_(la_i-la_(j+1)).
    fn b_second_form(la: &Partition, pt: &QtPoint) -> Rat {
        let l = la.len();
        let mut acc = Rat::one();
        for i in 1..=l {
            for j in i..=l {
                let d = (j - i) as i64;
                let kij = (la.part(i) - la.part(j)) as i64;
                let kij1 = (la.part(i) - la.part(j + 1)) as i64;
                let num = poch_int(&pt.monomial(1, d).unwrap(), &pt.q, kij).unwrap()
                    * poch_int(&pt.monomial(0, d + 1).unwrap(), &pt.q, kij1).unwrap();
                let den = poch_int(&pt.monomial(0, d + 1).unwrap(), &pt.q, kij).unwrap()
                    * poch_int(&pt.monomial(1, d).unwrap(), &pt.q, kij1).unwrap();
                acc = acc * num / den;
            }
        }
        acc
    }

    #[test]
    fn canonical_form_and_validation() {
        assert_eq!(pn(&[3, 2, 0, 0]).parts(), &[3, 2]);
        assert_eq!(pn(&[]).len(), 0);
        assert!(Partition::new(&[2, 3]).is_err());
        assert!(Partition::new(&[2, 0, 1]).is_err());
        assert_eq!(pn(&[4, 2, 1]).size(), 7);
        assert_eq!(pn(&[4, 2, 1]).part(2), 2);
        assert_eq!(pn(&[4, 2, 1]).part(9), 0);
    }

    #[test]
    fn conjugation_is_an_involution_with_the_multiplicity_rule() {
        assert_eq!(pn(&[4, 2, 1]).conjugate(), pn(&[3, 2, 1, 1]));
        for w in 0..=8u32 {
            for la in partitions_of(w) {
                let c = la.conjugate();
                assert_eq!(c.conjugate(), la);
                assert_eq!(c.size(), la.size());
                // m_k of the conjugate equals la_k - la_(k+1)
                for k in 1..=la.len() as u32 + 1 {
                    let expect = la.part(k as usize) - la.part(k as usize + 1);
                    assert_eq!(c.multiplicity(k) as u32, expect, "{la} at k = {k}");
                }
            }
        }
    }

    #[test]
    fn arms_and_legs_count_boxes() {
        let la = pn(&[4, 3, 1]);
        assert_eq!(la.arm(1, 1), 3);
        assert_eq!(la.leg(1, 1), 2);
        assert_eq!(la.arm(2, 2), 1);
        assert_eq!(la.leg(2, 2), 0);
        assert_eq!(la.cells().count() as u64, la.size());
    }

    #[test]
    fn centralizer_orders_sum_to_the_group_order() {
        // sum over |la| = n of 1/z_lambda equals 1 (class equation of S_n)
        for n in 0..=8u32 {
            let total: Rat = partitions_of(n).iter().map(|la| z_lambda(la).recip()).sum();
            assert_eq!(total, Rat::one(), "n = {n}");
        }
        assert_eq!(z_lambda(&pn(&[1, 1, 1, 1])), Rat::from_integer(24.into()));
        assert_eq!(z_lambda(&pn(&[4])), Rat::from_integer(4.into()));
        assert_eq!(z_lambda(&pn(&[2, 1])), Rat::from_integer(2.into()));
    }

    #[test]
    fn enumeration_counts_and_dominance_compatibility() {
        let p = [1usize, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (w, &count) in p.iter().enumerate() {
            let all = partitions_of(w as u32);
            assert_eq!(all.len(), count);
            // descending lexicographic order refines dominance
            for (a, la) in all.iter().enumerate() {
                for mu in all.iter().skip(a + 1) {
                    assert!(!mu.dominates(la) || mu == la);
                }
            }
        }
        assert_eq!(partitions_of_bounded(6, 2, 6).len(), 4); // 6, 51, 42, 33
    }

    #[test]
    fn dominance_and_containment() {
        assert!(pn(&[3, 1]).dominates(&pn(&[2, 2])));
        assert!(!pn(&[2, 2]).dominates(&pn(&[3, 1])));
        assert!(pn(&[2, 2]).dominates(&pn(&[2, 2])));
        assert!(!pn(&[3]).dominates(&pn(&[2])));
        assert!(pn(&[3, 2]).contains(&pn(&[2, 2])));
        assert!(!pn(&[3, 2]).contains(&pn(&[1, 1, 1])));
    }

    #[test]
    fn tuple_supports() {
        assert_eq!(tuples_with_sum(3, 2).len(), 6);
        assert!(tuples_with_sum(3, 2).iter().all(|t| t.iter().sum::<u32>() == 2));
        assert_eq!(tuples_in_box(&[1, 2]).len(), 6);
        assert_eq!(tuples_with_sum(0, 0).len(), 1);
        assert_eq!(tuples_with_sum(0, 1).len(), 0);
    }

    #[test]
    fn norm_constant_forms_agree_and_ignore_n() {
        let pt = pt();
        for w in 0..=6u32 {
            for la in partitions_of(w) {
                let base = b_lambda(&la, &pt).unwrap();
                assert_eq!(base, b_via_arms_and_legs(&la, &pt), "{la} arms/legs");
                assert_eq!(base, b_first_form(&la, &pt), "{la} first form");
                assert_eq!(base, b_second_form(&la, &pt), "{la} second form");
                for n in la.len()..=la.len() + 3 {
                    assert_eq!(base, b_lambda_with_n(&la, &pt, n).unwrap(), "{la} n = {n}");
                }
            }
        }
    }

    #[test]
    fn row_and_column_norm_constants() {
        // b_(k) = (t; q)_k / (q; q)_k and b_(1^k) = (t; t)_k / (q; t)_k
        let pt = pt();
        for k in 1..=5i64 {
            let row = b_lambda(&pn(&[k as u32]), &pt).unwrap();
            let expect = poch_int(&pt.t, &pt.q, k).unwrap() / poch_int(&pt.q, &pt.q, k).unwrap();
            assert_eq!(row, expect, "row k = {k}");
            let col = b_lambda(&pn(&vec![1u32; k as usize]), &pt).unwrap();
            let expect =
                poch_int(&pt.t, &pt.t, k).unwrap() / poch_int(&pt.q, &pt.t, k).unwrap();
            assert_eq!(col, expect, "column k = {k}");
        }
    }
}
