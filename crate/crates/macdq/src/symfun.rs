//! Symmetric polynomials over exact rationals.
//!
//! Provides:
//! * `SymPoly` - sparse polynomials in a fixed number of variables with
//!   exact rational coefficients
//! * the classical bases: monomial, power sum, elementary, complete, and
//!   the modified complete functions attached to a (q, t) point
//! * `to_powersum` - exact expansion in the power-sum basis by linear
//!   algebra (needs at least as many variables as the degree)
//! * `scalar_product` - the (q, t) scalar product, diagonal on power sums
//! * `MacdCache` - Macdonald polynomials P and Q built by Gram-Schmidt
//!   against that scalar product along a dominance-refining order
//! * `epsilon_apply` / `epsilon_value_p` / `epsilon_value_q` - the
//!   evaluation homomorphism p_r -> (1 - u^r)/(1 - t^r) and its closed
//!   product forms on P and Q
//! * `omega_apply` - the (q, t) twist of the classical involution omega
//!
//! ```text
//! <p_la, p_mu> = delta_(la,mu) z_la prod_i (1 - q^(la_i)) / (1 - t^(la_i))
//! ```

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num::One;
use num::Zero;

use crate::complex::Cx;
use crate::error::{QError, QResult};
use crate::partitions::{partitions_of, tuples_with_sum, Partition};
use crate::qkernel::{poch_int, QtPoint};
use crate::scalar::{solve_linear, Rat, Scalar};

// ---------------------------------------------------------------------------
// sparse polynomials
// ---------------------------------------------------------------------------

/// Sparse polynomial in `nvars` variables; exponent vectors have exactly
/// `nvars` entries and coefficients are never zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SymPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl SymPoly {
    pub fn zero(nvars: usize) -> Self {
        SymPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = SymPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        SymPoly::constant(nvars, Rat::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree (zero polynomial reports 0).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn coeff(&self, expt: &[u32]) -> Rat {
        self.terms.get(expt).cloned().unwrap_or_else(Rat::zero)
    }

    fn insert(&mut self, expt: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(expt).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            let key: Vec<u32> = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    pub fn add_ref(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, other: &SymPoly) -> SymPoly {
        self.add_ref(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, f: &Rat) -> SymPoly {
        if f.is_zero() {
            return SymPoly::zero(self.nvars);
        }
        SymPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * f)).collect(),
        }
    }

    pub fn mul_ref(&self, other: &SymPoly) -> SymPoly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = SymPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(e, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, xs: &[Rat]) -> QResult<Rat> {
        if xs.len() != self.nvars {
            return Err(QError::Length(format!(
                "expected {} values, got {}",
                self.nvars,
                xs.len()
            )));
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in xs.iter().zip(e) {
                term *= x.powi(k as i64)?;
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn eval_cx(&self, xs: &[Cx], prec: usize) -> QResult<Cx> {
        if xs.len() != self.nvars {
            return Err(QError::Length(format!(
                "expected {} values, got {}",
                self.nvars,
                xs.len()
            )));
        }
        let mut acc = Cx::zero_p(prec);
        for (e, c) in &self.terms {
            let mut term = Cx::from_rat(c, prec);
            for (x, &k) in xs.iter().zip(e) {
                term = term.mul_ref(&x.powi_ref(k as i64)?);
            }
            acc = acc.add_ref(&term);
        }
        Ok(acc)
    }

    /// Sets the trailing variables to zero, keeping the first `m`.
    pub fn restrict(&self, m: usize) -> SymPoly {
        assert!(m <= self.nvars, "cannot restrict upward");
        let mut out = SymPoly::zero(m);
        for (e, c) in &self.terms {
            if e[m..].iter().all(|&k| k == 0) {
                out.insert(e[..m].to_vec(), c.clone());
            }
        }
        out
    }

    /// The homogeneous component of total degree d.
    pub fn homogeneous(&self, d: u32) -> SymPoly {
        SymPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self.terms.keys().map(|e| e.iter().sum()).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// True when every monomial orbit appears fully with one coefficient.
    pub fn is_symmetric(&self) -> bool {
        let mut groups: HashMap<Vec<u32>, Vec<&Rat>> = HashMap::new();
        for (e, c) in &self.terms {
            let mut key = e.clone();
            key.sort_unstable_by(|a, b| b.cmp(a));
            groups.entry(key).or_default().push(c);
        }
        for (key, coeffs) in groups {
            if coeffs.len() != orbit_size(&key) || coeffs.windows(2).any(|w| w[0] != w[1]) {
                return false;
            }
        }
        true
    }

    /// Coefficients on the monomial basis; `NotSymmetric` when orbits are
    /// incomplete or uneven.
    pub fn monomial_coeffs(&self) -> QResult<BTreeMap<Partition, Rat>> {
        if !self.is_symmetric() {
            return Err(QError::NotSymmetric("not constant on monomial orbits".into()));
        }
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut key = e.clone();
            key.sort_unstable_by(|a, b| b.cmp(a));
            let la = Partition::new(&key)?;
            out.entry(la).or_insert_with(|| c.clone());
        }
        Ok(out)
    }
}

/// Number of distinct permutations of the (padded) exponent vector.
fn orbit_size(sorted_desc: &[u32]) -> usize {
    let n = sorted_desc.len();
    let mut size = 1usize;
    for k in 1..=n {
        size = size * k;
    }
    let mut run = 1usize;
    for i in 1..=n {
        if i < n && sorted_desc[i] == sorted_desc[i - 1] {
            run += 1;
        } else {
            for k in 1..=run {
                size /= k;
            }
            run = 1;
        }
    }
    size
}

/// All distinct permutations of a multiset of exponents.
fn distinct_permutations(values: &[u32]) -> Vec<Vec<u32>> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(values.len());
    fn rec(
        remaining: usize,
        counts: &mut BTreeMap<u32, usize>,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        let keys: Vec<u32> = counts.keys().copied().collect();
        for v in keys {
            if counts[&v] == 0 {
                continue;
            }
            *counts.get_mut(&v).unwrap() -= 1;
            cur.push(v);
            rec(remaining - 1, counts, cur, out);
            cur.pop();
            *counts.get_mut(&v).unwrap() += 1;
        }
    }
    rec(values.len(), &mut counts, &mut cur, &mut out);
    out
}

// ---------------------------------------------------------------------------
// classical bases
// ---------------------------------------------------------------------------

/// Monomial symmetric polynomial; errors when the partition is longer than
/// the variable count (use `monomial_sym_or_zero` to get 0 instead).
pub fn monomial_sym(la: &Partition, nvars: usize) -> QResult<SymPoly> {
    if la.len() > nvars {
        return Err(QError::Length(format!("{la} needs more than {nvars} variables")));
    }
    Ok(monomial_sym_or_zero(la, nvars))
}

pub fn monomial_sym_or_zero(la: &Partition, nvars: usize) -> SymPoly {
    if la.len() > nvars {
        return SymPoly::zero(nvars);
    }
    let mut padded = la.parts().to_vec();
    padded.resize(nvars, 0);
    let mut p = SymPoly::zero(nvars);
    for perm in distinct_permutations(&padded) {
        p.insert(perm, Rat::one());
    }
    p
}

/// Power sum p_k = sum of x_i^k (p_0 = 1 by convention).
pub fn powersum(k: u32, nvars: usize) -> SymPoly {
    if k == 0 {
        return SymPoly::one(nvars);
    }
    let mut p = SymPoly::zero(nvars);
    for i in 0..nvars {
        let mut e = vec![0u32; nvars];
        e[i] = k;
        p.insert(e, Rat::one());
    }
    p
}

/// Elementary e_k = sum over k-subsets (zero when k exceeds the variables).
pub fn elementary(k: u32, nvars: usize) -> SymPoly {
    if k == 0 {
        return SymPoly::one(nvars);
    }
    if k as usize > nvars {
        return SymPoly::zero(nvars);
    }
    monomial_sym_or_zero(&Partition::new(&vec![1; k as usize]).unwrap(), nvars)
}

/// Complete homogeneous h_k = sum over all monomials of degree k.
pub fn complete(k: u32, nvars: usize) -> SymPoly {
    let mut p = SymPoly::zero(nvars);
    for e in tuples_with_sum(nvars, k) {
        p.insert(e, Rat::one());
    }
    p
}

/// Modified complete symmetric function attached to (q, t), defined by the
/// generating function
///
/// ```text
/// prod_i (t u x_i; q)_oo / (u x_i; q)_oo = sum_k u^k g_k(X; q, t),
/// ```
///
/// which expands per variable by the q-binomial theorem into
///
/// ```text
/// g_k = sum_(|kappa| = k) prod_i (t; q)_(kappa_i) / (q; q)_(kappa_i) x_i^(kappa_i).
/// ```
pub fn modified_complete(k: u32, nvars: usize, pt: &QtPoint) -> QResult<SymPoly> {
    let mut p = SymPoly::zero(nvars);
    for e in tuples_with_sum(nvars, k) {
        let mut c = Rat::one();
        for &ki in &e {
            let num = poch_int(&pt.t, &pt.q, ki as i64)?;
            let den = poch_int(&pt.q, &pt.q, ki as i64)?;
            c *= num.div_checked(&den)?;
        }
        p.insert(e, c);
    }
    Ok(p)
}

/// Product basis element f_la = f_(la_1) f_(la_2) ... for any single-index
/// family f.
pub fn product_basis(f: impl Fn(u32) -> SymPoly, la: &Partition, nvars: usize) -> SymPoly {
    let mut acc = SymPoly::one(nvars);
    for &part in la.parts() {
        acc = acc.mul_ref(&f(part));
    }
    acc
}

thread_local! {
    static PS_PROD: RefCell<HashMap<(Vec<u32>, usize), Rc<SymPoly>>> =
        RefCell::new(HashMap::new());
    static PS_MATRIX: RefCell<HashMap<(u32, usize), Rc<Vec<Vec<Rat>>>>> =
        RefCell::new(HashMap::new());
}

pub fn powersum_prod(la: &Partition, nvars: usize) -> SymPoly {
    let key = (la.parts().to_vec(), nvars);
    let hit = PS_PROD.with(|c| c.borrow().get(&key).cloned());
    if let Some(p) = hit {
        return (*p).clone();
    }
    let p = product_basis(|k| powersum(k, nvars), la, nvars);
    PS_PROD.with(|c| c.borrow_mut().insert(key, Rc::new(p.clone())));
    p
}

pub fn elementary_prod(la: &Partition, nvars: usize) -> SymPoly {
    product_basis(|k| elementary(k, nvars), la, nvars)
}

pub fn complete_prod(la: &Partition, nvars: usize) -> SymPoly {
    product_basis(|k| complete(k, nvars), la, nvars)
}

// ---------------------------------------------------------------------------
// power-sum expansion and the scalar product
// ---------------------------------------------------------------------------

/// Coefficient matrix of the degree-d power-sum products on the monomial
/// basis (square, rows and columns both indexed by partitions of d in the
/// descending enumeration order). Requires nvars >= d.
fn powersum_matrix(d: u32, nvars: usize) -> Rc<Vec<Vec<Rat>>> {
    let hit = PS_MATRIX.with(|c| c.borrow().get(&(d, nvars)).cloned());
    if let Some(m) = hit {
        return m;
    }
    let mus = partitions_of(d);
    let polys: Vec<BTreeMap<Partition, Rat>> = mus
        .iter()
        .map(|mu| powersum_prod(mu, nvars).monomial_coeffs().expect("power sums are symmetric"))
        .collect();
    let mat: Vec<Vec<Rat>> = mus
        .iter()
        .map(|nu| polys.iter().map(|p| p.get(nu).cloned().unwrap_or_else(Rat::zero)).collect())
        .collect();
    let rc = Rc::new(mat);
    PS_MATRIX.with(|c| c.borrow_mut().insert((d, nvars), rc.clone()));
    rc
}

/// Exact expansion on the power-sum basis.
///
/// Errors: `NotSymmetric` for non-symmetric input, `Degenerate` when the
/// variable count is below some homogeneous degree (the expansion is then
/// not unique).
pub fn to_powersum(f: &SymPoly) -> QResult<BTreeMap<Partition, Rat>> {
    let coeffs = f.monomial_coeffs()?;
    let mut out = BTreeMap::new();
    for d in f.degrees() {
        if d == 0 {
            let c = f.coeff(&vec![0; f.nvars()]);
            if !c.is_zero() {
                out.insert(Partition::empty(), c);
            }
            continue;
        }
        if (f.nvars() as u32) < d {
            return Err(QError::Degenerate(format!(
                "degree {d} exceeds the {} available variables",
                f.nvars()
            )));
        }
        let mus = partitions_of(d);
        let mat = powersum_matrix(d, f.nvars());
        let rhs: Vec<Rat> =
            mus.iter().map(|nu| coeffs.get(nu).cloned().unwrap_or_else(Rat::zero)).collect();
        let sol = solve_linear(&mat, &rhs)?;
        for (mu, c) in mus.into_iter().zip(sol) {
            if !c.is_zero() {
                out.insert(mu, c);
            }
        }
    }
    Ok(out)
}

/// Rebuilds a polynomial from power-sum coefficients.
pub fn from_powersum(coeffs: &BTreeMap<Partition, Rat>, nvars: usize) -> SymPoly {
    let mut acc = SymPoly::zero(nvars);
    for (mu, c) in coeffs {
        acc = acc.add_ref(&powersum_prod(mu, nvars).scale(c));
    }
    acc
}

/// Diagonal weight of p_la in the (q, t) scalar product:
/// z_la prod_i (1 - q^(la_i)) / (1 - t^(la_i)).
pub fn powersum_norm(la: &Partition, pt: &QtPoint) -> QResult<Rat> {
    let mut w = crate::partitions::z_lambda(la);
    for &part in la.parts() {
        let num = Rat::one() - pt.q.powi(part as i64)?;
        let den = Rat::one() - pt.t.powi(part as i64)?;
        w = w * num.div_checked(&den)?;
    }
    Ok(w)
}

/// The (q, t) scalar product of two symmetric polynomials.
pub fn scalar_product(f: &SymPoly, g: &SymPoly, pt: &QtPoint) -> QResult<Rat> {
    let cf = to_powersum(f)?;
    let cg = to_powersum(g)?;
    let mut acc = Rat::zero();
    for (mu, a) in &cf {
        if let Some(b) = cg.get(mu) {
            acc += a * b * powersum_norm(mu, pt)?;
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Macdonald polynomials by Gram-Schmidt
// ---------------------------------------------------------------------------

/// Cache of Macdonald polynomials at one fixed (q, t) point.
///
/// P_la is monic on m_la and orthogonal to every P_mu for mu preceding la
/// in the descending enumeration (a linear extension of dominance), which
/// pins it down uniquely. Q_la = b_la P_la.
pub struct MacdCache {
    pt: QtPoint,
    tables: RefCell<HashMap<(u32, usize), Rc<BTreeMap<Partition, SymPoly>>>>,
}

impl MacdCache {
    pub fn new(pt: QtPoint) -> Self {
        MacdCache { pt, tables: RefCell::new(HashMap::new()) }
    }

    pub fn pt(&self) -> &QtPoint {
        &self.pt
    }

    /// All P_la for |la| = d as polynomials in nv >= d variables.
    fn degree_table(&self, d: u32, nv: usize) -> QResult<Rc<BTreeMap<Partition, SymPoly>>> {
        if let Some(t) = self.tables.borrow().get(&(d, nv)) {
            return Ok(t.clone());
        }
        let mus = partitions_of(d);
        // expansion of each m_la on the power-sum basis: columns of the
        // inverse of the power-sum coefficient matrix
        let mat = powersum_matrix(d, nv);
        let k = mus.len();
        let mut m_to_p: Vec<Vec<Rat>> = Vec::with_capacity(k);
        for i in 0..k {
            let mut rhs = vec![Rat::zero(); k];
            rhs[i] = Rat::one();
            m_to_p.push(solve_linear(&mat, &rhs)?);
        }
        let weights: Vec<Rat> =
            mus.iter().map(|mu| powersum_norm(mu, &self.pt)).collect::<QResult<_>>()?;
        let dot = |a: &[Rat], b: &[Rat]| -> Rat {
            a.iter().zip(b).zip(&weights).map(|((x, y), w)| x * y * w).sum()
        };
        // Gram-Schmidt from the dominance-smallest partition upward
        let mut basis: Vec<Vec<Rat>> = Vec::with_capacity(k);
        let mut norms: Vec<Rat> = Vec::with_capacity(k);
        for i in (0..k).rev() {
            let mut v = m_to_p[i].clone();
            for (b, nb) in basis.iter().zip(&norms) {
                let c = dot(&v, b).div_checked(nb)?;
                for (ve, be) in v.iter_mut().zip(b) {
                    *ve -= &c * be;
                }
            }
            let n = dot(&v, &v);
            if n.is_zero() {
                return Err(QError::Degenerate(format!(
                    "vanishing norm during orthogonalization at degree {d}"
                )));
            }
            basis.push(v);
            norms.push(n);
        }
        basis.reverse();
        let mut table = BTreeMap::new();
        for (mu, vec) in mus.iter().zip(&basis) {
            let coeffs: BTreeMap<Partition, Rat> = partitions_of(d)
                .into_iter()
                .zip(vec.iter().cloned())
                .filter(|(_, c)| !c.is_zero())
                .collect();
            table.insert(mu.clone(), from_powersum(&coeffs, nv));
        }
        let rc = Rc::new(table);
        self.tables.borrow_mut().insert((d, nv), rc.clone());
        Ok(rc)
    }

    /// P_la in n variables (zero when the partition is longer than n).
    pub fn p(&self, la: &Partition, n: usize) -> QResult<SymPoly> {
        if la.len() > n {
            return Ok(SymPoly::zero(n));
        }
        if la.is_empty() {
            return Ok(SymPoly::one(n));
        }
        let d = la.size() as u32;
        let nv = n.max(d as usize);
        let table = self.degree_table(d, nv)?;
        let poly = table
            .get(la)
            .ok_or_else(|| QError::Domain(format!("{la} missing from degree table")))?;
        Ok(if nv > n { poly.restrict(n) } else { poly.clone() })
    }

    /// Q_la = b_la P_la in n variables.
    pub fn q(&self, la: &Partition, n: usize) -> QResult<SymPoly> {
        let b = crate::partitions::b_lambda(la, &self.pt)?;
        Ok(self.p(la, n)?.scale(&b))
    }
}

// ---------------------------------------------------------------------------
// specializations and the omega twist
// ---------------------------------------------------------------------------

/// The evaluation homomorphism p_r -> (1 - u^r)/(1 - t^r) applied to f.
/// At u = t^N this is evaluation at (1, t, ..., t^(N-1)).
pub fn epsilon_apply(f: &SymPoly, u: &Rat, pt: &QtPoint) -> QResult<Rat> {
    let coeffs = to_powersum(f)?;
    let mut acc = Rat::zero();
    for (mu, c) in &coeffs {
        let mut term = c.clone();
        for &r in mu.parts() {
            let num = Rat::one() - u.powi(r as i64)?;
            let den = Rat::one() - pt.t.powi(r as i64)?;
            term *= num.div_checked(&den)?;
        }
        acc += term;
    }
    Ok(acc)
}

/// Closed product form for the homomorphism applied to P_la
/// (any n >= l(la) gives the same value):
///
/// ```text
/// t^(sum (i-1) la_i) prod_(i=1)^n (u t^(1-i); q)_(la_i) / (t^(n+1-i); q)_(la_i)
///   * prod_(1<=i<j<=n) (t^(j-i+1); q)_(la_i-la_j) / (t^(j-i); q)_(la_i-la_j)
/// ```
pub fn epsilon_value_p(la: &Partition, pt: &QtPoint, u: &Rat, n: usize) -> QResult<Rat> {
    if n < la.len() {
        return Err(QError::Domain(format!("n = {n} below the length of {la}")));
    }
    let q = &pt.q;
    let mut acc = t_weight(la, pt, n)?;
    for i in 1..=n {
        let k = la.part(i) as i64;
        let num = poch_int(&(u * pt.t.powi(1 - i as i64)?), q, k)?;
        let den = poch_int(&pt.monomial(0, (n + 1 - i) as i64)?, q, k)?;
        acc = acc * num.div_checked(&den)?;
    }
    for i in 1..n {
        for j in (i + 1)..=n {
            let k = (la.part(i) - la.part(j)) as i64;
            let d = (j - i) as i64;
            let num = poch_int(&pt.monomial(0, d + 1)?, q, k)?;
            let den = poch_int(&pt.monomial(0, d)?, q, k)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// Closed product form for the homomorphism applied to Q_la:
///
/// ```text
/// t^(sum (i-1) la_i) prod_(i=1)^n (u t^(1-i); q)_(la_i) / (q t^(n-i); q)_(la_i)
///   * prod_(1<=i<j<=n) (q t^(j-i); q)_(la_i-la_j) / (q t^(j-i-1); q)_(la_i-la_j)
/// ```
pub fn epsilon_value_q(la: &Partition, pt: &QtPoint, u: &Rat, n: usize) -> QResult<Rat> {
    if n < la.len() {
        return Err(QError::Domain(format!("n = {n} below the length of {la}")));
    }
    let q = &pt.q;
    let mut acc = t_weight(la, pt, n)?;
    for i in 1..=n {
        let k = la.part(i) as i64;
        let num = poch_int(&(u * pt.t.powi(1 - i as i64)?), q, k)?;
        let den = poch_int(&pt.monomial(1, (n - i) as i64)?, q, k)?;
        acc = acc * num.div_checked(&den)?;
    }
    for i in 1..n {
        for j in (i + 1)..=n {
            let k = (la.part(i) - la.part(j)) as i64;
            let d = (j - i) as i64;
            let num = poch_int(&pt.monomial(1, d)?, q, k)?;
            let den = poch_int(&pt.monomial(1, d - 1)?, q, k)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// t raised to sum (i-1) la_i over i = 1..n.
fn t_weight(la: &Partition, pt: &QtPoint, n: usize) -> QResult<Rat> {
    let e: i64 = (1..=n).map(|i| (i as i64 - 1) * la.part(i) as i64).sum();
    pt.t.powi(e)
}

/// Principal value of P_la at (1, t, ..., t^(N-1)):
///
/// ```text
/// t^(sum (i-1) la_i) prod_(1<=i<j<=N) (t^(j-i+1); q)_(la_i-la_j)
///                                   / (t^(j-i); q)_(la_i-la_j)
/// ```
///
/// (zero when the partition is longer than N).
pub fn principal_value_p(la: &Partition, pt: &QtPoint, nvals: usize) -> QResult<Rat> {
    if la.len() > nvals {
        return Ok(Rat::zero());
    }
    let mut acc = t_weight(la, pt, nvals)?;
    for i in 1..nvals {
        for j in (i + 1)..=nvals {
            let k = (la.part(i) - la.part(j)) as i64;
            let d = (j - i) as i64;
            let num = poch_int(&pt.monomial(0, d + 1)?, &pt.q, k)?;
            let den = poch_int(&pt.monomial(0, d)?, &pt.q, k)?;
            acc = acc * num.div_checked(&den)?;
        }
    }
    Ok(acc)
}

/// The (q, t) twist of omega: p_r -> (-1)^(r-1) (1 - q^r)/(1 - t^r) p_r.
/// Sends the Q family at (q, t) to the conjugate P family at (t, q).
pub fn omega_apply(f: &SymPoly, pt: &QtPoint) -> QResult<SymPoly> {
    let coeffs = to_powersum(f)?;
    let mut twisted = BTreeMap::new();
    for (mu, c) in coeffs {
        let mut factor = c;
        for &r in mu.parts() {
            let num = Rat::one() - pt.q.powi(r as i64)?;
            let den = Rat::one() - pt.t.powi(r as i64)?;
            let sign = if r % 2 == 0 { -Rat::one() } else { Rat::one() };
            factor = factor * sign * num.div_checked(&den)?;
        }
        twisted.insert(mu, factor);
    }
    Ok(from_powersum(&twisted, f.nvars()))
}
