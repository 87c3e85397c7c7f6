//! Macdonald functions indexed by sequences of complex parts.
//!
//! The Q basis extends from integer partitions to arbitrary complex
//! sequences la = (la_1, ..., la_n) once q-shifted factorials of complex
//! order are admitted. This module provides:
//!
//! * [`ComplexEvalContext`] - a finite alphabet x_0, x_1, ..., x_r of
//!   complex values together with a rational base point 0 < q < 1 and
//!   t != 0, a working precision, and a truncation policy for the
//!   nonterminating sums
//! * [`g_complex`] - the one-row function Q_(c), a prefactor of
//!   complex-order factorials times an r-fold series over the tail of
//!   the alphabet
//! * [`q_complex`] - Q_la for an arbitrary complex sequence through the
//!   determinant recursion, reducing to the ordinary Macdonald
//!   polynomial when la is an integer partition
//! * [`evaluation_formula`] - the closed product form of the
//!   hypergeometric principal specialization applied to Q_la
//! * [`single_variable_formula`] - the closed product form of Q_la on a
//!   one-letter alphabet, which does not vanish for long complex la
//! * [`one_row_duality`] - both sides of the one-row duality, each a
//!   2phi1 series with its own prefactor
//!
//! Complex parts enter only through the values q^(la_i), taken on the
//! principal branch of the real logarithm. Orders that are exact
//! integers are routed through finite q-shifted factorials, so integer
//! sequences terminate and never pay for infinite products; in
//! particular a negative integer one-row order gives an exact zero and
//! the recursion over an integer partition stops by itself.
//!
//! The alphabet keeps x_0 distinguished: the one-row series is symmetric
//! in x_1, ..., x_r only, and full symmetry is never asserted.

use astro_float::{BigFloat, RoundingMode};
use num::{One, Signed, Zero};

use crate::complex::{bf_le, rat_to_bf, Cx};
use crate::error::{QError, QResult};
use crate::hyperseries::{rat_pow10_neg, TruncationPolicy};
use crate::macdrec::recursion_coeff;
use crate::partitions::tuples_with_sum;
use crate::qkernel::{poch_inf, poch_int};
use crate::scalar::{Rat, Scalar};

const RM: RoundingMode = RoundingMode::ToEven;

// ---------------------------------------------------------------------------
// evaluation context
// ---------------------------------------------------------------------------

/// Evaluation data for complex-part Macdonald functions: the alphabet
/// x_0, x_1, ..., x_r, the base point with 0 < q < 1 and t != 0, the
/// working precision in bits, and the truncation policy applied to
/// nonterminating sums.
#[derive(Clone, Debug)]
pub struct ComplexEvalContext {
    q: Rat,
    t: Rat,
    xs: Vec<Cx>,
    prec: usize,
    policy: TruncationPolicy,
}

impl ComplexEvalContext {
    /// Validates 0 < q < 1, t != 0, a nonempty alphabet with x_0 != 0,
    /// and the convergence requirement |q x_i / (t x_0)| < 1 for every
    /// i >= 1.
    pub fn new(
        q: Rat,
        t: Rat,
        xs: Vec<Cx>,
        prec: usize,
        policy: TruncationPolicy,
    ) -> QResult<Self> {
        policy.validate()?;
        if !q.is_positive() || q >= Rat::one() {
            return Err(QError::Domain(format!("q = {q} is not inside (0, 1)")));
        }
        if t.is_zero() {
            return Err(QError::Domain("t must be nonzero".into()));
        }
        if prec < 32 {
            return Err(QError::Domain("working precision below 32 bits".into()));
        }
        let Some(x0) = xs.first() else {
            return Err(QError::Domain("the alphabet needs at least x_0".into()));
        };
        if x0.is_zero_val() {
            return Err(QError::Domain("x_0 must be nonzero".into()));
        }
        let ctx = ComplexEvalContext { q, t, xs, prec, policy };
        let one = BigFloat::from_word(1, ctx.prec);
        for i in 1..ctx.xs.len() {
            let rho = ctx.ratio(i)?.abs_val();
            if !matches!(rho.cmp(&one), Some(c) if c < 0) {
                return Err(QError::Convergence(format!(
                    "|q x_{i} / (t x_0)| = {rho} is not below one"
                )));
            }
        }
        Ok(ctx)
    }

    /// The alphabet (t^r, t^(r-1), ..., t, 1) realizing the evaluation
    /// homomorphism f -> f(t^r, ..., t, 1) attached to u = t^(r+1).
    /// Convergence on the grid needs |q| < |t|^(r+1).
    pub fn principal_grid(
        q: Rat,
        t: Rat,
        r: usize,
        prec: usize,
        policy: TruncationPolicy,
    ) -> QResult<Self> {
        let xs = (0..=r)
            .map(|i| Ok(Cx::from_rat(&t.powi((r - i) as i64)?, prec)))
            .collect::<QResult<Vec<_>>>()?;
        ComplexEvalContext::new(q, t, xs, prec, policy)
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn t(&self) -> &Rat {
        &self.t
    }

    pub fn alphabet(&self) -> &[Cx] {
        &self.xs
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    /// q x_i / (t x_0), the i-th series ratio
    fn ratio(&self, i: usize) -> QResult<Cx> {
        let num = self.xs[i].scale_rat(&self.q);
        let den = self.xs[0].scale_rat(&self.t);
        num.div_ref(&den)
    }

    /// Same alphabet at raised precision with a tightened target, for
    /// factors evaluated inside an outer truncated sum.
    fn tightened(&self) -> ComplexEvalContext {
        let mut c = self.clone();
        c.prec += 64;
        c.policy.target = c.policy.target * rat_pow10_neg(4);
        c
    }
}

// ---------------------------------------------------------------------------
// factorial quotients
// ---------------------------------------------------------------------------

/// q^c on the principal branch, exact when c is an exact integer.
fn q_pow(q: &Rat, c: &Cx, prec: usize) -> QResult<Cx> {
    if let Some(k) = c.as_exact_i64() {
        return Ok(Cx::from_rat(&q.powi(k)?, prec));
    }
    c.pow_of_rat_base(q, prec)
}

/// Running product of q-shifted factorials, kept as one numerator and
/// one denominator so that a vanishing denominator factor is reported as
/// a pole only when no vanishing numerator factor has already forced the
/// value to zero. Exact integer orders contribute finite products, with
/// negative orders flipped to the opposite side through
///
/// ```text
/// (a; q)_(-m) = 1 / (a q^(-m); q)_m,
/// ```
///
/// and all other orders contribute the quotient of infinite products
/// (a; q)_oo / (a q^c; q)_oo.
struct FactorialQuotient {
    q: Rat,
    qx: Cx,
    num: Cx,
    den: Cx,
    prec: usize,
}

impl FactorialQuotient {
    fn new(q: &Rat, prec: usize) -> Self {
        FactorialQuotient {
            q: q.clone(),
            qx: Cx::from_rat(q, prec),
            num: Cx::one_p(prec),
            den: Cx::one_p(prec),
            prec,
        }
    }

    fn push(&mut self, v: Cx, to_num: bool) {
        if to_num {
            self.num = self.num.mul_ref(&v);
        } else {
            self.den = self.den.mul_ref(&v);
        }
    }

    /// multiplies by (a; q)_c, on the numerator side when `to_num` holds
    fn poch(&mut self, a: &Cx, c: &Cx, to_num: bool) -> QResult<()> {
        if let Some(k) = c.as_exact_i64() {
            if k >= 0 {
                let v = poch_int(a, &self.qx, k)?;
                self.push(v, to_num);
            } else {
                let shifted = a.scale_rat(&self.q.powi(k)?);
                let v = poch_int(&shifted, &self.qx, -k)?;
                self.push(v, !to_num);
            }
            return Ok(());
        }
        let qc = q_pow(&self.q, c, self.prec)?;
        self.push(poch_inf(a, &self.q, self.prec)?, to_num);
        self.push(poch_inf(&a.mul_ref(&qc), &self.q, self.prec)?, !to_num);
        Ok(())
    }

    fn value(self) -> QResult<Cx> {
        if self.num.is_zero_val() {
            return Ok(Cx::zero_p(self.prec));
        }
        if self.den.is_zero_val() {
            return Err(QError::Pole(
                "vanishing q-shifted factorial in a denominator".into(),
            ));
        }
        self.num.div_ref(&self.den)
    }
}

// ---------------------------------------------------------------------------
// the one-row function
// ---------------------------------------------------------------------------

/// One-row Macdonald function Q_(c) of complex order on the context
/// alphabet,
///
/// ```text
/// g_c = (t x_0; q)_c / (q; q)_c * (q/(t x_0); q)_(-c) / ((q/t); q)_(-c)
///     * sum_(k in N^r) (q^(-c); q)_|k| / (q^(1-c)/t; q)_|k|
///       prod_(i=1)^r (t; q)_(k_i) / (q; q)_(k_i) (q x_i / (t x_0))^(k_i).
/// ```
///
/// For a nonnegative integer order the series terminates at |k| <= c and
/// the value is the exact one-row polynomial; a negative integer order
/// vanishes identically, and q = t with fractional order is a pole.
/// Otherwise shells of constant |k| accumulate under the context policy.
pub fn g_complex(c: &Cx, ctx: &ComplexEvalContext) -> QResult<Cx> {
    let prec = ctx.prec;
    let tx0 = ctx.xs[0].scale_rat(&ctx.t);
    let qx = Cx::from_rat(&ctx.q, prec);
    let mc = c.neg_ref();
    let mut acc = FactorialQuotient::new(&ctx.q, prec);
    acc.poch(&tx0, c, true)?;
    acc.poch(&qx, c, false)?;
    acc.poch(&qx.div_ref(&tx0)?, &mc, true)?;
    acc.poch(&Cx::from_rat(&(ctx.q.clone() / ctx.t.clone()), prec), &mc, false)?;
    let pref = acc.value()?;
    if pref.is_zero_val() {
        return Ok(pref);
    }
    Ok(pref.mul_ref(&g_series(c, ctx)?))
}

/// The r-fold series factor of [`g_complex`]. Shells of constant |k|
/// share the coefficient (q^(-c); q)_|k| / (q^(1-c)/t; q)_|k|, updated
/// incrementally, and the inner sum over k with |k| = s is the degree-s
/// coefficient of the product of the r one-variable series
/// sum_k (t; q)_k / (q; q)_k z_i^k, accumulated by convolution.
fn g_series(c: &Cx, ctx: &ComplexEvalContext) -> QResult<Cx> {
    let prec = ctx.prec;
    let r = ctx.xs.len() - 1;
    if r == 0 {
        return Ok(Cx::one_p(prec));
    }
    let qx = Cx::from_rat(&ctx.q, prec);
    let one = Cx::one_p(prec);
    // shell coefficient state: w_num = q^(-c) q^s, w_den = q^(1-c)/t q^s
    let mut w_num = q_pow(&ctx.q, &c.neg_ref(), prec)?;
    let mut w_den = w_num.scale_rat(&(ctx.q.clone() / ctx.t.clone()));
    let mut coeff = Cx::one_p(prec);
    // column state: col[i][k] = (t; q)_k / (q; q)_k z_(i+1)^k, with the
    // shared factor (1 - t q^(s-1)) / (1 - q^s) advanced once per degree
    let zs: Vec<Cx> = (1..=r).map(|i| ctx.ratio(i)).collect::<QResult<Vec<_>>>()?;
    let mut cols: Vec<Vec<Cx>> = vec![vec![Cx::one_p(prec)]; r];
    let mut tqs = Cx::from_rat(&ctx.t, prec);
    let mut qs = qx.clone();
    // convolution table: dp[i][s] = degree-s coefficient of the product
    // of the first i columns
    let mut dp: Vec<Vec<Cx>> = vec![vec![Cx::one_p(prec)]; r + 1];
    let terminating = c.as_exact_i64().filter(|m| *m >= 0);
    let cap = terminating.unwrap_or(ctx.policy.shell_cap);
    let one_bf = BigFloat::from_word(1, prec);
    let target = rat_to_bf(&ctx.policy.target, prec);
    let mut partial = Cx::zero_p(prec);
    let mut quiet = 0usize;
    for s in 0..=cap {
        if s > 0 {
            let su = s as usize;
            coeff = coeff
                .mul_ref(&one.sub_ref(&w_num))
                .div_ref(&one.sub_ref(&w_den))?;
            w_num = w_num.mul_ref(&qx);
            w_den = w_den.mul_ref(&qx);
            let col_num = one.sub_ref(&tqs);
            let col_den = one.sub_ref(&qs);
            let step = col_num.div_ref(&col_den)?;
            tqs = tqs.mul_ref(&qx);
            qs = qs.mul_ref(&qx);
            for i in 0..r {
                let next = cols[i][su - 1].mul_ref(&step).mul_ref(&zs[i]);
                cols[i].push(next);
            }
            dp[0].push(Cx::zero_p(prec));
            for i in 1..=r {
                let mut v = Cx::zero_p(prec);
                for k in 0..=su {
                    if !cols[i - 1][k].is_zero_val() {
                        v = v.add_ref(&dp[i - 1][su - k].mul_ref(&cols[i - 1][k]));
                    }
                }
                dp[i].push(v);
            }
        }
        let shell = coeff.mul_ref(&dp[r][s as usize]);
        partial = partial.add_ref(&shell);
        if terminating.is_none() {
            let sa = shell.abs_val();
            let mut scale = partial.abs_val();
            if bf_le(&scale, &one_bf) {
                scale = one_bf.clone();
            }
            let thresh = scale.mul(&target, prec, RM);
            if bf_le(&sa, &thresh) {
                quiet += 1;
                if quiet >= ctx.policy.quiet_shells && s >= 1 {
                    return Ok(partial);
                }
            } else {
                quiet = 0;
            }
        }
    }
    if terminating.is_some() {
        Ok(partial)
    } else {
        Err(QError::Convergence(format!(
            "one-row series found no {} quiet shells within degree {}",
            ctx.policy.quiet_shells, ctx.policy.shell_cap
        )))
    }
}

// ---------------------------------------------------------------------------
// the recursion
// ---------------------------------------------------------------------------

/// Q_la for an arbitrary complex sequence la on the context alphabet,
/// through the recursion
///
/// ```text
/// Q_(la_1, ..., la_(n+1)) = sum_(theta in N^n) c_theta(u)
///     Q_(la_(n+1) - |theta|) Q_(la_1 + theta_1, ..., la_n + theta_n),
/// u_i = q^(la_i - la_(n+1)) t^(n-i),
/// ```
///
/// with both factors taken on the full alphabet and the length-n factor
/// expanded recursively. For an integer partition the sum terminates at
/// |theta| <= la_(n+1) because the lower one-row factors vanish exactly,
/// and the value is the ordinary Macdonald polynomial evaluated on the
/// alphabet; otherwise shells of constant |theta| accumulate under the
/// quiet-shell rule. Inner factors are evaluated at raised precision
/// with a tightened target so their truncation error stays below the
/// outer stopping test.
pub fn q_complex(parts: &[Cx], ctx: &ComplexEvalContext) -> QResult<Cx> {
    let prec = ctx.prec;
    let l = parts.len();
    if l == 0 {
        return Ok(Cx::one_p(prec));
    }
    if l == 1 {
        return g_complex(&parts[0], ctx);
    }
    let n = l - 1;
    let last = &parts[l - 1];
    let terminating = last.as_exact_i64();
    if let Some(m) = terminating {
        if m < 0 {
            return Ok(Cx::zero_p(prec));
        }
    }
    let inner_ctx = ctx.tightened();
    let wp = inner_ctx.prec;
    let qx = Cx::from_rat(&ctx.q, wp);
    let tx = Cx::from_rat(&ctx.t, wp);
    let mut us = Vec::with_capacity(n);
    for (i, part) in parts.iter().enumerate().take(n) {
        let u = q_pow(&ctx.q, &part.sub_ref(last), wp)?
            .scale_rat(&ctx.t.powi((n - 1 - i) as i64)?);
        us.push(u);
    }
    let cap = terminating.unwrap_or(ctx.policy.shell_cap);
    let one_bf = BigFloat::from_word(1, prec);
    let target = rat_to_bf(&ctx.policy.target, prec);
    let mut partial = Cx::zero_p(prec);
    let mut quiet = 0usize;
    for s in 0..=cap {
        let row = g_complex(&last.sub_ref(&Cx::from_i64(s, wp)), &inner_ctx)?;
        let mut shell = Cx::zero_p(wp);
        if !row.is_zero_val() {
            for theta in tuples_with_sum(n, s as u32) {
                let cth = recursion_coeff(&theta, &us, &qx, &tx)?;
                if cth.is_zero_val() {
                    continue;
                }
                let shifted: Vec<Cx> = (0..n)
                    .map(|i| parts[i].add_ref(&Cx::from_i64(theta[i] as i64, wp)))
                    .collect();
                let inner = q_complex(&shifted, &inner_ctx)?;
                shell = shell.add_ref(&cth.mul_ref(&inner));
            }
            shell = shell.mul_ref(&row);
        }
        partial = partial.add_ref(&shell);
        if terminating.is_none() {
            let sa = shell.abs_val();
            let mut scale = partial.abs_val();
            if bf_le(&scale, &one_bf) {
                scale = one_bf.clone();
            }
            let thresh = scale.mul(&target, prec, RM);
            if bf_le(&sa, &thresh) {
                quiet += 1;
                if quiet >= ctx.policy.quiet_shells && s >= 1 {
                    return Ok(partial);
                }
            } else {
                quiet = 0;
            }
        }
    }
    if terminating.is_some() {
        Ok(partial)
    } else {
        Err(QError::Convergence(format!(
            "recursion found no {} quiet shells within degree {}",
            ctx.policy.quiet_shells, ctx.policy.shell_cap
        )))
    }
}

// ---------------------------------------------------------------------------
// closed product formulas
// ---------------------------------------------------------------------------

/// The hypergeometric principal specialization of Q_la for a complex
/// sequence la = (la_1, ..., la_n),
///
/// ```text
/// prod_(i=1)^n (u; q)_(la_i) / (q t^(n-i); q)_(la_i)
///            * (q/u; q)_(-la_i) / (q t^(i-1)/u; q)_(-la_i)
/// * prod_(i<j) (q t^(j-i); q)_(la_i-la_j) / (q t^(j-i-1); q)_(la_i-la_j),
/// ```
///
/// which for an integer partition and u = t^(r+1) is the principal
/// specialization Q_la(t^r, ..., t, 1), and whose value is unchanged
/// under padding la with exact zero parts.
pub fn evaluation_formula(parts: &[Cx], u: &Cx, q: &Rat, t: &Rat, prec: usize) -> QResult<Cx> {
    if u.is_zero_val() {
        return Err(QError::Domain("the specialization point u must be nonzero".into()));
    }
    if t.is_zero() {
        return Err(QError::Domain("t must be nonzero".into()));
    }
    let n = parts.len();
    let qx = Cx::from_rat(q, prec);
    let mut acc = FactorialQuotient::new(q, prec);
    for (i, c) in parts.iter().enumerate() {
        let mc = c.neg_ref();
        acc.poch(u, c, true)?;
        acc.poch(&Cx::from_rat(&(q * t.powi((n - 1 - i) as i64)?), prec), c, false)?;
        let q_over_u = qx.div_ref(u)?;
        acc.poch(&q_over_u, &mc, true)?;
        acc.poch(&q_over_u.scale_rat(&t.powi(i as i64)?), &mc, false)?;
    }
    pair_factors(&mut acc, parts, q, t, prec)?;
    acc.value()
}

/// Q_la on the one-letter alphabet {x},
///
/// ```text
/// prod_(i=1)^n (t x; q)_(la_i) / (q t^(n-i); q)_(la_i)
///            * (q/(t x); q)_(-la_i) / (q t^(i-2); q)_(-la_i)
/// * prod_(i<j) (q t^(j-i); q)_(la_i-la_j) / (q t^(j-i-1); q)_(la_i-la_j),
/// ```
///
/// which for complex la need not vanish however many parts la has, while
/// an integer partition collapses to the Kronecker form
/// (t; q)_(la_1) / (q; q)_(la_1) x^(la_1) delta_(la_2, 0) ... delta_(la_n, 0).
/// The value is unchanged under padding la with exact zero parts.
pub fn single_variable_formula(
    parts: &[Cx],
    x: &Cx,
    q: &Rat,
    t: &Rat,
    prec: usize,
) -> QResult<Cx> {
    if x.is_zero_val() {
        return Err(QError::Domain("the alphabet letter x must be nonzero".into()));
    }
    if t.is_zero() {
        return Err(QError::Domain("t must be nonzero".into()));
    }
    let n = parts.len();
    let tx = x.scale_rat(t);
    let qx = Cx::from_rat(q, prec);
    let mut acc = FactorialQuotient::new(q, prec);
    for (i, c) in parts.iter().enumerate() {
        let mc = c.neg_ref();
        acc.poch(&tx, c, true)?;
        acc.poch(&Cx::from_rat(&(q * t.powi((n - 1 - i) as i64)?), prec), c, false)?;
        acc.poch(&qx.div_ref(&tx)?, &mc, true)?;
        acc.poch(&Cx::from_rat(&(q * t.powi(i as i64 - 1)?), prec), &mc, false)?;
    }
    pair_factors(&mut acc, parts, q, t, prec)?;
    acc.value()
}

/// shared i < j part of the closed product formulas
fn pair_factors(
    acc: &mut FactorialQuotient,
    parts: &[Cx],
    q: &Rat,
    t: &Rat,
    prec: usize,
) -> QResult<()> {
    let n = parts.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = parts[i].sub_ref(&parts[j]);
            let e = (j - i) as i64;
            acc.poch(&Cx::from_rat(&(q * t.powi(e)?), prec), &d, true)?;
            acc.poch(&Cx::from_rat(&(q * t.powi(e - 1)?), prec), &d, false)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// the one-row duality
// ---------------------------------------------------------------------------

/// 2phi1 series with numerator parameters a, b, denominator parameter c
/// and argument z, summed termwise. A `cap` of m stops the sum exactly
/// after the q^(-m) numerator parameter has emptied it; without a cap
/// the argument must lie inside the unit disc and the policy stops the
/// sum after its quiet shells.
fn phi21(
    a: &Cx,
    b: &Cx,
    c: &Cx,
    z: &Cx,
    q: &Rat,
    prec: usize,
    policy: &TruncationPolicy,
    cap: Option<u32>,
) -> QResult<Cx> {
    let one = Cx::one_p(prec);
    let one_bf = BigFloat::from_word(1, prec);
    let target = rat_to_bf(&policy.target, prec);
    let qx = Cx::from_rat(q, prec);
    let mut wa = a.clone();
    let mut wb = b.clone();
    let mut wc = c.clone();
    let mut wq = qx.clone();
    let mut term = Cx::one_p(prec);
    let mut partial = Cx::zero_p(prec);
    let mut quiet = 0usize;
    let last = cap.map(|m| m as i64).unwrap_or(policy.shell_cap);
    for k in 0..=last {
        if k > 0 {
            let num = one.sub_ref(&wa).mul_ref(&one.sub_ref(&wb));
            let den = one.sub_ref(&wc).mul_ref(&one.sub_ref(&wq));
            term = term.mul_ref(&num).div_ref(&den)?.mul_ref(z);
            wa = wa.mul_ref(&qx);
            wb = wb.mul_ref(&qx);
            wc = wc.mul_ref(&qx);
            wq = wq.mul_ref(&qx);
        }
        partial = partial.add_ref(&term);
        if cap.is_none() {
            let ta = term.abs_val();
            let mut scale = partial.abs_val();
            if bf_le(&scale, &one_bf) {
                scale = one_bf.clone();
            }
            let thresh = scale.mul(&target, prec, RM);
            if bf_le(&ta, &thresh) {
                quiet += 1;
                if quiet >= policy.quiet_shells && k >= 1 {
                    return Ok(partial);
                }
            } else {
                quiet = 0;
            }
        }
    }
    if cap.is_some() {
        Ok(partial)
    } else {
        Err(QError::Convergence(format!(
            "2phi1 found no {} quiet terms within {} terms",
            policy.quiet_shells, policy.shell_cap
        )))
    }
}

/// Both sides of the one-row duality for complex one-row orders c and d,
///
/// ```text
/// Q_(c)(q^d t, 1) / Q_(c)(t, 1) =
///   (t x_0; q)_c / (t^2; q)_c * (q/(t x_0); q)_(-c) / ((q/t); q)_(-c)
///   * 2phi1[q^(-c), t; q^(1-c)/t; q, q^(1-d)/t^2],      x_0 = q^d t,
/// ```
///
/// returned as the pair (value at (c, d), value at (d, c)); the duality
/// is their equality. A nonterminating side needs its series argument
/// q^(1-d)/t^2 inside the unit disc; a nonnegative integer order
/// terminates its side and lifts that requirement.
pub fn one_row_duality(
    c: &Cx,
    d: &Cx,
    q: &Rat,
    t: &Rat,
    prec: usize,
    policy: &TruncationPolicy,
) -> QResult<(Cx, Cx)> {
    if !q.is_positive() || *q >= Rat::one() {
        return Err(QError::Domain(format!("q = {q} is not inside (0, 1)")));
    }
    if t.is_zero() {
        return Err(QError::Domain("t must be nonzero".into()));
    }
    policy.validate()?;
    Ok((
        duality_side(c, d, q, t, prec, policy)?,
        duality_side(d, c, q, t, prec, policy)?,
    ))
}

/// one side of the duality: the prefactor and its 2phi1 series
fn duality_side(
    c: &Cx,
    d: &Cx,
    q: &Rat,
    t: &Rat,
    prec: usize,
    policy: &TruncationPolicy,
) -> QResult<Cx> {
    let qx = Cx::from_rat(q, prec);
    let one = Cx::one_p(prec);
    let x0 = q_pow(q, d, prec)?.scale_rat(t);
    let tx0 = x0.scale_rat(t);
    let mc = c.neg_ref();
    let mut acc = FactorialQuotient::new(q, prec);
    acc.poch(&tx0, c, true)?;
    acc.poch(&Cx::from_rat(&(t * t), prec), c, false)?;
    acc.poch(&qx.div_ref(&tx0)?, &mc, true)?;
    acc.poch(&Cx::from_rat(&(q / t), prec), &mc, false)?;
    let pref = acc.value()?;
    let cap = c.as_exact_i64().and_then(|k| u32::try_from(k).ok());
    let z = q_pow(q, &one.sub_ref(d), prec)?.scale_rat(&(t * t).recip());
    if cap.is_none() {
        let za = z.abs_val();
        let one_bf = BigFloat::from_word(1, prec);
        if !matches!(za.cmp(&one_bf), Some(v) if v < 0) {
            return Err(QError::Convergence(format!(
                "duality series argument has modulus {za}, outside the unit disc"
            )));
        }
    }
    let a = q_pow(q, &mc, prec)?;
    let b = Cx::from_rat(t, prec);
    let cc = q_pow(q, &one.sub_ref(c), prec)?.scale_rat(&t.recip());
    let series = phi21(&a, &b, &cc, &z, q, prec, policy, cap)?;
    Ok(pref.mul_ref(&series))
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
