//! q-shifted factorials and evaluation points.
//!
//! Provides:
//! * `QtPoint` - a validated pair (q, t) of exact rationals with optional
//!   named extra parameters
//! * `poch_int`, `poch_multi`, `poch_quot` - finite q-shifted factorials
//!   (a; q)_k of any integer order, generic over the scalar type
//! * `poch_inf`, `poch_complex` - truncated infinite products (z; q)_oo and
//!   complex-order factorials (a; q)_c = (a; q)_oo / (a q^c; q)_oo
//! * `qt_power` - the q,t-analogue x^[c] of a power, reducing to x^k at
//!   integer c
//! * `draws` - seeded random parameter draws with genericity rejection
//!
//! Complex-order paths require a real rational base q in (0, 1); powers q^c
//! use the principal branch of the real logarithm.
//!
//! ```text
//! (a; q)_k = (1 - a)(1 - aq)...(1 - aq^(k-1))          k >= 0
//! (a; q)_k = 1 / ((1 - aq^-1)(1 - aq^-2)...(1 - aq^k))  k < 0
//! ```

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::Cx;
use crate::error::{QError, QResult};
use crate::scalar::{Rat, Scalar};

// ---------------------------------------------------------------------------
// evaluation points
// ---------------------------------------------------------------------------

/// Exact evaluation point (q, t) with optional named extras (u, a, b, ...).
///
/// Construction rejects q in {0, 1, -1} and t in {0, 1}; remaining
/// degeneracies (for example t = -1 meeting an even power) surface as
/// `Pole` errors at use.
#[derive(Clone, Debug, PartialEq)]
pub struct QtPoint {
    pub q: Rat,
    pub t: Rat,
    pub extras: BTreeMap<String, Rat>,
}

impl QtPoint {
    pub fn new(q: Rat, t: Rat) -> QResult<Self> {
        if q.is_zero() || q.abs().is_one() {
            return Err(QError::Domain(format!("q must avoid {{0, 1, -1}}, got {q}")));
        }
        if t.is_zero() || t.is_one() {
            return Err(QError::Domain(format!("t must avoid {{0, 1}}, got {t}")));
        }
        Ok(QtPoint { q, t, extras: BTreeMap::new() })
    }

    pub fn with_extra(mut self, name: &str, value: Rat) -> Self {
        self.extras.insert(name.to_string(), value);
        self
    }

    pub fn extra(&self, name: &str) -> QResult<&Rat> {
        self.extras
            .get(name)
            .ok_or_else(|| QError::Domain(format!("missing extra parameter '{name}'")))
    }

    /// The point with the roles of q and t exchanged (extras preserved).
    pub fn swapped(&self) -> QtPoint {
        QtPoint { q: self.t.clone(), t: self.q.clone(), extras: self.extras.clone() }
    }

    /// q^a t^b as an exact rational.
    pub fn monomial(&self, a: i64, b: i64) -> QResult<Rat> {
        Ok(self.q.powi(a)? * self.t.powi(b)?)
    }
}

// ---------------------------------------------------------------------------
// finite q-shifted factorials
// ---------------------------------------------------------------------------

/// (a; q)_k for any integer k.
pub fn poch_int<S: Scalar>(a: &S, q: &S, k: i64) -> QResult<S> {
    let mut acc = S::one();
    if k >= 0 {
        let mut apow = a.clone();
        for _ in 0..k {
            acc = acc * (S::one() - apow.clone());
            apow = apow * q.clone();
        }
        Ok(acc)
    } else {
        let qinv = S::one().div_checked(q)?;
        let mut apow = a.clone();
        for _ in 0..(-k) {
            apow = apow * qinv.clone();
            let f = S::one() - apow.clone();
            if f.is_zero() {
                return Err(QError::Pole("negative-order q-shifted factorial".into()));
            }
            acc = acc.div_checked(&f)?;
        }
        Ok(acc)
    }
}

/// (a1, a2, ..., am; q)_k = product of (ai; q)_k.
pub fn poch_multi<S: Scalar>(bases: &[S], q: &S, k: i64) -> QResult<S> {
    let mut acc = S::one();
    for a in bases {
        acc = acc * poch_int(a, q, k)?;
    }
    Ok(acc)
}

/// Product of factorials over `num` divided by the product over `den`,
/// all of order k.
pub fn poch_quot<S: Scalar>(num: &[S], den: &[S], q: &S, k: i64) -> QResult<S> {
    let n = poch_multi(num, q, k)?;
    let d = poch_multi(den, q, k)?;
    if d.is_zero() {
        return Err(QError::Pole("zero denominator in factorial quotient".into()));
    }
    n.div_checked(&d)
}

// ---------------------------------------------------------------------------
// infinite products and complex order
// ---------------------------------------------------------------------------

fn require_q01(q: &Rat) -> QResult<()> {
    if q.is_positive() && *q < Rat::one() {
        Ok(())
    } else {
        Err(QError::Domain(format!("complex-order paths need rational q in (0,1), got {q}")))
    }
}

/// (z; q)_oo truncated once the tail is certified below the working
/// precision: factors are accumulated until |z q^j| / (1 - q) falls under
/// 2^-(prec + 32).
pub fn poch_inf(z: &Cx, q: &Rat, prec: usize) -> QResult<Cx> {
    require_q01(q)?;
    let qf = Cx::from_rat(q, prec);
    let mut acc = Cx::one_p(prec);
    let mut w = z.clone();
    // bits lost to the geometric tail sum 1/(1-q)
    let slack = (Rat::one() - q.clone()).recip().to_integer().bits() as i64 + 1;
    let cutoff = -(prec as i64 + 32 + slack);
    let max_j = 4 * (prec + 64) * 8;
    for _ in 0..max_j {
        if w.mag2() < cutoff {
            return Ok(acc);
        }
        acc = acc.mul_ref(&(Cx::one_p(prec) - w.clone()));
        w = w.mul_ref(&qf);
    }
    Err(QError::Convergence(format!("infinite product did not settle (q = {q})")))
}

/// (a; q)_c = (a; q)_oo / (a q^c; q)_oo for complex order c.
pub fn poch_complex(a: &Cx, q: &Rat, c: &Cx, prec: usize) -> QResult<Cx> {
    let num = poch_inf(a, q, prec)?;
    let qc = c.pow_of_rat_base(q, prec)?;
    let den = poch_inf(&a.mul_ref(&qc), q, prec)?;
    if den.is_zero_val() {
        return Err(QError::Pole("complex-order q-shifted factorial".into()));
    }
    num.div_ref(&den)
}

/// The q,t-power
///
/// ```text
/// x^[c] = (tx; q)_c / (t; q)_c * (q/tx; q)_(-c) / (q/t; q)_(-c)
/// ```
///
/// reducing to the ordinary power x^k at integer c, and satisfying
/// x^[c + k] = x^[c] x^k.
pub fn qt_power(x: &Cx, c: &Cx, q: &Rat, t: &Rat, prec: usize) -> QResult<Cx> {
    if x.is_zero_val() {
        return Err(QError::Domain("q,t-power of zero".into()));
    }
    let tx = x.scale_rat(t);
    let tv = Cx::from_rat(t, prec);
    let qv = Cx::from_rat(q, prec);
    let q_over_tx = qv.div_ref(&tx)?;
    let q_over_t = Cx::from_rat(&(q / t), prec);
    let mc = c.neg_ref();
    let n1 = poch_complex(&tx, q, c, prec)?;
    let d1 = poch_complex(&tv, q, c, prec)?;
    let n2 = poch_complex(&q_over_tx, q, &mc, prec)?;
    let d2 = poch_complex(&q_over_t, q, &mc, prec)?;
    let d = d1.mul_ref(&d2);
    if d.is_zero_val() {
        return Err(QError::Pole("q,t-power denominator".into()));
    }
    n1.mul_ref(&n2).div_ref(&d)
}

// ---------------------------------------------------------------------------
// seeded draws
// ---------------------------------------------------------------------------

pub mod draws {
    //! Reproducible parameter draws.
    //!
    //! Every verification draw uses a fresh ChaCha substream derived from
    //! (seed, draw index), so draw k is identical no matter how many draws
    //! run or in which order.

    use super::*;

    /// Independent substream for one draw.
    pub fn substream(seed: u64, draw_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(draw_index);
        rng
    }

    /// Ratio of two nonzero integers from [-9, 9].
    pub fn small_ratio(rng: &mut ChaCha8Rng) -> Rat {
        let pick = |rng: &mut ChaCha8Rng| -> i64 {
            loop {
                let v = rng.gen_range(-9i64..=9);
                if v != 0 {
                    return v;
                }
            }
        };
        Rat::new(pick(rng).into(), pick(rng).into())
    }

    /// Nonzero rational with |x| != 1.
    pub fn small_ratio_nonunit(rng: &mut ChaCha8Rng) -> Rat {
        loop {
            let r = small_ratio(rng);
            if !r.abs().is_one() {
                return r;
            }
        }
    }

    /// Rational drawn from (0, 1/2] with denominator up to 64.
    pub fn q_in_unit(rng: &mut ChaCha8Rng) -> Rat {
        loop {
            let d = rng.gen_range(3i64..=64);
            let n = rng.gen_range(1i64..=d - 1);
            let r = Rat::new(n.into(), d.into());
            if r <= Rat::new(1.into(), 2.into()) && !r.is_zero() {
                return r;
            }
        }
    }

    /// `true` when q^a t^b != 1 for all |a| <= qa, |b| <= tb, (a,b) != (0,0).
    pub fn is_generic_pair(q: &Rat, t: &Rat, qa: i64, tb: i64) -> bool {
        if q.abs().is_one() || t.abs().is_one() || q.is_zero() || t.is_zero() {
            return false;
        }
        for a in -qa..=qa {
            for b in 0..=tb {
                if a == 0 && b == 0 {
                    continue;
                }
                let qa_pow = match q.powi(a) {
                    Ok(v) => v,
                    Err(_) => return false,
                };
                let tb_pow = match t.powi(b) {
                    Ok(v) => v,
                    Err(_) => return false,
                };
                if (qa_pow * tb_pow).is_one() {
                    return false;
                }
            }
        }
        true
    }

    /// Point with q, t free of multiplicative relations inside the given
    /// exponent windows. Windows must cover every monomial q^a t^b a
    /// computation can compare against 1.
    pub fn qt_generic(rng: &mut ChaCha8Rng, q_window: i64, t_window: i64) -> QtPoint {
        loop {
            let q = small_ratio_nonunit(rng);
            let t = small_ratio_nonunit(rng);
            if is_generic_pair(&q, &t, q_window, t_window) {
                if let Ok(pt) = QtPoint::new(q, t) {
                    return pt;
                }
            }
        }
    }

    /// Generic point with 0 < q <= 1/2 for numeric (convergent) paths.
    pub fn qt_generic_unit(rng: &mut ChaCha8Rng, q_window: i64, t_window: i64) -> QtPoint {
        loop {
            let q = q_in_unit(rng);
            let t = small_ratio_nonunit(rng);
            if is_generic_pair(&q, &t, q_window, t_window) {
                if let Ok(pt) = QtPoint::new(q, t) {
                    return pt;
                }
            }
        }
    }
}
