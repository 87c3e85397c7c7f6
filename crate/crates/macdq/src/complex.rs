//! Arbitrary-precision complex scalars.
//!
//! Provides:
//! * `Cx` - a complex number with arbitrary-precision binary floating point
//!   parts and an attached working precision in bits
//! * complex exponentials and powers `q^c` with a rational base `q` in (0,1)
//!   evaluated on the principal branch of the real logarithm
//! * conversion from exact rationals at a requested precision
//!
//! Every arithmetic operation rounds to the larger of the operand precisions,
//! so a computation's working precision is fixed by the precision used when
//! the inputs were constructed.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::Signed;

use crate::error::{QError, QResult};

const RM: RoundingMode = RoundingMode::ToEven;

/// Fallback precision for contextless constructions (`zero()`, `one()`).
/// Mixed-precision arithmetic rounds to the larger operand precision, so
/// values built at this precision never degrade a computation.
pub const DEFAULT_PREC: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

// ---------------------------------------------------------------------------
// BigFloat helpers
// ---------------------------------------------------------------------------

/// Converts a (signed) big integer exactly; precision is raised as needed so
/// no rounding occurs.
fn bigint_to_bf(v: &BigInt, p: usize) -> BigFloat {
    let (sign, digits) = v.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::new(p);
    }
    let s = match sign {
        num::bigint::Sign::Minus => Sign::Neg,
        _ => Sign::Pos,
    };
    let bits = 64 * digits.len();
    let mut bf = BigFloat::from_words(&digits, s, bits as i32);
    if bf.precision().map(|mp| mp < p).unwrap_or(false) {
        bf.set_precision(p, RM).expect("precision raise");
    }
    bf
}

/// Converts an exact rational to a float with `p` bits of mantissa.
pub fn rat_to_bf(r: &BigRational, p: usize) -> BigFloat {
    let pw = p + 32;
    let n = bigint_to_bf(r.numer(), pw);
    let d = bigint_to_bf(r.denom(), pw);
    n.div(&d, p, RM)
}

/// Parses a decimal literal such as `"1e-15"` at precision `p`.
pub fn bf_from_decimal(s: &str, p: usize) -> BigFloat {
    with_consts(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc))
}

fn bf_to_string(x: &BigFloat) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    with_consts(|cc| x.format(Radix::Dec, RM, cc).unwrap_or_else(|_| "nan".to_string()))
}

/// `true` when `a <= b`; NaN compares false.
pub fn bf_le(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c <= 0)
}

// ---------------------------------------------------------------------------
// Cx
// ---------------------------------------------------------------------------

/// Complex scalar with arbitrary-precision parts.
#[derive(Clone, Debug)]
pub struct Cx {
    re: BigFloat,
    im: BigFloat,
    p: usize,
}

impl Cx {
    pub fn new(re: BigFloat, im: BigFloat, p: usize) -> Self {
        Cx { re, im, p }
    }

    pub fn zero_p(p: usize) -> Self {
        Cx { re: BigFloat::new(p), im: BigFloat::new(p), p }
    }

    pub fn one_p(p: usize) -> Self {
        Cx { re: BigFloat::from_word(1, p), im: BigFloat::new(p), p }
    }

    pub fn from_i64(v: i64, p: usize) -> Self {
        Cx { re: BigFloat::from_i64(v, p), im: BigFloat::new(p), p }
    }

    pub fn from_rat(r: &BigRational, p: usize) -> Self {
        Cx { re: rat_to_bf(r, p), im: BigFloat::new(p), p }
    }

    pub fn from_rat_pair(re: &BigRational, im: &BigRational, p: usize) -> Self {
        Cx { re: rat_to_bf(re, p), im: rat_to_bf(im, p), p }
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn prec(&self) -> usize {
        self.p
    }

    pub fn is_zero_val(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_nan(&self) -> bool {
        self.re.is_nan() || self.im.is_nan()
    }

    /// The exact machine-size integer value, when the number is one.
    pub fn as_exact_i64(&self) -> Option<i64> {
        if !self.im.is_zero() || self.re.is_nan() {
            return None;
        }
        if self.re.is_zero() {
            return Some(0);
        }
        if !self.re.is_int() {
            return None;
        }
        let (words, _, sign, e, _) = self.re.as_raw_parts()?;
        if !(1..=62).contains(&e) {
            return None;
        }
        // value = 0.mantissa * 2^e; the integer is the top e bits of the
        // normalized mantissa, which live in the most significant word
        let top = *words.last()?;
        let v = (top >> (64 - e as u32)) as i64;
        Some(if sign == Sign::Neg { -v } else { v })
    }

    // -- arithmetic ---------------------------------------------------------

    fn join(&self, o: &Cx) -> usize {
        self.p.max(o.p)
    }

    pub fn add_ref(&self, o: &Cx) -> Cx {
        let p = self.join(o);
        Cx { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM), p }
    }

    pub fn sub_ref(&self, o: &Cx) -> Cx {
        let p = self.join(o);
        Cx { re: self.re.sub(&o.re, p, RM), im: self.im.sub(&o.im, p, RM), p }
    }

    pub fn mul_ref(&self, o: &Cx) -> Cx {
        let p = self.join(o);
        if self.im.is_zero() && o.im.is_zero() {
            return Cx { re: self.re.mul(&o.re, p, RM), im: BigFloat::new(p), p };
        }
        let ac = self.re.mul(&o.re, p, RM);
        let bd = self.im.mul(&o.im, p, RM);
        let ad = self.re.mul(&o.im, p, RM);
        let bc = self.im.mul(&o.re, p, RM);
        Cx { re: ac.sub(&bd, p, RM), im: ad.add(&bc, p, RM), p }
    }

    pub fn div_ref(&self, o: &Cx) -> QResult<Cx> {
        let p = self.join(o);
        if o.is_zero_val() {
            return Err(QError::Pole("complex division by zero".into()));
        }
        if self.im.is_zero() && o.im.is_zero() {
            return Ok(Cx { re: self.re.div(&o.re, p, RM), im: BigFloat::new(p), p });
        }
        let c2 = o.re.mul(&o.re, p, RM);
        let d2 = o.im.mul(&o.im, p, RM);
        let den = c2.add(&d2, p, RM);
        let ac = self.re.mul(&o.re, p, RM);
        let bd = self.im.mul(&o.im, p, RM);
        let bc = self.im.mul(&o.re, p, RM);
        let ad = self.re.mul(&o.im, p, RM);
        Ok(Cx {
            re: ac.add(&bd, p, RM).div(&den, p, RM),
            im: bc.sub(&ad, p, RM).div(&den, p, RM),
            p,
        })
    }

    pub fn neg_ref(&self) -> Cx {
        Cx { re: self.re.clone().neg(), im: self.im.clone().neg(), p: self.p }
    }

    pub fn scale_rat(&self, r: &BigRational) -> Cx {
        self.mul_ref(&Cx::from_rat(r, self.p))
    }

    /// Integer power; negative exponents invert (pole on zero base).
    pub fn powi_ref(&self, e: i64) -> QResult<Cx> {
        if e == 0 {
            return Ok(Cx::one_p(self.p));
        }
        if e < 0 {
            let inv = Cx::one_p(self.p).div_ref(self)?;
            return inv.powi_ref(-e);
        }
        let mut base = self.clone();
        let mut acc = Cx::one_p(self.p);
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            k >>= 1;
        }
        Ok(acc)
    }

    // -- magnitude ----------------------------------------------------------

    pub fn norm_sqr(&self) -> BigFloat {
        let p = self.p;
        let a = self.re.mul(&self.re, p, RM);
        let b = self.im.mul(&self.im, p, RM);
        a.add(&b, p, RM)
    }

    pub fn abs_val(&self) -> BigFloat {
        if self.im.is_zero() {
            return self.re.abs();
        }
        self.norm_sqr().sqrt(self.p, RM)
    }

    /// Cheap binary-magnitude estimate: floor(log2 |z|) within 1.
    pub fn mag2(&self) -> i64 {
        if self.is_zero_val() || self.is_nan() {
            return i64::MIN / 2;
        }
        let er = if self.re.is_zero() { i64::MIN / 2 } else { self.re.exponent().unwrap_or(0) as i64 };
        let ei = if self.im.is_zero() { i64::MIN / 2 } else { self.im.exponent().unwrap_or(0) as i64 };
        er.max(ei)
    }

    // -- transcendentals ----------------------------------------------------

    /// Complex exponential.
    pub fn exp_ref(&self) -> Cx {
        let p = self.p;
        let er = with_consts(|cc| self.re.exp(p, RM, cc));
        if self.im.is_zero() {
            return Cx { re: er, im: BigFloat::new(p), p };
        }
        let (s, c) = with_consts(|cc| (self.im.sin(p, RM, cc), self.im.cos(p, RM, cc)));
        Cx { re: er.mul(&c, p, RM), im: er.mul(&s, p, RM), p }
    }

    /// `base^self` for a positive rational base on the principal branch.
    pub fn pow_of_rat_base(&self, base: &BigRational, p: usize) -> QResult<Cx> {
        if !base.is_positive() {
            return Err(QError::Domain(format!(
                "complex exponent requires a positive real base, got {base}"
            )));
        }
        let pw = p.max(self.p) + 32;
        let b = rat_to_bf(base, pw);
        let lnb = with_consts(|cc| b.ln(pw, RM, cc));
        let e = Cx {
            re: self.re.mul(&lnb, pw, RM),
            im: self.im.mul(&lnb, pw, RM),
            p: pw,
        };
        let mut out = e.exp_ref();
        out.p = p.max(self.p);
        out.re.set_precision(out.p, RM).expect("precision");
        out.im.set_precision(out.p, RM).expect("precision");
        Ok(out)
    }
}

impl PartialEq for Cx {
    fn eq(&self, other: &Self) -> bool {
        self.re.cmp(&other.re) == Some(0) && self.im.cmp(&other.im) == Some(0)
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", bf_to_string(&self.re))
        } else {
            write!(f, "{} + {}i", bf_to_string(&self.re), bf_to_string(&self.im))
        }
    }
}

impl Add for Cx {
    type Output = Cx;
    fn add(self, o: Cx) -> Cx {
        self.add_ref(&o)
    }
}

impl Sub for Cx {
    type Output = Cx;
    fn sub(self, o: Cx) -> Cx {
        self.sub_ref(&o)
    }
}

impl Mul for Cx {
    type Output = Cx;
    fn mul(self, o: Cx) -> Cx {
        self.mul_ref(&o)
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        self.neg_ref()
    }
}

impl num_traits::Zero for Cx {
    fn zero() -> Self {
        Cx::zero_p(DEFAULT_PREC)
    }
    fn is_zero(&self) -> bool {
        self.is_zero_val()
    }
}

impl num_traits::One for Cx {
    fn one() -> Self {
        Cx::one_p(DEFAULT_PREC)
    }
}

/// Relative distance |x - y| / |y| (absolute distance when y = 0).
pub fn rel_err(x: &Cx, y: &Cx) -> BigFloat {
    let d = x.sub_ref(y).abs_val();
    if y.is_zero_val() {
        return d;
    }
    let p = x.prec().max(y.prec());
    d.div(&y.abs_val(), p, RM)
}
