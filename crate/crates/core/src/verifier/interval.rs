//! Outward-rounded interval arithmetic over dyadic rationals.
//!
//! Endpoints are exact rationals, rounded after every operation to `bits`
//! significant binary digits: lower ends toward minus infinity, upper ends
//! toward plus infinity. Transcendental functions add a rigorous bound on the
//! truncated series tail, so every result encloses the true real value.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::geometry::Rational;

/// Extra working bits carried through series evaluations.
const GUARD_BITS: u32 = 32;

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// floor(log2 |x|) for x != 0.
fn floor_log2(x: &Rational) -> i64 {
    let n = x.numer().abs();
    let d = x.denom();
    let mut e = n.bits() as i64 - d.bits() as i64;
    // 2^(e-1) < |x| < 2^(e+1); settle which side of 2^e we are on
    if Rational::new(n.clone(), d.clone()) < pow2(e) {
        e -= 1;
    }
    e
}

fn shift_div(numer: &BigInt, denom: &BigInt, shift: i64, up: bool) -> BigInt {
    let (n, d) = if shift >= 0 {
        (numer << shift as usize, denom.clone())
    } else {
        (numer.clone(), denom << (-shift) as usize)
    };
    if up {
        n.div_ceil(&d)
    } else {
        n.div_floor(&d)
    }
}

/// Rounds `x` to `bits` significant bits, toward +inf if `up`, else toward -inf.
pub fn round_dir(x: &Rational, bits: u32, up: bool) -> Rational {
    if x.is_zero() || (x.is_integer() && x.numer().bits() <= bits as u64) {
        return x.clone();
    }
    let shift = bits as i64 - 1 - floor_log2(x);
    let m = shift_div(x.numer(), x.denom(), shift, up);
    Rational::from_integer(m) * pow2(-shift)
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Interval::point(Rational::from_integer(v.into()))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    fn rounded(lo: Rational, hi: Rational, bits: u32) -> Self {
        Interval {
            lo: round_dir(&lo, bits, false),
            hi: round_dir(&hi, bits, true),
        }
    }

    pub fn add(&self, o: &Interval, bits: u32) -> Interval {
        Interval::rounded(&self.lo + &o.lo, &self.hi + &o.hi, bits)
    }

    pub fn sub(&self, o: &Interval, bits: u32) -> Interval {
        Interval::rounded(&self.lo - &o.hi, &self.hi - &o.lo, bits)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, o: &Interval, bits: u32) -> Interval {
        let products = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = products.iter().min().expect("four products").clone();
        let hi = products.iter().max().expect("four products").clone();
        Interval::rounded(lo, hi, bits)
    }

    /// Multiplication by an exact rational.
    pub fn scale(&self, k: &Rational, bits: u32) -> Interval {
        self.mul(&Interval::point(k.clone()), bits)
    }

    /// Division; panics if `o` contains zero.
    pub fn div(&self, o: &Interval, bits: u32) -> Interval {
        assert!(
            o.lo.is_positive() || o.hi.is_negative(),
            "interval division by an interval containing zero"
        );
        let recip = Interval {
            lo: Rational::one() / &o.hi,
            hi: Rational::one() / &o.lo,
        };
        self.mul(&recip, bits)
    }

    /// Componentwise maximum.
    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    /// Intersection with `[lo, hi]`, used to clamp to a known range.
    pub fn clamp(&self, lo: &Rational, hi: &Rational) -> Interval {
        let l = self.lo.clone().max(lo.clone());
        let h = self.hi.clone().min(hi.clone());
        Interval::new(l.clone().min(h.clone()), h.max(l))
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self, bits: u32) -> Interval {
        let lo = ln_rational(&self.lo, bits);
        let hi = ln_rational(&self.hi, bits);
        Interval {
            lo: lo.lo,
            hi: hi.hi,
        }
    }

    pub fn exp(&self, bits: u32) -> Interval {
        let lo = exp_rational(&self.lo, bits);
        let hi = exp_rational(&self.hi, bits);
        Interval {
            lo: lo.lo,
            hi: hi.hi,
        }
    }

    /// `2^self`, exact when `self` is an integer point.
    pub fn exp2(&self, bits: u32) -> Interval {
        if self.is_point() && self.lo.is_integer() {
            if let Some(k) = self.lo.to_integer().to_i64() {
                return Interval::point(pow2(k));
            }
        }
        self.mul(&ln2(bits + GUARD_BITS), bits + GUARD_BITS).exp(bits)
    }

    /// Midpoint as `f64` (display only).
    pub fn mid_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / Rational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            decimal_string(&self.lo, 12, false),
            decimal_string(&self.hi, 12, true)
        )
    }
}

/// Decimal rendering of `x` with `digits` significant digits, rounded down or up.
pub fn decimal_string(x: &Rational, digits: u32, up: bool) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let neg = x.is_negative();
    let a = x.abs();
    // up for positive numbers rounds the magnitude up; for negatives, down
    let mag_up = up != neg;
    let ten = Rational::from_integer(10.into());
    let mut exp10: i64 = 0;
    let mut scaled = a.clone();
    while scaled >= ten {
        scaled /= &ten;
        exp10 += 1;
    }
    while scaled < Rational::one() {
        scaled *= &ten;
        exp10 -= 1;
    }
    let factor = Rational::from_integer(BigInt::from(10).pow(digits - 1));
    let s = &scaled * &factor;
    let mut m = if mag_up { s.ceil() } else { s.floor() }.to_integer();
    if m >= BigInt::from(10).pow(digits) {
        m /= 10;
        exp10 += 1;
    }
    let digits_str = m.to_string();
    let point = exp10 + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits_str)
    } else if point as usize >= digits_str.len() {
        format!("{}{}", digits_str, "0".repeat(point as usize - digits_str.len()))
    } else {
        format!("{}.{}", &digits_str[..point as usize], &digits_str[point as usize..])
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Fixed-point `[s, s + err] * 2^-scale` as an interval rounded to `bits`.
fn fixed_to_interval(s: BigInt, err: u64, scale: u32, bits: u32) -> Interval {
    let hi = &s + BigInt::from(err);
    let unit = pow2(-(scale as i64));
    Interval::rounded(Rational::from_integer(s) * &unit, Rational::from_integer(hi) * unit, bits)
}

/// Enclosure of `2 * atanh(t)` for `0 <= t <= 1/3`, i.e. `ln((1+t)/(1-t))`.
///
/// Summed in fixed point with `scale` fractional bits. Every truncated
/// quantity is at most its true value, and the accumulated shortfall is
/// bounded term by term, so `[s, s + err]` encloses the series.
fn two_atanh(t: &Rational, bits: u32) -> Interval {
    if t.is_zero() {
        return Interval::from_int(0);
    }
    let scale = bits + GUARD_BITS + 16;
    let (p, q) = (t.numer(), t.denom());
    let (p2, q2) = (p * p, q * q);
    // power_j = floor(t^(2j+1) 2^scale), short of the truth by at most j + 1
    let mut power = (p << scale as usize).div_floor(q);
    let mut sum = BigInt::zero();
    let mut err: u64 = 0;
    let mut j: u64 = 0;
    while !power.is_zero() {
        sum += power.div_floor(&BigInt::from(2 * j + 1));
        err += j + 2;
        power = (power * &p2).div_floor(&q2);
        j += 1;
    }
    // the true remaining terms are each below j + 1 ulps and shrink by t^2 <= 1/9
    err += 2 * (j + 1);
    fixed_to_interval(sum << 1, 2 * err, scale, bits)
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, Interval>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Enclosure of ln 2.
pub fn ln2(bits: u32) -> Interval {
    let mut cache = ln2_cache().lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(bits)
        .or_insert_with(|| two_atanh(&Rational::new(BigInt::one(), BigInt::from(3)), bits))
        .clone()
}

/// Enclosure of `ln x` for rational `x > 0`.
pub fn ln_rational(x: &Rational, bits: u32) -> Interval {
    assert!(x.is_positive(), "ln of a non-positive number");
    if x.is_one() {
        return Interval::from_int(0);
    }
    let w = bits + GUARD_BITS;
    let k = floor_log2(x);
    let m = x * pow2(-k);
    let t = (&m - Rational::one()) / (&m + Rational::one());
    let mantissa = two_atanh(&t, w);
    let result = if k == 0 {
        mantissa
    } else {
        ln2(w)
            .scale(&Rational::from_integer(k.into()), w)
            .add(&mantissa, w)
    };
    Interval::rounded(result.lo, result.hi, bits)
}

/// Enclosure of `e^x` for rational `x`.
pub fn exp_rational(x: &Rational, bits: u32) -> Interval {
    if x.is_zero() {
        return Interval::from_int(1);
    }
    if x.is_negative() {
        let pos = exp_rational(&-x, bits + 2);
        let recip = Interval {
            lo: Rational::one() / &pos.hi,
            hi: Rational::one() / &pos.lo,
        };
        return Interval::rounded(recip.lo, recip.hi, bits);
    }
    // halve until r <= 1/2, sum the Taylor series, then square back up
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut halvings: u32 = 0;
    let mut r = x.clone();
    while r > half {
        r = &r * &half;
        halvings += 1;
    }
    let w = bits + GUARD_BITS + halvings;
    let scale = w + 16;
    let (p, q) = (r.numer(), r.denom());
    // term_j = floor(r^j / j! 2^scale), short of the truth by at most j
    let mut term = BigInt::one() << scale as usize;
    let mut sum = BigInt::zero();
    let mut err: u64 = 0;
    let mut j: u64 = 0;
    while !term.is_zero() {
        sum += &term;
        err += j;
        j += 1;
        term = (term * p).div_floor(&(q * BigInt::from(j)));
    }
    // with r <= 1/2 the neglected tail is below twice its first term
    err += 2 * j;
    let mut value = fixed_to_interval(sum, err, scale, w);
    for _ in 0..halvings {
        value = value.mul(&value, w);
    }
    Interval::rounded(value.lo, value.hi, bits)
}

/// Enclosure of `base^exponent` for rational `base > 0`.
pub fn pow_rational(base: &Rational, exponent: &Rational, bits: u32) -> Interval {
    if exponent.is_zero() || base.is_one() {
        return Interval::from_int(1);
    }
    let w = bits + GUARD_BITS;
    ln_rational(base, w).scale(exponent, w).exp(bits)
}

/// Enclosure of `log2 x` for rational `x > 0`.
pub fn log2_rational(x: &Rational, bits: u32) -> Interval {
    // exact for powers of two
    let k = floor_log2(x);
    if *x == pow2(k) {
        return Interval::from_int(k);
    }
    let w = bits + GUARD_BITS;
    ln_rational(x, w).div(&ln2(w), bits)
}

/// Sign of an enclosure relative to zero, if decided.
pub fn sign_of(iv: &Interval) -> Option<std::cmp::Ordering> {
    use std::cmp::Ordering::*;
    if iv.lo.is_positive() {
        Some(Greater)
    } else if iv.hi.is_negative() {
        Some(Less)
    } else if iv.lo.is_zero() && iv.hi.is_zero() {
        Some(Equal)
    } else {
        None
    }
}
