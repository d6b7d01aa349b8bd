//! The three binomial estimation lemmas, checked exactly.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::entropy;
use super::interval::Interval;
use crate::error::{Error, Result};
use crate::geometry::Rational;

/// Precision ladder used when a certified comparison is undecided.
const PRECISION_LADDER: [u32; 4] = [64, 128, 256, 1024];

/// Exact binomial coefficient `C(n, k)` (zero when `k > n`).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    if let Some(v) = binomial_u128(n, k) {
        return BigUint::from(v);
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
    }
    Some(acc)
}

/// Compares an exact integer with a certified enclosure of a real number.
fn le_certified(lhs: &BigUint, rhs: &Interval) -> Option<bool> {
    let l = Rational::from_integer(BigInt::from(lhs.clone()));
    if &l <= rhs.lo() {
        Some(true)
    } else if &l > rhs.hi() {
        Some(false)
    } else {
        None
    }
}

/// `C(n, alpha n) <= 2^(n H(alpha))` for `0 <= alpha <= 1/2` with `alpha n` integral.
pub fn check_entropy_bound(n: u64, alpha: &Rational) -> Result<bool> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if alpha.is_negative() || *alpha > half {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1/2]")));
    }
    let k = alpha * Rational::from_integer(n.into());
    if !k.is_integer() {
        return Err(Error::InvalidArgument(format!("alpha * n = {k} is not an integer")));
    }
    let k = k.to_integer().to_u64().expect("0 <= k <= n");
    let lhs = binomial(n, k);
    for bits in PRECISION_LADDER {
        let h = entropy(alpha, bits)?.value;
        let rhs = h
            .scale(&Rational::from_integer(n.into()), bits)
            .exp2(bits);
        if let Some(v) = le_certified(&lhs, &rhs) {
            return Ok(v);
        }
    }
    Err(Error::Undecided(format!("C({n}, {k}) vs 2^(n H({alpha}))")))
}

/// `C(n, ceil k) <= l C(n, floor k)` for `n / (l + 1) <= k <= n`.
pub fn check_ratio_lemma(n: u64, k: &Rational, l: u64) -> Result<bool> {
    if n < 1 || l < 1 {
        return Err(Error::InvalidArgument("n and l must be positive".into()));
    }
    let n_r = Rational::from_integer(n.into());
    let low = &n_r / Rational::from_integer((l + 1).into());
    if *k < low || *k > n_r {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside [{n}/{}, {n}]",
            l + 1
        )));
    }
    let ceil = k.ceil().to_integer().to_u64().expect("in range");
    let floor = k.floor().to_integer().to_u64().expect("in range");
    Ok(binomial(n, ceil) <= BigUint::from(l) * binomial(n, floor))
}

/// Result of the `2^n / 7` and `2^n / 2` bounds on the central binomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeventhBound {
    pub n: u64,
    /// `max_k C(n, k)`.
    pub max_binomial: String,
    /// `2 max_k C(n, k) <= 2^n`, asserted for all `n >= 1`.
    pub half_clause: bool,
    /// `7 max_k C(n, k) <= 2^n`, only asserted for `n >= 36`.
    pub seventh_clause: Option<bool>,
}

impl SeventhBound {
    pub fn holds(&self) -> bool {
        self.half_clause && self.seventh_clause.unwrap_or(true)
    }
}

pub fn check_seventh_bound(n: u64) -> Result<SeventhBound> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let central = binomial(n, n / 2);
    let two_n = BigUint::one() << n as usize;
    let half_clause = BigUint::from(2u32) * &central <= two_n;
    let seventh_clause = (n >= 36).then(|| BigUint::from(7u32) * &central <= two_n);
    Ok(SeventhBound {
        n,
        max_binomial: central.to_string(),
        half_clause,
        seventh_clause,
    })
}

/// Summary of an exhaustive lemma run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaSuite {
    pub name: String,
    pub range: String,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl LemmaSuite {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Every `(n, alpha)` with `n <= n_max`, `alpha n` integral and `alpha <= 1/2`.
pub fn entropy_bound_suite(n_max: u64) -> Result<LemmaSuite> {
    let mut suite = LemmaSuite {
        name: "entropy binomial bound".into(),
        range: format!("1 <= n <= {n_max}, alpha = k/n <= 1/2"),
        cases: 0,
        failures: Vec::new(),
    };
    for n in 1..=n_max {
        for k in 0..=n / 2 {
            let alpha = Rational::new(k.into(), n.into());
            suite.cases += 1;
            if !check_entropy_bound(n, &alpha)? {
                suite.failures.push(format!("n={n}, alpha={alpha}"));
            }
        }
    }
    Ok(suite)
}

/// Every reduced `k = p/q` with `q <= max_denominator` in range, for `n <= n_max`, `l <= l_max`.
pub fn ratio_lemma_suite(n_max: u64, max_denominator: u64, l_max: u64) -> Result<LemmaSuite> {
    let mut suite = LemmaSuite {
        name: "ceiling/floor binomial ratio".into(),
        range: format!("1 <= n <= {n_max}, denominators <= {max_denominator}, 1 <= l <= {l_max}"),
        cases: 0,
        failures: Vec::new(),
    };
    for n in 1..=n_max {
        for l in 1..=l_max {
            for q in 1..=max_denominator {
                // n/(l+1) <= p/q <= n
                let p_lo = (n * q).div_ceil(l + 1);
                for p in p_lo..=n * q {
                    if p.gcd(&q) != 1 {
                        continue;
                    }
                    let k = Rational::new(p.into(), q.into());
                    suite.cases += 1;
                    if !check_ratio_lemma(n, &k, l)? {
                        suite.failures.push(format!("n={n}, k={k}, l={l}"));
                    }
                }
            }
        }
    }
    Ok(suite)
}

/// The `/2` clause for `1 <= n <= n_max` and the `/7` clause for `36 <= n <= n_max`.
pub fn seventh_bound_suite(n_max: u64) -> Result<LemmaSuite> {
    let mut suite = LemmaSuite {
        name: "central binomial vs 2^n/7 and 2^n/2".into(),
        range: format!("1 <= n <= {n_max} (/2), 36 <= n <= {n_max} (/7)"),
        cases: 0,
        failures: Vec::new(),
    };
    for n in 1..=n_max {
        let r = check_seventh_bound(n)?;
        suite.cases += 1 + u64::from(r.seventh_clause.is_some());
        if !r.half_clause {
            suite.failures.push(format!("n={n}: /2 clause"));
        }
        if r.seventh_clause == Some(false) {
            suite.failures.push(format!("n={n}: /7 clause"));
        }
    }
    Ok(suite)
}
