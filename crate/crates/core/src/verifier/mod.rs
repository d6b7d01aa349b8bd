//! Machine checks of the arithmetic behind the `9.78^n / 500` upper bound.
//!
//! Integer statements (binomial lemmas, base cases, small-n counts) are
//! decided with exact big integers. Statements involving logarithms or
//! fractional powers are decided with certified interval enclosures from
//! [`interval`]; a check that cannot be decided at the requested precision is
//! reported as undecided rather than guessed.

pub mod certificate;
pub mod interval;
pub mod lemmas;
pub mod theorem;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::Rational;
use interval::{decimal_string, ln2, ln_rational, Interval};

pub use certificate::{
    check_case_conditions, check_exponent_constants, full_certificate, CaseCondition,
    CertificateReport, CheckKind, Family, Verdict,
};
pub use lemmas::{
    binomial, check_entropy_bound, check_ratio_lemma, check_seventh_bound, entropy_bound_suite,
    ratio_lemma_suite, seventh_bound_suite, LemmaSuite, SeventhBound,
};
pub use theorem::{base_case_check, empirical_theorem_check, BaseCase, TheoremRow};

/// Default working precision for certified comparisons, in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// `a = 9.78`, the growth rate claimed for `S_n`.
pub fn growth_a() -> Rational {
    Rational::new(BigInt::from(489), BigInt::from(50))
}

/// `b = 8.67`, the growth rate claimed for `B_n`.
pub fn growth_b() -> Rational {
    Rational::new(BigInt::from(867), BigInt::from(100))
}

/// Certified enclosure of the binary entropy `H(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyValue {
    pub p: Rational,
    pub value: Interval,
}

/// `H(p) = -p log2 p - (1 - p) log2 (1 - p)`, with `H(0) = H(1) = 0`.
pub fn entropy(p: &Rational, precision_bits: u32) -> Result<EntropyValue> {
    let one = Rational::one();
    if p.is_negative() || *p > one {
        return Err(Error::InvalidArgument(format!("entropy argument {p} outside [0, 1]")));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let value = if p.is_zero() || *p == one {
        Interval::from_int(0)
    } else if *p == half {
        Interval::from_int(1)
    } else {
        let w = precision_bits + 32;
        let q = &one - p;
        let nats = ln_rational(p, w)
            .scale(p, w)
            .add(&ln_rational(&q, w).scale(&q, w), w);
        nats.neg()
            .div(&ln2(w), precision_bits)
            .clamp(&Rational::zero(), &one)
    };
    Ok(EntropyValue {
        p: p.clone(),
        value,
    })
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // outward decimal rounding keeps the serialized pair a valid enclosure
        let mut st = serializer.serialize_struct("Interval", 2)?;
        st.serialize_field("lo", &decimal_string(self.lo(), 20, false))?;
        st.serialize_field("hi", &decimal_string(self.hi(), 20, true))?;
        st.end()
    }
}
