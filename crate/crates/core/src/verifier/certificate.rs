//! The printed exponent constants, case conditions and coefficient bounds of
//! the induction step, each decided with certified enclosures.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::interval::{decimal_string, ln2, ln_rational, Interval};
use super::lemmas::{entropy_bound_suite, ratio_lemma_suite, seventh_bound_suite, LemmaSuite};
use super::theorem::{base_case_check, BaseCase};
use super::{entropy, growth_a, growth_b};
use crate::error::Result;
use crate::geometry::{parse_decimal, parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    S,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    ExponentCheck,
    FinalInequality,
    CoefficientBound,
    CoefficientSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    UndecidedAtPrecision,
}

impl Verdict {
    fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Holds, Holds) => Holds,
            _ => UndecidedAtPrecision,
        }
    }
}

/// One certified comparison `value <= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseCondition {
    pub id: String,
    pub family: Family,
    pub case_index: u32,
    pub kind: CheckKind,
    pub lhs: String,
    pub rhs: String,
    /// Enclosure of the left-hand side.
    pub value: Interval,
    /// The right-hand side as an exact decimal or fraction.
    pub bound: String,
    /// Intermediate base printed between the outer bound and the components.
    pub printed_base: Option<String>,
    /// Enclosure of `bound - value`.
    pub margin: Interval,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// Structured result of the certificate checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateReport {
    pub precision_bits: u32,
    pub lemma_checks: Vec<LemmaSuite>,
    pub base_case_checks: Vec<BaseCase>,
    pub exponent_checks: Vec<CaseCondition>,
    pub case_conditions: Vec<CaseCondition>,
    pub coefficient_values: Vec<CaseCondition>,
    pub sums: Vec<CaseCondition>,
    pub notes: Vec<String>,
    pub overall: bool,
}

impl CertificateReport {
    /// Every comparison in the report, in order.
    pub fn conditions(&self) -> impl Iterator<Item = &CaseCondition> {
        self.exponent_checks
            .iter()
            .chain(&self.case_conditions)
            .chain(&self.coefficient_values)
            .chain(&self.sums)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.conditions().filter(|c| c.verdict == verdict).count()
    }

    fn recompute_overall(&mut self) {
        self.overall = self.conditions().all(|c| c.verdict == Verdict::Holds)
            && self.lemma_checks.iter().all(LemmaSuite::holds)
            && self.base_case_checks.iter().all(|b| b.holds);
    }
}

fn q(s: &str) -> Rational {
    if s.contains('.') {
        parse_decimal(s).expect("literal decimal")
    } else {
        parse_rational(s).expect("literal rational")
    }
}

fn compare(value: &Interval, bound: &Rational) -> Verdict {
    if value.hi() <= bound {
        Verdict::Holds
    } else if value.lo() > bound {
        Verdict::Fails
    } else {
        Verdict::UndecidedAtPrecision
    }
}

/// `coeff * a^ea * b^eb * 2^e2` with literal exponents.
struct Term {
    coeff: &'static str,
    ea: &'static str,
    eb: &'static str,
    e2: &'static str,
}

const fn t(coeff: &'static str, ea: &'static str, eb: &'static str, e2: &'static str) -> Term {
    Term { coeff, ea, eb, e2 }
}

impl Term {
    fn eval(&self, bits: u32) -> Interval {
        let w = bits + 32;
        let mut log = Interval::from_int(0);
        for (e, base) in [(self.ea, growth_a()), (self.eb, growth_b())] {
            if e != "0" {
                log = log.add(&ln_rational(&base, w).scale(&q(e), w), w);
            }
        }
        if self.e2 != "0" {
            log = log.add(&ln2(w).scale(&q(self.e2), w), w);
        }
        let pow = if log.is_point() && log.lo().is_zero() {
            Interval::from_int(1)
        } else {
            log.exp(w)
        };
        pow.scale(&q(self.coeff), bits)
    }

    fn text(&self) -> String {
        let mut parts = Vec::new();
        let (num, den) = match self.coeff.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (self.coeff, None),
        };
        if num != "1" {
            parts.push(num.to_string());
        }
        for (sym, e) in [("a", self.ea), ("b", self.eb), ("2", self.e2)] {
            match e {
                "0" => {}
                "1" => parts.push(sym.to_string()),
                _ => parts.push(format!("{sym}^({e})")),
            }
        }
        let body = if parts.is_empty() { "1".into() } else { parts.join("*") };
        match den {
            Some(d) => format!("{body}/{d}"),
            None => body,
        }
    }
}

fn max_text(terms: &[Term]) -> String {
    if terms.len() == 1 {
        terms[0].text()
    } else {
        let inner: Vec<String> = terms.iter().map(Term::text).collect();
        format!("max({})", inner.join(", "))
    }
}

fn max_value(terms: &[Term], bits: u32) -> Interval {
    terms
        .iter()
        .map(|t| t.eval(bits))
        .reduce(|x, y| x.max(&y))
        .expect("at least one term")
}

/// `(id, family, case index, kind)` of a check.
type Head = (String, Family, u32, CheckKind);

fn condition(head: Head, lhs: String, value: Interval, bound_text: &str, bits: u32) -> CaseCondition {
    let (id, family, case_index, kind) = head;
    let bound = q(bound_text);
    let verdict = compare(&value, &bound);
    let margin = Interval::point(bound).sub(&value, bits);
    CaseCondition {
        id,
        family,
        case_index,
        kind,
        lhs,
        rhs: bound_text.to_string(),
        value,
        bound: bound_text.to_string(),
        printed_base: None,
        margin,
        verdict,
        note: None,
    }
}

fn family_tag(f: Family) -> &'static str {
    match f {
        Family::S => "S",
        Family::B => "B",
    }
}

/// `(family, case, weight k, entropy argument p, offset c, printed)`:
/// `k H(p) / 27 + c <= printed`.
const EXPONENTS: [(Family, u32, u32, &str, &str, &str); 13] = [
    (Family::B, 1, 7, "3/7", "2/3", "0.9221"),
    (Family::B, 2, 8, "3/8", "2/3", "0.9495"),
    (Family::B, 3, 12, "1/4", "2/3", "1.0273"),
    (Family::B, 4, 15, "1/5", "2/3", "1.0678"),
    (Family::B, 5, 21, "1/7", "2/3", "1.127"),
    (Family::B, 6, 21, "3/7", "4/9", "1.2108"),
    (Family::S, 1, 13, "4/13", "2/3", "1.0955"),
    (Family::S, 2, 14, "5/14", "2/3", "1.1543"),
    (Family::S, 3, 15, "2/5", "2/3", "1.2061"),
    (Family::S, 4, 17, "8/17", "2/3", "1.2948"),
    (Family::S, 5, 0, "0", "4/3", "4/3"),
    (Family::S, 6, 22, "9/22", "2/3", "1.4620"),
    (Family::S, 7, 27, "1/3", "2/3", "1.5850"),
];

/// Certifies each printed entropy exponent against its defining expression.
pub fn check_exponent_constants(precision_bits: u32) -> Result<Vec<CaseCondition>> {
    let bits = precision_bits;
    EXPONENTS
        .iter()
        .map(|&(family, case, k, p, c, printed)| {
            let value = if k == 0 {
                Interval::point(q(c))
            } else {
                entropy(&q(p), bits + 16)?
                    .value
                    .scale(&Rational::new(BigInt::from(k), BigInt::from(27)), bits + 16)
                    .add(&Interval::point(q(c)), bits)
            };
            let lhs = match (k, c) {
                (0, _) => "2/3 + 2/3".to_string(),
                (27, _) => format!("H({p}) + {c}"),
                _ => format!("{k}*H({p})/27 + {c}"),
            };
            let head = (
                format!("{}.case{case}.exponent", family_tag(family)),
                family,
                case,
                CheckKind::ExponentCheck,
            );
            let mut cond = condition(head, lhs, value, printed, bits);
            if k == 0 {
                cond.note = Some("exact equality".into());
            }
            Ok(cond)
        })
        .collect()
}

struct Final {
    family: Family,
    case: u32,
    printed_base: &'static str,
    terms: &'static [Term],
}

const FINALS: [Final; 13] = [
    Final { family: Family::B, case: 1, printed_base: "8.67", terms: &[t("1", "2/3", "0", "0.9221")] },
    Final { family: Family::B, case: 2, printed_base: "8.40", terms: &[t("1", "1/2", "0", "1.4243")] },
    Final {
        family: Family::B,
        case: 3,
        printed_base: "8.47",
        terms: &[t("1", "0", "0", "3.0819"), t("1", "5/9", "0", "1.2496")],
    },
    Final { family: Family::B, case: 4, printed_base: "7.86", terms: &[t("1", "4/9", "0", "1.5123")] },
    Final { family: Family::B, case: 5, printed_base: "5.45", terms: &[t("1", "1/3", "0", "1.3493")] },
    Final { family: Family::B, case: 6, printed_base: "6.38", terms: &[t("1", "4/9", "0", "1.2108")] },
    Final { family: Family::S, case: 1, printed_base: "9.76", terms: &[t("1", "0", "0", "3.2865")] },
    Final { family: Family::S, case: 2, printed_base: "9.78", terms: &[t("1", "0", "1/2", "1.7315")] },
    Final {
        family: Family::S,
        case: 3,
        printed_base: "9.74",
        terms: &[t("1", "0", "0", "3.2138"), t("1", "0", "2/3", "1.2061")],
    },
    Final {
        family: Family::S,
        case: 4,
        printed_base: "9.76",
        terms: &[t("1", "0", "0", "3.2277"), t("1", "0", "3/7", "1.9506")],
    },
    Final {
        family: Family::S,
        case: 5,
        printed_base: "9.19",
        terms: &[t("1", "0", "9/23", "40/23"), t("1", "0", "0", "12/5"), t("1", "0", "0", "16/5")],
    },
    Final {
        family: Family::S,
        case: 6,
        printed_base: "9.72",
        terms: &[t("1", "0", "0", "2.26317"), t("1", "0", "0", "3.28")],
    },
    Final { family: Family::S, case: 7, printed_base: "6.55", terms: &[t("1", "0", "0", "2.7109")] },
];

struct Coefficient {
    family: Family,
    index: u32,
    printed: &'static str,
    terms: &'static [Term],
}

const COEFFICIENTS: [Coefficient; 13] = [
    Coefficient { family: Family::B, index: 1, printed: "0.00003", terms: &[t("8/1750000", "2/3", "0", "0")] },
    Coefficient { family: Family::B, index: 2, printed: "0.00009", terms: &[t("8/1750000", "2/3", "2/3", "0")] },
    Coefficient {
        family: Family::B,
        index: 3,
        printed: "0.00013",
        terms: &[t("12/1750000", "0", "4/3", "0"), t("24/875000000", "22/9", "0", "0")],
    },
    Coefficient { family: Family::B, index: 4, printed: "0.00001", terms: &[t("64/437500000000", "32/9", "0", "0")] },
    Coefficient { family: Family::B, index: 5, printed: "0.00003", terms: &[t("48/875000000", "24/9", "0", "0")] },
    Coefficient { family: Family::B, index: 6, printed: "0.00048", terms: &[t("24/1750000", "14/9", "0", "0")] },
    Coefficient { family: Family::S, index: 1, printed: "0.00029", terms: &[t("24/1750000", "4/3", "0", "0")] },
    Coefficient { family: Family::S, index: 2, printed: "0.00027", terms: &[t("24/1750000", "2/3", "2/3", "0")] },
    Coefficient {
        family: Family::S,
        index: 3,
        printed: "0.00025",
        terms: &[t("48/875000000", "22/9", "0", "0"), t("24/1750000", "0", "4/3", "0")],
    },
    Coefficient {
        family: Family::S,
        index: 4,
        printed: "0.00002",
        terms: &[t("192/437500000000", "98/27", "0", "0"), t("48/875000000", "16/9", "2/3", "0")],
    },
    Coefficient {
        family: Family::S,
        index: 5,
        printed: "0.00004",
        terms: &[
            t("24/6125000000", "50/27", "2/3", "0"),
            t("12/12250000", "14/9", "0", "0"),
            t("48/3062500000000", "32/9", "0", "0"),
        ],
    },
    Coefficient {
        family: Family::S,
        index: 6,
        printed: "0.00048",
        terms: &[t("24/1750000", "14/9", "0", "0"), t("384/437500000000", "98/27", "0", "0")],
    },
    Coefficient { family: Family::S, index: 7, printed: "0.00003", terms: &[t("48/875000000", "24/9", "0", "0")] },
];

/// `(family, printed sum, outer bound, strict)`.
const SUMS: [(Family, &str, &str, bool); 2] = [
    (Family::B, "0.00077", "1/500", false),
    (Family::S, "0.00138", "1/500", true),
];

fn final_inequality(f: &Final, bits: u32) -> CaseCondition {
    let (outer_sym, outer) = match f.family {
        Family::B => ("b", growth_b()),
        Family::S => ("a", growth_a()),
    };
    let value = max_value(f.terms, bits);
    let base = q(f.printed_base);
    let verdict = compare(&value, &base).and(if base <= outer {
        Verdict::Holds
    } else {
        Verdict::Fails
    });
    let note = match (f.family, f.case) {
        (Family::S, 5) => Some(
            "components checked as printed; their derivation from the case inequality is not verified"
                .to_string(),
        ),
        (Family::S, 6) => Some("2^(2.26317) is printed with five decimals; checked as printed".to_string()),
        _ => None,
    };
    CaseCondition {
        id: format!("{}.case{}.final", family_tag(f.family), f.case),
        family: f.family,
        case_index: f.case,
        kind: CheckKind::FinalInequality,
        lhs: max_text(f.terms),
        rhs: format!("{outer_sym} = {}", decimal_string(&outer, 3, false)),
        margin: Interval::point(outer.clone()).sub(&value, bits),
        value,
        bound: decimal_string(&outer, 3, false),
        printed_base: Some(f.printed_base.to_string()),
        verdict,
        note,
    }
}

fn coefficient(c: &Coefficient, bits: u32) -> CaseCondition {
    let head = (
        format!("{}.C{}", family_tag(c.family), c.index),
        c.family,
        c.index,
        CheckKind::CoefficientBound,
    );
    condition(head, max_text(c.terms), max_value(c.terms, bits), c.printed, bits)
}

/// The 13 final inequalities, 13 coefficient bounds and 2 coefficient sums.
pub fn check_case_conditions(precision_bits: u32) -> Result<CertificateReport> {
    let bits = precision_bits;
    let case_conditions: Vec<CaseCondition> = FINALS.iter().map(|f| final_inequality(f, bits)).collect();
    let coefficient_values: Vec<CaseCondition> =
        COEFFICIENTS.iter().map(|c| coefficient(c, bits)).collect();

    let mut sums = Vec::new();
    for (family, printed, outer, strict) in SUMS {
        let members: Vec<&CaseCondition> =
            coefficient_values.iter().filter(|c| c.family == family).collect();
        let total = members
            .iter()
            .fold(Interval::from_int(0), |acc, c| acc.add(&c.value, bits));
        let head = (format!("{}.sum", family_tag(family)), family, 0, CheckKind::CoefficientSum);
        let mut cond = condition(head, format!("sum of C1..C{}", members.len()), total, printed, bits);
        let outer_r = q(outer);
        let outer_ok = if strict {
            q(printed) < outer_r
        } else {
            q(printed) <= outer_r
        };
        cond.rhs = format!("{printed} {} {outer}", if strict { "<" } else { "<=" });
        cond.verdict = cond
            .verdict
            .and(if outer_ok { Verdict::Holds } else { Verdict::Fails });
        sums.push(cond);
    }

    let mut report = CertificateReport {
        precision_bits: bits,
        lemma_checks: Vec::new(),
        base_case_checks: Vec::new(),
        exponent_checks: Vec::new(),
        case_conditions,
        coefficient_values,
        sums,
        notes: vec![
            "S case 5: printed components are checked; their derivation is unverified (informational)".into(),
            "S case 6: the constant 2.26317 is printed with five decimals and checked as printed".into(),
        ],
        overall: false,
    };
    report.recompute_overall();
    Ok(report)
}

/// Everything: lemma suites, base cases, exponent constants and the case report.
pub fn full_certificate(precision_bits: u32) -> Result<CertificateReport> {
    let mut report = check_case_conditions(precision_bits)?;
    report.exponent_checks = check_exponent_constants(precision_bits)?;
    report.lemma_checks = vec![
        entropy_bound_suite(64)?,
        ratio_lemma_suite(40, 27, 6)?,
        seventh_bound_suite(64)?,
    ];
    report.base_case_checks = base_case_check();
    report.recompute_overall();
    Ok(report)
}

/// Midpoint of an enclosure as a short decimal, for tables.
pub(crate) fn approx(iv: &Interval) -> String {
    let mid = (iv.lo() + iv.hi()) / Rational::from_integer(2.into());
    if mid.is_zero() {
        return "0".into();
    }
    let neg = mid < Rational::zero();
    let s = decimal_string(&if neg { -mid } else { mid }, 6, false);
    if neg {
        format!("-{s}")
    } else {
        s
    }
}

impl CaseCondition {
    /// `id | lhs | rhs | margin | verdict` row for human-readable output.
    pub fn table_row(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Holds => "holds",
            Verdict::Fails => "FAILS",
            Verdict::UndecidedAtPrecision => "undecided",
        };
        let base = self
            .printed_base
            .as_deref()
            .map(|b| format!(" (via {b})"))
            .unwrap_or_default();
        format!(
            "{:<14} {} ~ {} <= {}{}  margin {}  {}",
            self.id,
            self.lhs,
            approx(&self.value),
            self.rhs,
            base,
            self.margin,
            verdict
        )
    }
}
