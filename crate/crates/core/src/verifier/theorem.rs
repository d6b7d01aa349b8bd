//! Base cases of the induction and the bound on actual constructed sets.

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;

use super::certificate::Family;
use crate::construction::{build_b, build_s, ConstructionParams};
use crate::error::Result;
use crate::peeling::{count_peelings, PeelCount};

/// Smallest and largest `n` covered by the base cases.
pub const BASE_RANGE: (u64, u64) = (6, 53);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseCase {
    pub n: u64,
    pub family: Family,
    /// `3^floor(n/3) ceil(2n/3)!` for S, `3^floor(n/9) ceil(2n/3)!` for B.
    pub lhs: String,
    /// `a^n / 500` or `b^n / 500` as an exact fraction.
    pub rhs: String,
    pub holds: bool,
}

fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

fn pow(base: u64, e: u64) -> BigUint {
    Pow::pow(BigUint::from(base), e as u32)
}

/// `500 * den^n * count <= num^n`, i.e. `count <= (num/den)^n / 500`.
fn under_bound(count: &BigUint, n: u64, num: u64, den: u64) -> bool {
    BigUint::from(500u32) * pow(den, n) * count <= pow(num, n)
}

fn growth(family: Family) -> (u64, u64) {
    match family {
        Family::S => (489, 50),
        Family::B => (867, 100),
    }
}

fn bound_text(n: u64, family: Family) -> String {
    let (num, den) = growth(family);
    format!("{num}^{n}/(500*{den}^{n})")
}

/// Every `6 <= n <= 53` for both families, S first.
pub fn base_case_check() -> Vec<BaseCase> {
    let mut out = Vec::new();
    for family in [Family::S, Family::B] {
        for n in BASE_RANGE.0..=BASE_RANGE.1 {
            let divisor = match family {
                Family::S => 3,
                Family::B => 9,
            };
            let lhs = pow(3, n / divisor) * factorial((2 * n).div_ceil(3));
            let (num, den) = growth(family);
            out.push(BaseCase {
                n,
                family,
                holds: under_bound(&lhs, n, num, den),
                lhs: lhs.to_string(),
                rhs: bound_text(n, family),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremRow {
    pub n: u64,
    pub g_s: String,
    /// Largest count over the three choices of thinned ray; `None` below `n = 9`.
    pub g_b: Option<String>,
    pub s_bound: String,
    pub b_bound: String,
    pub holds: bool,
}

/// Exact counts of `S_n` and `B_n` against `a^n / 500` and `b^n / 500`, `6 <= n <= n_max`.
pub fn empirical_theorem_check(n_max: u64) -> Result<Vec<TheoremRow>> {
    let params = ConstructionParams::default();
    let mut rows = Vec::new();
    for n in BASE_RANGE.0..=n_max {
        let (s, _) = build_s(n as usize, &params)?;
        let g_s = count_peelings(&s)?;
        let (sn, sd) = growth(Family::S);
        let mut holds = under_bound(&g_s.0, n, sn, sd);

        let g_b = if n >= 9 {
            let mut best: Option<PeelCount> = None;
            for ray in 1..=3 {
                let (b, _) = build_b(n as usize, ray, &params)?;
                let c = count_peelings(&b)?;
                if best.as_ref().is_none_or(|m| c.0 > m.0) {
                    best = Some(c);
                }
            }
            let best = best.expect("three rays");
            let (bn, bd) = growth(Family::B);
            holds &= under_bound(&best.0, n, bn, bd);
            Some(best.to_string())
        } else {
            None
        };

        rows.push(TheoremRow {
            n,
            g_s: g_s.to_string(),
            g_b,
            s_bound: bound_text(n, Family::S),
            b_bound: bound_text(n, Family::B),
            holds,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ninety_six_base_cases_hold() {
        let cases = base_case_check();
        assert_eq!(cases.len(), 96);
        assert!(cases.iter().all(|c| c.holds));
        let s6 = cases.iter().find(|c| c.n == 6 && c.family == Family::S).unwrap();
        assert_eq!(s6.lhs, "216");
        let b6 = cases.iter().find(|c| c.n == 6 && c.family == Family::B).unwrap();
        assert_eq!(b6.lhs, "24");
    }

    #[test]
    fn bound_comparison_is_tight_at_the_edge() {
        // 489^6 / (500 * 50^6) = 1750.03...
        assert!(under_bound(&BigUint::from(1750u32), 6, 489, 50));
        assert!(!under_bound(&BigUint::from(1751u32), 6, 489, 50));
    }

    #[test]
    fn small_theorem_rows() {
        let rows = empirical_theorem_check(9).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].g_s, "180");
        assert!(rows[0].g_b.is_none());
        assert_eq!(rows[3].g_s, "6552");
        assert_eq!(rows[3].g_b.as_deref(), Some("936"));
        assert!(rows.iter().all(|r| r.holds));
    }
}
