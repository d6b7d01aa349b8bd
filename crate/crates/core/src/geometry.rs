//! Exact planar predicates and convex hulls over rational coordinates.
//!
//! Nothing in here rounds. The recursive constructions squash point sets by
//! factors far below double precision, so every predicate works on
//! [`BigRational`] coordinates.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Turn direction of an ordered point triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    /// -1, 0 or +1.
    pub fn sign(self) -> i8 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::Collinear => Orientation::Collinear,
            Orientation::CounterClockwise => Orientation::Clockwise,
        }
    }
}

/// A labelled point with exact coordinates.
///
/// `path` records the sequence of ray indices (1..=3) leading to the point in
/// a recursive construction; it is empty for points that did not come from one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    pub id: u32,
    pub x: Rational,
    pub y: Rational,
    pub path: Vec<u8>,
}

impl RationalPoint {
    pub fn new(id: u32, x: Rational, y: Rational) -> Self {
        RationalPoint {
            id,
            x,
            y,
            path: Vec::new(),
        }
    }

    /// Convenience constructor from integer coordinates.
    pub fn from_ints(id: u32, x: i64, y: i64) -> Self {
        Self::new(id, Rational::from_integer(x.into()), Rational::from_integer(y.into()))
    }

    pub fn with_path(mut self, path: Vec<u8>) -> Self {
        self.path = path;
        self
    }

    fn lex_key(&self) -> (&Rational, &Rational, u32) {
        (&self.x, &self.y, self.id)
    }
}

/// An ordered collection of points with pairwise distinct ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<RationalPoint>,
}

impl PointSet {
    pub fn new(points: Vec<RationalPoint>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !seen.insert(p.id) {
                return Err(Error::DuplicateId(p.id));
            }
        }
        Ok(PointSet { points })
    }

    pub fn points(&self) -> &[RationalPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<RationalPoint> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.points.iter().map(|p| p.id).collect()
    }

    pub fn get(&self, id: u32) -> Option<&RationalPoint> {
        self.points.iter().find(|p| p.id == id)
    }

    /// The subset whose ids are listed, in the order of this set.
    pub fn subset(&self, ids: &[u32]) -> Result<PointSet> {
        let wanted: HashSet<u32> = ids.iter().copied().collect();
        let points: Vec<_> = self
            .points
            .iter()
            .filter(|p| wanted.contains(&p.id))
            .cloned()
            .collect();
        if points.len() != wanted.len() {
            return Err(Error::InvalidArgument(
                "subset names ids that are not in the set".into(),
            ));
        }
        PointSet::new(points)
    }
}

/// Sign of the signed area of triangle `(p, q, r)`.
pub fn orientation(p: &RationalPoint, q: &RationalPoint, r: &RationalPoint) -> Orientation {
    let det = (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x);
    if det.is_zero() {
        Orientation::Collinear
    } else if det.is_positive() {
        Orientation::CounterClockwise
    } else {
        Orientation::Clockwise
    }
}

/// Hull vertices in counter-clockwise order, starting from the
/// lexicographically smallest `(x, y)` vertex.
///
/// Points in the interior of a hull edge are not vertices. Coincident points
/// collapse to the one with the smallest id.
pub fn convex_hull(s: &PointSet) -> Result<Vec<RationalPoint>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut sorted: Vec<&RationalPoint> = s.points().iter().collect();
    sorted.sort_by(|a, b| a.lex_key().cmp(&b.lex_key()));
    sorted.dedup_by(|b, a| a.x == b.x && a.y == b.y);
    if sorted.len() < 3 {
        return Ok(sorted.into_iter().cloned().collect());
    }

    let mut hull: Vec<&RationalPoint> = Vec::with_capacity(sorted.len() + 1);
    for &p in sorted.iter() {
        while hull.len() >= 2
            && orientation(hull[hull.len() - 2], hull[hull.len() - 1], p)
                != Orientation::CounterClockwise
        {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orientation(hull[hull.len() - 2], hull[hull.len() - 1], p)
                != Orientation::CounterClockwise
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Ok(hull.into_iter().cloned().collect())
}

/// True iff no three points are collinear (coincident points count as collinear).
pub fn is_general_position(s: &PointSet) -> bool {
    let pts = s.points();
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orientation(&pts[i], &pts[j], &pts[k]) == Orientation::Collinear {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff `q` lies inside or on the boundary of the CCW polygon `hull`.
pub fn in_closed_hull(hull: &[RationalPoint], q: &RationalPoint) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].x == q.x && hull[0].y == q.y,
        2 => {
            orientation(&hull[0], &hull[1], q) == Orientation::Collinear
                && between(&hull[0].x, &hull[1].x, &q.x)
                && between(&hull[0].y, &hull[1].y, &q.y)
        }
        m => (0..m).all(|i| {
            orientation(&hull[i], &hull[(i + 1) % m], q) != Orientation::Clockwise
        }),
    }
}

fn between(a: &Rational, b: &Rational, v: &Rational) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    lo <= v && v <= hi
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: num_bigint::BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Canonical `"p/q"` form (reduced, positive denominator, always with a slash).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact rational from a decimal literal such as `"8.67"` or `"-0.002"`.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a decimal: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer: num_bigint::BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_bigint::BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(id: u32, x: i64, y: i64) -> RationalPoint {
        RationalPoint::from_ints(id, x, y)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&pt(0, 0, 0), &pt(1, 1, 0), &pt(2, 0, 1)).sign(), 1);
        assert_eq!(orientation(&pt(0, 0, 0), &pt(1, 1, 1), &pt(2, 2, 2)).sign(), 0);
        assert_eq!(orientation(&pt(0, 0, 0), &pt(1, 0, 1), &pt(2, 1, 0)).sign(), -1);
    }

    #[test]
    fn hull_of_triangle_and_square() {
        let tri = PointSet::new(vec![pt(0, 0, 0), pt(1, 4, 1), pt(2, 1, 3)]).unwrap();
        assert_eq!(convex_hull(&tri).unwrap().len(), 3);

        let sq = PointSet::new(vec![
            pt(0, 0, 0),
            pt(1, 1, 0),
            pt(2, 1, 1),
            pt(3, 0, 1),
            RationalPoint::new(4, q(1, 2), q(1, 2)),
        ])
        .unwrap();
        let ids: Vec<u32> = convex_hull(&sq).unwrap().iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![0, 1, 2, 3]);
    }

    #[test]
    fn hull_excludes_edge_interior_points() {
        let s = PointSet::new(vec![pt(0, 0, 0), pt(1, 2, 0), pt(2, 1, 0), pt(3, 1, 2)]).unwrap();
        let ids: Vec<u32> = convex_hull(&s).unwrap().iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![0, 1, 3]);
    }

    #[test]
    fn hull_of_collinear_and_tiny_inputs() {
        let s = PointSet::new(vec![pt(0, 0, 0), pt(1, 1, 1), pt(2, 2, 2)]).unwrap();
        let ids: Vec<u32> = convex_hull(&s).unwrap().iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![0, 2]);
        let one = PointSet::new(vec![pt(7, 3, 3)]).unwrap();
        assert_eq!(convex_hull(&one).unwrap()[0].id, 7);
    }

    #[test]
    fn hull_of_empty_set_is_an_error() {
        let empty = PointSet::new(vec![]).unwrap();
        assert_eq!(convex_hull(&empty), Err(Error::EmptySet));
    }

    #[test]
    fn general_position_examples() {
        let tri = PointSet::new(vec![pt(0, 0, 0), pt(1, 1, 0), pt(2, 0, 1)]).unwrap();
        assert!(is_general_position(&tri));
        let bad = PointSet::new(vec![pt(0, 0, 0), pt(1, 1, 1), pt(2, 2, 2), pt(3, 5, 0)]).unwrap();
        assert!(!is_general_position(&bad));
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert_eq!(
            PointSet::new(vec![pt(1, 0, 0), pt(1, 1, 1)]),
            Err(Error::DuplicateId(1))
        );
    }

    #[test]
    fn rational_text_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&q(-2, 4)), "-1/2");
        assert_eq!(format_rational(&q(0, 5)), "0/1");
        assert_eq!(parse_decimal("8.67").unwrap(), q(867, 100));
        assert_eq!(parse_decimal("0.00077").unwrap(), q(77, 100000));
        assert_eq!(parse_decimal("-2").unwrap(), q(-2, 1));
        assert!(parse_decimal("1,5").is_err());
    }
}
