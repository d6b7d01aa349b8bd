#![allow(dead_code)]

use peelkit::geometry::{convex_hull, is_general_position};
use peelkit::{PointSet, RationalPoint};
use rand::Rng;

pub fn from_ints(coords: &[(i64, i64)]) -> PointSet {
    PointSet::new(
        coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| RationalPoint::from_ints(i as u32, x, y))
            .collect(),
    )
    .unwrap()
}

/// Points on the parabola `y = x^2`, which are in convex position.
pub fn convex(n: usize) -> PointSet {
    from_ints(&(0..n as i64).map(|i| (i, i * i)).collect::<Vec<_>>())
}

pub fn triangle_plus_interior() -> PointSet {
    from_ints(&[(0, 0), (6, 0), (0, 6), (1, 1)])
}

/// Rejection-samples integer points until no three are collinear.
pub fn random_general_position(rng: &mut impl Rng, n: usize) -> PointSet {
    loop {
        let coords: Vec<(i64, i64)> = (0..n)
            .map(|_| (rng.random_range(-40..=40), rng.random_range(-40..=40)))
            .collect();
        let mut sorted = coords.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() < n {
            continue;
        }
        let s = from_ints(&coords);
        if is_general_position(&s) {
            return s;
        }
    }
}

/// All peeling sequences by plain recursion over hulls recomputed from scratch.
pub fn naive_sequences(s: &PointSet) -> Vec<Vec<u32>> {
    fn go(s: &PointSet, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if s.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for v in convex_hull(s).unwrap() {
            let rest: Vec<u32> = s.ids().into_iter().filter(|&id| id != v.id).collect();
            prefix.push(v.id);
            go(&s.subset(&rest).unwrap(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(s, &mut Vec::new(), &mut out);
    out.sort();
    out
}
