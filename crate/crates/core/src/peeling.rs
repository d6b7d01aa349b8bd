//! Counting, enumerating, checking and estimating peeling sequences.
//!
//! A peeling sequence lists the points of a set in an order such that every
//! point is a vertex of the convex hull of the points not yet listed. All
//! operations here go through [`PeelIndex`], which caches every triple
//! orientation once so that hulls of surviving subsets are cheap to rebuild.

use std::collections::HashMap;
use std::fmt;

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{orientation, PointSet, RationalPoint};

/// Largest set handled by the exact counter (states are `u64` bit masks).
pub const EXACT_LIMIT: usize = 64;

/// Sets above this size compute orientations on demand instead of caching them.
const TABLE_LIMIT: usize = 256;

/// Number of top recursion levels whose branches are summed in parallel.
const PARALLEL_LEVELS: usize = 3;

/// Number of peeling sequences of a set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PeelCount(pub BigUint);

impl PeelCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Display for PeelCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Cached orientation data for one point set.
///
/// Points are addressed by their position in the set (0..n), not by id.
#[derive(Debug, Clone)]
pub struct PeelIndex {
    points: Vec<RationalPoint>,
    /// Point positions sorted by `(x, y, id)`.
    lex: Vec<usize>,
    /// `orient[(i * n + j) * n + k]` = sign of orientation(i, j, k).
    orient: Option<Vec<i8>>,
    general_position: bool,
}

impl PeelIndex {
    pub fn new(s: &PointSet) -> Self {
        let points = s.points().to_vec();
        let n = points.len();
        let mut lex: Vec<usize> = (0..n).collect();
        lex.sort_by(|&a, &b| {
            (&points[a].x, &points[a].y, points[a].id).cmp(&(&points[b].x, &points[b].y, points[b].id))
        });

        let mut general_position = true;
        let orient = if n <= TABLE_LIMIT {
            let mut table = vec![0i8; n * n * n];
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let o = orientation(&points[i], &points[j], &points[k]).sign();
                        if o == 0 {
                            general_position = false;
                        }
                        // even permutations keep the sign, odd ones flip it
                        for (a, b, c, sign) in [
                            (i, j, k, o),
                            (j, k, i, o),
                            (k, i, j, o),
                            (j, i, k, -o),
                            (i, k, j, -o),
                            (k, j, i, -o),
                        ] {
                            table[(a * n + b) * n + c] = sign;
                        }
                    }
                }
            }
            Some(table)
        } else {
            general_position = crate::geometry::is_general_position(s);
            None
        };
        PeelIndex {
            points,
            lex,
            orient,
            general_position,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_general_position(&self) -> bool {
        self.general_position
    }

    pub fn id(&self, idx: usize) -> u32 {
        self.points[idx].id
    }

    pub fn point(&self, idx: usize) -> &RationalPoint {
        &self.points[idx]
    }

    pub fn position_of(&self, id: u32) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    fn orient(&self, i: usize, j: usize, k: usize) -> i8 {
        match &self.orient {
            Some(t) => {
                let n = self.points.len();
                t[(i * n + j) * n + k]
            }
            None => orientation(&self.points[i], &self.points[j], &self.points[k]).sign(),
        }
    }

    /// Hull vertices (CCW, positions) of the alive points, given in `lex` order.
    fn hull_sorted(&self, sorted: &[usize]) -> Vec<usize> {
        if sorted.len() < 3 {
            return sorted.to_vec();
        }
        let mut hull: Vec<usize> = Vec::with_capacity(sorted.len() + 1);
        for &p in sorted {
            while hull.len() >= 2 && self.orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        let lower_len = hull.len() + 1;
        for &p in sorted.iter().rev().skip(1) {
            while hull.len() >= lower_len
                && self.orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        hull
    }

    /// Hull vertex positions of the points whose bits are set in `mask`.
    pub fn hull_of_mask(&self, mask: u64) -> Vec<usize> {
        let sorted: Vec<usize> = self.lex.iter().copied().filter(|&i| mask >> i & 1 == 1).collect();
        self.hull_sorted(&sorted)
    }

    /// Hull vertex positions of the points flagged alive.
    pub fn hull_of_flags(&self, alive: &[bool]) -> Vec<usize> {
        let sorted: Vec<usize> = self.lex.iter().copied().filter(|&i| alive[i]).collect();
        self.hull_sorted(&sorted)
    }

    fn full_mask(&self) -> u64 {
        match self.points.len() {
            64 => u64::MAX,
            n => (1u64 << n) - 1,
        }
    }
}

/// A surviving subset of an ambient point set.
#[derive(Debug, Clone, Copy)]
pub struct PeelState<'a> {
    index: &'a PeelIndex,
    alive: u64,
}

impl<'a> PeelState<'a> {
    /// All points alive. Requires at most [`EXACT_LIMIT`] points.
    pub fn full(index: &'a PeelIndex) -> Result<Self> {
        check_exact_size(index.len())?;
        Ok(PeelState {
            index,
            alive: index.full_mask(),
        })
    }

    pub fn alive_mask(&self) -> u64 {
        self.alive
    }

    pub fn alive_count(&self) -> usize {
        self.alive.count_ones() as usize
    }

    pub fn is_alive(&self, id: u32) -> bool {
        self.index
            .position_of(id)
            .is_some_and(|i| self.alive >> i & 1 == 1)
    }

    /// Ids of the current hull vertices, sorted ascending.
    pub fn hull_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .index
            .hull_of_mask(self.alive)
            .into_iter()
            .map(|i| self.index.id(i))
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Removes `id`, which must be a current hull vertex.
    pub fn peel(&mut self, id: u32) -> Result<()> {
        if !self.hull_ids().contains(&id) {
            return Err(Error::InvalidSequence(format!("{id} is not on the current hull")));
        }
        let pos = self.index.position_of(id).expect("hull ids belong to the set");
        self.alive &= !(1u64 << pos);
        Ok(())
    }
}

fn check_exact_size(n: usize) -> Result<()> {
    if n > EXACT_LIMIT {
        Err(Error::TooLarge {
            n,
            limit: EXACT_LIMIT,
        })
    } else {
        Ok(())
    }
}

fn exact_index(s: &PointSet) -> Result<PeelIndex> {
    check_exact_size(s.len())?;
    let index = PeelIndex::new(s);
    if !index.is_general_position() {
        return Err(Error::NotGeneralPosition);
    }
    Ok(index)
}

struct Counter<'a> {
    index: &'a PeelIndex,
    memo: DashMap<u64, BigUint>,
    parallel_below: usize,
}

impl Counter<'_> {
    fn count(&self, mask: u64) -> BigUint {
        if mask.count_ones() <= 1 {
            return BigUint::one();
        }
        if let Some(hit) = self.memo.get(&mask) {
            return hit.clone();
        }
        let hull = self.index.hull_of_mask(mask);
        let total: BigUint = if (mask.count_ones() as usize) > self.parallel_below {
            hull.par_iter().map(|&v| self.count(mask & !(1u64 << v))).sum()
        } else {
            hull.iter().map(|&v| self.count(mask & !(1u64 << v))).sum()
        };
        // concurrent branches may race here; they always insert the same value
        self.memo.insert(mask, total.clone());
        total
    }
}

/// Exact number of peeling sequences.
pub fn count_peelings(s: &PointSet) -> Result<PeelCount> {
    let index = exact_index(s)?;
    Ok(count_with_index(&index))
}

/// Exact count using a prepared index (general position is the caller's job).
pub fn count_with_index(index: &PeelIndex) -> PeelCount {
    if index.is_empty() {
        return PeelCount(BigUint::one());
    }
    let counter = Counter {
        index,
        memo: DashMap::new(),
        parallel_below: index.len().saturating_sub(PARALLEL_LEVELS),
    };
    PeelCount(counter.count(index.full_mask()))
}

/// Lazy lexicographic enumeration of peeling sequences (as id lists).
pub struct PeelingIter {
    index: PeelIndex,
    /// (alive mask before the choice, hull ids sorted ascending, next candidate slot)
    stack: Vec<(u64, Vec<u32>, usize)>,
    prefix: Vec<u32>,
    remaining: usize,
    started: bool,
}

impl PeelingIter {
    fn sorted_hull(&self, mask: u64) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .index
            .hull_of_mask(mask)
            .into_iter()
            .map(|i| self.index.id(i))
            .collect();
        ids.sort_unstable();
        ids
    }

    fn descend(&mut self) -> Option<Vec<u32>> {
        loop {
            let (mask, cands, slot) = self.stack.last_mut()?;
            if *slot >= cands.len() {
                self.stack.pop();
                self.prefix.pop();
                continue;
            }
            let id = cands[*slot];
            *slot += 1;
            let pos = self.index.position_of(id).expect("candidate in set");
            let next = *mask & !(1u64 << pos);
            // replace the last prefix element chosen at this depth
            let depth = self.stack.len();
            self.prefix.truncate(depth - 1);
            self.prefix.push(id);
            if next == 0 {
                let out = self.prefix.clone();
                return Some(out);
            }
            let hull = self.sorted_hull(next);
            self.stack.push((next, hull, 0));
        }
    }
}

impl Iterator for PeelingIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.remaining == 0 {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.index.is_empty() {
                return None;
            }
            let full = self.index.full_mask();
            let hull = self.sorted_hull(full);
            self.stack.push((full, hull, 0));
        }
        let out = self.descend()?;
        self.remaining -= 1;
        Some(out)
    }
}

/// Peeling sequences in lexicographic order of their id lists, at most `limit` of them.
pub fn enumerate_peelings(s: &PointSet, limit: usize) -> Result<PeelingIter> {
    let index = exact_index(s)?;
    Ok(PeelingIter {
        index,
        stack: Vec::new(),
        prefix: Vec::new(),
        remaining: limit,
        started: false,
    })
}

/// Whether `seq` (a permutation of the set's ids) is a peeling sequence.
pub fn is_peeling_sequence(s: &PointSet, seq: &[u32]) -> Result<bool> {
    check_permutation(s, seq)?;
    let index = PeelIndex::new(s);
    if !index.is_general_position() {
        return Err(Error::NotGeneralPosition);
    }
    Ok(is_peeling_sequence_with(&index, seq))
}

/// Same as [`is_peeling_sequence`] without re-validating the sequence.
pub fn is_peeling_sequence_with(index: &PeelIndex, seq: &[u32]) -> bool {
    let mut alive = vec![true; index.len()];
    for &id in seq {
        let Some(pos) = index.position_of(id) else {
            return false;
        };
        if !index.hull_of_flags(&alive).contains(&pos) {
            return false;
        }
        alive[pos] = false;
    }
    true
}

pub(crate) fn check_permutation(s: &PointSet, seq: &[u32]) -> Result<()> {
    if seq.len() != s.len() {
        return Err(Error::InvalidSequence(format!(
            "length {} but the set has {} points",
            seq.len(),
            s.len()
        )));
    }
    let mut seen = HashMap::with_capacity(seq.len());
    for &id in seq {
        if s.get(id).is_none() {
            return Err(Error::InvalidSequence(format!("unknown id {id}")));
        }
        if seen.insert(id, ()).is_some() {
            return Err(Error::InvalidSequence(format!("repeated id {id}")));
        }
    }
    Ok(())
}

/// Monte Carlo estimate of a peeling count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Unbiased estimate of the number of peeling sequences.
///
/// Each sample peels the set once, picking a hull vertex uniformly at random at
/// every step, and records the product of the hull sizes it saw. The sample
/// mean is unbiased for the true count.
pub fn estimate_peelings(s: &PointSet, samples: u64, rng_seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let index = PeelIndex::new(s);
    if !index.is_general_position() {
        return Err(Error::NotGeneralPosition);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let values: Vec<f64> = (0..samples).map(|_| sample_path(&index, &mut rng)).collect();
    let k = samples as f64;
    let mean = values.iter().sum::<f64>() / k;
    let std_error = if samples > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        mean,
        std_error,
        samples,
    })
}

fn sample_path(index: &PeelIndex, rng: &mut ChaCha8Rng) -> f64 {
    let mut alive = vec![true; index.len()];
    let mut weight = 1.0f64;
    for _ in 0..index.len() {
        let hull = index.hull_of_flags(&alive);
        weight *= hull.len() as f64;
        let pick = hull[rng.random_range(0..hull.len())];
        alive[pick] = false;
    }
    weight
}

/// Smallest exact count among the supplied sets.
pub fn min_g_over(sets: &[PointSet]) -> Result<PeelCount> {
    let mut best: Option<PeelCount> = None;
    for s in sets {
        let c = count_peelings(s)?;
        if best.as_ref().is_none_or(|b| c < *b) {
            best = Some(c);
        }
    }
    best.ok_or(Error::EmptySet)
}

/// `true` iff every count in the slice is at least `2 * 3^(n-2)` for its size.
pub fn meets_trivial_lower_bound(n: usize, count: &PeelCount) -> bool {
    if n < 2 {
        return !count.0.is_zero();
    }
    let bound = BigUint::from(2u32) * BigUint::from(3u32).pow(n as u32 - 2);
    count.0 >= bound
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(coords: &[(i64, i64)]) -> PointSet {
        PointSet::new(
            coords
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| RationalPoint::from_ints(i as u32, x, y))
                .collect(),
        )
        .unwrap()
    }

    fn triangle_plus_interior() -> PointSet {
        pts(&[(0, 0), (6, 0), (0, 6), (1, 1)])
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_peelings(&pts(&[(0, 0), (3, 1)])).unwrap().to_string(), "2");
        assert_eq!(count_peelings(&triangle_plus_interior()).unwrap().to_string(), "18");
        let pentagon = pts(&[(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)]);
        assert_eq!(count_peelings(&pentagon).unwrap().to_string(), "120");
    }

    #[test]
    fn count_rejects_collinear_and_oversized() {
        let bad = pts(&[(0, 0), (1, 1), (2, 2)]);
        assert_eq!(count_peelings(&bad), Err(Error::NotGeneralPosition));
        let big = pts(&(0..65).map(|i| (i, i * i)).collect::<Vec<_>>());
        assert!(matches!(count_peelings(&big), Err(Error::TooLarge { n: 65, .. })));
    }

    #[test]
    fn enumeration_is_lexicographic_and_limited() {
        let tri = pts(&[(0, 0), (1, 0), (0, 1)]);
        let all: Vec<_> = enumerate_peelings(&tri, 10).unwrap().collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        assert_eq!(enumerate_peelings(&tri, 0).unwrap().count(), 0);
        assert_eq!(enumerate_peelings(&tri, 4).unwrap().count(), 4);
    }

    #[test]
    fn enumeration_of_triangle_with_interior_point() {
        let s = triangle_plus_interior();
        let all: Vec<_> = enumerate_peelings(&s, usize::MAX).unwrap().collect();
        assert_eq!(all.len(), 18);
        assert!(all.iter().all(|seq| seq[0] != 3));
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn sequence_checks() {
        let s = triangle_plus_interior();
        assert!(is_peeling_sequence(&s, &[0, 3, 1, 2]).unwrap());
        assert!(!is_peeling_sequence(&s, &[3, 0, 1, 2]).unwrap());
        assert!(matches!(
            is_peeling_sequence(&s, &[0, 0, 1, 2]),
            Err(Error::InvalidSequence(_))
        ));
        assert!(matches!(
            is_peeling_sequence(&s, &[0, 1, 2]),
            Err(Error::InvalidSequence(_))
        ));
    }

    #[test]
    fn estimator_zero_variance_cases() {
        let hexagon = pts(&[(0, 0), (2, 0), (3, 2), (2, 4), (0, 4), (-1, 2)]);
        for seed in [0, 7, 99] {
            let e = estimate_peelings(&hexagon, 50, seed).unwrap();
            assert_eq!(e.mean, 720.0);
            assert_eq!(e.std_error, 0.0);
        }
        let e = estimate_peelings(&triangle_plus_interior(), 40, 3).unwrap();
        assert_eq!((e.mean, e.std_error), (18.0, 0.0));
        assert!(estimate_peelings(&hexagon, 0, 1).is_err());
    }

    #[test]
    fn min_over_families() {
        let square = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let m = min_g_over(&[square.clone(), triangle_plus_interior()]).unwrap();
        assert_eq!(m.to_string(), "18");
        assert_eq!(min_g_over(std::slice::from_ref(&square)).unwrap().to_string(), "24");
        assert_eq!(min_g_over(&[]), Err(Error::EmptySet));
        let bad = pts(&[(0, 0), (1, 1), (2, 2)]);
        assert_eq!(min_g_over(&[square, bad]), Err(Error::NotGeneralPosition));
    }

    #[test]
    fn peel_state_walks_a_sequence() {
        let s = triangle_plus_interior();
        let index = PeelIndex::new(&s);
        let mut st = PeelState::full(&index).unwrap();
        assert_eq!(st.hull_ids(), vec![0, 1, 2]);
        assert!(st.peel(3).is_err());
        st.peel(0).unwrap();
        assert_eq!(st.hull_ids(), vec![1, 2, 3]);
        assert_eq!(st.alive_count(), 3);
        assert!(!st.is_alive(0));
    }
}
