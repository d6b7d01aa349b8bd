//! Simplified peeling sequences and the multinomial decomposition bound.
//!
//! Given a partition `X_1, ..., X_k` of a point set, projecting a peeling
//! sequence onto part indices gives a word over `1..=k`. The number of
//! peeling sequences is at most the multinomial coefficient of the part sizes
//! times the product of the parts' own peeling counts.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::peeling::{count_peelings, PeelCount, PeelIndex};

/// Largest set accepted by [`count_simplified`].
pub const SIMPLIFIED_LIMIT: usize = 12;

/// Disjoint, non-empty id sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<Vec<u32>>,
    part_of: HashMap<u32, usize>,
}

impl Partition {
    pub fn new(parts: Vec<Vec<u32>>) -> Result<Self> {
        let mut part_of = HashMap::new();
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::InvalidPartition(format!("part {} is empty", i + 1)));
            }
            for &id in part {
                if part_of.insert(id, i).is_some() {
                    return Err(Error::InvalidPartition(format!("id {id} appears twice")));
                }
            }
        }
        Ok(Partition { parts, part_of })
    }

    /// Every point in its own part, in set order.
    pub fn singletons(s: &PointSet) -> Self {
        Partition::new(s.ids().into_iter().map(|id| vec![id]).collect()).expect("ids are distinct")
    }

    /// The whole set as one part.
    pub fn whole(s: &PointSet) -> Self {
        Partition::new(vec![s.ids()]).expect("ids are distinct")
    }

    /// Groups points by the first `depth` entries of their construction path.
    ///
    /// Depth 1 gives the three top-level rays; depth 2 the subrays. Parts are
    /// ordered by path, so part `i` at depth 1 is ray `i` when all rays survive.
    pub fn by_path_prefix(s: &PointSet, depth: usize) -> Result<Self> {
        let mut groups: BTreeMap<&[u8], Vec<u32>> = BTreeMap::new();
        for p in s.points() {
            if p.path.is_empty() && depth > 0 {
                return Err(Error::InvalidPartition(format!(
                    "point {} carries no construction path",
                    p.id
                )));
            }
            let key = &p.path[..depth.min(p.path.len())];
            groups.entry(key).or_default().push(p.id);
        }
        Partition::new(groups.into_values().collect())
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    /// 1-based index of the part containing `id`.
    pub fn part_index(&self, id: u32) -> Option<usize> {
        self.part_of.get(&id).map(|i| i + 1)
    }

    /// Errors unless the partition covers exactly the ids of `s`.
    pub fn check_covers(&self, s: &PointSet) -> Result<()> {
        if self.n() != s.len() || s.ids().iter().any(|id| !self.part_of.contains_key(id)) {
            return Err(Error::InvalidPartition(
                "parts do not cover the point set exactly".into(),
            ));
        }
        Ok(())
    }
}

/// A peeling sequence with each id replaced by its 1-based part index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplifiedSequence {
    pub symbols: Vec<usize>,
}

/// Projects an id sequence onto part indices.
pub fn simplify(seq: &[u32], p: &Partition) -> Result<SimplifiedSequence> {
    if seq.len() != p.n() {
        return Err(Error::InvalidSequence(format!(
            "length {} but the partition covers {} ids",
            seq.len(),
            p.n()
        )));
    }
    let mut seen = HashSet::with_capacity(seq.len());
    let symbols = seq
        .iter()
        .map(|&id| {
            if !seen.insert(id) {
                return Err(Error::InvalidSequence(format!("repeated id {id}")));
            }
            p.part_index(id)
                .ok_or_else(|| Error::InvalidSequence(format!("id {id} is not covered")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimplifiedSequence { symbols })
}

/// Number of distinct simplified sequences over all peeling sequences of `s`.
///
/// Enumerates peelings depth first and deduplicates the projected words. A
/// `(surviving set, word so far)` pair that was already expanded is skipped,
/// since it can only produce words already recorded.
pub fn count_simplified(s: &PointSet, p: &Partition) -> Result<u64> {
    if s.len() > SIMPLIFIED_LIMIT {
        return Err(Error::TooLarge {
            n: s.len(),
            limit: SIMPLIFIED_LIMIT,
        });
    }
    p.check_covers(s)?;
    let index = PeelIndex::new(s);
    if !index.is_general_position() {
        return Err(Error::NotGeneralPosition);
    }
    let symbol: Vec<u64> = (0..index.len())
        .map(|i| p.part_index(index.id(i)).expect("covered") as u64)
        .collect();

    // words are packed 4 bits per symbol; k <= n <= 12 fits
    let mut words: HashSet<u64> = HashSet::new();
    let mut expanded: HashSet<(u64, u64)> = HashSet::new();
    let full = (1u64 << index.len()) - 1;
    let mut stack = vec![(full, 0u64)];
    while let Some((mask, word)) = stack.pop() {
        if mask == 0 {
            words.insert(word);
            continue;
        }
        if !expanded.insert((mask, word)) {
            continue;
        }
        for v in index.hull_of_mask(mask) {
            stack.push((mask & !(1u64 << v), word << 4 | symbol[v]));
        }
    }
    Ok(words.len() as u64)
}

/// `n! / (n_1! ... n_k!) * prod g_i`.
pub fn multinomial_bound(p: &Partition, part_counts: &[PeelCount]) -> Result<BigUint> {
    if part_counts.len() != p.k() {
        return Err(Error::InvalidArgument(format!(
            "{} part counts for {} parts",
            part_counts.len(),
            p.k()
        )));
    }
    let product: BigUint = part_counts.iter().map(|c| c.0.clone()).product();
    Ok(multinomial(&p.sizes()) * product)
}

/// Multinomial coefficient of the given part sizes.
pub fn multinomial(sizes: &[usize]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total = 0usize;
    for &size in sizes {
        for j in 1..=size {
            total += 1;
            acc = acc * BigUint::from(total) / BigUint::from(j);
        }
    }
    acc
}

/// Both sides of the decomposition bound for one set and partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionCheck {
    pub lhs: PeelCount,
    pub part_counts: Vec<PeelCount>,
    pub rhs: BigUint,
    pub holds: bool,
}

/// Compares `g(Z)` against the multinomial bound built from the parts' own counts.
pub fn check_decomposition(s: &PointSet, p: &Partition) -> Result<DecompositionCheck> {
    p.check_covers(s)?;
    let lhs = count_peelings(s)?;
    let part_counts = p
        .parts()
        .iter()
        .map(|ids| count_peelings(&s.subset(ids)?))
        .collect::<Result<Vec<_>>>()?;
    let rhs = multinomial_bound(p, &part_counts)?;
    let holds = lhs.0 <= rhs;
    Ok(DecompositionCheck {
        lhs,
        part_counts,
        rhs,
        holds,
    })
}
