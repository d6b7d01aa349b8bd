mod common;

use common::{random_general_position, triangle_plus_interior};
use peelkit::construction::{build_s, ConstructionParams};
use peelkit::partition::{check_decomposition, count_simplified, simplify, Partition};
use peelkit::peeling::{count_peelings, enumerate_peelings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Distinct projected words, straight from the full enumeration.
fn naive_simplified(s: &peelkit::PointSet, p: &Partition) -> usize {
    enumerate_peelings(s, usize::MAX)
        .unwrap()
        .map(|seq| simplify(&seq, p).unwrap())
        .collect::<BTreeSet<_>>()
        .len()
}

fn random_partition(rng: &mut impl Rng, ids: &[u32]) -> Partition {
    let k = rng.random_range(1..=ids.len().min(4));
    let mut parts = vec![Vec::new(); k];
    for (i, &id) in ids.iter().enumerate() {
        // the first k ids seed the parts so none is empty
        let slot = if i < k { i } else { rng.random_range(0..k) };
        parts[slot].push(id);
    }
    Partition::new(parts).unwrap()
}

#[test]
fn triangle_with_interior_point() {
    let s = triangle_plus_interior();
    let p = Partition::new(vec![vec![0, 1, 2], vec![3]]).unwrap();
    // words: the interior point is peeled 2nd, 3rd or 4th
    assert_eq!(count_simplified(&s, &p).unwrap(), 3);
    assert_eq!(naive_simplified(&s, &p), 3);
}

#[test]
fn simplified_counts_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 3..=8 {
        let s = random_general_position(&mut rng, n);
        let p = random_partition(&mut rng, &s.ids());
        assert_eq!(count_simplified(&s, &p).unwrap() as usize, naive_simplified(&s, &p));
        let singles = Partition::singletons(&s);
        assert_eq!(
            count_simplified(&s, &singles).unwrap().to_string(),
            count_peelings(&s).unwrap().to_string()
        );
    }
}

#[test]
fn decomposition_bound_on_every_bipartition_of_four_points() {
    let s = triangle_plus_interior();
    for mask in 1u32..15 {
        let (a, b): (Vec<u32>, Vec<u32>) = (0..4).partition(|i| mask >> i & 1 == 1);
        let d = check_decomposition(&s, &Partition::new(vec![a, b]).unwrap()).unwrap();
        assert!(d.holds, "mask {mask:04b}");
    }
}

#[test]
fn decomposition_bound_on_s9_and_random_sets() {
    let (s9, _) = build_s(9, &ConstructionParams::default()).unwrap();
    let rays = Partition::by_path_prefix(&s9, 1).unwrap();
    assert_eq!(rays.sizes(), vec![3, 3, 3]);
    let d = check_decomposition(&s9, &rays).unwrap();
    assert_eq!(d.lhs.to_string(), "6552");
    assert_eq!(d.rhs.to_string(), "362880");
    assert!(d.holds);
    assert_eq!(count_simplified(&s9, &rays).unwrap() as usize, naive_simplified(&s9, &rays));

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let n = rng.random_range(2..=8);
        let s = random_general_position(&mut rng, n);
        let p = random_partition(&mut rng, &s.ids());
        assert!(check_decomposition(&s, &p).unwrap().holds);
    }
}
