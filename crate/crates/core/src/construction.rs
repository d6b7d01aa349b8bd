//! The recursive "three rays" point sets `S_n` and their thinned variants `B_n`.
//!
//! `S_n` splits `n` into three near-equal parts, builds each part recursively,
//! and places the copies along three rays from a common origin: ray 1 along the
//! positive x-axis, rays 2 and 3 at roughly -120 and +120 degrees. The union is
//! then squashed vertically by a factor `eps`, so every copy looks like a thin
//! needle to the level above it.
//!
//! Exact 120-degree directions are irrational, so the rays use the rational
//! unit vectors `(-33/65, -+56/65)` (about 120.5 degrees). Only the order
//! structure matters, and [`validate_structure`] certifies it on every build.
//!
//! Each level is built in its own frame (origin `o_n` at `(0, 0)`, direction
//! `v_n = (1, 0)`), then rescaled by a power of two so that all coordinates lie
//! in `[-1, 1]`. Children are placed with their origins at distances `sigma`,
//! `2 sigma`, `4 sigma` along rays 1, 2, 3; the farther ray-3 copy guarantees
//! that its x-coordinates are smaller than those of the ray-2 copy.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, PointSet, Rational, RationalPoint};
use crate::peeling::PeelIndex;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Unit direction of ray `i` (1-based) as an exact rational vector.
pub fn ray_direction(i: u8) -> (Rational, Rational) {
    match i {
        1 => (Rational::one(), Rational::zero()),
        2 => (rat(-33, 65), rat(-56, 65)),
        3 => (rat(-33, 65), rat(56, 65)),
        _ => panic!("ray index must be 1, 2 or 3"),
    }
}

/// Exact affine map `p -> M p + t` of the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub m: [[Rational; 2]; 2],
    pub t: [Rational; 2],
}

impl Affine {
    pub fn identity() -> Self {
        Affine {
            m: [
                [Rational::one(), Rational::zero()],
                [Rational::zero(), Rational::one()],
            ],
            t: [Rational::zero(), Rational::zero()],
        }
    }

    fn linear(m: [[Rational; 2]; 2]) -> Self {
        Affine {
            m,
            t: [Rational::zero(), Rational::zero()],
        }
    }

    /// `(x, y) -> (x, eps * y)`.
    pub fn flatten(eps: &Rational) -> Self {
        Affine::linear([
            [Rational::one(), Rational::zero()],
            [Rational::zero(), eps.clone()],
        ])
    }

    pub fn scale(f: &Rational) -> Self {
        Affine::linear([[f.clone(), Rational::zero()], [Rational::zero(), f.clone()]])
    }

    /// Rotation taking `(1, 0)` to the unit vector `dir`, then translation by `offset`.
    pub fn place(dir: &(Rational, Rational), offset: (Rational, Rational)) -> Self {
        let (c, s) = dir;
        Affine {
            m: [[c.clone(), -s.clone()], [s.clone(), c.clone()]],
            t: [offset.0, offset.1],
        }
    }

    pub fn apply(&self, x: &Rational, y: &Rational) -> (Rational, Rational) {
        (
            &self.m[0][0] * x + &self.m[0][1] * y + &self.t[0],
            &self.m[1][0] * x + &self.m[1][1] * y + &self.t[1],
        )
    }

    pub fn apply_linear(&self, x: &Rational, y: &Rational) -> (Rational, Rational) {
        (
            &self.m[0][0] * x + &self.m[0][1] * y,
            &self.m[1][0] * x + &self.m[1][1] * y,
        )
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &Affine) -> Affine {
        let m = &self.m;
        let n = &inner.m;
        let mm = |i: usize, j: usize| &m[i][0] * &n[0][j] + &m[i][1] * &n[1][j];
        let (tx, ty) = self.apply(&inner.t[0], &inner.t[1]);
        Affine {
            m: [[mm(0, 0), mm(0, 1)], [mm(1, 0), mm(1, 1)]],
            t: [tx, ty],
        }
    }

    pub fn inverse(&self) -> Option<Affine> {
        let det = &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0];
        if det.is_zero() {
            return None;
        }
        let inv = [
            [&self.m[1][1] / &det, -&self.m[0][1] / &det],
            [-&self.m[1][0] / &det, &self.m[0][0] / &det],
        ];
        let lin = Affine::linear(inv);
        let (tx, ty) = lin.apply(&self.t[0], &self.t[1]);
        Some(Affine {
            t: [-tx, -ty],
            ..lin
        })
    }
}

/// Knobs of the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionParams {
    /// Distance unit for placing child copies (at `sigma`, `2 sigma`, `4 sigma`).
    pub spacing: Rational,
    /// Vertical squash factor applied at every level.
    pub flatten: Rational,
    /// How many times [`build_s`] divides `flatten` by 16 after a failed validation.
    pub max_retries: u32,
    /// Random peels used by the post-build validation.
    pub peel_trials: u32,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        ConstructionParams {
            spacing: rat(4, 1),
            flatten: rat(1, 256),
            max_retries: 4,
            peel_trials: 32,
        }
    }
}

/// Contents of a construction node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    /// `S_1`: a single point.
    Single { id: u32 },
    /// `S_2`: the origin point `o_2` and the second point `u`.
    Pair { origin_id: u32, u_id: u32 },
    /// Three recursive copies on rays 1, 2, 3.
    Rays(Box<[ConstructionNode; 3]>),
}

/// One node of the recursion tree of `S_n` / `B_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionNode {
    /// Number of points of `S_size` this node was built as (before any removal).
    pub size: usize,
    /// Ray indices from the root down to this node.
    pub path: Vec<u8>,
    /// Map from this node's own frame to the coordinates of the final set.
    pub frame: Affine,
    /// Squash factor used at this level (1 for leaves).
    pub flatten_factor: Rational,
    pub kind: NodeKind,
    /// Child indices (1-based) removed from this node when building `B_n`.
    pub removed_subrays: Vec<u8>,
}

impl ConstructionNode {
    /// The origin `o_n` in final coordinates.
    pub fn origin(&self) -> (Rational, Rational) {
        (self.frame.t[0].clone(), self.frame.t[1].clone())
    }

    /// The direction `v_n` (towards ray 1) in final coordinates, unnormalized.
    pub fn direction(&self) -> (Rational, Rational) {
        self.frame.apply_linear(&Rational::one(), &Rational::zero())
    }

    pub fn children(&self) -> Option<&[ConstructionNode; 3]> {
        match &self.kind {
            NodeKind::Rays(c) => Some(c),
            _ => None,
        }
    }

    /// Sizes of the three children, if this is an internal node.
    pub fn child_sizes(&self) -> Option<[usize; 3]> {
        self.children().map(|c| [c[0].size, c[1].size, c[2].size])
    }

    fn is_removed(&self, child: u8) -> bool {
        self.removed_subrays.contains(&child)
    }

    /// Ids of all surviving points under this node.
    pub fn point_ids(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_ids(&mut out);
        out
    }

    fn collect_ids(&self, out: &mut Vec<u32>) {
        match &self.kind {
            NodeKind::Single { id } => out.push(*id),
            NodeKind::Pair { origin_id, u_id } => out.extend([*origin_id, *u_id]),
            NodeKind::Rays(children) => {
                for (i, c) in children.iter().enumerate() {
                    if !self.is_removed(i as u8 + 1) {
                        c.collect_ids(out);
                    }
                }
            }
        }
    }

    /// Outermost surviving point along this node's direction.
    pub fn tip_id(&self) -> Option<u32> {
        match &self.kind {
            NodeKind::Single { id } => Some(*id),
            NodeKind::Pair { u_id, .. } => Some(*u_id),
            NodeKind::Rays(children) => children
                .iter()
                .enumerate()
                .find(|(i, _)| !self.is_removed(*i as u8 + 1))
                .and_then(|(_, c)| c.tip_id()),
        }
    }

    /// Visits every surviving node in depth-first (child 1 first) order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ConstructionNode)) {
        f(self);
        if let Some(children) = self.children() {
            for (i, c) in children.iter().enumerate() {
                if !self.is_removed(i as u8 + 1) {
                    c.walk(f);
                }
            }
        }
    }

    /// Child indices that are deleted anywhere in the tree, as `(path, child)`.
    pub fn removals(&self) -> Vec<(Vec<u8>, u8)> {
        let mut out = Vec::new();
        self.walk(&mut |node| {
            for &c in &node.removed_subrays {
                out.push((node.path.clone(), c));
            }
        });
        out
    }

    fn transform(&mut self, map: &Affine) {
        self.frame = map.compose(&self.frame);
        if let NodeKind::Rays(children) = &mut self.kind {
            for c in children.iter_mut() {
                c.transform(map);
            }
        }
    }

    fn reindex_paths(&mut self, prefix: u8) {
        self.path.insert(0, prefix);
        if let NodeKind::Rays(children) = &mut self.kind {
            for c in children.iter_mut() {
                c.reindex_paths(prefix);
            }
        }
    }

    fn find_mut(&mut self, path: &[u8]) -> Option<&mut ConstructionNode> {
        match path.split_first() {
            None => Some(self),
            Some((&head, rest)) => match &mut self.kind {
                NodeKind::Rays(children) => children.get_mut(head as usize - 1)?.find_mut(rest),
                _ => None,
            },
        }
    }
}

/// Child sizes `n_1 >= n_2 >= n_3`, each `floor(n/3)` or `ceil(n/3)`.
pub fn split_sizes(n: usize) -> [usize; 3] {
    let base = n / 3;
    match n % 3 {
        0 => [base, base, base],
        1 => [base + 1, base, base],
        _ => [base + 1, base + 1, base],
    }
}

struct Local {
    points: Vec<RationalPoint>,
    node: ConstructionNode,
}

fn build_local(n: usize, params: &ConstructionParams, next_id: &mut u32) -> Local {
    let mut take_id = || {
        let id = *next_id;
        *next_id += 1;
        id
    };
    match n {
        1 => {
            let id = take_id();
            Local {
                points: vec![RationalPoint::new(id, Rational::zero(), Rational::zero())],
                node: leaf_node(1, NodeKind::Single { id }),
            }
        }
        2 => {
            let origin_id = take_id();
            let u_id = take_id();
            Local {
                points: vec![
                    RationalPoint::new(origin_id, Rational::zero(), Rational::zero()),
                    RationalPoint::new(u_id, Rational::one(), Rational::zero()),
                ],
                node: leaf_node(2, NodeKind::Pair { origin_id, u_id }),
            }
        }
        _ => {
            let sizes = split_sizes(n);
            let mut points = Vec::with_capacity(n);
            let mut children = Vec::with_capacity(3);
            for (i, &size) in sizes.iter().enumerate() {
                let ray = i as u8 + 1;
                let mut child = build_local(size, params, next_id);
                let dir = ray_direction(ray);
                let dist = &params.spacing * rat(1 << i, 1);
                let place = Affine::place(&dir, (&dir.0 * &dist, &dir.1 * &dist));
                for p in child.points.iter_mut() {
                    let (x, y) = place.apply(&p.x, &p.y);
                    p.x = x;
                    p.y = y;
                    p.path.insert(0, ray);
                }
                child.node.transform(&place);
                child.node.reindex_paths(ray);
                points.extend(child.points);
                children.push(child.node);
            }

            let squash = Affine::flatten(&params.flatten);
            for p in points.iter_mut() {
                p.y = &p.y * &params.flatten;
            }
            let scale = Affine::scale(&normalizing_scale(&points));
            for p in points.iter_mut() {
                let (x, y) = scale.apply(&p.x, &p.y);
                p.x = x;
                p.y = y;
            }
            let map = scale.compose(&squash);
            for c in children.iter_mut() {
                c.transform(&map);
            }
            let children: [ConstructionNode; 3] = children.try_into().expect("three children");
            Local {
                points,
                node: ConstructionNode {
                    size: n,
                    path: Vec::new(),
                    frame: Affine::identity(),
                    flatten_factor: params.flatten.clone(),
                    kind: NodeKind::Rays(Box::new(children)),
                    removed_subrays: Vec::new(),
                },
            }
        }
    }
}

fn leaf_node(size: usize, kind: NodeKind) -> ConstructionNode {
    ConstructionNode {
        size,
        path: Vec::new(),
        frame: Affine::identity(),
        flatten_factor: Rational::one(),
        kind,
        removed_subrays: Vec::new(),
    }
}

/// `2^-k` for the least `k >= 0` with every coordinate inside `[-1, 1]` after scaling.
fn normalizing_scale(points: &[RationalPoint]) -> Rational {
    let max = points
        .iter()
        .flat_map(|p| [p.x.abs(), p.y.abs()])
        .max()
        .unwrap_or_else(Rational::zero);
    let mut bound = Rational::one();
    let two = rat(2, 1);
    while bound < max {
        bound = &bound * &two;
    }
    Rational::one() / bound
}

/// Builds `S_n` with the given parameters, without validating it.
pub fn construct_s(n: usize, params: &ConstructionParams) -> Result<(PointSet, ConstructionNode)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if params.flatten <= Rational::zero() || params.spacing <= Rational::zero() {
        return Err(Error::InvalidArgument(
            "spacing and flatten must be positive".into(),
        ));
    }
    let mut next_id = 0;
    let local = build_local(n, params, &mut next_id);
    Ok((PointSet::new(local.points)?, local.node))
}

/// Builds `S_n`, retrying with a smaller squash factor until it validates.
pub fn build_s(n: usize, params: &ConstructionParams) -> Result<(PointSet, ConstructionNode)> {
    let mut attempt = params.clone();
    let mut last = Vec::new();
    for _ in 0..=params.max_retries {
        let (set, node) = construct_s(n, &attempt)?;
        let report = validate_structure(&set, &node, params.peel_trials, 0)?;
        if report.is_ok() {
            return Ok((set, node));
        }
        last = report.failures;
        attempt.flatten = &attempt.flatten / rat(16, 1);
    }
    Err(Error::ValidationFailed {
        retries: params.max_retries,
        diagnostics: last,
    })
}

/// Two smallest children of `node`, ties broken towards the larger index.
fn two_smallest_children(sizes: [usize; 3]) -> [u8; 2] {
    let mut order = [1u8, 2, 3];
    order.sort_by_key(|&i| (sizes[i as usize - 1], std::cmp::Reverse(i)));
    let mut pick = [order[0], order[1]];
    pick.sort_unstable();
    pick
}

/// Builds `B_n`: `S_n` without the two smallest subrays of the copy on `ray_index`.
pub fn build_b(
    n: usize,
    ray_index: u8,
    params: &ConstructionParams,
) -> Result<(PointSet, ConstructionNode)> {
    if !(1..=3).contains(&ray_index) {
        return Err(Error::InvalidArgument("ray index must be 1, 2 or 3".into()));
    }
    if n < 9 {
        return Err(Error::NoSubrays(n));
    }
    let (full, mut node) = build_s(n, params)?;
    let target = node
        .find_mut(&[ray_index])
        .expect("root of S_n (n >= 9) has three children");
    let sizes = target.child_sizes().expect("ray copy of S_n (n >= 9) is internal");
    target.removed_subrays = two_smallest_children(sizes).to_vec();
    let survivors: BTreeSet<u32> = node.point_ids().into_iter().collect();
    let points: Vec<_> = full
        .into_points()
        .into_iter()
        .filter(|p| survivors.contains(&p.id))
        .collect();
    Ok((PointSet::new(points)?, node))
}

/// Size model for the worst-case `B_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSizes {
    /// The two removed subrays, `floor(n/9)` each.
    pub removed: [usize; 2],
    /// The seven kept subrays, as equal as possible, largest first.
    pub kept: [usize; 7],
}

/// Two subrays of `floor(n/9)` removed, the rest spread evenly over seven.
pub fn worst_case_b_sizes(n: usize) -> Result<BSizes> {
    if n < 9 {
        return Err(Error::NoSubrays(n));
    }
    let removed = n / 9;
    let rest = n - 2 * removed;
    let (q, r) = rest.div_rem(&7);
    let mut kept = [q; 7];
    for k in kept.iter_mut().take(r) {
        *k += 1;
    }
    Ok(BSizes {
        removed: [removed, removed],
        kept,
    })
}

/// `(x, y) -> (x, eps * y)` on every point; ids and paths are kept.
pub fn flatten(s: &PointSet, eps: &Rational) -> Result<PointSet> {
    if *eps <= Rational::zero() {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let points = s
        .points()
        .iter()
        .map(|p| RationalPoint {
            y: &p.y * eps,
            ..p.clone()
        })
        .collect();
    PointSet::new(points)
}

/// Undoes the top-level squash, giving the set as it was before flattening.
pub fn unflatten_top(s: &PointSet, node: &ConstructionNode) -> Result<PointSet> {
    flatten(s, &(Rational::one() / &node.flatten_factor))
}

/// Outcome of [`validate_structure`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub general_position: bool,
    pub hull_is_ray_tips: bool,
    pub x_order_ok: bool,
    pub triangle_persistence_ok: bool,
    pub failures: Vec<String>,
}

impl StructureReport {
    pub fn is_ok(&self) -> bool {
        self.general_position
            && self.hull_is_ray_tips
            && self.x_order_ok
            && self.triangle_persistence_ok
    }
}

/// Certifies the structural claims about a built set.
///
/// Checks general position exhaustively, that the full hull is the three ray
/// tips, the x-ordering of the three copies inside every internal node (in that
/// node's own frame), and that `peel_trials` random peelings only ever see a
/// triangle while all three top-level rays are non-empty.
pub fn validate_structure(
    s: &PointSet,
    node: &ConstructionNode,
    peel_trials: u32,
    rng_seed: u64,
) -> Result<StructureReport> {
    let set_ids: BTreeSet<u32> = s.ids().into_iter().collect();
    let node_ids: Vec<u32> = node.point_ids();
    if node_ids.len() != set_ids.len() || node_ids.iter().any(|id| !set_ids.contains(id)) {
        return Err(Error::IdMismatch);
    }
    let mut failures = Vec::new();
    let index = PeelIndex::new(s);

    let general_position = index.is_general_position();
    if !general_position {
        failures.push("some triple of points is collinear".to_string());
    }

    let hull_is_ray_tips = check_hull_tips(s, node, &mut failures)?;
    let x_order_ok = check_x_order(s, node, &mut failures);
    let triangle_persistence_ok = if general_position {
        check_triangle_persistence(&index, s, peel_trials, rng_seed, &mut failures)
    } else {
        failures.push("triangle persistence not checked without general position".into());
        false
    };

    Ok(StructureReport {
        general_position,
        hull_is_ray_tips,
        x_order_ok,
        triangle_persistence_ok,
        failures,
    })
}

fn check_hull_tips(s: &PointSet, node: &ConstructionNode, failures: &mut Vec<String>) -> Result<bool> {
    let Some(children) = node.children() else {
        return Ok(true);
    };
    let mut tips: Vec<u32> = children
        .iter()
        .enumerate()
        .filter(|(i, _)| !node.is_removed(*i as u8 + 1))
        .filter_map(|(_, c)| c.tip_id())
        .collect();
    tips.sort_unstable();
    let mut hull: Vec<u32> = convex_hull(s)?.iter().map(|p| p.id).collect();
    hull.sort_unstable();
    if hull != tips {
        failures.push(format!("hull vertices {hull:?} differ from ray tips {tips:?}"));
        return Ok(false);
    }
    Ok(true)
}

fn check_x_order(s: &PointSet, root: &ConstructionNode, failures: &mut Vec<String>) -> bool {
    let coords: HashMap<u32, &RationalPoint> = s.points().iter().map(|p| (p.id, p)).collect();
    let mut ok = true;
    root.walk(&mut |node| {
        let Some(children) = node.children() else {
            return;
        };
        let Some(to_local) = node.frame.inverse() else {
            failures.push(format!("degenerate frame at node {:?}", node.path));
            ok = false;
            return;
        };
        let local_x = |id: u32| {
            let p = coords[&id];
            to_local.apply(&p.x, &p.y).0
        };
        let ranges: Vec<Option<(Rational, Rational)>> = children
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if node.is_removed(i as u8 + 1) {
                    return None;
                }
                let xs: Vec<Rational> = c.point_ids().into_iter().map(local_x).collect();
                let lo = xs.iter().min()?.clone();
                let hi = xs.iter().max()?.clone();
                Some((lo, hi))
            })
            .collect();
        // ray 1 copy right of the ray 2 copy, ray 3 copy left of both
        let mut need = |a: usize, b: usize| {
            if let (Some((a_lo, _)), Some((_, b_hi))) = (&ranges[a], &ranges[b]) {
                if a_lo <= b_hi {
                    failures.push(format!(
                        "x-order broken at node {:?}: ray {} not right of ray {}",
                        node.path,
                        a + 1,
                        b + 1
                    ));
                    ok = false;
                }
            }
        };
        need(0, 1);
        need(0, 2);
        need(1, 2);
    });
    ok
}

fn check_triangle_persistence(
    index: &PeelIndex,
    s: &PointSet,
    trials: u32,
    seed: u64,
    failures: &mut Vec<String>,
) -> bool {
    let ray_of: Vec<Option<u8>> = s.points().iter().map(|p| p.path.first().copied()).collect();
    let rays_alive = |alive: &[bool]| {
        let mut seen = [false; 3];
        for (i, r) in ray_of.iter().enumerate() {
            if let (true, Some(r)) = (alive[i], r) {
                seen[*r as usize - 1] = true;
            }
        }
        seen.iter().all(|&b| b)
    };
    if s.len() < 3 {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let mut alive = vec![true; s.len()];
        let mut step = 0;
        while rays_alive(&alive) {
            let hull = index.hull_of_flags(&alive);
            if hull.len() != 3 {
                failures.push(format!(
                    "trial {trial}, step {step}: hull has {} vertices while all rays survive",
                    hull.len()
                ));
                return false;
            }
            alive[hull[rng.random_range(0..hull.len())]] = false;
            step += 1;
        }
    }
    true
}
