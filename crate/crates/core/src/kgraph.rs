//! Factorisation rules over a skeleton, cubical 2-cocycles, and exhaustive
//! enumeration of rules for small skeletons.
//!
//! A rule stores, for each `i < j` and vertex pair `(v, w)`, a bijection from
//! the `(j, i)`-colored paths `v E_j E_i w` onto the `(i, j)`-colored paths
//! `v E_i E_j w`, as an index map between the two canonical bases. The map
//! for `j > i` is the inverse.
//!
//! # Cube faces
//!
//! A composable triple `efg` with colors `i < j < l` spans a 3-cube whose six
//! faces are two-edge segments of the six color orderings of the same
//! degree-`(e_i + e_j + e_l)` path. For `m` in `1..=3` (colors `i, j, l`):
//!
//! * `F0_m` is the initial segment of the ordering that puts color `m` last,
//! * `F1_m` is the terminal segment of the ordering that puts color `m` first.
//!
//! The front/top/left product is `phi(F0_1) phi(F1_2) phi(F0_3)` and the
//! back/bottom/right product is `phi(F1_1) phi(F0_2) phi(F1_3)`. With this
//! labeling the front product collects exactly the squares flipped by the
//! left-hand side of the unitary cocycle identity and the back product those
//! flipped by the right-hand side.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{ValidationReport, Violation};
use crate::skeleton::{validate_skeleton, BlockKey, Skeleton};

/// Tolerance for the six-face product identity.
pub const CUBE_TOLERANCE: f64 = 1e-10;
/// Tolerance for `|phi| = 1`.
pub const MODULUS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorisationRule {
    blocks: BTreeMap<BlockKey, Vec<usize>>,
}

fn check_block(s: &Skeleton, key: &BlockKey, map: &[usize]) -> Result<()> {
    s.check_color(key.i)?;
    s.check_color(key.j)?;
    if key.i >= key.j {
        return Err(Error::Malformed(format!(
            "block colors must satisfy i < j, got {}",
            key.describe(s)
        )));
    }
    let ij = s.two_color_count(key.i, key.j, key.v, key.w);
    let ji = s.two_color_count(key.j, key.i, key.v, key.w);
    if map.len() != ij || map.len() != ji {
        return Err(Error::DimensionMismatch(format!(
            "block {} has {} entries but the path sets have sizes {ij} and {ji}",
            key.describe(s),
            map.len()
        )));
    }
    let mut seen = vec![false; map.len()];
    for &x in map {
        if x >= map.len() || std::mem::replace(&mut seen[x], true) {
            return Err(Error::NotBijective(key.describe(s)));
        }
    }
    Ok(())
}

impl FactorisationRule {
    /// Checks every block against the skeleton's path lists and requires a
    /// block for every nonempty `(i < j, v, w)`.
    pub fn new(s: &Skeleton, blocks: BTreeMap<BlockKey, Vec<usize>>) -> Result<Self> {
        let rule = FactorisationRule { blocks };
        rule.check_against(s)?;
        Ok(rule)
    }

    fn check_against(&self, s: &Skeleton) -> Result<()> {
        for (key, map) in &self.blocks {
            check_block(s, key, map)?;
        }
        for key in s.block_keys() {
            if !self.blocks.contains_key(&key) {
                return Err(Error::MissingBlock(key.describe(s)));
            }
        }
        Ok(())
    }

    /// The rule `fe -> ef` on a single-vertex skeleton, which makes the
    /// k-graph the product of the one-color graphs.
    pub fn tensor(s: &Skeleton) -> Result<Self> {
        if s.vertex_count() != 1 {
            return Err(Error::Malformed(
                "the tensor factorisation is only defined for single-vertex skeletons".into(),
            ));
        }
        let mut blocks = BTreeMap::new();
        for key in s.block_keys() {
            let target = s.two_color_paths(key.i, key.j, key.v, key.w);
            let map = s
                .two_color_paths(key.j, key.i, key.v, key.w)
                .iter()
                .map(|&[f, e]| {
                    target
                        .iter()
                        .position(|&p| p == [e, f])
                        .expect("single vertex: every swap is a path")
                })
                .collect();
            blocks.insert(key, map);
        }
        Self::new(s, blocks)
    }

    pub fn blocks(&self) -> &BTreeMap<BlockKey, Vec<usize>> {
        &self.blocks
    }

    pub fn block(&self, key: &BlockKey) -> Option<&[usize]> {
        self.blocks.get(key).map(Vec::as_slice)
    }

    /// Concatenation of the block maps in canonical block order; enumeration
    /// emits rules in lexicographic order of this encoding.
    pub fn encoding(&self) -> Vec<usize> {
        self.blocks.values().flatten().copied().collect()
    }

    /// Rewrites a composable two-edge path of distinct colors in the opposite
    /// color order.
    pub fn flip(&self, s: &Skeleton, path: [usize; 2]) -> [usize; 2] {
        flip_pair(s, &self.blocks, path).expect("rule covers every nonempty block")
    }

    pub fn from_json(s: &Skeleton, text: &str) -> Result<Self> {
        let file: FactorisationFile = serde_json::from_str(text)?;
        let mut blocks = BTreeMap::new();
        for b in file.blocks {
            let key = BlockKey::new(b.i, b.j, s.vertex(&b.v)?, s.vertex(&b.w)?);
            if blocks.insert(key, b.map).is_some() {
                return Err(Error::Malformed(format!("duplicate block {}", key.describe(s))));
            }
        }
        // Empty blocks may be omitted or listed with an empty map.
        blocks.retain(|k, m| !(m.is_empty() && s.two_color_count(k.i, k.j, k.v, k.w) == 0));
        Self::new(s, blocks)
    }

    pub fn to_file(&self, s: &Skeleton) -> FactorisationFile {
        FactorisationFile {
            blocks: self
                .blocks
                .iter()
                .map(|(k, map)| FactorisationBlock {
                    i: k.i,
                    j: k.j,
                    v: s.vertex_id(k.v).to_string(),
                    w: s.vertex_id(k.w).to_string(),
                    map: map.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorisationBlock {
    pub i: usize,
    pub j: usize,
    pub v: String,
    pub w: String,
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorisationFile {
    pub blocks: Vec<FactorisationBlock>,
}

/// Flip with a possibly partial set of blocks; `None` when the needed block
/// has not been assigned.
fn flip_pair(
    s: &Skeleton,
    blocks: &BTreeMap<BlockKey, Vec<usize>>,
    [a, b]: [usize; 2],
) -> Option<[usize; 2]> {
    let (ca, cb) = (s.edge(a).color, s.edge(b).color);
    let (v, w) = (s.edge(a).range, s.edge(b).source);
    let pos = s.pair_position([a, b])?;
    if ca > cb {
        let map = blocks.get(&BlockKey::new(cb, ca, v, w))?;
        Some(s.two_color_paths(cb, ca, v, w)[map[pos]])
    } else {
        let map = blocks.get(&BlockKey::new(ca, cb, v, w))?;
        let r = map.iter().position(|&x| x == pos)?;
        Some(s.two_color_paths(cb, ca, v, w)[r])
    }
}

/// The six color orderings of the path spanned by a composable triple with
/// colors `i < j < l`, named by their color sequence. The reversed ordering
/// is reached two ways; they agree exactly when the rule is associative on
/// this cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cube {
    pub ijl: [usize; 3],
    pub ilj: [usize; 3],
    pub jil: [usize; 3],
    pub jli: [usize; 3],
    pub lij: [usize; 3],
    /// `ijl -> jil -> jli -> lji`.
    pub lji_first_pair_first: [usize; 3],
    /// `ijl -> ilj -> lij -> lji`.
    pub lji_last_pair_first: [usize; 3],
}

fn swap_front(
    s: &Skeleton,
    blocks: &BTreeMap<BlockKey, Vec<usize>>,
    p: [usize; 3],
) -> Option<[usize; 3]> {
    let [x, y] = flip_pair(s, blocks, [p[0], p[1]])?;
    Some([x, y, p[2]])
}

fn swap_back(
    s: &Skeleton,
    blocks: &BTreeMap<BlockKey, Vec<usize>>,
    p: [usize; 3],
) -> Option<[usize; 3]> {
    let [x, y] = flip_pair(s, blocks, [p[1], p[2]])?;
    Some([p[0], x, y])
}

fn cube_partial(
    s: &Skeleton,
    blocks: &BTreeMap<BlockKey, Vec<usize>>,
    ijl: [usize; 3],
) -> Option<Cube> {
    let ilj = swap_back(s, blocks, ijl)?;
    let jil = swap_front(s, blocks, ijl)?;
    let jli = swap_back(s, blocks, jil)?;
    let lij = swap_front(s, blocks, ilj)?;
    let lji_first_pair_first = swap_front(s, blocks, jli)?;
    let lji_last_pair_first = swap_back(s, blocks, lij)?;
    Some(Cube {
        ijl,
        ilj,
        jil,
        jli,
        lij,
        lji_first_pair_first,
        lji_last_pair_first,
    })
}

impl Cube {
    pub fn is_associative(&self) -> bool {
        self.lji_first_pair_first == self.lji_last_pair_first
    }

    /// Faces `[F0_1, F1_2, F0_3]` (front, top, left), each as an
    /// increasing-color two-edge path.
    pub fn front_faces(&self) -> [[usize; 2]; 3] {
        [
            [self.jli[0], self.jli[1]],
            [self.jil[1], self.jil[2]],
            [self.ijl[0], self.ijl[1]],
        ]
    }

    /// Faces `[F1_1, F0_2, F1_3]` (back, bottom, right).
    pub fn back_faces(&self) -> [[usize; 2]; 3] {
        [
            [self.ijl[1], self.ijl[2]],
            [self.ilj[0], self.ilj[1]],
            [self.lij[1], self.lij[2]],
        ]
    }
}

impl FactorisationRule {
    /// The cube spanned by a composable triple with increasing colors.
    pub fn cube(&self, s: &Skeleton, ijl: [usize; 3]) -> Cube {
        cube_partial(s, &self.blocks, ijl).expect("rule covers every nonempty block")
    }
}

/// Checks associativity on every 3-cube: flipping the first adjacent pair
/// first or the last pair first must reach the same reversed factorisation.
pub fn validate_factorisation(s: &Skeleton, rule: &FactorisationRule) -> Result<ValidationReport> {
    rule.check_against(s)?;
    let mut report = ValidationReport::new("factorisation");
    if s.k() < 3 {
        report.note("k < 3: no 3-cubes, associativity is vacuous");
        return Ok(report);
    }
    for colors in s.color_triples() {
        for path in s.composable_triples(colors) {
            let cube = rule.cube(s, path);
            if !cube.is_associative() {
                report.push(Violation::NonAssociative {
                    colors,
                    path: s.path_ids(path),
                    first_pair_first: s.path_ids(cube.lji_first_pair_first),
                    last_pair_first: s.path_ids(cube.lji_last_pair_first),
                });
            }
        }
    }
    Ok(report)
}

/// A unit-modulus value on every commuting square. Squares are addressed by
/// their increasing-color factorisation: block `(i < j, v, w)` plus the
/// position in the canonical basis of `v E_i E_j w`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CubicalCocycle {
    values: BTreeMap<(BlockKey, usize), Complex64>,
}

impl CubicalCocycle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Same value on every square of the skeleton.
    pub fn constant(s: &Skeleton, z: Complex64) -> Self {
        Self::from_fn(s, |_, _| z)
    }

    /// Value per square, given the square's block and its increasing-color path.
    pub fn from_fn(s: &Skeleton, mut f: impl FnMut(BlockKey, [usize; 2]) -> Complex64) -> Self {
        let mut values = BTreeMap::new();
        for key in s.block_keys() {
            for (idx, &p) in s.two_color_paths(key.i, key.j, key.v, key.w).iter().enumerate() {
                values.insert((key, idx), f(key, p));
            }
        }
        CubicalCocycle { values }
    }

    pub fn insert(&mut self, key: BlockKey, index: usize, value: Complex64) {
        self.values.insert((key, index), value);
    }

    pub fn get(&self, key: &BlockKey, index: usize) -> Option<Complex64> {
        self.values.get(&(*key, index)).copied()
    }

    pub fn values(&self) -> &BTreeMap<(BlockKey, usize), Complex64> {
        &self.values
    }

    /// Value on an increasing-color two-edge path.
    pub fn on_square(&self, s: &Skeleton, square: [usize; 2]) -> Result<Complex64> {
        let (a, b) = (s.edge(square[0]), s.edge(square[1]));
        let key = BlockKey::new(a.color, b.color, a.range, b.source);
        let idx = s
            .pair_position(square)
            .ok_or_else(|| Error::Malformed("square is not a composable path".into()))?;
        self.get(&key, idx)
            .ok_or_else(|| Error::MissingSquare(format!("{} index {idx}", key.describe(s))))
    }

    /// Multiplies every value by `z`.
    pub fn scaled(&self, z: Complex64) -> Self {
        CubicalCocycle {
            values: self.values.iter().map(|(k, v)| (*k, v * z)).collect(),
        }
    }

    pub fn from_json(s: &Skeleton, text: &str) -> Result<Self> {
        let records: Vec<PhaseRecord> = serde_json::from_str(text)?;
        let mut out = CubicalCocycle::new();
        for r in records {
            let key = BlockKey::new(r.i, r.j, s.vertex(&r.v)?, s.vertex(&r.w)?);
            s.check_color(r.i)?;
            s.check_color(r.j)?;
            if r.i >= r.j || r.index >= s.two_color_count(r.i, r.j, key.v, key.w) {
                return Err(Error::Malformed(format!(
                    "no square {} index {}",
                    key.describe(s),
                    r.index
                )));
            }
            out.insert(key, r.index, Complex64::new(r.phase[0], r.phase[1]));
        }
        Ok(out)
    }

    pub fn to_records(&self, s: &Skeleton) -> Vec<PhaseRecord> {
        self.values
            .iter()
            .map(|((k, idx), z)| PhaseRecord {
                i: k.i,
                j: k.j,
                v: s.vertex_id(k.v).to_string(),
                w: s.vertex_id(k.w).to_string(),
                index: *idx,
                phase: [z.re, z.im],
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseRecord {
    pub i: usize,
    pub j: usize,
    pub v: String,
    pub w: String,
    pub index: usize,
    pub phase: [f64; 2],
}

/// Checks `|phi| = 1` on every square and, for `k >= 3`, the six-face
/// product identity on every 3-cube (see the module docs for the face
/// labeling). A missing square value is an error.
pub fn validate_cubical_cocycle(
    s: &Skeleton,
    rule: &FactorisationRule,
    phi: &CubicalCocycle,
) -> Result<ValidationReport> {
    rule.check_against(s)?;
    let mut report = ValidationReport::new("cubical_cocycle");
    for key in s.block_keys() {
        for idx in 0..s.two_color_count(key.i, key.j, key.v, key.w) {
            let z = phi
                .get(&key, idx)
                .ok_or_else(|| Error::MissingSquare(format!("{} index {idx}", key.describe(s))))?;
            if (z.norm() - 1.0).abs() > MODULUS_TOLERANCE {
                report.push(Violation::NotUnitModulus {
                    i: key.i,
                    j: key.j,
                    v: s.vertex_id(key.v).to_string(),
                    w: s.vertex_id(key.w).to_string(),
                    index: idx,
                    modulus: z.norm(),
                });
            }
        }
    }
    if s.k() < 3 {
        report.note("k < 3: no 3-cubes, the cube identity is vacuous");
        return Ok(report);
    }
    for colors in s.color_triples() {
        for path in s.composable_triples(colors) {
            let cube = rule.cube(s, path);
            let product = |faces: [[usize; 2]; 3]| -> Result<Complex64> {
                faces
                    .iter()
                    .try_fold(Complex64::new(1.0, 0.0), |acc, &f| Ok(acc * phi.on_square(s, f)?))
            };
            let front = product(cube.front_faces())?;
            let back = product(cube.back_faces())?;
            if (front - back).norm() > CUBE_TOLERANCE {
                report.push(Violation::CubeIdentity {
                    colors,
                    path: s.path_ids(path),
                    front: [front.re, front.im],
                    back: [back.re, back.im],
                });
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Stop after this many rules.
    pub limit: Option<usize>,
    /// Maximum number of block assignments tried before giving up.
    pub budget: u64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            limit: None,
            budget: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationStatus {
    /// Every valid rule was emitted.
    Complete,
    /// Stopped at the requested limit.
    LimitReached,
    /// The node budget ran out; the emitted rules are a strict prefix of the
    /// full stream and the count is a lower bound.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub emitted: usize,
    pub nodes: u64,
    pub status: EnumerationStatus,
}

/// Advances `perm` to the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let Some(i) = (0..perm.len() - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..perm.len()).rev().find(|&j| perm[j] > perm[i]).unwrap();
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

struct Search<'a, F> {
    s: &'a Skeleton,
    keys: Vec<BlockKey>,
    cubes: Vec<[usize; 3]>,
    blocks: BTreeMap<BlockKey, Vec<usize>>,
    opts: EnumerationOptions,
    nodes: u64,
    emitted: usize,
    stop: Option<EnumerationStatus>,
    sink: F,
}

impl<F: FnMut(&FactorisationRule)> Search<'_, F> {
    fn consistent(&self) -> bool {
        self.cubes.iter().all(|&path| {
            cube_partial(self.s, &self.blocks, path).is_none_or(|c| c.is_associative())
        })
    }

    fn descend(&mut self, depth: usize) {
        if depth == self.keys.len() {
            let rule = FactorisationRule {
                blocks: self.blocks.clone(),
            };
            (self.sink)(&rule);
            self.emitted += 1;
            if self.opts.limit.is_some_and(|l| self.emitted >= l) {
                self.stop = Some(EnumerationStatus::LimitReached);
            }
            return;
        }
        let key = self.keys[depth];
        let n = self.s.two_color_count(key.i, key.j, key.v, key.w);
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            if self.nodes >= self.opts.budget {
                self.stop = Some(EnumerationStatus::Truncated);
                return;
            }
            self.nodes += 1;
            self.blocks.insert(key, perm.clone());
            if self.consistent() {
                self.descend(depth + 1);
            }
            self.blocks.remove(&key);
            if self.stop.is_some() || !next_permutation(&mut perm) {
                return;
            }
        }
    }
}

/// Streams every associative factorisation rule on `s` into `sink`, in
/// lexicographic order of [`FactorisationRule::encoding`].
///
/// Backtracks over blocks in canonical order and prunes as soon as a fully
/// assigned 3-cube is non-associative. Hitting the node budget is reported
/// as [`EnumerationStatus::Truncated`], never silently.
pub fn enumerate_factorisations(
    s: &Skeleton,
    opts: EnumerationOptions,
    sink: impl FnMut(&FactorisationRule),
) -> Result<EnumerationSummary> {
    if !validate_skeleton(s).ok {
        return Err(Error::InvalidLayer("skeleton fails validation".into()));
    }
    if opts.limit == Some(0) {
        return Ok(EnumerationSummary {
            emitted: 0,
            nodes: 0,
            status: EnumerationStatus::LimitReached,
        });
    }
    let cubes = s
        .color_triples()
        .into_iter()
        .flat_map(|c| s.composable_triples(c))
        .collect();
    let mut search = Search {
        s,
        keys: s.block_keys(),
        cubes,
        blocks: BTreeMap::new(),
        opts,
        nodes: 0,
        emitted: 0,
        stop: None,
        sink,
    };
    search.descend(0);
    Ok(EnumerationSummary {
        emitted: search.emitted,
        nodes: search.nodes,
        status: search.stop.unwrap_or(EnumerationStatus::Complete),
    })
}

/// Collecting form of [`enumerate_factorisations`].
pub fn collect_factorisations(
    s: &Skeleton,
    opts: EnumerationOptions,
) -> Result<(Vec<FactorisationRule>, EnumerationSummary)> {
    let mut out = Vec::new();
    let summary = enumerate_factorisations(s, opts, |r| out.push(r.clone()))?;
    Ok((out, summary))
}
