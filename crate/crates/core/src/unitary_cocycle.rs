//! Unitary cocycles: block unitaries `U_{i,j}(v, w)` from the `(j, i)`-path
//! space `C^{v E_j E_i w}` onto the `(i, j)`-path space `C^{v E_i E_j w}`,
//! and the braid-type identity
//!
//! ```text
//! (U_ij (x) 1)(1 (x) U_il)(U_jl (x) 1) = (1 (x) U_jl)(U_il (x) 1)(1 (x) U_ij)
//! ```
//!
//! for every `i < j < l`, realized on composable three-edge paths. Both sides
//! map the `(l, j, i)`-colored paths from `w` to `v` onto the `(i, j, l)`-colored
//! ones; each factor flips one adjacent pair of edges using the block selected
//! by that pair's endpoints and leaves the third edge alone.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgraph::{validate_cubical_cocycle, validate_factorisation, CubicalCocycle, FactorisationRule};
use crate::linalg::{self, unitarity_defect, CMatrix};
use crate::skeleton::{BlockKey, Color, Skeleton};

/// Unitarity tolerance for blocks, `||U* U - I||_F`.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct UnitaryCocycle {
    skeleton: Arc<Skeleton>,
    blocks: BTreeMap<BlockKey, CMatrix>,
}

impl PartialEq for UnitaryCocycle {
    fn eq(&self, other: &Self) -> bool {
        *self.skeleton == *other.skeleton && self.blocks == other.blocks
    }
}

fn check_shapes(s: &Skeleton, blocks: &BTreeMap<BlockKey, CMatrix>) -> Result<()> {
    for (key, m) in blocks {
        s.check_color(key.i)?;
        s.check_color(key.j)?;
        if key.i >= key.j || key.v >= s.vertex_count() || key.w >= s.vertex_count() {
            return Err(Error::Malformed(format!("invalid block key {key:?}")));
        }
        let rows = s.two_color_count(key.i, key.j, key.v, key.w);
        let cols = s.two_color_count(key.j, key.i, key.v, key.w);
        if m.nrows() != rows || m.ncols() != cols {
            return Err(Error::DimensionMismatch(format!(
                "block {} is {}x{} but the path spaces need {rows}x{cols}",
                key.describe(s),
                m.nrows(),
                m.ncols()
            )));
        }
    }
    for key in s.block_keys() {
        if !blocks.contains_key(&key) {
            return Err(Error::MissingBlock(key.describe(s)));
        }
    }
    Ok(())
}

impl UnitaryCocycle {
    /// Checks block shapes against the skeleton and unitarity of every block.
    /// Zero-dimensional blocks may be omitted.
    pub fn new(skeleton: Arc<Skeleton>, mut blocks: BTreeMap<BlockKey, CMatrix>) -> Result<Self> {
        blocks.retain(|_, m| !(m.nrows() == 0 && m.ncols() == 0));
        check_shapes(&skeleton, &blocks)?;
        for (key, m) in &blocks {
            let defect = unitarity_defect(m);
            if defect > UNITARY_TOLERANCE {
                return Err(Error::NotUnitary {
                    block: key.describe(&skeleton),
                    defect,
                });
            }
        }
        Ok(UnitaryCocycle { skeleton, blocks })
    }

    /// Skips the unitarity check; shapes must already match.
    pub(crate) fn from_parts(skeleton: Arc<Skeleton>, blocks: BTreeMap<BlockKey, CMatrix>) -> Self {
        debug_assert!(check_shapes(&skeleton, &blocks).is_ok());
        UnitaryCocycle { skeleton, blocks }
    }

    /// Identity-shaped blocks are not available in general (the two bases
    /// differ); this draws every block from the Haar measure instead.
    pub fn random<R: Rng + ?Sized>(skeleton: Arc<Skeleton>, rng: &mut R) -> Self {
        let blocks = skeleton
            .block_keys()
            .into_iter()
            .map(|k| {
                let n = skeleton.two_color_count(k.i, k.j, k.v, k.w);
                (k, linalg::random_unitary(n, rng))
            })
            .collect();
        UnitaryCocycle { skeleton, blocks }
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn skeleton_arc(&self) -> &Arc<Skeleton> {
        &self.skeleton
    }

    pub fn blocks(&self) -> &BTreeMap<BlockKey, CMatrix> {
        &self.blocks
    }

    pub fn block(&self, key: &BlockKey) -> Option<&CMatrix> {
        self.blocks.get(key)
    }

    /// Single-vertex convenience: the block for colors `i < j`.
    pub fn pair(&self, i: Color, j: Color) -> Option<&CMatrix> {
        self.blocks.get(&BlockKey::new(i, j, 0, 0))
    }

    pub fn map_blocks(&self, mut f: impl FnMut(&BlockKey, &CMatrix) -> CMatrix) -> Self {
        UnitaryCocycle {
            skeleton: self.skeleton.clone(),
            blocks: self.blocks.iter().map(|(k, m)| (*k, f(k, m))).collect(),
        }
    }

    /// Largest block unitarity defect.
    pub fn unitarity_defect(&self) -> f64 {
        self.blocks.values().map(unitarity_defect).fold(0.0, f64::max)
    }

    /// Errors unless both cocycles have the same skeleton and block layout.
    pub fn check_compatible(&self, other: &UnitaryCocycle) -> Result<()> {
        if *self.skeleton != *other.skeleton {
            return Err(Error::SkeletonMismatch("different skeletons".into()));
        }
        if self.blocks.keys().ne(other.blocks.keys()) {
            return Err(Error::SkeletonMismatch("different block keys".into()));
        }
        Ok(())
    }

    /// Largest blockwise Frobenius distance.
    pub fn max_block_error(&self, other: &UnitaryCocycle) -> f64 {
        self.blocks
            .iter()
            .map(|(k, m)| other.blocks.get(k).map_or(f64::INFINITY, |n| (m - n).norm()))
            .fold(0.0, f64::max)
    }

    /// Largest blockwise operator-norm distance.
    pub fn max_block_distance(&self, other: &UnitaryCocycle) -> f64 {
        self.blocks
            .iter()
            .map(|(k, m)| {
                other
                    .blocks
                    .get(k)
                    .map_or(f64::INFINITY, |n| linalg::operator_norm(&(m - n)))
            })
            .fold(0.0, f64::max)
    }

    /// The operator on the whole `(j, i)`-path space for colors `i < j`,
    /// block diagonal over vertex pairs.
    pub fn assembled(&self, i: Color, j: Color) -> Result<CMatrix> {
        let s = &self.skeleton;
        let mut per_pair = BTreeMap::new();
        for v in 0..s.vertex_count() {
            for w in 0..s.vertex_count() {
                if let Some(m) = self.blocks.get(&BlockKey::new(i, j, v, w)) {
                    per_pair.insert((v, w), m.clone());
                }
            }
        }
        assemble_block(s, i, j, &per_pair)
    }

    pub fn to_file(&self) -> CocycleFile {
        let s = &self.skeleton;
        CocycleFile {
            blocks: self
                .blocks
                .iter()
                .map(|(k, m)| CocycleBlock {
                    i: k.i,
                    j: k.j,
                    v: s.vertex_id(k.v).to_string(),
                    w: s.vertex_id(k.w).to_string(),
                    rows: m.nrows(),
                    cols: m.ncols(),
                    data: (0..m.nrows())
                        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
                        .map(|(r, c)| [m[(r, c)].re, m[(r, c)].im])
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_file(skeleton: Arc<Skeleton>, file: CocycleFile) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for b in file.blocks {
            let key = BlockKey::new(b.i, b.j, skeleton.vertex(&b.v)?, skeleton.vertex(&b.w)?);
            if b.data.len() != b.rows * b.cols {
                return Err(Error::DimensionMismatch(format!(
                    "block {} declares {}x{} but carries {} entries",
                    key.describe(&skeleton),
                    b.rows,
                    b.cols,
                    b.data.len()
                )));
            }
            let m = CMatrix::from_row_iterator(
                b.rows,
                b.cols,
                b.data.iter().map(|&[re, im]| Complex64::new(re, im)),
            );
            if blocks.insert(key, m).is_some() {
                return Err(Error::Malformed(format!("duplicate block {}", key.describe(&skeleton))));
            }
        }
        Self::new(skeleton, blocks)
    }

    pub fn from_json(skeleton: Arc<Skeleton>, text: &str) -> Result<Self> {
        Self::from_file(skeleton, serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleBlock {
    pub i: usize,
    pub j: usize,
    pub v: String,
    pub w: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major `[re, im]` pairs.
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleFile {
    pub blocks: Vec<CocycleBlock>,
}

/// Assembles per-vertex-pair blocks for colors `i < j` into one operator on
/// the whole `(j, i)`-path space. Both the domain and codomain bases list the
/// vertex pairs `(v, w)` in vertex order, each followed by its canonical
/// path basis, so the result is block diagonal.
pub fn assemble_block(
    s: &Skeleton,
    i: Color,
    j: Color,
    blocks: &BTreeMap<(usize, usize), CMatrix>,
) -> Result<CMatrix> {
    s.check_color(i)?;
    s.check_color(j)?;
    let mut offsets = Vec::new();
    let (mut rows, mut cols) = (0, 0);
    for v in 0..s.vertex_count() {
        for w in 0..s.vertex_count() {
            let r = s.two_color_count(i, j, v, w);
            let c = s.two_color_count(j, i, v, w);
            match blocks.get(&(v, w)) {
                Some(m) if m.nrows() == r && m.ncols() == c => offsets.push((rows, cols, m)),
                Some(m) => {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({}, {}) is {}x{}, expected {r}x{c}",
                        s.vertex_id(v),
                        s.vertex_id(w),
                        m.nrows(),
                        m.ncols()
                    )))
                }
                None if r == 0 && c == 0 => {}
                None => {
                    return Err(Error::MissingBlock(format!(
                        "({}, {})",
                        s.vertex_id(v),
                        s.vertex_id(w)
                    )))
                }
            }
            rows += r;
            cols += c;
        }
    }
    let mut out = CMatrix::zeros(rows, cols);
    for (r0, c0, m) in offsets {
        out.view_mut((r0, c0), (m.nrows(), m.ncols())).copy_from(m);
    }
    Ok(out)
}

/// Builds `U^{Lambda, phi}`: each block is `diag(phi) * P` where `P` is the
/// permutation matrix of the factorisation bijection and the phases sit on
/// the `(i, j)`-ordered (codomain) basis.
pub fn from_kgraph(
    skeleton: Arc<Skeleton>,
    rule: &FactorisationRule,
    phi: &CubicalCocycle,
) -> Result<UnitaryCocycle> {
    let s = &*skeleton;
    if !validate_factorisation(s, rule)?.ok {
        return Err(Error::InvalidLayer("factorisation rule is not associative".into()));
    }
    if !validate_cubical_cocycle(s, rule, phi)?.ok {
        return Err(Error::InvalidLayer("cubical cocycle identity fails".into()));
    }
    let mut blocks = BTreeMap::new();
    for (key, map) in rule.blocks() {
        let n = map.len();
        let mut m = CMatrix::zeros(n, n);
        for (col, &row) in map.iter().enumerate() {
            m[(row, col)] = phi.get(key, row).expect("validated: every square has a value");
        }
        blocks.insert(*key, m);
    }
    Ok(UnitaryCocycle::from_parts(skeleton, blocks))
}

/// [`from_kgraph`] with `phi = 1`: the permutation matrices of the rule.
pub fn flip_cocycle(skeleton: Arc<Skeleton>, rule: &FactorisationRule) -> Result<UnitaryCocycle> {
    let phi = CubicalCocycle::constant(&skeleton, Complex64::new(1.0, 0.0));
    from_kgraph(skeleton, rule, &phi)
}

#[derive(Debug, Clone, Copy)]
struct LiftEntry {
    row: usize,
    col: usize,
    block: usize,
    r: usize,
    c: usize,
}

/// One tensor factor of the identity on a three-edge path space: flips the
/// pair at positions `(p, p + 1)` with the block picked out by that pair's
/// endpoints. Every nonzero entry is a copy of one block entry.
#[derive(Debug, Clone)]
struct Lift {
    rows: usize,
    cols: usize,
    entries: Vec<LiftEntry>,
}

impl Lift {
    fn new(
        s: &Skeleton,
        key_index: &HashMap<BlockKey, usize>,
        from: &[[usize; 3]],
        to: &HashMap<[usize; 3], usize>,
        pos: usize,
    ) -> Self {
        let mut entries = Vec::new();
        for (col, path) in from.iter().enumerate() {
            let (a, b) = (path[pos], path[pos + 1]);
            let (hi, lo) = (s.edge(a).color, s.edge(b).color);
            debug_assert!(hi > lo);
            let (x, y) = (s.edge(a).range, s.edge(b).source);
            let key = BlockKey::new(lo, hi, x, y);
            let block = key_index[&key];
            let c = s.pair_position([a, b]).expect("composable pair");
            for (r, &[p, q]) in s.two_color_paths(lo, hi, x, y).iter().enumerate() {
                let mut out = *path;
                out[pos] = p;
                out[pos + 1] = q;
                entries.push(LiftEntry {
                    row: to[&out],
                    col,
                    block,
                    r,
                    c,
                });
            }
        }
        Lift {
            rows: to.len(),
            cols: from.len(),
            entries,
        }
    }

    fn build(&self, blocks: &[&CMatrix]) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows, self.cols);
        for e in &self.entries {
            m[(e.row, e.col)] = blocks[e.block][(e.r, e.c)];
        }
        m
    }

    /// The lift of a perturbation living in a single block.
    fn build_single(&self, block: usize, d: &CMatrix) -> Option<CMatrix> {
        let mut m: Option<CMatrix> = None;
        for e in self.entries.iter().filter(|e| e.block == block) {
            m.get_or_insert_with(|| CMatrix::zeros(self.rows, self.cols))[(e.row, e.col)] =
                d[(e.r, e.c)];
        }
        m
    }

    fn pull_back(&self, grad: &CMatrix, out: &mut [CMatrix]) {
        for e in &self.entries {
            out[e.block][(e.r, e.c)] += grad[(e.row, e.col)];
        }
    }
}

/// Which side of the identity a [`TripleOperator`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `(U_ij (x) 1)(1 (x) U_il)(U_jl (x) 1)`.
    Left,
    /// `(1 (x) U_jl)(U_il (x) 1)(1 (x) U_ij)`.
    Right,
}

/// One side of the identity for a color triple and vertex pair. Columns are
/// indexed by the `(l, j, i)`-colored paths from `w` to `v`, rows by the
/// `(i, j, l)`-colored ones, both in lexicographic order.
#[derive(Debug, Clone)]
pub struct TripleOperator {
    pub colors: [Color; 3],
    pub v: usize,
    pub w: usize,
    pub side: Side,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone)]
struct TripleFrame {
    colors: [Color; 3],
    v: usize,
    w: usize,
    /// Factors in application order (rightmost first).
    left: [Lift; 3],
    right: [Lift; 3],
}

fn path_index(paths: &[[usize; 3]]) -> HashMap<[usize; 3], usize> {
    paths.iter().enumerate().map(|(i, p)| (*p, i)).collect()
}

impl TripleFrame {
    fn new(
        s: &Skeleton,
        key_index: &HashMap<BlockKey, usize>,
        [i, j, l]: [Color; 3],
        v: usize,
        w: usize,
    ) -> Option<Self> {
        let lji = s.three_color_paths([l, j, i], v, w);
        if lji.is_empty() {
            return None;
        }
        let order = |c: [Color; 3]| {
            let p = s.three_color_paths(c, v, w);
            let idx = path_index(&p);
            (p, idx)
        };
        let (jli, jli_idx) = order([j, l, i]);
        let (jil, jil_idx) = order([j, i, l]);
        let (lij, lij_idx) = order([l, i, j]);
        let (ilj, ilj_idx) = order([i, l, j]);
        let (_, ijl_idx) = order([i, j, l]);
        let left = [
            Lift::new(s, key_index, &lji, &jli_idx, 0),
            Lift::new(s, key_index, &jli, &jil_idx, 1),
            Lift::new(s, key_index, &jil, &ijl_idx, 0),
        ];
        let right = [
            Lift::new(s, key_index, &lji, &lij_idx, 1),
            Lift::new(s, key_index, &lij, &ilj_idx, 0),
            Lift::new(s, key_index, &ilj, &ijl_idx, 1),
        ];
        Some(TripleFrame {
            colors: [i, j, l],
            v,
            w,
            left,
            right,
        })
    }
}

fn chain(lifts: &[Lift; 3], blocks: &[&CMatrix]) -> [CMatrix; 3] {
    [lifts[0].build(blocks), lifts[1].build(blocks), lifts[2].build(blocks)]
}

/// Precomputed three-path frames for a skeleton; evaluates the identity's
/// residual and its derivatives for any block family on that skeleton.
#[derive(Debug, Clone)]
pub struct ResidualEvaluator {
    keys: Vec<BlockKey>,
    frames: Vec<TripleFrame>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleResidualKey {
    pub i: Color,
    pub j: Color,
    pub l: Color,
    pub v: usize,
    pub w: usize,
}

impl ResidualEvaluator {
    pub fn new(s: &Skeleton) -> Self {
        let keys = s.block_keys();
        let key_index: HashMap<BlockKey, usize> =
            keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut frames = Vec::new();
        for colors in s.color_triples() {
            for v in 0..s.vertex_count() {
                for w in 0..s.vertex_count() {
                    frames.extend(TripleFrame::new(s, &key_index, colors, v, w));
                }
            }
        }
        ResidualEvaluator { keys, frames }
    }

    pub fn keys(&self) -> &[BlockKey] {
        &self.keys
    }

    fn block_refs<'a>(&self, u: &'a UnitaryCocycle) -> Vec<&'a CMatrix> {
        self.keys.iter().map(|k| &u.blocks[k]).collect()
    }

    /// `LHS - RHS` per frame.
    fn differences(&self, blocks: &[&CMatrix]) -> Vec<CMatrix> {
        self.frames
            .iter()
            .map(|f| {
                let [a1, a2, a3] = chain(&f.left, blocks);
                let [b1, b2, b3] = chain(&f.right, blocks);
                a3 * a2 * a1 - b3 * b2 * b1
            })
            .collect()
    }

    /// Per-frame residuals in frame order (color triple, then `v`, then `w`).
    pub fn per_triple(&self, u: &UnitaryCocycle) -> Vec<(TripleResidualKey, f64)> {
        let blocks = self.block_refs(u);
        self.frames
            .iter()
            .zip(self.differences(&blocks))
            .map(|(f, d)| {
                (
                    TripleResidualKey {
                        i: f.colors[0],
                        j: f.colors[1],
                        l: f.colors[2],
                        v: f.v,
                        w: f.w,
                    },
                    d.norm(),
                )
            })
            .collect()
    }

    pub fn residual(&self, u: &UnitaryCocycle) -> f64 {
        let blocks = self.block_refs(u);
        self.differences(&blocks)
            .iter()
            .map(|d| d.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn triple_operators(&self, u: &UnitaryCocycle) -> Vec<(TripleOperator, TripleOperator)> {
        let blocks = self.block_refs(u);
        self.frames
            .iter()
            .map(|f| {
                let [a1, a2, a3] = chain(&f.left, &blocks);
                let [b1, b2, b3] = chain(&f.right, &blocks);
                let make = |side, matrix| TripleOperator {
                    colors: f.colors,
                    v: f.v,
                    w: f.w,
                    side,
                    matrix,
                };
                (make(Side::Left, a3 * a2 * a1), make(Side::Right, b3 * b2 * b1))
            })
            .collect()
    }

    /// Squared residual and its Euclidean gradient per block (in key order),
    /// with the convention `df = Re sum conj(G) dU`.
    pub fn squared_residual_gradient(&self, u: &UnitaryCocycle) -> (f64, Vec<CMatrix>) {
        let blocks = self.block_refs(u);
        let mut grads: Vec<CMatrix> = blocks
            .iter()
            .map(|m| CMatrix::zeros(m.nrows(), m.ncols()))
            .collect();
        let mut value = 0.0;
        for f in &self.frames {
            let [a1, a2, a3] = chain(&f.left, &blocks);
            let [b1, b2, b3] = chain(&f.right, &blocks);
            let (a21, b21) = (&a2 * &a1, &b2 * &b1);
            let d = &a3 * &a21 - &b3 * &b21;
            value += d.norm_squared();
            let g = d.scale(2.0);
            for (lifts, m1, m2, m3, m21, sign) in [
                (&f.left, &a1, &a2, &a3, &a21, 1.0),
                (&f.right, &b1, &b2, &b3, &b21, -1.0),
            ] {
                let g = g.scale(sign);
                let m32 = m3 * m2;
                lifts[0].pull_back(&(m32.adjoint() * &g), &mut grads);
                lifts[1].pull_back(&(m3.adjoint() * &g * m1.adjoint()), &mut grads);
                lifts[2].pull_back(&(&g * m21.adjoint()), &mut grads);
            }
        }
        (value, grads)
    }

    /// Stacked real residual vector `[Re, Im]` of every frame's `LHS - RHS`.
    pub(crate) fn residual_vector(&self, blocks: &[&CMatrix]) -> Vec<f64> {
        let mut out = Vec::new();
        for d in self.differences(blocks) {
            for z in d.iter() {
                out.push(z.re);
                out.push(z.im);
            }
        }
        out
    }

    /// Real Jacobian of [`ResidualEvaluator::residual_vector`]: column `p`
    /// is the derivative along `directions[p]`, a perturbation of one block.
    pub(crate) fn jacobian(&self, blocks: &[&CMatrix], directions: &[(usize, CMatrix)]) -> DMatrix<f64> {
        let rows: usize = self
            .frames
            .iter()
            .map(|f| 2 * f.left[2].rows * f.left[0].cols)
            .sum();
        let mut jac = DMatrix::zeros(rows, directions.len());
        let mut offset = 0;
        for f in &self.frames {
            let size = f.left[2].rows * f.left[0].cols;
            let sides = [(&f.left, chain(&f.left, blocks), 1.0), (&f.right, chain(&f.right, blocks), -1.0)];
            for (col, (block, delta)) in directions.iter().enumerate() {
                let mut acc = CMatrix::zeros(f.left[2].rows, f.left[0].cols);
                for (lifts, full, sign) in &sides {
                    for k in 0..3 {
                        let Some(dk) = lifts[k].build_single(*block, delta) else { continue };
                        let mut term = if k == 0 { dk.clone() } else { full[0].clone() };
                        for (m, fm) in full.iter().enumerate().skip(1) {
                            term = if m == k { &dk * term } else { fm * term };
                        }
                        acc += term.scale(*sign);
                    }
                }
                for (idx, z) in acc.iter().enumerate() {
                    jac[(offset + 2 * idx, col)] = z.re;
                    jac[(offset + 2 * idx + 1, col)] = z.im;
                }
            }
            offset += 2 * size;
        }
        jac
    }

    pub(crate) fn blocks_of<'a>(&self, u: &'a UnitaryCocycle) -> Vec<&'a CMatrix> {
        self.block_refs(u)
    }
}

/// Frobenius residual of the identity, aggregated by root-sum-of-squares
/// over color triples and vertex pairs. Zero when `k < 3`.
pub fn cocycle_residual(u: &UnitaryCocycle) -> f64 {
    ResidualEvaluator::new(u.skeleton()).residual(u)
}

pub fn is_cocycle(u: &UnitaryCocycle, tol: f64) -> bool {
    cocycle_residual(u) <= tol
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleResidual {
    pub i: Color,
    pub j: Color,
    pub l: Color,
    pub v: String,
    pub w: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residual: f64,
    pub per_triple: Vec<TripleResidual>,
}

pub fn residual_report(u: &UnitaryCocycle) -> ResidualReport {
    let s = u.skeleton();
    let per = ResidualEvaluator::new(s).per_triple(u);
    let residual = per.iter().map(|(_, r)| r * r).sum::<f64>().sqrt();
    ResidualReport {
        residual,
        per_triple: per
            .into_iter()
            .map(|(k, r)| TripleResidual {
                i: k.i,
                j: k.j,
                l: k.l,
                v: s.vertex_id(k.v).to_string(),
                w: s.vertex_id(k.w).to_string(),
                residual: r,
            })
            .collect(),
    }
}

/// Change of orthonormal edge basis: one unitary per color and vertex pair,
/// acting on `C^{v E_c w}` (basis: color-`c` edges from `w` to `v` in file
/// order). Missing entries are the identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Gauge {
    blocks: BTreeMap<(Color, usize, usize), CMatrix>,
}

impl Gauge {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn random<R: Rng + ?Sized>(s: &Skeleton, rng: &mut R) -> Self {
        let mut blocks = BTreeMap::new();
        for c in 1..=s.k() {
            for v in 0..s.vertex_count() {
                for w in 0..s.vertex_count() {
                    let n = s.edges_between(c, v, w).len();
                    if n > 0 {
                        blocks.insert((c, v, w), linalg::random_unitary(n, rng));
                    }
                }
            }
        }
        Gauge { blocks }
    }

    /// Same unitary on every color of a single-vertex skeleton whose colors
    /// all have `q.nrows()` loops.
    pub fn uniform(s: &Skeleton, q: &CMatrix) -> Self {
        let blocks = (1..=s.k()).map(|c| ((c, 0, 0), q.clone())).collect();
        Gauge { blocks }
    }

    pub fn insert(&mut self, c: Color, v: usize, w: usize, q: CMatrix) {
        self.blocks.insert((c, v, w), q);
    }

    pub fn blocks(&self) -> &BTreeMap<(Color, usize, usize), CMatrix> {
        &self.blocks
    }

    pub fn adjoint(&self) -> Self {
        Gauge {
            blocks: self.blocks.iter().map(|(k, q)| (*k, q.adjoint())).collect(),
        }
    }

    pub fn map(&self, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        Gauge {
            blocks: self.blocks.iter().map(|(k, q)| (*k, f(q))).collect(),
        }
    }

    pub fn check(&self, s: &Skeleton) -> Result<()> {
        for (&(c, v, w), q) in &self.blocks {
            s.check_color(c)?;
            let n = s.edges_between(c, v, w).len();
            if q.nrows() != n || q.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "gauge block (color {c}, {}, {}) is {}x{}, expected {n}x{n}",
                    s.vertex_id(v),
                    s.vertex_id(w),
                    q.nrows(),
                    q.ncols()
                )));
            }
            let defect = unitarity_defect(q);
            if defect > UNITARY_TOLERANCE {
                return Err(Error::NotUnitary {
                    block: format!("gauge (color {c}, {}, {})", s.vertex_id(v), s.vertex_id(w)),
                    defect,
                });
            }
        }
        Ok(())
    }

    fn entry(&self, c: Color, v: usize, w: usize, r: usize, col: usize) -> Complex64 {
        match self.blocks.get(&(c, v, w)) {
            Some(q) => q[(r, col)],
            None if r == col => Complex64::new(1.0, 0.0),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Induced basis change on `C^{v E_a E_b w}`: `Q_a(v, u) (x) Q_b(u, w)`
    /// summed over the intermediate vertex `u`.
    pub fn induced(&self, s: &Skeleton, a: Color, b: Color, v: usize, w: usize) -> CMatrix {
        let paths = s.two_color_paths(a, b, v, w);
        let n = paths.len();
        CMatrix::from_fn(n, n, |row, col| {
            let [y1, y2] = paths[row];
            let [x1, x2] = paths[col];
            let u = s.edge(x1).source;
            if s.edge(y1).source != u {
                return Complex64::new(0.0, 0.0);
            }
            self.entry(a, v, u, s.local_position(y1), s.local_position(x1))
                * self.entry(b, u, w, s.local_position(y2), s.local_position(x2))
        })
    }
}

/// `U'_{ij}(v, w) = T_{ij}(v, w) U_{ij}(v, w) T_{ji}(v, w)*` with `T` the
/// basis change induced by the gauge on each two-color path space.
pub fn gauge_transform(u: &UnitaryCocycle, q: &Gauge) -> Result<UnitaryCocycle> {
    let s = u.skeleton();
    q.check(s)?;
    Ok(u.map_blocks(|k, m| {
        let t = q.induced(s, k.i, k.j, k.v, k.w);
        let t_src = q.induced(s, k.j, k.i, k.v, k.w);
        t * m * t_src.adjoint()
    }))
}
