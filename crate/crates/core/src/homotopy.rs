//! Paths of unitary cocycles sampled on `0 = t_0 < ... < t_N = 1`.
//!
//! [`geodesic_path`] interpolates blockwise along one-parameter subgroups and
//! is exact for `k = 2`, where every family of unitaries is a cocycle.
//! [`conjugation_path`] moves a cocycle along a path of gauges, which keeps the
//! residual fixed. [`path_search`] starts from the geodesic and projects every
//! interior sample back onto the zero set of the residual.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, polar_unitary, CMatrix, UnitaryLog};
use crate::skeleton::{BlockKey, Skeleton};
use crate::unitary_cocycle::{
    gauge_transform, CocycleFile, Gauge, ResidualEvaluator, UnitaryCocycle,
};

#[derive(Debug, Clone)]
pub struct CocyclePath {
    skeleton: Arc<Skeleton>,
    t: Vec<f64>,
    samples: Vec<UnitaryCocycle>,
    residuals: Vec<f64>,
    max_adjacent_distance: f64,
}

fn max_adjacent(samples: &[UnitaryCocycle]) -> f64 {
    samples
        .windows(2)
        .map(|w| w[0].max_block_distance(&w[1]))
        .fold(0.0, f64::max)
}

impl CocyclePath {
    /// Computes residuals and the continuity measure from the samples.
    pub fn new(t: Vec<f64>, samples: Vec<UnitaryCocycle>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::Malformed("a path needs at least one sample".into()));
        };
        if t.len() != samples.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for {} samples",
                t.len(),
                samples.len()
            )));
        }
        for s in &samples[1..] {
            first.check_compatible(s)?;
        }
        let skeleton = first.skeleton_arc().clone();
        let eval = ResidualEvaluator::new(&skeleton);
        let residuals = samples.iter().map(|u| eval.residual(u)).collect();
        let max_adjacent_distance = max_adjacent(&samples);
        Ok(CocyclePath {
            skeleton,
            t,
            samples,
            residuals,
            max_adjacent_distance,
        })
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn samples(&self) -> &[UnitaryCocycle] {
        &self.samples
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Operator-norm distance between neighbouring samples, maximised over
    /// blocks and over the path.
    pub fn max_adjacent_distance(&self) -> f64 {
        self.max_adjacent_distance
    }

    /// The constant `C` in `max_adjacent_distance <= C / N`.
    pub fn continuity_constant(&self) -> f64 {
        self.max_adjacent_distance * (self.samples.len().saturating_sub(1)) as f64
    }

    pub fn start(&self) -> &UnitaryCocycle {
        &self.samples[0]
    }

    pub fn end(&self) -> &UnitaryCocycle {
        self.samples.last().expect("nonempty")
    }

    pub fn to_file(&self) -> PathFile {
        PathFile {
            samples: self
                .t
                .iter()
                .zip(&self.samples)
                .zip(&self.residuals)
                .map(|((&t, u), &residual)| PathSample {
                    t,
                    cocycle: u.to_file(),
                    residual,
                })
                .collect(),
            max_adjacent_distance: self.max_adjacent_distance,
        }
    }

    /// Rebuilds the samples and recomputes residuals and distances; the
    /// stored numbers are not trusted.
    pub fn from_file(skeleton: Arc<Skeleton>, file: PathFile) -> Result<Self> {
        let mut t = Vec::with_capacity(file.samples.len());
        let mut samples = Vec::with_capacity(file.samples.len());
        for s in file.samples {
            t.push(s.t);
            samples.push(UnitaryCocycle::from_file(skeleton.clone(), s.cocycle)?);
        }
        Self::new(t, samples)
    }

    pub fn from_json(skeleton: Arc<Skeleton>, text: &str) -> Result<Self> {
        Self::from_file(skeleton, serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSample {
    pub t: f64,
    pub cocycle: CocycleFile,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub samples: Vec<PathSample>,
    pub max_adjacent_distance: f64,
}

/// Independent re-check of a path against its claimed endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathCheck {
    pub samples: usize,
    pub parameters_increasing: bool,
    pub max_unitarity_defect: f64,
    pub start_error: f64,
    pub end_error: f64,
    pub max_residual: f64,
    pub max_adjacent_distance: f64,
}

impl PathCheck {
    pub fn passes(&self, residual_tol: f64, continuity_bound: f64) -> bool {
        self.parameters_increasing
            && self.max_unitarity_defect <= 1e-10
            && self.start_error <= 1e-12
            && self.end_error <= 1e-12
            && self.max_residual <= residual_tol
            && self.max_adjacent_distance <= continuity_bound
    }
}

pub fn check_path(path: &CocyclePath, u0: &UnitaryCocycle, u1: &UnitaryCocycle) -> PathCheck {
    let t = path.t();
    let eval = ResidualEvaluator::new(path.skeleton());
    PathCheck {
        samples: t.len(),
        parameters_increasing: t.first() == Some(&0.0)
            && t.last() == Some(&1.0)
            && t.windows(2).all(|w| w[0] < w[1]),
        max_unitarity_defect: path
            .samples()
            .iter()
            .map(UnitaryCocycle::unitarity_defect)
            .fold(0.0, f64::max),
        start_error: path.start().max_block_error(u0),
        end_error: path.end().max_block_error(u1),
        max_residual: path.samples().iter().map(|u| eval.residual(u)).fold(0.0, f64::max),
        max_adjacent_distance: max_adjacent(path.samples()),
    }
}

fn uniform_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

fn check_samples(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Malformed("a path needs at least one interval".into()));
    }
    Ok(())
}

/// Blockwise `U0 exp(t log(U0* U1))` with the branch rule of [`UnitaryLog`].
#[derive(Debug, Clone)]
struct Geodesic {
    start: UnitaryCocycle,
    logs: BTreeMap<BlockKey, UnitaryLog>,
}

impl Geodesic {
    fn new(u0: &UnitaryCocycle, u1: &UnitaryCocycle) -> Result<Self> {
        u0.check_compatible(u1)?;
        let logs = u0
            .blocks()
            .iter()
            .map(|(k, a)| (*k, UnitaryLog::new(&(a.adjoint() * &u1.blocks()[k]))))
            .collect();
        Ok(Geodesic {
            start: u0.clone(),
            logs,
        })
    }

    fn at(&self, t: f64) -> UnitaryCocycle {
        self.start.map_blocks(|k, a| a * self.logs[k].power(t))
    }
}

/// `N` intervals, `N + 1` samples at `t = k / N`. The endpoints are the
/// inputs themselves.
pub fn geodesic_path(u0: &UnitaryCocycle, u1: &UnitaryCocycle, n: usize) -> Result<CocyclePath> {
    check_samples(n)?;
    let geo = Geodesic::new(u0, u1)?;
    let t = uniform_grid(n);
    let samples = t
        .iter()
        .enumerate()
        .map(|(idx, &t)| match idx {
            0 => u0.clone(),
            _ if idx == n => u1.clone(),
            _ => geo.at(t),
        })
        .collect();
    CocyclePath::new(t, samples)
}

/// `t -> gauge_transform(U, Q^t)` with `Q^t` the blockwise geodesic from the
/// identity gauge, so `Q^1 = Q`.
pub fn conjugation_path(u: &UnitaryCocycle, q: &Gauge, n: usize, tol: f64) -> Result<CocyclePath> {
    check_samples(n)?;
    let r = ResidualEvaluator::new(u.skeleton()).residual(u);
    if r > tol {
        return Err(Error::InvalidLayer(format!(
            "starting point has residual {r:e} above {tol:e}"
        )));
    }
    q.check(u.skeleton())?;
    let logs: Vec<(BlockKey3, UnitaryLog)> = q
        .blocks()
        .iter()
        .map(|(k, m)| (*k, UnitaryLog::new(m)))
        .collect();
    let t = uniform_grid(n);
    let mut samples = Vec::with_capacity(n + 1);
    for (idx, &t) in t.iter().enumerate() {
        let gauge = if idx == n {
            q.clone()
        } else {
            let mut g = Gauge::identity();
            for ((c, v, w), log) in &logs {
                g.insert(*c, *v, *w, log.power(t));
            }
            g
        };
        samples.push(if idx == 0 { u.clone() } else { gauge_transform(u, &gauge)? });
    }
    CocyclePath::new(t, samples)
}

type BlockKey3 = (usize, usize, usize);

/// Riemannian gradient of `cocycle_residual(U)^2` in left-trivialised form:
/// for each block a skew-Hermitian `Omega` with
/// `d/ds f(U exp(s X)) = Re tr(Omega* X)` at `s = 0`. The ambient tangent
/// vector is `U Omega`.
pub fn residual_gradient(u: &UnitaryCocycle) -> BTreeMap<BlockKey, CMatrix> {
    let eval = ResidualEvaluator::new(u.skeleton());
    let (_, grads) = eval.squared_residual_gradient(u);
    eval.keys()
        .iter()
        .zip(grads)
        .map(|(k, g)| (*k, linalg::skew_part(&(u.blocks()[k].adjoint() * g))))
        .collect()
}

/// Real basis of the skew-Hermitian `n x n` matrices, orthonormal up to the
/// factor 2 on off-diagonal pairs.
pub fn skew_basis(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        let mut m = CMatrix::zeros(n, n);
        m[(a, a)] = Complex64::i();
        out.push(m);
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut m = CMatrix::zeros(n, n);
            m[(a, b)] = Complex64::new(1.0, 0.0);
            m[(b, a)] = Complex64::new(-1.0, 0.0);
            out.push(m);
            let mut m = CMatrix::zeros(n, n);
            m[(a, b)] = Complex64::i();
            m[(b, a)] = Complex64::i();
            out.push(m);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSearchConfig {
    /// Number of intervals of the initial grid.
    pub samples: usize,
    pub tol: f64,
    /// Iteration budget for each sample projection.
    pub max_iters: usize,
    pub seed: u64,
    /// Largest admitted operator-norm distance between neighbouring samples.
    pub continuity_bound: f64,
    /// Refinement stops once the grid has this many intervals.
    pub max_samples: usize,
}

impl Default for PathSearchConfig {
    fn default() -> Self {
        PathSearchConfig {
            samples: 64,
            tol: 1e-8,
            max_iters: 5000,
            seed: 0,
            continuity_bound: 0.2,
            max_samples: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub reason: String,
    pub t: Vec<f64>,
    pub residual_profile: Vec<f64>,
    pub iterations: Vec<usize>,
    pub total_iterations: usize,
    pub max_adjacent_distance: f64,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(CocyclePath),
    Failed(FailureReport),
}

struct Projection {
    point: UnitaryCocycle,
    residual: f64,
    iterations: usize,
}

fn residual_norm(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Levenberg-Marquardt on the product of unitary groups. Steps are taken in
/// the left-trivialised tangent space and retracted with the polar factor.
fn project(
    eval: &ResidualEvaluator,
    start: &UnitaryCocycle,
    target: f64,
    max_iters: usize,
    seed: u64,
) -> Projection {
    let keys = eval.keys().to_vec();
    let bases: Vec<Vec<CMatrix>> = keys
        .iter()
        .map(|k| skew_basis(start.blocks()[k].nrows()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = start.clone();
    let mut r = eval.residual_vector(&eval.blocks_of(&point));
    let mut norm = residual_norm(&r);
    let mut lambda = 1e-3;
    let mut best = (norm, point.clone());
    let mut iterations = 0;
    let mut stalled = 0;
    while norm > target && iterations < max_iters {
        iterations += 1;
        let blocks = eval.blocks_of(&point);
        let blocks_ref = &blocks;
        let directions: Vec<(usize, CMatrix)> = bases
            .iter()
            .enumerate()
            .flat_map(|(b, basis)| basis.iter().map(move |x| (b, blocks_ref[b] * x)))
            .collect();
        let jac = eval.jacobian(&blocks, &directions);
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let rhs = -(&jt * nalgebra::DVector::from_column_slice(&r));
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for d in 0..a.nrows() {
                a[(d, d)] += lambda * (1.0 + jtj[(d, d)]);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&rhs);
            let candidate = retract(&point, &keys, &bases, step.as_slice());
            let cr = eval.residual_vector(&eval.blocks_of(&candidate));
            let cn = residual_norm(&cr);
            if cn < norm {
                point = candidate;
                r = cr;
                norm = cn;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if norm < best.0 {
            best = (norm, point.clone());
            stalled = 0;
        } else {
            stalled += 1;
        }
        if !improved || stalled > 50 {
            let scale = 1e-3_f64.max(norm.sqrt().min(0.1));
            point = best.1.map_blocks(|_, m| {
                m * linalg::exp_skew(&linalg::random_skew(m.nrows(), scale, &mut rng))
            });
            r = eval.residual_vector(&eval.blocks_of(&point));
            norm = residual_norm(&r);
            lambda = 1e-3;
            stalled = 0;
        }
    }
    if norm > best.0 {
        (norm, point) = (best.0, best.1);
    }
    Projection {
        point,
        residual: norm,
        iterations,
    }
}

fn retract(
    point: &UnitaryCocycle,
    keys: &[BlockKey],
    bases: &[Vec<CMatrix>],
    step: &[f64],
) -> UnitaryCocycle {
    let mut offset = 0;
    let mut tangent = BTreeMap::new();
    for (key, basis) in keys.iter().zip(bases) {
        let n = point.blocks()[key].nrows();
        let mut x = CMatrix::zeros(n, n);
        for (e, &c) in basis.iter().zip(&step[offset..offset + basis.len()]) {
            x += e.scale(c);
        }
        offset += basis.len();
        tangent.insert(*key, x);
    }
    point.map_blocks(|k, m| polar_unitary(&(m * (linalg::identity(m.nrows()) + &tangent[k]))))
}

fn sample_seed(seed: u64, t: f64) -> u64 {
    seed ^ t.to_bits().wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Attempts a path of cocycles from `u0` to `u1` whose samples all have
/// residual at most `cfg.tol`. A failure says nothing about whether such a
/// path exists.
pub fn path_search(
    u0: &UnitaryCocycle,
    u1: &UnitaryCocycle,
    cfg: &PathSearchConfig,
) -> Result<SearchOutcome> {
    check_samples(cfg.samples)?;
    u0.check_compatible(u1)?;
    let eval = ResidualEvaluator::new(u0.skeleton());
    for (name, u) in [("start", u0), ("end", u1)] {
        let r = eval.residual(u);
        if r > cfg.tol {
            return Err(Error::InvalidLayer(format!(
                "{name} point has residual {r:e} above {:e}",
                cfg.tol
            )));
        }
    }
    let geo = Geodesic::new(u0, u1)?;
    let target = cfg.tol * 1e-2;
    let n = cfg.samples;
    let mut t = uniform_grid(n);
    let mut samples: Vec<UnitaryCocycle> = t.iter().map(|&t| geo.at(t)).collect();
    samples[0] = u0.clone();
    samples[n] = u1.clone();
    let mut residuals = vec![0.0; n + 1];
    let mut iterations = vec![0; n + 1];
    let mut pending: Vec<usize> = (1..n).collect();
    loop {
        let projected: Vec<(usize, Projection)> = pending
            .par_iter()
            .map(|&idx| {
                let p = project(&eval, &samples[idx], target, cfg.max_iters, sample_seed(cfg.seed, t[idx]));
                (idx, p)
            })
            .collect();
        for (idx, p) in projected {
            samples[idx] = p.point;
            residuals[idx] = p.residual;
            iterations[idx] = p.iterations;
        }
        let total_iterations = iterations.iter().sum();
        let distance = max_adjacent(&samples);
        if residuals.iter().any(|&r| r > cfg.tol) {
            return Ok(SearchOutcome::Failed(FailureReport {
                reason: "iteration budget exhausted before reaching the tolerance".into(),
                t,
                residual_profile: residuals,
                iterations,
                total_iterations,
                max_adjacent_distance: distance,
            }));
        }
        if distance <= cfg.continuity_bound {
            break;
        }
        let intervals = t.len() - 1;
        if intervals * 2 > cfg.max_samples {
            return Ok(SearchOutcome::Failed(FailureReport {
                reason: format!(
                    "adjacent distance {distance:.3} above {} at the refinement limit",
                    cfg.continuity_bound
                ),
                t,
                residual_profile: residuals,
                iterations,
                total_iterations,
                max_adjacent_distance: distance,
            }));
        }
        let mut new_t = Vec::with_capacity(2 * intervals + 1);
        let mut new_samples = Vec::with_capacity(2 * intervals + 1);
        let mut new_res = Vec::with_capacity(2 * intervals + 1);
        let mut new_iters = Vec::with_capacity(2 * intervals + 1);
        pending.clear();
        for idx in 0..intervals {
            new_t.push(t[idx]);
            new_samples.push(samples[idx].clone());
            new_res.push(residuals[idx]);
            new_iters.push(iterations[idx]);
            pending.push(new_t.len());
            new_t.push((t[idx] + t[idx + 1]) / 2.0);
            new_samples.push(Geodesic::new(&samples[idx], &samples[idx + 1])?.at(0.5));
            new_res.push(f64::INFINITY);
            new_iters.push(0);
        }
        new_t.push(1.0);
        new_samples.push(samples[intervals].clone());
        new_res.push(0.0);
        new_iters.push(0);
        (t, samples, residuals, iterations) = (new_t, new_samples, new_res, new_iters);
    }
    Ok(SearchOutcome::Found(CocyclePath::new(t, samples)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgraph::FactorisationRule;
    use crate::unitary_cocycle::flip_cocycle;
    use rand::SeedableRng;

    fn bouquet(counts: &[usize]) -> Arc<Skeleton> {
        Arc::new(Skeleton::bouquet(counts))
    }

    fn scalar(s: &Arc<Skeleton>, z: Complex64) -> UnitaryCocycle {
        let blocks = s
            .block_keys()
            .into_iter()
            .map(|k| (k, CMatrix::from_element(1, 1, z)))
            .collect();
        UnitaryCocycle::new(s.clone(), blocks).unwrap()
    }

    #[test]
    fn midpoint_of_one_to_minus_one() {
        let s = bouquet(&[1, 1]);
        let u0 = scalar(&s, Complex64::new(1.0, 0.0));
        let u1 = scalar(&s, Complex64::new(-1.0, 0.0));
        let path = geodesic_path(&u0, &u1, 2).unwrap();
        assert_eq!(path.samples().len(), 3);
        let mid = path.samples()[1].pair(1, 2).unwrap()[(0, 0)];
        assert!((mid - Complex64::i()).norm() < 1e-14);
    }

    #[test]
    fn constant_geodesic() {
        let s = bouquet(&[2, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = UnitaryCocycle::random(s, &mut rng);
        let path = geodesic_path(&u, &u, 8).unwrap();
        for sample in path.samples() {
            assert!(sample.max_block_error(&u) < 1e-12);
        }
        assert!(path.max_adjacent_distance() < 1e-12);
    }

    #[test]
    fn geodesic_endpoints_are_exact() {
        let s = bouquet(&[2, 3]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u0 = UnitaryCocycle::random(s.clone(), &mut rng);
        let u1 = UnitaryCocycle::random(s, &mut rng);
        let path = geodesic_path(&u0, &u1, 16).unwrap();
        let check = check_path(&path, &u0, &u1);
        assert!(check.passes(0.0, 1.0), "{check:?}");
        assert!(geodesic_path(&u0, &u1, 0).is_err());
    }

    #[test]
    fn conjugation_path_keeps_residual() {
        let s = bouquet(&[2, 2, 2]);
        let u = flip_cocycle(s.clone(), &FactorisationRule::tensor(&s).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = Gauge::random(&s, &mut rng);
        let path = conjugation_path(&u, &q, 16, 1e-12).unwrap();
        assert!(path.max_residual() <= 1e-10);
        assert!(path.end().max_block_error(&gauge_transform(&u, &q).unwrap()) <= 1e-12);
        let id = conjugation_path(&u, &Gauge::identity(), 4, 1e-12).unwrap();
        assert!(id.samples().iter().all(|x| x.max_block_error(&u) < 1e-12));
        let random = UnitaryCocycle::random(s, &mut rng);
        assert!(conjugation_path(&random, &q, 4, 1e-9).is_err());
    }

    #[test]
    fn skew_basis_spans() {
        for n in 0..4 {
            let basis = skew_basis(n);
            assert_eq!(basis.len(), n * n);
            for x in &basis {
                assert!((x + x.adjoint()).norm() == 0.0);
            }
        }
    }

    #[test]
    fn gradient_at_flip_vanishes() {
        let s = bouquet(&[2, 2, 2]);
        let u = flip_cocycle(s.clone(), &FactorisationRule::tensor(&s).unwrap()).unwrap();
        assert!(residual_gradient(&u).values().all(|g| g.norm() <= 1e-10));
    }

    #[test]
    fn search_with_equal_endpoints_is_constant() {
        let s = bouquet(&[2, 2, 2]);
        let u = flip_cocycle(s.clone(), &FactorisationRule::tensor(&s).unwrap()).unwrap();
        let cfg = PathSearchConfig {
            samples: 4,
            ..Default::default()
        };
        let SearchOutcome::Found(path) = path_search(&u, &u, &cfg).unwrap() else {
            panic!("search failed");
        };
        assert!(path.samples().iter().all(|x| x.max_block_error(&u) < 1e-12));
    }

    #[test]
    fn search_rejects_invalid_endpoints() {
        let s = bouquet(&[2, 2, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = UnitaryCocycle::random(s, &mut rng);
        assert!(matches!(
            path_search(&u, &u, &PathSearchConfig::default()),
            Err(Error::InvalidLayer(_))
        ));
    }

    #[test]
    fn path_file_roundtrip() {
        let s = bouquet(&[1, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u0 = UnitaryCocycle::random(s.clone(), &mut rng);
        let u1 = UnitaryCocycle::random(s.clone(), &mut rng);
        let path = geodesic_path(&u0, &u1, 4).unwrap();
        let text = serde_json::to_string(&path.to_file()).unwrap();
        let back = CocyclePath::from_json(s, &text).unwrap();
        assert_eq!(back.samples(), path.samples());
        assert_eq!(back.t(), path.t());
    }
}
