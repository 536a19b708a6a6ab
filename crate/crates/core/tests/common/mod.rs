//! Independent reference computations shared by the integration suites.
//! Nothing here calls into the algorithms it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use kcocycle::{BlockKey, CMatrix, Skeleton, UnitaryCocycle};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub fn bouquet(counts: &[usize]) -> Arc<Skeleton> {
    Arc::new(Skeleton::bouquet(counts))
}

/// Two vertices `a`, `b`; color `c` has adjacency matrix `[[p, q], [q, p]]`
/// for `(p, q) = entries[c - 1]`. Such matrices commute, so this is a valid
/// skeleton whenever every row sum is positive.
pub fn circulant_skeleton(entries: &[(usize, usize)]) -> Arc<Skeleton> {
    let mut edges = Vec::new();
    for (c, &(p, q)) in entries.iter().enumerate() {
        for (range, source, count) in [("a", "a", p), ("a", "b", q), ("b", "a", q), ("b", "b", p)] {
            for n in 0..count {
                edges.push(format!(
                    r#"{{"id": "c{}_{range}{source}{n}", "color": {}, "range": "{range}", "source": "{source}"}}"#,
                    c + 1,
                    c + 1
                ));
            }
        }
    }
    let text = format!(
        r#"{{"k": {}, "vertices": ["a", "b"], "edges": [{}]}}"#,
        entries.len(),
        edges.join(", ")
    );
    Arc::new(Skeleton::from_json(&text).unwrap())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

pub fn eye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// The identity's residual on a single-vertex skeleton written with
/// Kronecker products: path spaces are tensor products of the loop spaces
/// and each factor acts on two adjacent tensor slots.
pub fn bouquet_residual(u: &UnitaryCocycle, counts: &[usize]) -> f64 {
    let k = counts.len();
    let mut total = 0.0;
    for i in 1..=k {
        for j in i + 1..=k {
            for l in j + 1..=k {
                let (ni, nj, nl) = (counts[i - 1], counts[j - 1], counts[l - 1]);
                let uij = u.pair(i, j).unwrap();
                let uil = u.pair(i, l).unwrap();
                let ujl = u.pair(j, l).unwrap();
                let lhs = kron(uij, &eye(nl)) * kron(&eye(nj), uil) * kron(ujl, &eye(ni));
                let rhs = kron(&eye(ni), ujl) * kron(uil, &eye(nj)) * kron(&eye(nl), uij);
                total += (lhs - rhs).norm_squared();
            }
        }
    }
    total.sqrt()
}

/// `exp(X)` by scaling and squaring a truncated Taylor series.
pub fn expm(x: &CMatrix) -> CMatrix {
    let n = x.nrows();
    let norm = x.norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let y = x.scale(0.5f64.powi(squarings as i32));
    let mut term = eye(n);
    let mut sum = eye(n);
    for k in 1..20 {
        term = &term * &y / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Orthogonal basis of the skew-Hermitian matrices paired with the squared
/// norm of each element.
pub fn skew_directions(n: usize) -> Vec<(CMatrix, f64)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut m = CMatrix::zeros(n, n);
            match a.cmp(&b) {
                std::cmp::Ordering::Equal => {
                    m[(a, a)] = Complex64::i();
                    out.push((m, 1.0));
                }
                std::cmp::Ordering::Less => {
                    m[(a, b)] = Complex64::new(1.0, 0.0);
                    m[(b, a)] = Complex64::new(-1.0, 0.0);
                    out.push((m, 2.0));
                }
                std::cmp::Ordering::Greater => {
                    m[(a, b)] = Complex64::i();
                    m[(b, a)] = Complex64::i();
                    out.push((m, 2.0));
                }
            }
        }
    }
    out
}

/// Left-trivialised gradient of `f` by central differences along
/// `U -> U exp(hX)` for each basis direction of each block.
pub fn fd_gradient(
    u: &UnitaryCocycle,
    h: f64,
    f: impl Fn(&UnitaryCocycle) -> f64,
) -> BTreeMap<BlockKey, CMatrix> {
    let mut out = BTreeMap::new();
    for (key, m) in u.blocks() {
        let n = m.nrows();
        let mut grad = CMatrix::zeros(n, n);
        for (x, norm2) in skew_directions(n) {
            let moved = |s: f64| {
                let step = expm(&x.scale(s));
                u.map_blocks(|k, b| if k == key { b * &step } else { b.clone() })
            };
            let d = (f(&moved(h)) - f(&moved(-h))) / (2.0 * h);
            grad += x.scale(d / norm2);
        }
        out.insert(*key, grad);
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// A factorisation rule on a single-vertex skeleton as plain permutations:
/// for colors `i < j`, `perm[(i, j)][a * n_i + b] = c * n_j + d` sends the
/// path (color-`j` loop `a`, color-`i` loop `b`) to (color-`i` loop `c`,
/// color-`j` loop `d`).
pub type BouquetRule = BTreeMap<(usize, usize), Vec<usize>>;

/// Edges are `(color, loop index)`.
fn bouquet_flip(counts: &[usize], rule: &BouquetRule, x: (usize, usize), y: (usize, usize)) -> [(usize, usize); 2] {
    let (cx, cy) = (x.0, y.0);
    if cx > cy {
        let (i, j) = (cy, cx);
        let ni = counts[i - 1];
        let nj = counts[j - 1];
        let img = rule[&(i, j)][x.1 * ni + y.1];
        [(i, img / nj), (j, img % nj)]
    } else {
        let (i, j) = (cx, cy);
        let ni = counts[i - 1];
        let nj = counts[j - 1];
        let pos = rule[&(i, j)].iter().position(|&t| t == x.1 * nj + y.1).unwrap();
        [(j, pos / ni), (i, pos % ni)]
    }
}

pub fn bouquet_rule_is_associative(counts: &[usize], rule: &BouquetRule) -> bool {
    let k = counts.len();
    for i in 1..=k {
        for j in i + 1..=k {
            for l in j + 1..=k {
                for e in 0..counts[i - 1] {
                    for f in 0..counts[j - 1] {
                        for g in 0..counts[l - 1] {
                            let p = [(i, e), (j, f), (l, g)];
                            let front = |p: [(usize, usize); 3]| {
                                let [a, b] = bouquet_flip(counts, rule, p[0], p[1]);
                                [a, b, p[2]]
                            };
                            let back = |p: [(usize, usize); 3]| {
                                let [a, b] = bouquet_flip(counts, rule, p[1], p[2]);
                                [p[0], a, b]
                            };
                            if front(back(front(p))) != back(front(back(p))) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

/// Every associative rule on a single-vertex skeleton, by exhausting the
/// product of the symmetric groups of all blocks.
pub fn brute_force_rules(counts: &[usize]) -> Vec<BouquetRule> {
    let k = counts.len();
    let pairs: Vec<(usize, usize)> = (1..=k)
        .flat_map(|i| (i + 1..=k).map(move |j| (i, j)))
        .collect();
    let choices: Vec<Vec<Vec<usize>>> = pairs
        .iter()
        .map(|&(i, j)| permutations(counts[i - 1] * counts[j - 1]))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0; pairs.len()];
    loop {
        let rule: BouquetRule = pairs
            .iter()
            .zip(&idx)
            .enumerate()
            .map(|(p, (&key, &c))| (key, choices[p][c].clone()))
            .collect();
        if bouquet_rule_is_associative(counts, &rule) {
            out.push(rule);
        }
        let mut pos = pairs.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Invariant factors by plain elimination: clear each pivot row and column
/// with Euclidean steps, then repair divisibility with `(gcd, lcm)` swaps.
/// Returns `min(rows, cols)` nonnegative entries, zeros last.
pub fn naive_invariant_factors(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        let Some((pr, pc)) = (t..m)
            .flat_map(|r| (t..n).map(move |c| (r, c)))
            .find(|&(r, c)| !a[r][c].is_zero())
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut dirty = false;
            for r in t + 1..m {
                while !a[r][t].is_zero() {
                    let q = a[r][t].div_floor(&a[t][t]);
                    let pivot_row = a[t].clone();
                    for (x, p) in a[r][t..].iter_mut().zip(&pivot_row[t..]) {
                        *x -= &q * p;
                    }
                    if !a[r][t].is_zero() {
                        a.swap(t, r);
                    }
                    dirty = true;
                }
            }
            for c in t + 1..n {
                while !a[t][c].is_zero() {
                    let q = a[t][c].div_floor(&a[t][t]);
                    for row in a[t..].iter_mut() {
                        let v = &row[c] - &q * &row[t];
                        row[c] = v;
                    }
                    if !a[t][c].is_zero() {
                        for row in a.iter_mut() {
                            row.swap(t, c);
                        }
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        diag.push(a[t][t].abs());
    }
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..diag.len() {
            for y in x + 1..diag.len() {
                let g = diag[x].gcd(&diag[y]);
                let l = diag[x].lcm(&diag[y]);
                if g != diag[x] || l != diag[y] {
                    diag[x] = g;
                    diag[y] = l;
                    changed = true;
                }
            }
        }
    }
    diag.resize(m.min(n), BigInt::zero());
    diag
}

pub fn gcd(a: usize, b: usize) -> usize {
    a.gcd(&b)
}

pub fn is_positive(x: &BigInt) -> bool {
    x.is_positive()
}
