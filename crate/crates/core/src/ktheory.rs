//! Exact integer linear algebra and the K-theory of 2-graph C*-algebras.
//!
//! For a row-finite 2-graph with vertex adjacency matrices `M1`, `M2`:
//!
//! ```text
//! K0 = coker(1 - M1^t, 1 - M2^t)  (+)  ker( M2^t - 1 ; 1 - M1^t )
//! K1 = ker(1 - M1^t, 1 - M2^t) / image( M2^t - 1 ; 1 - M1^t )
//! ```
//!
//! where `(A, B)` is the row-block map `Z^n (+) Z^n -> Z^n` and `(A ; B)` the
//! column-block map `Z^n -> Z^n (+) Z^n`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// Builds a matrix from rows of machine integers. All rows must have the
    /// same length; an empty slice gives a 0x0 matrix.
    pub fn from_rows<T: Copy + Into<BigInt>>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| x.into()).collect();
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn add_at(&mut self, r: usize, c: usize, x: i64) {
        self[(r, c)] += x;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * &other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("shape mismatch in subtraction".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack needs equal row counts".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        Ok(out)
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack needs equal column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    /// Entries as `i64`; panics if an entry does not fit.
    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self[(r, c)].to_i64().expect("entry fits in i64"))
                    .collect()
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let delta = &self[(src, c)] * q;
            self[(dst, c)] += delta;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let delta = &self[(r, src)] * q;
            self[(r, dst)] += delta;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let x = -&self[(r, c)];
            self[(r, c)] = x;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `left * a * right = diagonal`, with `left`, `right` unimodular and the
/// diagonal entries nonnegative and divisibility-ordered.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub diagonal: IntMatrix,
    pub left: IntMatrix,
    pub right: IntMatrix,
    /// Inverse of `right`, tracked alongside it.
    pub right_inverse: IntMatrix,
    rank: usize,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The diagonal entries `d_1 | d_2 | ...` (length `min(rows, cols)`).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let n = self.diagonal.rows().min(self.diagonal.cols());
        (0..n).map(|i| self.diagonal[(i, i)].clone()).collect()
    }
}

/// Position of the nonzero entry of least absolute value in the trailing
/// submatrix starting at `(t, t)`; ties go to the first in row-major order.
fn smallest_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for r in t..a.rows() {
        for c in t..a.cols() {
            let x = &a[(r, c)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some(b) if a[b].abs() <= x.abs() => {}
                _ => best = Some((r, c)),
            }
        }
    }
    best
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut left = IntMatrix::identity(rows);
    let mut right = IntMatrix::identity(cols);
    let mut right_inv = IntMatrix::identity(cols);
    let mut rank = 0;

    for t in 0..rows.min(cols) {
        while let Some((pr, pc)) = smallest_pivot(&d, t) {
            d.swap_rows(t, pr);
            left.swap_rows(t, pr);
            d.swap_cols(t, pc);
            right.swap_cols(t, pc);
            right_inv.swap_rows(t, pc);

            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for r in t + 1..rows {
                let q = d[(r, t)].div_floor(&pivot);
                let neg = -&q;
                d.add_row_multiple(r, t, &neg);
                left.add_row_multiple(r, t, &neg);
                clean &= d[(r, t)].is_zero();
            }
            for c in t + 1..cols {
                let q = d[(t, c)].div_floor(&pivot);
                let neg = -&q;
                d.add_col_multiple(c, t, &neg);
                right.add_col_multiple(c, t, &neg);
                // R' = R E with E = I - q e_t e_c^T, so R'^{-1} = (I + q e_t e_c^T) R^{-1}.
                right_inv.add_row_multiple(t, c, &q);
                clean &= d[(t, c)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&r| (t + 1..cols).any(|c| !d[(r, c)].is_multiple_of(&pivot)));
            if let Some(r) = offender {
                let one = BigInt::one();
                d.add_row_multiple(t, r, &one);
                left.add_row_multiple(t, r, &one);
                continue;
            }
            break;
        }
        if d[(t, t)].is_zero() {
            break;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
        rank = t + 1;
    }

    SmithDecomposition {
        diagonal: d,
        left,
        right,
        right_inverse: right_inv,
        rank,
    }
}

/// A finitely generated abelian group `Z^free_rank (+) Z/d_1 (+) ... (+) Z/d_m`
/// in invariant-factor form: every `d_i >= 2` and `d_i | d_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Group presented as a direct sum of cyclic groups `Z/n` (with `n = 0`
    /// meaning `Z` and `n = 1` the trivial group), plus `free_rank` copies of
    /// `Z`. The result is re-canonicalized.
    pub fn from_cyclic_orders(free_rank: usize, orders: &[BigInt]) -> Self {
        let n = orders.len();
        let mut diag = IntMatrix::zeros(n, n);
        for (i, o) in orders.iter().enumerate() {
            diag[(i, i)] = o.abs();
        }
        let mut g = cokernel(&diag);
        g.free_rank += free_rank;
        g
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut orders = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        Self::from_cyclic_orders(self.free_rank + other.free_rank, &orders)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRecord {
    free_rank: usize,
    torsion: Vec<serde_json::Value>,
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let torsion = self
            .torsion
            .iter()
            .map(|d| match d.to_u64() {
                Some(x) => serde_json::Value::from(x),
                None => serde_json::Value::String(d.to_string()),
            })
            .collect();
        GroupRecord {
            free_rank: self.free_rank,
            torsion,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = GroupRecord::deserialize(deserializer)?;
        let orders = rec
            .torsion
            .iter()
            .map(|v| match v {
                serde_json::Value::Number(n) => n
                    .as_u64()
                    .map(BigInt::from)
                    .ok_or_else(|| D::Error::custom("torsion entries must be positive integers")),
                serde_json::Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|e| D::Error::custom(e.to_string())),
                _ => Err(D::Error::custom("torsion entries must be integers")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(AbelianGroup::from_cyclic_orders(rec.free_rank, &orders))
    }
}

/// `Z^rows / image(A)`.
pub fn cokernel(a: &IntMatrix) -> AbelianGroup {
    let snf = smith_normal_form(a);
    let torsion = snf
        .invariant_factors()
        .into_iter()
        .take(snf.rank())
        .filter(|d| !d.is_one())
        .collect();
    AbelianGroup {
        free_rank: a.rows() - snf.rank(),
        torsion,
    }
}

/// A lattice basis of `{x in Z^cols : A x = 0}`: the columns of the right
/// Smith transform belonging to zero diagonal entries.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    (snf.rank()..a.cols()).map(|c| snf.right.column(c)).collect()
}

/// `ker(A) / image(B)` for `B : Z^m -> Z^n`, `A : Z^n -> Z^p`.
///
/// Image generators are rewritten in the kernel basis coming from the Smith
/// form of `A`, and the quotient is the cokernel of that coordinate matrix.
/// Returns [`Error::NotContained`] when `A B != 0`.
pub fn subquotient(a: &IntMatrix, b: &IntMatrix) -> Result<AbelianGroup> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "kernel map has {} columns but image map has {} rows",
            a.cols(),
            b.rows()
        )));
    }
    if !a.mul(b)?.is_zero() {
        return Err(Error::NotContained);
    }
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let coords = snf.right_inverse.mul(b)?;
    let kdim = a.cols() - rank;
    let mut in_kernel = IntMatrix::zeros(kdim, b.cols());
    for r in 0..kdim {
        for c in 0..b.cols() {
            in_kernel[(r, c)] = coords[(rank + r, c)].clone();
        }
    }
    Ok(cokernel(&in_kernel))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KGroups {
    #[serde(rename = "K0")]
    pub k0: AbelianGroup,
    #[serde(rename = "K1")]
    pub k1: AbelianGroup,
}

/// The two integer block maps built from the transposed adjacency matrices:
/// the row map `(1 - M1^t, 1 - M2^t)` and the column map `(M2^t - 1 ; 1 - M1^t)`.
pub fn evans_maps(m1: &IntMatrix, m2: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    if !m1.is_square() || !m2.is_square() || m1.rows() != m2.rows() {
        return Err(Error::DimensionMismatch(format!(
            "adjacency matrices must be square of equal size, got {}x{} and {}x{}",
            m1.rows(),
            m1.cols(),
            m2.rows(),
            m2.cols()
        )));
    }
    let id = IntMatrix::identity(m1.rows());
    let a1 = id.sub(&m1.transpose())?;
    let a2 = id.sub(&m2.transpose())?;
    let row = a1.hstack(&a2)?;
    let col = a2.neg().vstack(&a1)?;
    Ok((row, col))
}

/// K-theory of the C*-algebra of a row-finite 2-graph without sources whose
/// skeleton has adjacency matrices `m1`, `m2`.
///
/// The matrices must commute (true for every 2-skeleton); otherwise the
/// column map does not land in the kernel of the row map.
pub fn ktheory_2graph(m1: &IntMatrix, m2: &IntMatrix) -> Result<KGroups> {
    let (row, col) = evans_maps(m1, m2)?;
    if m1.data.iter().chain(&m2.data).any(Signed::is_negative) {
        return Err(Error::Malformed("adjacency matrices must be nonnegative".into()));
    }
    if m1.mul(m2)? != m2.mul(m1)? {
        return Err(Error::NonCommuting);
    }
    let k0 = cokernel(&row).direct_sum(&AbelianGroup::free(kernel_basis(&col).len()));
    let k1 = subquotient(&row, &col)?;
    Ok(KGroups { k0, k1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_decomposition(a: &IntMatrix) -> SmithDecomposition {
        let snf = smith_normal_form(a);
        let lar = snf.left.mul(a).unwrap().mul(&snf.right).unwrap();
        assert_eq!(lar, snf.diagonal);
        assert_eq!(snf.right.mul(&snf.right_inverse).unwrap(), IntMatrix::identity(a.cols()));
        snf
    }

    #[test]
    fn snf_small_cases() {
        let snf = check_decomposition(&IntMatrix::identity(2));
        assert_eq!(snf.diagonal, IntMatrix::identity(2));

        let snf = check_decomposition(&m(&[&[2, 4], &[6, 8]]));
        assert_eq!(snf.diagonal, m(&[&[2, 0], &[0, 4]]));

        let snf = check_decomposition(&m(&[&[0]]));
        assert_eq!(snf.diagonal, m(&[&[0]]));
        assert_eq!(snf.rank(), 0);

        let empty = IntMatrix::zeros(0, 3);
        let snf = check_decomposition(&empty);
        assert_eq!(snf.rank(), 0);
        assert_eq!(snf.right, IntMatrix::identity(3));
    }

    #[test]
    fn snf_needs_divisibility_fix() {
        // diag(2, 3) is diagonal but not in Smith form.
        let snf = check_decomposition(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(snf.invariant_factors(), big(&[1, 6]));
    }

    #[test]
    fn cokernels() {
        assert!(cokernel(&m(&[&[-1, -1]])).is_trivial());
        assert_eq!(
            cokernel(&m(&[&[-2, -2]])),
            AbelianGroup::from_cyclic_orders(0, &big(&[2]))
        );
        assert_eq!(cokernel(&m(&[&[0, 0]])), AbelianGroup::free(1));
    }

    #[test]
    fn kernels() {
        let basis = kernel_basis(&m(&[&[1, -1]]));
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert_eq!(&v[0] - &v[1], BigInt::zero());
        assert_eq!(v[0].abs(), BigInt::one());

        assert!(kernel_basis(&IntMatrix::identity(3)).is_empty());
        assert!(kernel_basis(&m(&[&[2], &[-2]])).is_empty());
    }

    #[test]
    fn subquotients() {
        assert!(subquotient(&m(&[&[-1, -1]]), &m(&[&[1], &[-1]])).unwrap().is_trivial());
        assert_eq!(
            subquotient(&m(&[&[-2, -2]]), &m(&[&[2], &[-2]])).unwrap(),
            AbelianGroup::from_cyclic_orders(0, &big(&[2]))
        );
        assert_eq!(
            subquotient(&IntMatrix::zeros(2, 2), &IntMatrix::zeros(2, 2)).unwrap(),
            AbelianGroup::free(2)
        );
        assert!(matches!(
            subquotient(&m(&[&[1, 0]]), &m(&[&[1], &[0]])),
            Err(Error::NotContained)
        ));
    }

    #[test]
    fn canonical_form_merges_and_sorts() {
        // Z/2 + Z/3 = Z/6; Z/4 + Z/2 = Z/2 + Z/4; 1 and 0 entries handled.
        assert_eq!(
            AbelianGroup::from_cyclic_orders(0, &big(&[2, 3])),
            AbelianGroup::from_cyclic_orders(0, &big(&[6]))
        );
        let g = AbelianGroup::from_cyclic_orders(1, &big(&[4, 2, 1, 0]));
        assert_eq!(g.free_rank(), 2);
        assert_eq!(g.torsion(), big(&[2, 4]).as_slice());
        assert_eq!(g.to_string(), "Z^2 + Z/2 + Z/4");
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
    }

    #[test]
    fn group_json_roundtrip() {
        let g = AbelianGroup::from_cyclic_orders(1, &big(&[2, 6]));
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"free_rank":1,"torsion":[2,6]}"#);
        let back: AbelianGroup = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn single_vertex_examples() {
        let k = ktheory_2graph(&m(&[&[1]]), &m(&[&[1]])).unwrap();
        assert_eq!(k.k0, AbelianGroup::free(2));
        assert_eq!(k.k1, AbelianGroup::free(2));

        let k = ktheory_2graph(&m(&[&[2]]), &m(&[&[2]])).unwrap();
        assert!(k.k0.is_trivial() && k.k1.is_trivial());

        let z2 = AbelianGroup::from_cyclic_orders(0, &big(&[2]));
        let k = ktheory_2graph(&m(&[&[3]]), &m(&[&[3]])).unwrap();
        assert_eq!(k.k0, z2);
        assert_eq!(k.k1, z2);
    }

    #[test]
    fn ktheory_guards() {
        assert!(matches!(
            ktheory_2graph(&m(&[&[1, 0]]), &m(&[&[1]])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            ktheory_2graph(&m(&[&[1, 1], &[0, 1]]), &m(&[&[1, 0], &[1, 1]])),
            Err(Error::NonCommuting)
        ));
        assert!(ktheory_2graph(&m(&[&[-1]]), &m(&[&[1]])).is_err());
    }
}
