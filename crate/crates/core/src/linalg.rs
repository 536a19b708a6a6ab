//! Small dense complex matrix helpers on top of nalgebra.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `||U* U - I||_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (u.adjoint() * u - identity(u.nrows())).norm()
}

/// Largest singular value; zero for empty matrices.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Unitary factor of the polar decomposition, `U V*` from `A = U S V*`.
pub fn polar_unitary(a: &CMatrix) -> CMatrix {
    if a.is_empty() {
        return a.clone();
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V*");
    u * v_t
}

/// `(A - A*) / 2`.
pub fn skew_part(a: &CMatrix) -> CMatrix {
    (a - a.adjoint()).scale(0.5)
}

/// `exp(X)` for skew-Hermitian `X`, through the eigendecomposition of the
/// Hermitian matrix `iX`.
pub fn exp_skew(x: &CMatrix) -> CMatrix {
    let n = x.nrows();
    if n == 0 {
        return x.clone();
    }
    let i = Complex64::i();
    let h = x.map(|z| z * i);
    let h = (&h + h.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    // X = -i H, so exp(X) = V diag(exp(-i lambda)) V*.
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Haar-distributed unitary from the QR factorisation of a complex Gaussian
/// matrix, with the phases of `R`'s diagonal folded back in.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let z = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_fn(n, n, |a, b| {
        if a == b {
            let d = r[(a, a)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * phases
}

/// Random skew-Hermitian matrix with Gaussian entries scaled by `scale`.
pub fn random_skew<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * scale
    });
    skew_part(&g)
}

fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r == 0.0 {
        TAU
    } else {
        r
    }
}

/// Branch cut for the logarithm of a unitary with the given eigenvalue
/// angles: the midpoint of the widest gap between neighbouring eigenvalues on
/// the circle, returned in `(0, 2pi]`. Equal-width gaps resolve to the
/// smallest midpoint. With no eigenvalues the cut is `pi`.
pub fn branch_cut(angles: &[f64]) -> f64 {
    if angles.is_empty() {
        return PI;
    }
    let mut sorted: Vec<f64> = angles.iter().map(|a| a.rem_euclid(TAU)).collect();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64)> = None;
    for (idx, &a) in sorted.iter().enumerate() {
        let next = if idx + 1 < sorted.len() {
            sorted[idx + 1]
        } else {
            sorted[0] + TAU
        };
        let width = next - a;
        let mid = normalize_angle(a + width / 2.0);
        best = match best {
            None => Some((width, mid)),
            Some((w, m)) => {
                if width > w + 1e-12 || ((width - w).abs() <= 1e-12 && mid < m) {
                    Some((width, mid))
                } else {
                    Some((w, m))
                }
            }
        };
    }
    best.map(|(_, mid)| mid).unwrap_or(PI)
}

/// Spectral logarithm of a unitary, `W = Q diag(exp(i theta)) Q*`, with every
/// angle taken in the open interval `(cut - 2pi, cut)` for the cut chosen by
/// [`branch_cut`].
#[derive(Debug, Clone)]
pub struct UnitaryLog {
    basis: CMatrix,
    angles: Vec<f64>,
}

impl UnitaryLog {
    pub fn new(w: &CMatrix) -> Self {
        let n = w.nrows();
        if n == 0 {
            return UnitaryLog {
                basis: w.clone(),
                angles: Vec::new(),
            };
        }
        // A unitary is normal, so its Schur form is diagonal up to roundoff.
        let (q, t) = w.clone().schur().unpack();
        let raw: Vec<f64> = (0..n).map(|k| t[(k, k)].arg()).collect();
        let cut = branch_cut(&raw);
        let angles = raw
            .iter()
            .map(|&a| {
                let mut theta = a;
                while theta >= cut {
                    theta -= TAU;
                }
                while theta <= cut - TAU {
                    theta += TAU;
                }
                theta
            })
            .collect();
        UnitaryLog { basis: q, angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `exp(t log W)`.
    pub fn power(&self, t: f64) -> CMatrix {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.angles.len(),
            self.angles.iter().map(|&a| Complex64::from_polar(1.0, t * a)),
        ));
        &self.basis * d * self.basis.adjoint()
    }

    /// The skew-Hermitian generator `log W`.
    pub fn log(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.angles.len(),
            self.angles.iter().map(|&a| Complex64::new(0.0, a)),
        ));
        &self.basis * d * self.basis.adjoint()
    }
}
