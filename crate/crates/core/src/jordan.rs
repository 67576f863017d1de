//! Real Jordan canonical form of a 2×2 or 3×3 matrix: case classification
//! and recovery of the transform `P` with `A = P⁻¹·J·P`.
//!
//! The classifier works on the closed-form eigenvalues: eigenvalues closer
//! than `CLUSTER_RADIUS · scale` are merged, and defectiveness of a merged
//! cluster is decided by the rank of `A − λI`. Near-defective matrices
//! (distinct eigenvalues inside the cluster radius but numerically
//! diagonalizable) are pushed into the defective case and flagged, which
//! errs toward the conservative stability reading.

use crate::linalg::{
    self, fix_sign, inverse, orthonormal_complement, pinv_solve, singular_values, ComplexScalar,
    RealMatrix, RealVector,
};
use thiserror::Error;

/// Two eigenvalues are treated as equal when closer than this, relative
/// to the matrix scale.
pub const CLUSTER_RADIUS: f64 = 1e-8;

/// Transforms with a condition number above this raise the
/// ill-conditioned warning.
pub const COND_LIMIT: f64 = 1e12;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum JordanError {
    #[error("value is not an eigenvalue of this form")]
    NotAnEigenvalue,
}

/// Case tag plus eigenvalue parameters of the canonical form.
///
/// Complex-pair cases store `a ± b·i` with `b > 0`; defective cases store
/// the block eigenvalue first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JordanStructure {
    /// 2-D diagonal, `l1 ≥ l2`.
    Diag2 { l1: f64, l2: f64 },
    /// 2-D rotation-scaling block for `a ± b·i`.
    ComplexPair2 { a: f64, b: f64 },
    /// 2-D size-2 Jordan block.
    Block2 { l: f64 },
    /// 3-D diagonal, `l1 ≥ l2 ≥ l3`.
    Diag3 { l1: f64, l2: f64, l3: f64 },
    /// 3-D rotation-scaling block plus a real eigenvalue.
    ComplexPairReal3 { a: f64, b: f64, l3: f64 },
    /// 3-D size-2 block for `l1` plus a simple eigenvalue `l2`
    /// (`l2 == l1` encodes a triple eigenvalue with geometric
    /// multiplicity two).
    Block2Real3 { l1: f64, l2: f64 },
    /// 3-D size-3 Jordan block.
    Block3 { l: f64 },
}

impl JordanStructure {
    pub fn dim(&self) -> usize {
        match self {
            Self::Diag2 { .. } | Self::ComplexPair2 { .. } | Self::Block2 { .. } => 2,
            _ => 3,
        }
    }

    /// Short case tag for reports.
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Diag2 { .. } => "D2-Diag",
            Self::ComplexPair2 { .. } => "D2-ComplexPair",
            Self::Block2 { .. } => "D2-JordanBlock",
            Self::Diag3 { .. } => "D3-Diag",
            Self::ComplexPairReal3 { .. } => "D3-ComplexPairPlusReal",
            Self::Block2Real3 { .. } => "D3-Block2PlusReal",
            Self::Block3 { .. } => "D3-Block3",
        }
    }

    /// The canonical matrix `J` in its literal case shape.
    pub fn canonical_matrix(&self) -> RealMatrix {
        match *self {
            Self::Diag2 { l1, l2 } => RealMatrix::diag(&[l1, l2]),
            Self::ComplexPair2 { a, b } => RealMatrix::new2([[a, b], [-b, a]]),
            Self::Block2 { l } => RealMatrix::new2([[l, 1.0], [0.0, l]]),
            Self::Diag3 { l1, l2, l3 } => RealMatrix::diag(&[l1, l2, l3]),
            Self::ComplexPairReal3 { a, b, l3 } => {
                RealMatrix::new3([[a, b, 0.0], [-b, a, 0.0], [0.0, 0.0, l3]])
            }
            Self::Block2Real3 { l1, l2 } => {
                RealMatrix::new3([[l1, 1.0, 0.0], [0.0, l1, 0.0], [0.0, 0.0, l2]])
            }
            Self::Block3 { l } => RealMatrix::new3([[l, 1.0, 0.0], [0.0, l, 1.0], [0.0, 0.0, l]]),
        }
    }

    /// Eigenvalues of the canonical form, with multiplicity.
    pub fn eigenvalues(&self) -> Vec<ComplexScalar> {
        match *self {
            Self::Diag2 { l1, l2 } => vec![ComplexScalar::real(l1), ComplexScalar::real(l2)],
            Self::ComplexPair2 { a, b } => {
                vec![ComplexScalar::new(a, b), ComplexScalar::new(a, -b)]
            }
            Self::Block2 { l } => vec![ComplexScalar::real(l); 2],
            Self::Diag3 { l1, l2, l3 } => vec![
                ComplexScalar::real(l1),
                ComplexScalar::real(l2),
                ComplexScalar::real(l3),
            ],
            Self::ComplexPairReal3 { a, b, l3 } => vec![
                ComplexScalar::new(a, b),
                ComplexScalar::new(a, -b),
                ComplexScalar::real(l3),
            ],
            Self::Block2Real3 { l1, l2 } => vec![
                ComplexScalar::real(l1),
                ComplexScalar::real(l1),
                ComplexScalar::real(l2),
            ],
            Self::Block3 { l } => vec![ComplexScalar::real(l); 3],
        }
    }
}

/// Classification result: `A = P⁻¹·J·P`.
#[derive(Debug, Clone)]
pub struct RealJordanForm {
    pub structure: JordanStructure,
    pub j: RealMatrix,
    pub p: RealMatrix,
    pub p_inv: RealMatrix,
    /// Condition number of `P` exceeded [`COND_LIMIT`]; the classification
    /// is still returned but near-defective ambiguity is likely.
    pub ill_conditioned: bool,
    /// Distinct computed eigenvalues were merged by the cluster radius.
    pub merged_eigenvalues: bool,
    /// Scale factor of the source matrix, for downstream tolerances.
    pub scale: f64,
}

impl RealJordanForm {
    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// Canonical coordinates of an initial value: `v0 = P·r0`.
    pub fn to_canonical(&self, r0: &RealVector) -> RealVector {
        self.p.mul_vec(r0)
    }

    /// Reconstruction residual `‖A − P⁻¹JP‖_∞`.
    pub fn residual(&self, a: &RealMatrix) -> f64 {
        self.p_inv.mul(&self.j).mul(&self.p).sub(a).norm_inf()
    }
}

/// True when every Jordan block for `lambda` has size 1.
///
/// The 2×2 rotation block of a complex pair counts as simple; at
/// dimension ≤ 3 complex pairs never form larger blocks.
pub fn is_simple_elementary_factor(
    form: &RealJordanForm,
    lambda: ComplexScalar,
) -> Result<bool, JordanError> {
    let tol = CLUSTER_RADIUS * form.scale;
    let close = |x: ComplexScalar, y: ComplexScalar| (x - y).abs() <= tol;
    match form.structure {
        JordanStructure::Diag2 { l1, l2 } => {
            if close(lambda, ComplexScalar::real(l1)) || close(lambda, ComplexScalar::real(l2)) {
                Ok(true)
            } else {
                Err(JordanError::NotAnEigenvalue)
            }
        }
        JordanStructure::ComplexPair2 { a, b } => {
            if close(lambda, ComplexScalar::new(a, b)) || close(lambda, ComplexScalar::new(a, -b)) {
                Ok(true)
            } else {
                Err(JordanError::NotAnEigenvalue)
            }
        }
        JordanStructure::Block2 { l } => {
            if close(lambda, ComplexScalar::real(l)) {
                Ok(false)
            } else {
                Err(JordanError::NotAnEigenvalue)
            }
        }
        JordanStructure::Diag3 { l1, l2, l3 } => {
            if [l1, l2, l3]
                .iter()
                .any(|&l| close(lambda, ComplexScalar::real(l)))
            {
                Ok(true)
            } else {
                Err(JordanError::NotAnEigenvalue)
            }
        }
        JordanStructure::ComplexPairReal3 { a, b, l3 } => {
            if close(lambda, ComplexScalar::new(a, b))
                || close(lambda, ComplexScalar::new(a, -b))
                || close(lambda, ComplexScalar::real(l3))
            {
                Ok(true)
            } else {
                Err(JordanError::NotAnEigenvalue)
            }
        }
        JordanStructure::Block2Real3 { l1, l2 } => {
            // The block eigenvalue wins when l2 falls in the same cluster.
            if close(lambda, ComplexScalar::real(l1)) {
                Ok(false)
            } else if close(lambda, ComplexScalar::real(l2)) {
                Ok(true)
            } else {
                Err(JordanError::NotAnEigenvalue)
            }
        }
        JordanStructure::Block3 { l } => {
            if close(lambda, ComplexScalar::real(l)) {
                Ok(false)
            } else {
                Err(JordanError::NotAnEigenvalue)
            }
        }
    }
}

/// Classify `A` into its real Jordan canonical form.
pub fn classify(a: &RealMatrix) -> RealJordanForm {
    let scale = a.scale();
    let radius = CLUSTER_RADIUS * scale;
    let eigs = linalg::eigenvalues(a);

    let (structure, columns, merged) = match a.dim() {
        2 => classify_2d(a, &eigs, radius),
        3 => classify_3d(a, &eigs, radius),
        _ => unreachable!(),
    };

    let p_inv = RealMatrix::from_columns(&columns);
    let p = inverse(&p_inv).unwrap_or_else(|_| {
        // Extracted basis collapsed; return something usable and let the
        // condition flag signal the failure.
        RealMatrix::identity(a.dim())
    });
    let cond = singular_values(&p).condition();

    RealJordanForm {
        j: structure.canonical_matrix(),
        structure,
        p,
        p_inv,
        ill_conditioned: !cond.is_finite() || cond > COND_LIMIT,
        merged_eigenvalues: merged,
        scale,
    }
}

fn classify_2d(
    a: &RealMatrix,
    eigs: &[ComplexScalar],
    radius: f64,
) -> (JordanStructure, Vec<RealVector>, bool) {
    let pair_im = eigs[0].im;
    if pair_im > radius {
        let (re, im) = (eigs[0].re, eigs[0].im);
        let (u, v) = complex_eigenvector_2(a, ComplexScalar::new(re, im));
        return (
            JordanStructure::ComplexPair2 { a: re, b: im },
            vec![u, v],
            false,
        );
    }

    let l1 = eigs[0].re;
    let l2 = eigs[1].re;
    let merged_pair = pair_im > 0.0; // tiny imaginary part collapsed to real
    if (l1 - l2).abs() > radius {
        let v1 = eigenvector(a, l1);
        let v2 = eigenvector(a, l2);
        return (JordanStructure::Diag2 { l1, l2 }, vec![v1, v2], merged_pair);
    }

    // Repeated real eigenvalue: diagonal vs defective by rank(A − λI).
    let merged = merged_pair || l1 != l2;
    let lbar = 0.5 * (l1 + l2);
    let m = shifted(a, lbar);
    if linalg::rank_with_tol(&m, radius) == 0 {
        // A = λI within tolerance.
        let cols = vec![RealVector::basis(2, 0), RealVector::basis(2, 1)];
        (JordanStructure::Diag2 { l1: lbar, l2: lbar }, cols, merged)
    } else {
        let (u1, u2) = jordan_chain_2(&m, radius);
        (JordanStructure::Block2 { l: lbar }, vec![u1, u2], merged)
    }
}

fn classify_3d(
    a: &RealMatrix,
    eigs: &[ComplexScalar],
    radius: f64,
) -> (JordanStructure, Vec<RealVector>, bool) {
    let pair = eigs.iter().find(|e| e.im > radius).copied();
    if let Some(l) = pair {
        let real_eig = eigs
            .iter()
            .find(|e| e.im.abs() <= radius)
            .copied()
            .unwrap_or(ComplexScalar::real(eigs[2].re));
        let (u, v) = complex_eigenvector_3(a, l);
        let w = eigenvector(a, real_eig.re);
        return (
            JordanStructure::ComplexPairReal3 {
                a: l.re,
                b: l.im,
                l3: real_eig.re,
            },
            vec![u, v, w],
            false,
        );
    }

    let merged_pair = eigs.iter().any(|e| e.im != 0.0);
    let mut ls: Vec<f64> = eigs.iter().map(|e| e.re).collect();
    ls.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let (l1, l2, l3) = (ls[0], ls[1], ls[2]);
    let close12 = (l1 - l2).abs() <= radius;
    let close23 = (l2 - l3).abs() <= radius;

    if !close12 && !close23 {
        let cols = ls.iter().map(|&l| eigenvector(a, l)).collect();
        return (JordanStructure::Diag3 { l1, l2, l3 }, cols, merged_pair);
    }

    if close12 && close23 {
        // Triple cluster.
        let merged = merged_pair || l1 != l3;
        let lbar = (l1 + l2 + l3) / 3.0;
        let m = shifted(a, lbar);
        let geo = 3 - linalg::rank_with_tol(&m, radius);
        return match geo {
            3 => (
                JordanStructure::Diag3 {
                    l1: lbar,
                    l2: lbar,
                    l3: lbar,
                },
                (0..3).map(|i| RealVector::basis(3, i)).collect(),
                merged,
            ),
            2 => {
                let (u1, u2, u3) = jordan_chain_block2_in_triple(&m, radius);
                (
                    JordanStructure::Block2Real3 { l1: lbar, l2: lbar },
                    vec![u1, u2, u3],
                    merged,
                )
            }
            _ => {
                let (u1, u2, u3) = jordan_chain_3(&m, radius);
                (
                    JordanStructure::Block3 { l: lbar },
                    vec![u1, u2, u3],
                    merged,
                )
            }
        };
    }

    // One double cluster plus a separate simple eigenvalue.
    let (dbl, simple) = if close12 {
        (0.5 * (l1 + l2), l3)
    } else {
        (0.5 * (l2 + l3), l1)
    };
    let merged = merged_pair || if close12 { l1 != l2 } else { l2 != l3 };
    let m = shifted(a, dbl);
    let geo = 3 - linalg::rank_with_tol(&m, radius);
    let simple_vec = eigenvector(a, simple);
    if geo >= 2 {
        // Semisimple double eigenvalue: two independent null directions.
        let null = null_space_pair(&m);
        let (s1, s2, s3) = if close12 {
            (dbl, dbl, simple)
        } else {
            (simple, dbl, dbl)
        };
        let cols = if close12 {
            vec![null.0, null.1, simple_vec]
        } else {
            vec![simple_vec, null.0, null.1]
        };
        (
            JordanStructure::Diag3 {
                l1: s1,
                l2: s2,
                l3: s3,
            },
            cols,
            merged,
        )
    } else {
        let (u1, u2) = jordan_chain_from_eigenvector(&m, radius);
        (
            JordanStructure::Block2Real3 {
                l1: dbl,
                l2: simple,
            },
            vec![u1, u2, simple_vec],
            merged,
        )
    }
}

fn shifted(a: &RealMatrix, l: f64) -> RealMatrix {
    a.sub(&RealMatrix::identity(a.dim()).scaled(l))
}

/// Right eigenvector for a simple real eigenvalue, normalized so its
/// largest-magnitude component is exactly one.
fn eigenvector(a: &RealMatrix, l: f64) -> RealVector {
    let m = shifted(a, l);
    let v = match a.dim() {
        2 => {
            // Null vector of a rank-1 2×2 matrix from its dominant row.
            let r0 = m.row(0);
            let r1 = m.row(1);
            let r = if r0.norm() >= r1.norm() { r0 } else { r1 };
            if r.norm() == 0.0 {
                RealVector::basis(2, 0)
            } else {
                RealVector::new2(-r.get(1), r.get(0))
            }
        }
        _ => {
            let rows = [m.row(0), m.row(1), m.row(2)];
            let mut best = RealVector::zero(3);
            let mut best_norm = -1.0;
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let c = linalg::cross(&rows[i], &rows[j]);
                if c.norm() > best_norm {
                    best_norm = c.norm();
                    best = c;
                }
            }
            if best_norm <= 0.0 {
                RealVector::basis(3, 0)
            } else {
                best
            }
        }
    };
    normalize_max_component(fix_sign(v))
}

/// Two null directions of a rank-1 3×3 matrix (semisimple double
/// eigenvalue): the plane orthogonal to the dominant row.
fn null_space_pair(m: &RealMatrix) -> (RealVector, RealVector) {
    let rows = [m.row(0), m.row(1), m.row(2)];
    let r = rows
        .iter()
        .copied()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    match r.normalized() {
        Some(rn) => {
            let (a, b) = orthonormal_complement(&rn);
            (normalize_max_component(a), normalize_max_component(b))
        }
        None => (RealVector::basis(3, 0), RealVector::basis(3, 1)),
    }
}

/// Jordan chain for a defective 2×2: `u1` spans range(M) (= null(M) since
/// M² = 0) and `u2` solves `M·u2 = u1` with minimum norm.
fn jordan_chain_2(m: &RealMatrix, radius: f64) -> (RealVector, RealVector) {
    let c0 = m.column(0);
    let c1 = m.column(1);
    let u1 = if c0.norm() >= c1.norm() { c0 } else { c1 };
    let u1 = normalize_max_component(fix_sign(u1));
    let u2 = pinv_solve(m, &u1, radius);
    (u1, u2)
}

/// Chain for a size-2 block with a distinct simple eigenvalue: the null
/// space of M is one-dimensional and contained in range(M).
fn jordan_chain_from_eigenvector(m: &RealMatrix, radius: f64) -> (RealVector, RealVector) {
    let rows = [m.row(0), m.row(1), m.row(2)];
    let mut best = RealVector::zero(3);
    let mut best_norm = -1.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = linalg::cross(&rows[i], &rows[j]);
        if c.norm() > best_norm {
            best_norm = c.norm();
            best = c;
        }
    }
    let u1 = normalize_max_component(fix_sign(best));
    let u2 = pinv_solve(m, &u1, radius);
    (u1, u2)
}

/// Chain for a triple eigenvalue with geometric multiplicity two
/// (blocks of size 2 and 1). Here M² = 0, so M·v lies in
/// range(M) ∩ null(M) for any v.
fn jordan_chain_block2_in_triple(
    m: &RealMatrix,
    radius: f64,
) -> (RealVector, RealVector, RealVector) {
    let mtm = m.transpose().mul(m);
    let (_, vecs) = linalg::symmetric_eigen(&mtm);
    // Top right-singular direction gives the largest image.
    let u1 = normalize_max_component(fix_sign(m.mul_vec(&vecs[0])));
    let u2 = pinv_solve(m, &u1, radius);
    // Second null direction, made independent of u1.
    let null = null_space_pair(m);
    let u1n = u1.normalized().expect("chain head is nonzero");
    let cands = [null.0, null.1];
    let u3 = cands
        .iter()
        .map(|c| c.sub(&u1n.scale(c.dot(&u1n))))
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .unwrap();
    (u1, u2, normalize_max_component(fix_sign(u3)))
}

/// Full chain for a size-3 block: u1 = M²·v, u2 = M⁺·u1, u3 = M⁺·u2.
fn jordan_chain_3(m: &RealMatrix, radius: f64) -> (RealVector, RealVector, RealVector) {
    let m2 = m.mul(m);
    let g = m2.transpose().mul(&m2);
    let (_, vecs) = linalg::symmetric_eigen(&g);
    let u1 = normalize_max_component(fix_sign(m2.mul_vec(&vecs[0])));
    let u2 = pinv_solve(m, &u1, radius);
    let u3 = pinv_solve(m, &u2, radius);
    (u1, u2, u3)
}

fn normalize_max_component(v: RealVector) -> RealVector {
    let mut idx = 0;
    for i in 1..v.dim() {
        if v.get(i).abs() > v.get(idx).abs() {
            idx = i;
        }
    }
    let m = v.get(idx);
    if m == 0.0 {
        v
    } else {
        v.scale(1.0 / m)
    }
}

/// Real and imaginary parts of a complex eigenvector of a 2×2 matrix,
/// phase-normalized so the largest-modulus component is real positive.
fn complex_eigenvector_2(a: &RealMatrix, l: ComplexScalar) -> (RealVector, RealVector) {
    // Null vector of (A − λI): (−m01, m00) or (m11, −m10), larger first.
    let m00 = ComplexScalar::real(a.get(0, 0)) - l;
    let m01 = ComplexScalar::real(a.get(0, 1));
    let m10 = ComplexScalar::real(a.get(1, 0));
    let m11 = ComplexScalar::real(a.get(1, 1)) - l;
    let cand1 = [-m01, m00];
    let cand2 = [m11, -m10];
    let n1 = cand1[0].abs().hypot(cand1[1].abs());
    let n2 = cand2[0].abs().hypot(cand2[1].abs());
    let w = if n1 >= n2 { cand1 } else { cand2 };
    phase_normalize(&w)
}

/// Real and imaginary parts of a complex eigenvector of a 3×3 matrix via
/// the complex cross product of the two most independent rows of A − λI.
fn complex_eigenvector_3(a: &RealMatrix, l: ComplexScalar) -> (RealVector, RealVector) {
    let row = |i: usize| -> [ComplexScalar; 3] {
        let mut r = [ComplexScalar::default(); 3];
        for (j, x) in r.iter_mut().enumerate() {
            *x = ComplexScalar::real(a.get(i, j));
        }
        r[i] = r[i] - l;
        r
    };
    let rows = [row(0), row(1), row(2)];
    let cx = |u: &[ComplexScalar; 3], v: &[ComplexScalar; 3]| -> [ComplexScalar; 3] {
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    };
    let mut best = [ComplexScalar::default(); 3];
    let mut best_norm = -1.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = cx(&rows[i], &rows[j]);
        let n: f64 = c.iter().map(|z| z.abs() * z.abs()).sum();
        if n > best_norm {
            best_norm = n;
            best = c;
        }
    }
    phase_normalize(&best)
}

/// Rotate a complex vector so its largest-modulus component is real
/// positive and scaled to one, then split into (Re, Im) columns.
fn phase_normalize(w: &[ComplexScalar]) -> (RealVector, RealVector) {
    let dim = w.len();
    let mut idx = 0;
    for (i, z) in w.iter().enumerate() {
        if z.abs() > w[idx].abs() {
            idx = i;
        }
    }
    let pivot = w[idx];
    let pa = pivot.abs();
    let mut re = RealVector::zero(dim);
    let mut im = RealVector::zero(dim);
    for (i, &z) in w.iter().enumerate() {
        let rotated = if pa > 0.0 {
            z * pivot.conj() * (1.0 / (pa * pa))
        } else {
            z
        };
        re.set(i, rotated.re);
        im.set(i, rotated.im);
    }
    (re, im)
}
