//! Fixed-dimension (2 and 3) real vector/matrix arithmetic, closed-form
//! eigen-solvers and singular values.
//!
//! Everything here is deliberately small and closed-form: at dimension
//! two or three the characteristic polynomial is quadratic or cubic, so
//! eigenvalues never need an iterative solver, and the SVD reduces to a
//! symmetric eigen-decomposition of `PᵀP`.

use thiserror::Error;

/// Relative tolerance governing equality tests throughout the crate.
/// Always used together with a scale factor `max(1, ‖A‖_∞)`.
pub const EPS: f64 = 1e-9;

/// Determinants below `SINGULAR_EPS · scaleᵈⁱᵐ` are treated as zero.
pub const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular (determinant below tolerance)")]
    SingularMatrix,
    #[error("dimension mismatch")]
    DimensionMismatch,
}

/// Complex scalar; holds eigenvalues `λ = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexScalar {
    pub re: f64,
    pub im: f64,
}

impl ComplexScalar {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn is_real(self, tol: f64) -> bool {
        self.im.abs() <= tol
    }
}

impl std::ops::Add for ComplexScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl std::ops::Sub for ComplexScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl std::ops::Mul for ComplexScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl std::ops::Mul<f64> for ComplexScalar {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }
}

impl std::ops::Div for ComplexScalar {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let d = o.re * o.re + o.im * o.im;
        Self::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

impl std::ops::Neg for ComplexScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

/// Real vector of dimension 2 or 3 (state-space coordinates).
///
/// Dimension-2 vectors keep a zero third component internally; all
/// operations respect the declared dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealVector {
    dim: usize,
    c: [f64; 3],
}

impl RealVector {
    pub fn new2(x: f64, y: f64) -> Self {
        let v = Self {
            dim: 2,
            c: [x, y, 0.0],
        };
        assert!(v.is_finite(), "vector components must be finite");
        v
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        let v = Self {
            dim: 3,
            c: [x, y, z],
        };
        assert!(v.is_finite(), "vector components must be finite");
        v
    }

    pub fn from_slice(c: &[f64]) -> Result<Self, LinalgError> {
        match c.len() {
            2 => Ok(Self::new2(c[0], c[1])),
            3 => Ok(Self::new3(c[0], c[1], c[2])),
            _ => Err(LinalgError::DimensionMismatch),
        }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3);
        Self { dim, c: [0.0; 3] }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.c[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> f64 {
        debug_assert!(i < self.dim);
        self.c[i]
    }

    pub fn set(&mut self, i: usize, value: f64) {
        debug_assert!(i < self.dim);
        self.c[i] = value;
    }

    pub fn components(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.c[..self.dim].iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, o: &Self) -> f64 {
        debug_assert_eq!(self.dim, o.dim);
        self.c[0] * o.c[0] + self.c[1] * o.c[1] + self.c[2] * o.c[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.components().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut r = *self;
        for x in &mut r.c {
            *x *= s;
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut r = *self;
        for i in 0..3 {
            r.c[i] += o.c[i];
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut r = *self;
        for i in 0..3 {
            r.c[i] -= o.c[i];
        }
        r
    }

    /// Unit vector in the same direction; `None` when the norm is zero.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }
}

/// Right-handed cross product of two 3-vectors.
pub fn cross(a: &RealVector, b: &RealVector) -> RealVector {
    assert_eq!(a.dim(), 3, "cross product requires dimension 3");
    assert_eq!(b.dim(), 3, "cross product requires dimension 3");
    RealVector::new3(
        a.c[1] * b.c[2] - a.c[2] * b.c[1],
        a.c[2] * b.c[0] - a.c[0] * b.c[2],
        a.c[0] * b.c[1] - a.c[1] * b.c[0],
    )
}

/// Scalar triple product `(a×b)·c`; equals the determinant of the matrix
/// with columns `a, b, c`.
pub fn triple_product(a: &RealVector, b: &RealVector, c: &RealVector) -> f64 {
    cross(a, b).dot(c)
}

/// Dense real 2×2 or 3×3 matrix with an exact dimension tag; the system
/// coefficient `A` and every transform live here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    a: [[f64; 3]; 3],
}

impl RealMatrix {
    pub fn new2(rows: [[f64; 2]; 2]) -> Self {
        let mut a = [[0.0; 3]; 3];
        for r in 0..2 {
            for c in 0..2 {
                a[r][c] = rows[r][c];
            }
        }
        let m = Self { dim: 2, a };
        assert!(m.is_finite(), "matrix entries must be finite");
        m
    }

    pub fn new3(rows: [[f64; 3]; 3]) -> Self {
        let m = Self { dim: 3, a: rows };
        assert!(m.is_finite(), "matrix entries must be finite");
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n != 2 && n != 3 {
            return Err(LinalgError::DimensionMismatch);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::DimensionMismatch);
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(LinalgError::DimensionMismatch);
        }
        let mut a = [[0.0; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                a[i][j] = x;
            }
        }
        Ok(Self { dim: n, a })
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3);
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate().take(dim) {
            row[i] = 1.0;
        }
        Self { dim, a }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3);
        Self {
            dim,
            a: [[0.0; 3]; 3],
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let dim = values.len();
        assert!(dim == 2 || dim == 3);
        let mut a = [[0.0; 3]; 3];
        for (i, &v) in values.iter().enumerate() {
            a[i][i] = v;
        }
        Self { dim, a }
    }

    /// Matrix with the given columns.
    pub fn from_columns(cols: &[RealVector]) -> Self {
        let dim = cols.len();
        assert!(dim == 2 || dim == 3);
        let mut a = [[0.0; 3]; 3];
        for (j, col) in cols.iter().enumerate() {
            debug_assert_eq!(col.dim(), dim);
            for i in 0..dim {
                a[i][j] = col.get(i);
            }
        }
        Self { dim, a }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        debug_assert!(r < self.dim && c < self.dim);
        self.a[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        debug_assert!(r < self.dim && c < self.dim);
        self.a[r][c] = value;
    }

    pub fn row(&self, r: usize) -> RealVector {
        let mut v = RealVector::zero(self.dim);
        for c in 0..self.dim {
            v.set(c, self.a[r][c]);
        }
        v
    }

    pub fn column(&self, c: usize) -> RealVector {
        let mut v = RealVector::zero(self.dim);
        for r in 0..self.dim {
            v.set(r, self.a[r][c]);
        }
        v
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| self.a[r][c].is_finite()))
    }

    pub fn transpose(&self) -> Self {
        let mut t = *self;
        for r in 0..self.dim {
            for c in 0..self.dim {
                t.a[r][c] = self.a[c][r];
            }
        }
        t
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.a[i][i]).sum()
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.a[r][c].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Scale factor `max(1, ‖A‖_∞)` used by relative tolerances.
    pub fn scale(&self) -> f64 {
        self.norm_inf().max(1.0)
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut r = *self;
        for i in 0..3 {
            for j in 0..3 {
                r.a[i][j] += o.a[i][j];
            }
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut r = *self;
        for i in 0..3 {
            for j in 0..3 {
                r.a[i][j] -= o.a[i][j];
            }
        }
        r
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut r = *self;
        for row in &mut r.a {
            for x in row {
                *x *= s;
            }
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut r = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut s = 0.0;
                for k in 0..self.dim {
                    s += self.a[i][k] * o.a[k][j];
                }
                r.a[i][j] = s;
            }
        }
        r
    }

    /// Matrix product that treats exact zeros as annihilating, so that
    /// overflowed (`±∞`) entries multiplied by structural zeros do not
    /// produce NaN. Used when assembling `P⁻¹·e^{tJ}·P` at large `t`.
    pub fn mul_inf_safe(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut r = Self::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut s = 0.0;
                for k in 0..self.dim {
                    let (x, y) = (self.a[i][k], o.a[k][j]);
                    if x != 0.0 && y != 0.0 {
                        s += x * y;
                    }
                }
                r.a[i][j] = s;
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &RealVector) -> RealVector {
        debug_assert_eq!(self.dim, v.dim());
        let mut r = RealVector::zero(self.dim);
        for i in 0..self.dim {
            let mut s = 0.0;
            for k in 0..self.dim {
                s += self.a[i][k] * v.get(k);
            }
            r.set(i, s);
        }
        r
    }
}

/// Exact cofactor-expansion determinant.
pub fn determinant(m: &RealMatrix) -> f64 {
    let a = &m.a;
    match m.dim {
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        3 => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
        _ => unreachable!(),
    }
}

/// Inverse by the adjugate formula. Fails with [`LinalgError::SingularMatrix`]
/// when `|det| ≤ SINGULAR_EPS · scaleᵈⁱᵐ`.
pub fn inverse(m: &RealMatrix) -> Result<RealMatrix, LinalgError> {
    let det = determinant(m);
    let tol = SINGULAR_EPS * m.scale().powi(m.dim as i32);
    if det.abs() <= tol {
        return Err(LinalgError::SingularMatrix);
    }
    let a = &m.a;
    let inv_det = 1.0 / det;
    let mut r = RealMatrix::zero(m.dim);
    match m.dim {
        2 => {
            r.a[0][0] = a[1][1] * inv_det;
            r.a[0][1] = -a[0][1] * inv_det;
            r.a[1][0] = -a[1][0] * inv_det;
            r.a[1][1] = a[0][0] * inv_det;
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    // adjugate: cofactor of (j, i)
                    let (r1, r2) = ((j + 1) % 3, (j + 2) % 3);
                    let (c1, c2) = ((i + 1) % 3, (i + 2) % 3);
                    r.a[i][j] = (a[r1][c1] * a[r2][c2] - a[r1][c2] * a[r2][c1]) * inv_det;
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(r)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CubicKind {
    DistinctReal,
    Repeated,
    OnePlusPair,
}

fn depressed_cubic_roots(p: f64, q: f64, scale: f64) -> ([ComplexScalar; 3], CubicKind) {
    // Discriminant of x³ + px + q; zero iff a repeated root exists.
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let s2 = scale * scale;
    let s3 = s2 * scale;
    if disc.abs() < 1e-12 * s3 * s3 {
        // Repeated-root branch, resolved exactly instead of through
        // near-cancelling radicals.
        if p.abs() <= 1e-11 * s2 && q.abs() <= 1e-11 * s3 {
            return ([ComplexScalar::real(0.0); 3], CubicKind::Repeated);
        }
        let double = -3.0 * q / (2.0 * p);
        let single = 3.0 * q / p;
        return (
            [
                ComplexScalar::real(single),
                ComplexScalar::real(double),
                ComplexScalar::real(double),
            ],
            CubicKind::Repeated,
        );
    }
    if disc > 0.0 {
        // Three distinct real roots: trigonometric form avoids complex
        // intermediates entirely.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut roots = [0.0; 3];
        for (k, r) in roots.iter_mut().enumerate() {
            *r = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
        }
        (
            [
                ComplexScalar::real(roots[0]),
                ComplexScalar::real(roots[1]),
                ComplexScalar::real(roots[2]),
            ],
            CubicKind::DistinctReal,
        )
    } else {
        // One real root plus a conjugate pair (Cardano). Pick the cube
        // root with the larger magnitude to dodge cancellation.
        let half_q = q / 2.0;
        let d = (half_q * half_q + p * p * p / 27.0).sqrt();
        let u = if half_q >= 0.0 { -half_q - d } else { -half_q + d };
        let u = u.cbrt();
        let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
        let real = u + v;
        let im = (u - v).abs() * 3f64.sqrt() / 2.0;
        (
            [
                ComplexScalar::real(real),
                ComplexScalar::new(-real / 2.0, im),
                ComplexScalar::new(-real / 2.0, -im),
            ],
            CubicKind::OnePlusPair,
        )
    }
}

/// One Newton polish step on the monic cubic `x³ + c2·x² + c1·x + c0`.
fn polish_cubic_root(x: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    let mut x = x;
    for _ in 0..2 {
        let f = ((x + c2) * x + c1) * x + c0;
        let df = (3.0 * x + 2.0 * c2) * x + c1;
        if df.abs() > 0.0 {
            let step = f / df;
            if step.is_finite() {
                x -= step;
            }
        }
    }
    x
}

/// Eigenvalues as roots of the characteristic polynomial, computed in
/// closed form. Complex roots come in conjugate pairs with the positive
/// imaginary part first; the multiset is complete with multiplicity and
/// sorted descending by real part, then imaginary part.
pub fn eigenvalues(m: &RealMatrix) -> Vec<ComplexScalar> {
    let s = m.scale();
    let mut eigs = match m.dim {
        2 => {
            let tr = m.trace();
            let det = determinant(m);
            let half = tr / 2.0;
            let disc = half * half - det;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                vec![
                    ComplexScalar::real(half + sq),
                    ComplexScalar::real(half - sq),
                ]
            } else {
                let im = (-disc).sqrt();
                vec![ComplexScalar::new(half, im), ComplexScalar::new(half, -im)]
            }
        }
        3 => {
            let tr = m.trace();
            let a = &m.a;
            // Sum of principal 2×2 minors.
            let minors = a[1][1] * a[2][2] - a[1][2] * a[2][1] + a[0][0] * a[2][2]
                - a[0][2] * a[2][0]
                + a[0][0] * a[1][1]
                - a[0][1] * a[1][0];
            let det = determinant(m);
            // λ³ − tr·λ² + minors·λ − det, depressed by λ = x + tr/3.
            // q is the characteristic polynomial evaluated at the shift.
            let shift = tr / 3.0;
            let p = minors - tr * tr / 3.0;
            let q = ((shift - tr) * shift + minors) * shift - det;
            let (roots, kind) = depressed_cubic_roots(p, q, s);
            match kind {
                CubicKind::Repeated => roots
                    .into_iter()
                    .map(|x| ComplexScalar::real(x.re + shift))
                    .collect(),
                CubicKind::DistinctReal => roots
                    .into_iter()
                    .map(|x| {
                        ComplexScalar::real(polish_cubic_root(x.re + shift, -tr, minors, -det))
                    })
                    .collect(),
                CubicKind::OnePlusPair => {
                    // Polish the real root, then recover the pair by exact
                    // deflation: λ² + bλ + c with b = r − tr, c = minors + b·r.
                    let r = polish_cubic_root(roots[0].re + shift, -tr, minors, -det);
                    let b = r - tr;
                    let c = minors + b * r;
                    let disc = b * b / 4.0 - c;
                    if disc < 0.0 {
                        let im = (-disc).sqrt();
                        vec![
                            ComplexScalar::real(r),
                            ComplexScalar::new(-b / 2.0, im),
                            ComplexScalar::new(-b / 2.0, -im),
                        ]
                    } else {
                        // Deflation crossed into the real regime; keep the
                        // unpolished closed-form values.
                        roots
                            .into_iter()
                            .map(|x| ComplexScalar::new(x.re + shift, x.im))
                            .collect()
                    }
                }
            }
        }
        _ => unreachable!(),
    };

    eigs.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap()
            .then(y.im.partial_cmp(&x.im).unwrap())
    });
    eigs
}

/// Singular values `δ1 ≥ δ2 (≥ δ3)` of a 2×2 or 3×3 real matrix.
///
/// `delta_min` is the last (smallest) value; it is positive exactly when
/// the source matrix is invertible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularTriple {
    dim: usize,
    values: [f64; 3],
}

impl SingularTriple {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..self.dim]
    }

    pub fn delta1(&self) -> f64 {
        self.values[0]
    }

    pub fn delta_min(&self) -> f64 {
        self.values[self.dim - 1]
    }

    /// Condition number `δ1 / δ_min`; infinite for singular matrices.
    pub fn condition(&self) -> f64 {
        if self.delta_min() == 0.0 {
            f64::INFINITY
        } else {
            self.delta1() / self.delta_min()
        }
    }
}

/// Singular values from the eigen-decomposition of `PᵀP` (symmetric, so
/// the closed-form solver always lands in the all-real branch).
pub fn singular_values(p: &RealMatrix) -> SingularTriple {
    let s = p.transpose().mul(p);
    let eigs = symmetric_eigenvalues(&s);
    let mut values = [0.0; 3];
    for (i, &e) in eigs.iter().enumerate() {
        values[i] = e.max(0.0).sqrt();
    }
    SingularTriple { dim: p.dim, values }
}

/// Eigenvalues of a symmetric matrix, descending. All real by symmetry;
/// tiny negative round-off is preserved for the caller to clamp.
pub fn symmetric_eigenvalues(m: &RealMatrix) -> Vec<f64> {
    eigenvalues(m).into_iter().map(|e| e.re).collect()
}

/// Orthonormal eigenvectors of a symmetric matrix paired with their
/// eigenvalues, descending. Eigenvalue clusters fall back to orthogonal
/// completion of the well-separated eigenvectors, which keeps the basis
/// deterministic.
pub fn symmetric_eigen(m: &RealMatrix) -> (Vec<f64>, Vec<RealVector>) {
    let vals = symmetric_eigenvalues(m);
    let scale = m.scale();
    let tol = 1e-7 * scale;
    let dim = m.dim;

    if dim == 2 {
        let spread = (vals[0] - vals[1]).abs();
        if spread <= tol {
            return (vals, vec![RealVector::basis(2, 0), RealVector::basis(2, 1)]);
        }
        let v0 = null_vector_2(&shifted(m, vals[0]));
        let v1 = RealVector::new2(-v0.get(1), v0.get(0));
        return (vals, vec![v0, v1]);
    }

    // Cluster the sorted eigenvalues.
    let close01 = (vals[0] - vals[1]).abs() <= tol;
    let close12 = (vals[1] - vals[2]).abs() <= tol;
    let vecs = if close01 && close12 {
        (0..3).map(|i| RealVector::basis(3, i)).collect()
    } else if close01 || close12 {
        let simple = if close01 { 2 } else { 0 };
        let vs = null_vector_3(&shifted(m, vals[simple]));
        let (a, b) = orthonormal_complement(&vs);
        if close01 {
            vec![a, b, vs]
        } else {
            vec![vs, a, b]
        }
    } else {
        let mut vecs: Vec<RealVector> = vals
            .iter()
            .map(|&l| null_vector_3(&shifted(m, l)))
            .collect();
        // Gram-Schmidt pass to enforce exact orthogonality.
        for i in 1..3 {
            for j in 0..i {
                let proj = vecs[i].dot(&vecs[j]);
                vecs[i] = vecs[i].sub(&vecs[j].scale(proj));
            }
            vecs[i] = vecs[i].normalized().unwrap_or(RealVector::basis(3, i));
        }
        vecs
    };
    (vals, vecs)
}

fn shifted(m: &RealMatrix, l: f64) -> RealMatrix {
    m.sub(&RealMatrix::identity(m.dim).scaled(l))
}

fn null_vector_2(m: &RealMatrix) -> RealVector {
    // For rank-1 2×2, a null vector is orthogonal to the dominant row.
    let r0 = m.row(0);
    let r1 = m.row(1);
    let r = if r0.norm() >= r1.norm() { r0 } else { r1 };
    let v = RealVector::new2(-r.get(1), r.get(0));
    fix_sign(v.normalized().unwrap_or(RealVector::basis(2, 0)))
}

fn null_vector_3(m: &RealMatrix) -> RealVector {
    // Cross product of the two most independent rows spans the null space
    // of a rank-2 matrix.
    let rows = [m.row(0), m.row(1), m.row(2)];
    let mut best = RealVector::zero(3);
    let mut best_norm = -1.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = cross(&rows[i], &rows[j]);
        let n = c.norm();
        if n > best_norm {
            best_norm = n;
            best = c;
        }
    }
    if best_norm <= 0.0 {
        // Rank ≤ 1: null space is the plane orthogonal to the largest row.
        let r = rows
            .iter()
            .copied()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        if let Some(rn) = r.normalized() {
            return fix_sign(orthonormal_complement(&rn).0);
        }
        return RealVector::basis(3, 0);
    }
    fix_sign(best.normalized().unwrap())
}

/// Deterministic orthonormal pair spanning the plane orthogonal to `v`
/// (assumed unit).
pub fn orthonormal_complement(v: &RealVector) -> (RealVector, RealVector) {
    debug_assert_eq!(v.dim(), 3);
    // Start from the axis least aligned with v.
    let mut axis = 0;
    for i in 1..3 {
        if v.get(i).abs() < v.get(axis).abs() {
            axis = i;
        }
    }
    let e = RealVector::basis(3, axis);
    let a = cross(v, &e).normalized().expect("complement of unit vector");
    let b = cross(v, &a);
    (fix_sign(a), fix_sign(b))
}

/// Sign convention: largest-magnitude component positive (first index wins
/// ties), keeping extracted bases reproducible.
pub fn fix_sign(v: RealVector) -> RealVector {
    let mut idx = 0;
    for i in 1..v.dim() {
        if v.get(i).abs() > v.get(idx).abs() {
            idx = i;
        }
    }
    if v.get(idx) < 0.0 {
        v.scale(-1.0)
    } else {
        v
    }
}

/// Minimum-norm least-squares solution of `M·x = b` via the spectral
/// pseudo-inverse of `MᵀM`; singular directions below `tol` are dropped.
pub fn pinv_solve(m: &RealMatrix, b: &RealVector, tol: f64) -> RealVector {
    let mtm = m.transpose().mul(m);
    let (vals, vecs) = symmetric_eigen(&mtm);
    let mtb = m.transpose().mul_vec(b);
    let mut x = RealVector::zero(m.dim);
    for (sigma_sq, v) in vals.iter().zip(vecs.iter()) {
        if sigma_sq.max(0.0).sqrt() > tol {
            let coeff = v.dot(&mtb) / sigma_sq;
            x = x.add(&v.scale(coeff));
        }
    }
    x
}

/// Number of singular values strictly above `tol`.
pub fn rank_with_tol(m: &RealMatrix, tol: f64) -> usize {
    singular_values(m)
        .values()
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example4_matrix() -> RealMatrix {
        RealMatrix::new3([[-1.0, 4.0, 0.0], [0.0, -1.0, 2.0], [0.0, -2.0, -1.0]])
    }

    fn example1_matrix() -> RealMatrix {
        RealMatrix::new2([[18.0, 25.0], [-13.0, -18.0]])
    }

    fn random_matrix(rng: &mut ChaCha8Rng, dim: usize, span: f64) -> RealMatrix {
        let mut m = RealMatrix::zero(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, rng.gen_range(-span..span));
            }
        }
        m
    }

    fn random_vector(rng: &mut ChaCha8Rng, dim: usize, span: f64) -> RealVector {
        let mut v = RealVector::zero(dim);
        for i in 0..dim {
            v.set(i, rng.gen_range(-span..span));
        }
        v
    }

    fn random_rotation(rng: &mut ChaCha8Rng) -> RealMatrix {
        // Rodrigues' formula from a random axis and angle.
        let axis = loop {
            let v = random_vector(rng, 3, 1.0);
            if let Some(u) = v.normalized() {
                break u;
            }
        };
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (s, c) = angle.sin_cos();
        let (x, y, z) = (axis.get(0), axis.get(1), axis.get(2));
        let k = RealMatrix::new3([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]]);
        RealMatrix::identity(3)
            .add(&k.scaled(s))
            .add(&k.mul(&k).scaled(1.0 - c))
    }

    #[test]
    fn determinant_cases() {
        assert_eq!(determinant(&RealMatrix::identity(3)), 1.0);
        assert_eq!(determinant(&example4_matrix()), -5.0);
        assert_eq!(determinant(&example1_matrix()), 1.0);
    }

    #[test]
    fn cross_product_cases() {
        let e1 = RealVector::basis(3, 0);
        let e2 = RealVector::basis(3, 1);
        assert_eq!(cross(&e1, &e2), RealVector::basis(3, 2));
        let a = RealVector::new3(1.0, 2.0, 3.0);
        assert_eq!(cross(&a, &a), RealVector::zero(3));
        let b = RealVector::new3(4.0, 5.0, 6.0);
        assert_eq!(cross(&a, &b), RealVector::new3(-3.0, 6.0, -3.0));
    }

    #[test]
    fn triple_product_cases() {
        let e1 = RealVector::basis(3, 0);
        let e2 = RealVector::basis(3, 1);
        let e3 = RealVector::basis(3, 2);
        assert_eq!(triple_product(&e1, &e2, &e3), 1.0);
        let a = RealVector::new3(1.0, -2.0, 0.5);
        let b = RealVector::new3(3.0, 1.0, -1.0);
        assert_eq!(triple_product(&a, &a, &b), 0.0);
    }

    #[test]
    fn triple_product_scales_with_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = random_matrix(&mut rng, 3, 3.0);
            let a = random_vector(&mut rng, 3, 2.0);
            let b = random_vector(&mut rng, 3, 2.0);
            let c = random_vector(&mut rng, 3, 2.0);
            let lhs = triple_product(&p.mul_vec(&a), &p.mul_vec(&b), &p.mul_vec(&c));
            let rhs = determinant(&p) * triple_product(&a, &b, &c);
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            assert!((lhs - rhs).abs() <= 1e-10 * scale, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn lagrange_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let a = random_vector(&mut rng, 3, 5.0);
            let b = random_vector(&mut rng, 3, 5.0);
            let lhs = cross(&a, &b).dot(&cross(&a, &b)) + a.dot(&b) * a.dot(&b);
            let rhs = a.dot(&a) * b.dot(&b);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthogonal_preserves_cross_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let u = random_rotation(&mut rng);
            let a = random_vector(&mut rng, 3, 4.0);
            let b = random_vector(&mut rng, 3, 4.0);
            let lhs = cross(&u.mul_vec(&a), &u.mul_vec(&b)).norm();
            let rhs = cross(&a, &b).norm();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
        }
    }

    #[test]
    fn diagonal_sandwich_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let mut d = [0.0; 3];
            for x in &mut d {
                *x = rng.gen_range(0.1..4.0);
            }
            d.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let dm = RealMatrix::diag(&d);
            let a = random_vector(&mut rng, 3, 3.0);
            let b = random_vector(&mut rng, 3, 3.0);
            let slack = 1.0 + 1e-12;
            assert!(d[2] * a.norm() <= dm.mul_vec(&a).norm() * slack);
            assert!(dm.mul_vec(&a).norm() <= d[0] * a.norm() * slack);
            let cn = cross(&a, &b).norm();
            let dcn = cross(&dm.mul_vec(&a), &dm.mul_vec(&b)).norm();
            assert!(d[2] * d[2] * cn <= dcn * slack);
            assert!(dcn <= d[0] * d[0] * cn * slack);
        }
    }

    #[test]
    fn eigenvalues_diagonal() {
        let eigs = eigenvalues(&RealMatrix::diag(&[-1.0, -3.0, -7.0]));
        for (e, want) in eigs.iter().zip([-1.0, -3.0, -7.0]) {
            assert_relative_eq!(e.re, want, max_relative = 1e-12);
            assert_eq!(e.im, 0.0);
        }
    }

    #[test]
    fn eigenvalues_example1_pure_imaginary() {
        let eigs = eigenvalues(&example1_matrix());
        assert!(eigs[0].re.abs() < 1e-12);
        assert_relative_eq!(eigs[0].im, 1.0, max_relative = 1e-12);
        assert_relative_eq!(eigs[1].im, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn eigenvalues_example4_complex_pair() {
        let eigs = eigenvalues(&example4_matrix());
        // −1 ± 2i and −1; descending order puts +2i first.
        assert_relative_eq!(eigs[0].re, -1.0, max_relative = 1e-12);
        assert_relative_eq!(eigs[0].im, 2.0, max_relative = 1e-12);
        assert_relative_eq!(eigs[1].re, -1.0, max_relative = 1e-12);
        assert_relative_eq!(eigs[1].im, 0.0, max_relative = 1e-12);
        assert_relative_eq!(eigs[2].im, -2.0, max_relative = 1e-12);
    }

    #[test]
    fn eigenvalue_trace_det_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let m = random_matrix(&mut rng, dim, 5.0);
            let eigs = eigenvalues(&m);
            let sum: ComplexScalar = eigs
                .iter()
                .fold(ComplexScalar::default(), |acc, &e| acc + e);
            let prod = eigs
                .iter()
                .fold(ComplexScalar::real(1.0), |acc, &e| acc * e);
            let s = m.scale();
            assert!((sum.re - m.trace()).abs() <= 1e-9 * s.powi(1));
            assert!(sum.im.abs() <= 1e-9 * s);
            assert!((prod.re - determinant(&m)).abs() <= 1e-9 * s.powi(dim as i32));
            assert!(prod.im.abs() <= 1e-9 * s.powi(dim as i32));
        }
    }

    #[test]
    fn singular_values_cases() {
        let id = singular_values(&RealMatrix::identity(3));
        for &v in id.values() {
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
        let d = singular_values(&RealMatrix::diag(&[2.0, 1.0, 1.0]));
        assert_relative_eq!(d.delta1(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(d.delta_min(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn singular_values_of_rotation_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let u = random_rotation(&mut rng);
            for &v in singular_values(&u).values() {
                assert!((v - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_value_product_matches_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let m = random_matrix(&mut rng, dim, 4.0);
            let prod: f64 = singular_values(&m).values().iter().product();
            let det = determinant(&m).abs();
            let s = m.scale().powi(dim as i32);
            assert!((prod - det).abs() <= 1e-9 * s, "{prod} vs {det}");
        }
    }

    #[test]
    fn inverse_cases() {
        let id = RealMatrix::identity(2);
        assert_eq!(inverse(&id).unwrap(), id);
        let d = inverse(&RealMatrix::diag(&[2.0, 4.0])).unwrap();
        assert_eq!(d, RealMatrix::diag(&[0.5, 0.25]));
        assert_eq!(
            inverse(&RealMatrix::zero(3)),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn inverse_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut checked = 0;
        while checked < 300 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let m = random_matrix(&mut rng, dim, 4.0);
            let Ok(mi) = inverse(&m) else { continue };
            let prod = m.mul(&mi);
            let err = prod.sub(&RealMatrix::identity(dim)).norm_inf();
            let cond = singular_values(&m).condition();
            if cond < 1e6 {
                assert!(err <= 1e-9 * cond.max(1.0), "residual {err}, cond {cond}");
                checked += 1;
            }
        }
    }

    #[test]
    fn pinv_solves_consistent_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let m = random_matrix(&mut rng, 3, 3.0);
            let x = random_vector(&mut rng, 3, 2.0);
            let b = m.mul_vec(&x);
            if singular_values(&m).condition() > 1e6 {
                continue;
            }
            let sol = pinv_solve(&m, &b, 1e-10 * m.scale());
            let residual = m.mul_vec(&sol).sub(&b).norm();
            assert!(residual <= 1e-7 * b.norm().max(1.0));
        }
    }

    #[test]
    fn symmetric_eigen_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..300 {
            let m = random_matrix(&mut rng, 3, 3.0);
            let s = m.add(&m.transpose()).scaled(0.5);
            let (vals, vecs) = symmetric_eigen(&s);
            for (l, v) in vals.iter().zip(vecs.iter()) {
                let residual = s.mul_vec(v).sub(&v.scale(*l)).norm();
                assert!(residual <= 1e-7 * s.scale(), "residual {residual}");
            }
            // Orthonormality.
            for i in 0..3 {
                for j in 0..3 {
                    let d = vecs[i].dot(&vecs[j]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-8);
                }
            }
        }
    }
}
