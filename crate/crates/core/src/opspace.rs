//! Closed linear spans of matrices, realised as subspaces of the
//! Hilbert-Schmidt vectorisation.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, adj, eye, mul, pivoted_gs, unvec, Mat, C64, RANK_TOL, ZERO};

/// A finite-dimensional Hilbert space with named basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct FHilbert {
    pub label: String,
    pub basis: Vec<String>,
}

impl FHilbert {
    pub fn new(label: impl Into<String>, basis: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for b in &basis {
            if !seen.insert(b.as_str()) {
                return Err(Error::ShapeMismatch(format!("duplicate basis label {b}")));
            }
        }
        Ok(FHilbert { label: label.into(), basis })
    }

    /// Basis labelled 0..n-1.
    pub fn numbered(label: impl Into<String>, n: usize) -> Self {
        FHilbert { label: label.into(), basis: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// A linear subspace of `L(C^cols, C^rows)` in orthonormal form.
#[derive(Clone)]
pub struct OperatorSpace {
    rows: usize,
    cols: usize,
    /// Orthonormal vectorised basis, one column per element.
    q: Mat,
}

impl fmt::Debug for OperatorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorSpace({}x{}, dim {})", self.rows, self.cols, self.dim())
    }
}

impl OperatorSpace {
    pub fn zero(rows: usize, cols: usize) -> Self {
        OperatorSpace { rows, cols, q: linalg::zeros(rows * cols, 0) }
    }

    /// All of `L(C^cols, C^rows)`.
    pub fn full(rows: usize, cols: usize) -> Self {
        OperatorSpace { rows, cols, q: eye(rows * cols) }
    }

    pub fn scalars(n: usize) -> Self {
        Self::span(n, n, &[eye(n)]).expect("square")
    }

    pub fn diagonals(n: usize) -> Self {
        let gens: Vec<Mat> = (0..n).map(|i| linalg::unit(n, n, i, i)).collect();
        Self::span(n, n, &gens).expect("square")
    }

    /// Closed span of `gens`, all of shape `rows x cols`.
    pub fn span(rows: usize, cols: usize, gens: &[Mat]) -> Result<Self> {
        for g in gens {
            if g.nrows() != rows || g.ncols() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "generator {}x{} in span of {}x{}",
                    g.nrows(),
                    g.ncols(),
                    rows,
                    cols
                )));
            }
        }
        let mut v = linalg::zeros(rows * cols, gens.len());
        for (j, g) in gens.iter().enumerate() {
            v.column_mut(j).copy_from_slice(g.as_slice());
        }
        Ok(Self::from_vecs(rows, cols, &v))
    }

    /// Span of vectorised operators given as columns of `v`.
    pub fn from_vecs(rows: usize, cols: usize, v: &Mat) -> Self {
        assert_eq!(v.nrows(), rows * cols);
        let (q, _) = pivoted_gs(v, RANK_TOL);
        OperatorSpace { rows, cols, q }
    }

    /// Span of the columns of `m`, as a subspace of `L(C, C^rows)`.
    pub fn vectors(m: &Mat) -> Self {
        Self::from_vecs(m.nrows(), 1, m)
    }

    /// `{x ∈ self : f(x) = 0}` for a linear map `f`.
    pub fn kernel_of(&self, f: impl Fn(&Mat) -> Result<Mat>) -> Result<OperatorSpace> {
        let basis = self.basis();
        if basis.is_empty() {
            return Ok(Self::zero(self.rows, self.cols));
        }
        let cols: Vec<Mat> = basis
            .iter()
            .map(|x| {
                let y = f(x)?;
                Ok(Mat::from_column_slice(y.len(), 1, y.as_slice()))
            })
            .collect::<Result<_>>()?;
        let ns = linalg::nullspace(&linalg::hcat(&cols));
        let gens: Vec<Mat> = (0..ns.ncols())
            .map(|j| (0..basis.len()).fold(linalg::zeros(self.rows, self.cols), |acc, i| acc + &basis[i] * ns[(i, j)]))
            .collect();
        Self::span(self.rows, self.cols, &gens)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    /// Orthonormal vectorised basis.
    pub fn vecs(&self) -> &Mat {
        &self.q
    }

    pub fn element(&self, k: usize) -> Mat {
        unvec(self.q.column(k).as_slice(), self.rows, self.cols)
    }

    pub fn basis(&self) -> Vec<Mat> {
        (0..self.dim()).map(|k| self.element(k)).collect()
    }

    /// Hilbert-Schmidt coordinates of `x` in the basis.
    pub fn coords(&self, x: &Mat) -> Vec<C64> {
        let v = linalg::vec_of(x);
        (adj(&self.q) * v).iter().cloned().collect()
    }

    /// Orthogonal projection of `x` onto the space.
    pub fn project(&self, x: &Mat) -> Mat {
        let c = self.coords(x);
        let mut out = Mat::zeros(self.rows, self.cols);
        for (k, ck) in c.iter().enumerate() {
            if *ck != ZERO {
                out += self.element(k) * *ck;
            }
        }
        out
    }

    /// Relative distance of `x` from the space.
    pub fn residual_of(&self, x: &Mat) -> f64 {
        let nx = linalg::fro(x);
        if nx == 0.0 {
            return 0.0;
        }
        linalg::fro(&(x - self.project(x))) / nx
    }

    pub fn contains_op(&self, x: &Mat, tol: f64) -> bool {
        self.residual_of(x) <= tol
    }

    /// Largest residual of a basis element of `other` projected onto `self`.
    pub fn containment_residual(&self, other: &OperatorSpace) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::MAX;
        }
        if other.dim() == 0 {
            return 0.0;
        }
        let p = mul(&self.q, &mul(&adj(&self.q), &other.q));
        let r = &other.q - p;
        (0..r.ncols())
            .map(|j| r.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// `other ⊆ self` within `tol`.
    pub fn contains(&self, other: &OperatorSpace, tol: f64) -> bool {
        self.containment_residual(other) <= tol
    }

    /// Residual of the equality check: infinite on a dimension mismatch.
    pub fn equality_residual(&self, other: &OperatorSpace) -> f64 {
        if self.rows != other.rows || self.cols != other.cols || self.dim() != other.dim() {
            return f64::MAX;
        }
        self.containment_residual(other)
    }

    pub fn equals(&self, other: &OperatorSpace, tol: f64) -> bool {
        self.equality_residual(other) <= tol
    }

    fn check_product(&self, other: &OperatorSpace) -> Result<()> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// `[X Y]`.
    pub fn product(&self, other: &OperatorSpace) -> Result<OperatorSpace> {
        self.check_product(other)?;
        let xs = self.basis();
        let ys = other.basis();
        let mut gens = Vec::with_capacity(xs.len() * ys.len());
        for x in &xs {
            for y in &ys {
                gens.push(mul(x, y));
            }
        }
        OperatorSpace::span(self.rows, other.cols, &gens)
    }

    /// `[T X]` for a fixed operator `T`.
    pub fn left_mul(&self, t: &Mat) -> Result<OperatorSpace> {
        if t.ncols() != self.rows {
            return Err(Error::ShapeMismatch("left_mul".into()));
        }
        let gens: Vec<Mat> = self.basis().iter().map(|x| mul(t, x)).collect();
        OperatorSpace::span(t.nrows(), self.cols, &gens)
    }

    /// `[X T]` for a fixed operator `T`.
    pub fn right_mul(&self, t: &Mat) -> Result<OperatorSpace> {
        if t.nrows() != self.cols {
            return Err(Error::ShapeMismatch("right_mul".into()));
        }
        let gens: Vec<Mat> = self.basis().iter().map(|x| mul(x, t)).collect();
        OperatorSpace::span(self.rows, t.ncols(), &gens)
    }

    /// `X*`.
    pub fn adjoint(&self) -> OperatorSpace {
        let gens: Vec<Mat> = self.basis().iter().map(adj).collect();
        OperatorSpace::span(self.cols, self.rows, &gens).expect("adjoint shapes")
    }

    /// `X + Y`.
    pub fn sum(&self, other: &OperatorSpace) -> Result<OperatorSpace> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("sum".into()));
        }
        Ok(Self::from_vecs(self.rows, self.cols, &linalg::hcat(&[self.q.clone(), other.q.clone()])))
    }

    /// `X ∩ Y`.
    pub fn intersect(&self, other: &OperatorSpace) -> Result<OperatorSpace> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("intersect".into()));
        }
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(self.rows, self.cols));
        }
        let stacked = linalg::hcat(&[self.q.clone(), -other.q.clone()]);
        let ns = linalg::nullspace(&stacked);
        let top = ns.rows(0, self.dim()).into_owned();
        Ok(Self::from_vecs(self.rows, self.cols, &mul(&self.q, &top)))
    }

    /// The commutant `{T : T a = a T for all a ∈ X}`.
    pub fn commutant(&self) -> Result<OperatorSpace> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("commutant of non-square space".into()));
        }
        let n = self.rows;
        let id = eye(n);
        let blocks: Vec<Mat> = self
            .basis()
            .iter()
            .map(|a| linalg::kron(&a.transpose(), &id) - linalg::kron(&id, a))
            .collect();
        if blocks.is_empty() {
            return Ok(Self::full(n, n));
        }
        let ns = linalg::nullspace(&linalg::vcat(&blocks));
        Ok(Self::from_vecs(n, n, &ns))
    }

    /// `[X X] ⊆ X` and `X* = X`.
    pub fn is_cstar_algebra(&self, tol: f64) -> bool {
        self.cstar_residual() <= tol
    }

    /// The larger of the multiplicative and adjoint closure residuals.
    pub fn cstar_residual(&self) -> f64 {
        if self.rows != self.cols {
            return f64::MAX;
        }
        let sq = match self.product(self) {
            Ok(s) => s,
            Err(_) => return f64::MAX,
        };
        self.containment_residual(&sq).max(self.equality_residual(&self.adjoint()))
    }

    /// Commutativity residual `max ‖ab - ba‖` over basis pairs.
    pub fn commutator_residual(&self) -> f64 {
        let b = self.basis();
        let mut worst: f64 = 0.0;
        for (i, x) in b.iter().enumerate() {
            for y in &b[i + 1..] {
                worst = worst.max(linalg::fro(&(mul(x, y) - mul(y, x))));
            }
        }
        worst
    }

    /// Joint range `[X C^cols]` as an orthonormal column basis.
    pub fn range(&self) -> Mat {
        let gens: Vec<Mat> = self.basis();
        if gens.is_empty() {
            return linalg::zeros(self.rows, 0);
        }
        pivoted_gs(&linalg::hcat(&gens), RANK_TOL).0
    }

    /// `[X C^cols] = C^rows`.
    pub fn is_nondegenerate(&self) -> bool {
        self.range().ncols() == self.rows
    }
}
