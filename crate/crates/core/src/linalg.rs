//! Dense complex helpers shared by every other module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Relative rank threshold used for spans, Gram quotients and null spaces.
pub const RANK_TOL: f64 = 1e-9;
/// Relative residual above which an overdetermined solve is rejected.
pub const SOLVE_TOL: f64 = 1e-8;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(r: usize, c: usize) -> Mat {
    Mat::zeros(r, c)
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// Matrix unit E_{ij}.
pub fn unit(r: usize, c: usize, i: usize, j: usize) -> Mat {
    let mut m = zeros(r, c);
    m[(i, j)] = ONE;
    m
}

pub fn diag(d: &[C64]) -> Mat {
    Mat::from_diagonal(&DVector::from_column_slice(d))
}

pub fn diag_re(d: &[f64]) -> Mat {
    Mat::from_fn(d.len(), d.len(), |i, j| if i == j { c(d[i]) } else { ZERO })
}

fn split(a: &Mat) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

/// Complex product routed through real gemm for anything non-tiny.
pub fn mul(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.ncols(), b.nrows(), "mul: shape mismatch");
    let work = a.nrows() * a.ncols() * b.ncols();
    if work < 32 * 32 * 32 {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    // Gauss: three real products
    let t1 = &ar * &br;
    let t2 = &ai * &bi;
    let t3 = (&ar + &ai) * (&br + &bi);
    Mat::from_fn(a.nrows(), b.ncols(), |i, j| {
        C64::new(t1[(i, j)] - t2[(i, j)], t3[(i, j)] - t1[(i, j)] - t2[(i, j)])
    })
}

pub fn mul3(a: &Mat, b: &Mat, d: &Mat) -> Mat {
    if a.nrows() * b.ncols() <= b.nrows() * d.ncols() {
        mul(&mul(a, b), d)
    } else {
        mul(a, &mul(b, d))
    }
}

pub fn adj(a: &Mat) -> Mat {
    a.adjoint()
}

pub fn fro(a: &Mat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt inner product <a, b> = tr(a* b).
pub fn hs(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Column-major vectorisation.
pub fn vec_of(a: &Mat) -> DVector<C64> {
    DVector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Mat {
    Mat::from_column_slice(rows, cols, v)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Horizontal concatenation.
pub fn hcat(blocks: &[Mat]) -> Mat {
    if blocks.is_empty() {
        return zeros(0, 0);
    }
    let rows = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hcat: row mismatch");
        out.view_mut((0, off), (rows, b.ncols())).copy_from(b);
        off += b.ncols();
    }
    out
}

/// Vertical concatenation.
pub fn vcat(blocks: &[Mat]) -> Mat {
    if blocks.is_empty() {
        return zeros(0, 0);
    }
    let cols = blocks[0].ncols();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut off = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vcat: column mismatch");
        out.view_mut((off, 0), (b.nrows(), cols)).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Block diagonal matrix.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r, c0), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c0 += b.ncols();
    }
    out
}

fn col_norm(m: &Mat, j: usize) -> f64 {
    m.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Pivoted modified Gram-Schmidt on the columns of `cols`.
///
/// Returns an orthonormal basis of the column span (as columns) and the
/// pivot indices in the order they were accepted. The largest residual
/// is taken first, ties go to the lowest index, and the sweep stops once
/// every residual is below `rel_tol * max(largest column norm, 1)`.
pub fn pivoted_gs(cols: &Mat, rel_tol: f64) -> (Mat, Vec<usize>) {
    let n = cols.nrows();
    let m = cols.ncols();
    let mut res = cols.clone();
    let scale = (0..m).map(|j| col_norm(cols, j)).fold(0.0, f64::max).max(1.0);
    let thresh = rel_tol * scale;
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let mut pivots = Vec::new();
    let mut norms: Vec<f64> = (0..m).map(|j| col_norm(&res, j)).collect();
    let mut used = vec![false; m];
    loop {
        if basis.len() >= n {
            break;
        }
        let mut best = None;
        let mut best_norm = thresh;
        for j in 0..m {
            if !used[j] && norms[j] > best_norm {
                best_norm = norms[j];
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        used[j] = true;
        let mut q: DVector<C64> = res.column(j).into_owned();
        // second pass against the accepted vectors
        for b in &basis {
            let p = b.dotc(&q);
            q.axpy(-p, b, ONE);
        }
        let nq = q.norm();
        if nq <= thresh {
            norms[j] = 0.0;
            continue;
        }
        q /= c(nq);
        // remove q from every remaining residual
        let proj = q.adjoint() * &res;
        for k in 0..m {
            if used[k] {
                continue;
            }
            let p = proj[(0, k)];
            if p != ZERO {
                let mut col = res.column_mut(k);
                col.axpy(-p, &q, ONE);
            }
            norms[k] = col_norm(&res, k);
        }
        basis.push(q);
        pivots.push(j);
    }
    let mut out = zeros(n, basis.len());
    for (k, b) in basis.iter().enumerate() {
        out.set_column(k, b);
    }
    (out, pivots)
}

/// Extends an orthonormal set `q` (columns) to an orthonormal basis of C^n,
/// returning only the new vectors. Candidates are the standard basis vectors.
pub fn complement(q: &Mat, n: usize) -> Mat {
    let k = q.ncols();
    if k >= n {
        return zeros(n, 0);
    }
    let mut basis: Vec<DVector<C64>> = (0..k).map(|j| q.column(j).into_owned()).collect();
    let mut added: Vec<DVector<C64>> = Vec::new();
    let mut cand: Vec<DVector<C64>> = (0..n)
        .map(|i| {
            let mut e = DVector::from_element(n, ZERO);
            e[i] = ONE;
            for b in &basis {
                let p = b.dotc(&e);
                e.axpy(-p, b, ONE);
            }
            e
        })
        .collect();
    while basis.len() < n {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (i, v) in cand.iter().enumerate() {
            let nv = v.norm();
            if nv > best_norm + 1e-14 {
                best_norm = nv;
                best = i;
            }
        }
        let mut q = cand[best].clone();
        for b in &basis {
            let p = b.dotc(&q);
            q.axpy(-p, b, ONE);
        }
        let nq = q.norm();
        if nq < 1e-12 {
            break;
        }
        q /= c(nq);
        for v in cand.iter_mut() {
            let p = q.dotc(v);
            v.axpy(-p, &q, ONE);
        }
        basis.push(q.clone());
        added.push(q);
    }
    let mut out = zeros(n, added.len());
    for (j, v) in added.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

/// Orthonormal basis (columns) of the null space of `m`.
pub fn nullspace(m: &Mat) -> Mat {
    let n = m.ncols();
    if m.nrows() == 0 {
        return eye(n);
    }
    let (row_basis, _) = pivoted_gs(&adj(m), RANK_TOL);
    complement(&row_basis, n)
}

pub fn rank(m: &Mat) -> usize {
    pivoted_gs(m, RANK_TOL).0.ncols()
}

/// Pivoted Cholesky of a Hermitian positive semidefinite matrix.
///
/// Returns `L` (n x r) with `g ≈ L L*`; stops when the largest remaining
/// diagonal entry drops below `rel_tol` times the largest initial one.
pub fn pivoted_cholesky(g: &Mat, rel_tol: f64) -> Mat {
    let n = g.nrows();
    let mut d: Vec<f64> = (0..n).map(|i| g[(i, i)].re).collect();
    let dmax = d.iter().cloned().fold(0.0, f64::max);
    let mut cols: Vec<Vec<C64>> = Vec::new();
    if dmax <= 0.0 {
        return zeros(n, 0);
    }
    let thresh = rel_tol * dmax;
    let mut used = vec![false; n];
    loop {
        let mut p = None;
        let mut best = thresh;
        for i in 0..n {
            if !used[i] && d[i] > best {
                best = d[i];
                p = Some(i);
            }
        }
        let Some(p) = p else { break };
        used[p] = true;
        let piv = d[p].sqrt();
        let mut col: Vec<C64> = (0..n).map(|i| g[(i, p)]).collect();
        for prev in &cols {
            let lp = prev[p].conj();
            if lp != ZERO {
                for i in 0..n {
                    col[i] -= prev[i] * lp;
                }
            }
        }
        for v in col.iter_mut() {
            *v /= piv;
        }
        for i in 0..n {
            if !used[i] {
                d[i] -= col[i].norm_sqr();
            } else {
                d[i] = 0.0;
            }
        }
        cols.push(col);
        if cols.len() == n {
            break;
        }
    }
    let mut l = zeros(n, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            l[(i, j)] = col[i];
        }
    }
    l
}

/// Solves `x * a = b` for `x` when the columns of `a` span the domain.
///
/// Columns that are numerically zero on both sides are dropped first.
/// The relative residual must stay below [`SOLVE_TOL`].
pub fn solve_on_span(a: &Mat, b: &Mat, what: &str) -> Result<Mat> {
    assert_eq!(a.ncols(), b.ncols(), "solve_on_span: column mismatch");
    let scale_a = (0..a.ncols()).map(|j| col_norm(a, j)).fold(0.0, f64::max).max(1e-300);
    let scale_b = (0..b.ncols()).map(|j| col_norm(b, j)).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..a.ncols())
        .filter(|&j| col_norm(a, j) > 1e-13 * scale_a || col_norm(b, j) > 1e-13 * scale_b.max(1e-300))
        .collect();
    let a = a.select_columns(&keep);
    let b = b.select_columns(&keep);
    let n = a.nrows();
    if n == 0 {
        return Ok(zeros(b.nrows(), 0));
    }
    let gram = mul(&a, &adj(&a));
    let chol = gram.clone().cholesky().ok_or_else(|| Error::InconsistentSystem {
        what: what.to_string(),
        residual: f64::MAX,
    })?;
    // x = b a* (a a*)^{-1}  <=>  (a a*) x* = a b*
    let rhs = mul(&a, &adj(&b));
    let xs = chol.solve(&rhs);
    let x = adj(&xs);
    let resid = fro(&(mul(&x, &a) - &b)) / fro(&b).max(fro(&a)).max(1e-300);
    if !resid.is_finite() || resid > SOLVE_TOL {
        return Err(Error::InconsistentSystem { what: what.to_string(), residual: resid });
    }
    Ok(x)
}

/// Least-squares solution of `a x = b` with a residual report.
pub fn lstsq(a: &Mat, b: &Mat) -> (Mat, f64) {
    let (q, piv) = pivoted_gs(a, RANK_TOL);
    let sub = a.select_columns(&piv);
    // sub = q r with r = q* sub upper-triangular up to pivot order
    let r = mul(&adj(&q), &sub);
    let qb = mul(&adj(&q), b);
    let rinv = r.clone().try_inverse().unwrap_or_else(|| r.clone().pseudo_inverse(1e-12).unwrap());
    let ysub = mul(&rinv, &qb);
    let mut x = zeros(a.ncols(), b.ncols());
    for (k, &p) in piv.iter().enumerate() {
        x.set_row(p, &ysub.row(k));
    }
    let resid = fro(&(mul(a, &x) - b)) / fro(b).max(1e-300);
    (x, resid)
}

/// Operator norm (largest singular value).
pub fn opnorm(a: &Mat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let g = if a.nrows() <= a.ncols() { mul(a, &adj(a)) } else { mul(&adj(a), a) };
    let g = (&g + adj(&g)) * c(0.5);
    let ev = g.symmetric_eigenvalues();
    ev.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
}

/// Hermitian eigen-decomposition (ascending eigenvalues are not guaranteed).
pub fn herm_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let h = (a + adj(a)) * c(0.5);
    let e = h.symmetric_eigen();
    (e.eigenvalues.iter().cloned().collect(), e.eigenvectors)
}

/// f(a) for Hermitian `a` via its spectral decomposition.
pub fn herm_fn(a: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let (ev, u) = herm_eigen(a);
    let d: Vec<C64> = ev.iter().map(|&l| c(f(l))).collect();
    mul3(&u, &diag(&d), &adj(&u))
}

/// ||u* u - 1|| and ||u u* - 1|| in operator norm, the larger of the two.
pub fn unitarity_defect(u: &Mat) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::MAX;
    }
    let n = u.nrows();
    let a = opnorm(&(mul(&adj(u), u) - eye(n)));
    let b = opnorm(&(mul(u, &adj(u)) - eye(n)));
    a.max(b)
}

pub fn random_mat(rng: &mut impl rand::Rng, r: usize, c0: usize) -> Mat {
    Mat::from_fn(r, c0, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Random unitary from the QR factor of a random matrix.
pub fn random_unitary(rng: &mut impl rand::Rng, n: usize) -> Mat {
    let m = random_mat(rng, n, n);
    let (q, _) = pivoted_gs(&m, 1e-12);
    if q.ncols() == n {
        q
    } else {
        eye(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gauss_product_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_mat(&mut rng, 40, 50);
        let b = random_mat(&mut rng, 50, 45);
        assert!(fro(&(mul(&a, &b) - &a * &b)) < 1e-10);
    }

    #[test]
    fn gs_rank_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_mat(&mut rng, 9, 4);
        let b = random_mat(&mut rng, 4, 30);
        let m = mul(&a, &b);
        let (q, piv) = pivoted_gs(&m, RANK_TOL);
        assert_eq!(q.ncols(), 4);
        assert_eq!(piv.len(), 4);
        assert!(fro(&(mul(&adj(&q), &q) - eye(4))) < 1e-12);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = mul(&random_mat(&mut rng, 5, 3), &random_mat(&mut rng, 3, 7));
        let n = nullspace(&m);
        assert_eq!(n.ncols(), 4);
        assert!(fro(&mul(&m, &n)) < 1e-10);
    }

    #[test]
    fn cholesky_reproduces_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = random_mat(&mut rng, 8, 3);
        let g = mul(&b, &adj(&b));
        let l = pivoted_cholesky(&g, RANK_TOL);
        assert_eq!(l.ncols(), 3);
        assert!(fro(&(mul(&l, &adj(&l)) - &g)) < 1e-10);
    }

    #[test]
    fn solve_on_span_detects_inconsistency() {
        let a = hcat(&[eye(2), eye(2)]);
        let b = hcat(&[eye(2), eye(2) * c(2.0)]);
        assert!(solve_on_span(&a, &b, "t").is_err());
        let ok = solve_on_span(&a, &hcat(&[eye(2) * c(3.0), eye(2) * c(3.0)]), "t").unwrap();
        assert!(fro(&(ok - eye(2) * c(3.0))) < 1e-12);
    }

    #[test]
    fn opnorm_of_diag() {
        assert!((opnorm(&diag_re(&[1.0, -3.0, 2.0])) - 3.0).abs() < 1e-12);
    }
}
