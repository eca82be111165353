use crate::error::{Error, Result};

/// A square tridiagonal matrix stored by its three bands.
///
/// `sub[i]` is entry `(i + 1, i)` and `sup[i]` is entry `(i, i + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || sub.len() + 1 != n || sup.len() + 1 != n {
            return Err(Error::Domain(format!(
                "inconsistent tridiagonal bands: |sub| = {}, |diag| = {}, |sup| = {}",
                sub.len(),
                n,
                sup.len()
            )));
        }
        Ok(Self { sub, diag, sup })
    }

    /// Symmetric matrix from its diagonal and off-diagonal band.
    pub fn symmetric(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        Self::new(off.clone(), diag, off)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![1.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "dimension mismatch in tridiagonal product");
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.sub[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.sup[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Forward elimination without pivoting. Valid for symmetric positive
    /// definite input; any non-positive pivot is reported as degeneracy.
    pub fn factor(&self) -> Result<TridiagonalFactor<'_>> {
        let n = self.dim();
        let mut pivots = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n.saturating_sub(1));
        let mut prev = self.diag[0];
        if !(prev > 0.0) || !prev.is_finite() {
            return Err(Error::Degenerate { row: 0, pivot: prev });
        }
        pivots.push(prev);
        for i in 1..n {
            let m = self.sub[i - 1] / prev;
            let p = self.diag[i] - m * self.sup[i - 1];
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::Degenerate { row: i, pivot: p });
            }
            mult.push(m);
            pivots.push(p);
            prev = p;
        }
        Ok(TridiagonalFactor { matrix: self, pivots, mult })
    }
}

/// Stored elimination of a [`TridiagonalMatrix`], reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct TridiagonalFactor<'a> {
    matrix: &'a TridiagonalMatrix,
    pivots: Vec<f64>,
    mult: Vec<f64>,
}

impl TridiagonalFactor<'_> {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        assert_eq!(b.len(), n, "dimension mismatch in tridiagonal solve");
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] -= self.mult[i - 1] * y[i - 1];
        }
        let sup = self.matrix.sup();
        y[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = (y[i] - sup[i] * y[i + 1]) / self.pivots[i];
        }
        y
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }
}

/// Solves `M x = b` for symmetric positive definite tridiagonal `M` in O(J).
pub fn solve_tridiagonal(m: &TridiagonalMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != m.dim() {
        return Err(Error::Domain(format!(
            "right-hand side has length {} but matrix has dimension {}",
            b.len(),
            m.dim()
        )));
    }
    Ok(m.factor()?.solve(b))
}

/// `B^T diag(edge) B + diag(extra)`, where `B` maps `x` to its `n + 1`
/// successive differences with zero padding at both ends.
///
/// This is the Hessian shape of a log barrier on an ordered chain plus a
/// separable convex term. Factoring it through the edge weights avoids the
/// cancellation that plain elimination suffers when edges dwarf the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLaplacian {
    edge: Vec<f64>,
    extra: Vec<f64>,
}

impl PathLaplacian {
    /// `edge` has `n + 1` positive entries, `extra` has `n` nonnegative ones.
    pub fn new(edge: Vec<f64>, extra: Vec<f64>) -> Result<Self> {
        if extra.is_empty() || edge.len() != extra.len() + 1 {
            return Err(Error::Domain(format!(
                "path Laplacian needs n + 1 edges for n nodes, got {} and {}",
                edge.len(),
                extra.len()
            )));
        }
        if let Some(k) = edge.iter().position(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::Degenerate { row: k.min(extra.len() - 1), pivot: edge[k] });
        }
        if let Some(i) = extra.iter().position(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::Degenerate { row: i, pivot: extra[i] });
        }
        Ok(Self { edge, extra })
    }

    pub fn dim(&self) -> usize {
        self.extra.len()
    }

    pub fn edge(&self) -> &[f64] {
        &self.edge
    }

    pub fn extra(&self) -> &[f64] {
        &self.extra
    }

    pub fn to_tridiagonal(&self) -> TridiagonalMatrix {
        let n = self.dim();
        let diag = (0..n).map(|i| self.edge[i] + self.edge[i + 1] + self.extra[i]).collect();
        let off = self.edge[1..n].iter().map(|e| -e).collect();
        TridiagonalMatrix::symmetric(diag, off).expect("bands are consistent by construction")
    }

    /// `(B x)_k`: `x_0`, then `x_k - x_{k-1}`, then `-x_{n-1}`.
    pub fn differences(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut d = Vec::with_capacity(n + 1);
        d.push(x[0]);
        for k in 1..n {
            d.push(x[k] - x[k - 1]);
        }
        d.push(-x[n - 1]);
        d
    }

    /// Product computed from the given differences `dx = B x`.
    pub fn mul_with_differences(&self, x: &[f64], dx: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.edge[i] * dx[i] - self.edge[i + 1] * dx[i + 1] + self.extra[i] * x[i])
            .collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.mul_with_differences(x, &Self::differences(x))
    }

    /// `sum_k edge_k dx_k^2 + sum_i extra_i x_i^2`, a sum of nonnegative terms.
    pub fn quadratic_form_with_differences(&self, x: &[f64], dx: &[f64]) -> f64 {
        let a: f64 = self.edge.iter().zip(dx).map(|(e, d)| e * d * d).sum();
        let b: f64 = self.extra.iter().zip(x).map(|(e, v)| e * v * v).sum();
        a + b
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| 2.0 * (self.edge[i] + self.edge[i + 1]) + self.extra[i])
            .fold(0.0, f64::max)
    }

    /// Elimination tracking `c_i = p_i - edge_{i+1}`, which obeys
    /// `c_i = extra_i + edge_i c_{i-1} / (edge_i + c_{i-1})` with no subtraction.
    pub fn factor(&self) -> Result<PathFactor> {
        let n = self.dim();
        let mut c = Vec::with_capacity(n);
        let mut prev = self.edge[0] + self.extra[0];
        c.push(prev);
        for i in 1..n {
            let e = self.edge[i];
            prev = self.extra[i] + e * (prev / (e + prev));
            c.push(prev);
        }
        let pivots: Vec<f64> = (0..n).map(|i| c[i] + self.edge[i + 1]).collect();
        if let Some(i) = pivots.iter().position(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::Degenerate { row: i, pivot: pivots[i] });
        }
        Ok(PathFactor { edge: self.edge.clone(), c, pivots })
    }
}

/// Factorization of a [`PathLaplacian`].
#[derive(Debug, Clone)]
pub struct PathFactor {
    edge: Vec<f64>,
    c: Vec<f64>,
    pivots: Vec<f64>,
}

impl PathFactor {
    /// Returns `x` and its differences `B x`, the latter formed without
    /// subtracting neighbouring entries of `x`.
    pub fn solve_with_differences(&self, b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.pivots.len();
        assert_eq!(b.len(), n, "dimension mismatch in path Laplacian solve");
        let mut y = b.to_vec();
        for i in 1..n {
            y[i] += self.edge[i] * y[i - 1] / self.pivots[i - 1];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (y[i] + self.edge[i + 1] * x[i + 1]) / self.pivots[i];
        }
        let mut d = Vec::with_capacity(n + 1);
        d.push(x[0]);
        for k in 1..n {
            d.push((self.c[k - 1] * x[k] - y[k - 1]) / self.pivots[k - 1]);
        }
        d.push(-x[n - 1]);
        (x, d)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_with_differences(b).0
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }
}
