//! Sparse assembly, conjugate gradients and a banded LU for interior systems.

use crate::calculus::InteriorLaplacian;
use crate::error::{Error, Result};
use crate::grid::Mesh;

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// `-Δ_h + diag(shift)` on the interior unknowns.
    pub fn shifted_laplacian(mesh: &Mesh, shift: Option<&[f64]>) -> Self {
        let op = InteriorLaplacian::new(mesh);
        let n = op.len();
        let dims = op.dims();
        let strides = op.strides();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut idx = vec![0usize; dims.len()];
        row_ptr.push(0);
        for k in 0..n {
            let mut entries: Vec<(usize, f64)> = Vec::with_capacity(2 * dims.len() + 1);
            entries.push((k, op.diagonal() + shift.map_or(0.0, |s| s[k])));
            for i in 0..dims.len() {
                if idx[i] > 0 {
                    entries.push((k - strides[i], -op.inv_h2()[i]));
                }
                if idx[i] + 1 < dims[i] {
                    entries.push((k + strides[i], -op.inv_h2()[i]));
                }
            }
            entries.sort_by_key(|e| e.0);
            for (c, v) in entries {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
            for i in (0..dims.len()).rev() {
                idx[i] += 1;
                if idx[i] < dims[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for j in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[j] * x[self.cols[j]];
            }
            out[r] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .find(|&j| self.cols[j] == r)
                    .map_or(0.0, |j| self.vals[j])
            })
            .collect()
    }

    /// Row `r` as `(column, value)` pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |j| (self.cols[j], self.vals[j]))
    }

    /// Largest `|r - c|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|r| self.row(r).map(move |(c, _)| r.abs_diff(c)))
            .max()
            .unwrap_or(0)
    }
}

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned CG for a symmetric positive definite operator.
///
/// Stops when `‖b - Ax‖₂ <= rel_tol ‖b‖₂`.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x0: Option<&[f64]>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<CgOutcome> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    let mut x = x0.map_or_else(|| vec![0.0; n], |v| v.to_vec());
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        let rn = dot(&r, &r).sqrt();
        if rn <= rel_tol * bnorm {
            return Ok(CgOutcome {
                x,
                iterations: it,
                relative_residual: rn / bnorm,
            });
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotConverged {
                what: "conjugate gradient (operator not positive definite)".into(),
                iterations: it,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        // recompute the true residual now and then to avoid drift
        if it % 50 == 49 {
            apply(&x, &mut ax);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rn = dot(&r, &r).sqrt();
    if rn <= rel_tol * bnorm {
        return Ok(CgOutcome {
            x,
            iterations: max_iter,
            relative_residual: rn / bnorm,
        });
    }
    Err(Error::NotConverged {
        what: "conjugate gradient".into(),
        iterations: max_iter,
    })
}

/// LU factorization with partial pivoting of a banded matrix.
///
/// Row `i` stores columns `i - kl ..= i + kl + ku`, leaving room for the
/// fill-in created by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    fn slot(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let bw = a.bandwidth();
        let (kl, ku) = (bw, bw);
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
            pivots: vec![0; n],
        };
        for r in 0..n {
            for (c, v) in a.row(r) {
                let s = lu.slot(r, c);
                lu.data[s] = v;
            }
        }
        let scale = lu.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.data[lu.slot(k, k)].abs();
            for r in k + 1..=last_row {
                let v = lu.data[lu.slot(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= f64::EPSILON * scale * 1e-3 {
                return Err(Error::NotConverged {
                    what: format!("banded LU (singular pivot at column {k})"),
                    iterations: k,
                });
            }
            lu.pivots[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (lu.slot(k, j), lu.slot(p, j));
                    lu.data.swap(a, b);
                }
            }
            let pivot = lu.data[lu.slot(k, k)];
            for r in k + 1..=last_row {
                let sr = lu.slot(r, k);
                let l = lu.data[sr] / pivot;
                lu.data[sr] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=last_col {
                    let kj = lu.data[lu.slot(k, j)];
                    let s = lu.slot(r, j);
                    lu.data[s] -= l * kj;
                }
            }
        }
        Ok(lu)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for r in k + 1..=(k + self.kl).min(n.saturating_sub(1)) {
                x[r] -= self.data[self.slot(r, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in k + 1..=(k + self.kl + self.ku).min(n - 1) {
                acc -= self.data[self.slot(k, j)] * x[j];
            }
            x[k] = acc / self.data[self.slot(k, k)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoxDomain;

    #[test]
    fn csr_matches_matrix_free() {
        let m = Mesh::new(BoxDomain::unit(2).unwrap(), vec![5, 4]).unwrap();
        let a = CsrMatrix::shifted_laplacian(&m, None);
        let op = InteriorLaplacian::new(&m);
        let x: Vec<f64> = (0..a.dim()).map(|k| (k as f64 * 0.7).cos()).collect();
        let (mut y1, mut y2) = (vec![0.0; a.dim()], vec![0.0; a.dim()]);
        a.matvec(&x, &mut y1);
        op.apply(&x, &mut y2);
        // same terms, different summation order
        for (a, b) in y1.iter().zip(&y2) {
            assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
        }
        assert_eq!(a.bandwidth(), 3);
    }

    #[test]
    fn cg_and_lu_agree() {
        let m = Mesh::new(BoxDomain::unit(2).unwrap(), vec![9, 7]).unwrap();
        let a = CsrMatrix::shifted_laplacian(&m, None);
        let b: Vec<f64> = (0..a.dim()).map(|k| 1.0 + (k % 3) as f64).collect();
        let cg = conjugate_gradient(|x, y| a.matvec(x, y), &a.diagonal(), &b, None, 1e-13, 1000)
            .unwrap();
        let lu = BandedLu::factor(&a).unwrap().solve(&b);
        for (p, q) in cg.x.iter().zip(&lu) {
            assert!((p - q).abs() < 1e-10 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn lu_handles_indefinite_shift() {
        let m = Mesh::new(BoxDomain::unit(2).unwrap(), vec![8, 8]).unwrap();
        let shift = vec![-60.0; m.interior_len()];
        let a = CsrMatrix::shifted_laplacian(&m, Some(&shift));
        let x: Vec<f64> = (0..a.dim()).map(|k| (k as f64).sin()).collect();
        let mut b = vec![0.0; a.dim()];
        a.matvec(&x, &mut b);
        let y = BandedLu::factor(&a).unwrap().solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-9);
        }
    }
}
