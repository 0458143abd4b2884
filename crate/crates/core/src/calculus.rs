//! Difference quotients, the discrete Laplacian and its weak form.

use crate::error::{Error, Result};
use crate::grid::{GridFunction, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A difference quotient `D_i^±u`, stored only where it is defined.
///
/// Forward quotients live on indices with `k_i < N_i`, backward ones on
/// `k_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilApplication {
    mesh: Mesh,
    axis: usize,
    direction: Direction,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl StencilApplication {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Value at a closed-grid index, `None` on the excluded boundary slice.
    pub fn get(&self, index: &[usize]) -> Option<f64> {
        if index.len() != self.shape.len() {
            return None;
        }
        let mut flat = 0;
        for (i, (&k, &n)) in index.iter().zip(&self.shape).enumerate() {
            let local = if i == self.axis && self.direction == Direction::Backward {
                k.checked_sub(1)?
            } else {
                k
            };
            if local >= n {
                return None;
            }
            flat = flat * n + local;
        }
        Some(self.values[flat])
    }

    /// Stored values in lexicographic order of the applicable point set.
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `D_i^+u(x) = (u(x+δ_i) - u(x))/h_i` or `D_i^-u(x) = (u(x) - u(x-δ_i))/h_i`.
pub fn diff(u: &GridFunction, axis: usize, direction: Direction) -> Result<StencilApplication> {
    let mesh = u.mesh();
    if axis >= mesh.dim() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: mesh.dim(),
        });
    }
    let mut shape: Vec<usize> = mesh.counts().iter().map(|n| n + 1).collect();
    shape[axis] -= 1;
    let h = mesh.spacing()[axis];
    let stride = mesh.stride(axis);
    let mut idx = vec![0usize; mesh.dim()];
    let mut values = Vec::with_capacity(shape.iter().product());
    for k in 0..mesh.len() {
        mesh.multi_index_into(k, &mut idx);
        let v = u.values();
        match direction {
            Direction::Forward if idx[axis] < mesh.counts()[axis] => {
                values.push((v[k + stride] - v[k]) / h)
            }
            Direction::Backward if idx[axis] > 0 => values.push((v[k] - v[k - stride]) / h),
            _ => {}
        }
    }
    Ok(StencilApplication {
        mesh: mesh.clone(),
        axis,
        direction,
        shape,
        values,
    })
}

/// `Δ_h u` at interior points; boundary entries are set to zero.
pub fn discrete_laplacian(u: &GridFunction) -> GridFunction {
    let mesh = u.mesh();
    let v = u.values();
    let inv_h2: Vec<f64> = mesh.spacing().iter().map(|h| 1.0 / (h * h)).collect();
    let mut out = vec![0.0; mesh.len()];
    for k in mesh.interior_indices() {
        let mut acc = 0.0;
        for (i, w) in inv_h2.iter().enumerate() {
            let s = mesh.stride(i);
            acc += (v[k + s] - 2.0 * v[k] + v[k - s]) * w;
        }
        out[k] = acc;
    }
    GridFunction::from_values(mesh, out).expect("Laplacian of finite data is finite")
}

/// Matrix-free `-Δ_h` with zero Dirichlet data acting on interior vectors.
///
/// Interior vectors list the `Π (N_i - 1)` interior values in lexicographic
/// order, the same order as [`Mesh::interior_indices`].
#[derive(Debug, Clone)]
pub struct InteriorLaplacian {
    dims: Vec<usize>,
    strides: Vec<usize>,
    inv_h2: Vec<f64>,
    len: usize,
}

impl InteriorLaplacian {
    pub fn new(mesh: &Mesh) -> Self {
        let dims: Vec<usize> = mesh.counts().iter().map(|n| n - 1).collect();
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Self {
            len: dims.iter().product(),
            dims,
            strides,
            inv_h2: mesh.spacing().iter().map(|h| 1.0 / (h * h)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn inv_h2(&self) -> &[f64] {
        &self.inv_h2
    }

    /// Diagonal entry `Σ 2/h_i²`.
    pub fn diagonal(&self) -> f64 {
        2.0 * self.inv_h2.iter().sum::<f64>()
    }

    /// `out = -Δ_h x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dims.len();
        let diag = self.diagonal();
        let mut idx = vec![0usize; n];
        for k in 0..self.len {
            let mut acc = diag * x[k];
            for i in 0..n {
                let s = self.strides[i];
                let w = self.inv_h2[i];
                if idx[i] > 0 {
                    acc -= w * x[k - s];
                }
                if idx[i] + 1 < self.dims[i] {
                    acc -= w * x[k + s];
                }
            }
            out[k] = acc;
            for i in (0..n).rev() {
                idx[i] += 1;
                if idx[i] < self.dims[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
    }
}

/// Both sides of the summation-by-parts identity for one test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakFormBalance {
    /// `Σ_i Σ D_i^+u D_i^+φ 𝒉`
    pub gradient_term: f64,
    /// `Σ_{Ω_h} f φ 𝒉`
    pub source_term: f64,
    /// Sum of absolute values of all contributions, a roundoff scale.
    pub scale: f64,
}

impl WeakFormBalance {
    pub fn residual(&self) -> f64 {
        self.gradient_term - self.source_term
    }

    pub fn relative_residual(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual().abs()
        } else {
            self.residual().abs() / self.scale
        }
    }
}

/// Evaluates the weak form over the support of `phi`.
///
/// `f` is read at interior points only. `phi` must vanish on the boundary.
pub fn weak_form_balance(
    u: &GridFunction,
    f: &GridFunction,
    phi: &GridFunction,
) -> Result<WeakFormBalance> {
    u.same_mesh(f)?;
    u.same_mesh(phi)?;
    if !phi.vanishes_on_boundary() {
        return Err(Error::InvalidParameter(
            "test function must vanish on the boundary".into(),
        ));
    }
    let mesh = u.mesh();
    let cell = mesh.cell_volume();
    let (uv, fv, pv) = (u.values(), f.values(), phi.values());
    let mut grad = 0.0;
    let mut src = 0.0;
    let mut scale = 0.0;
    for (k, &p) in pv.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        // nonzero entries are interior, so both neighbours exist
        for i in 0..mesh.dim() {
            let s = mesh.stride(i);
            let h = mesh.spacing()[i];
            let t = (uv[k + s] - uv[k]) / h * ((pv[k + s] - p) / h) * cell;
            grad += t;
            scale += t.abs();
            if pv[k - s] == 0.0 {
                let t = (uv[k] - uv[k - s]) / h * (p / h) * cell;
                grad += t;
                scale += t.abs();
            }
        }
        let t = fv[k] * p * cell;
        src += t;
        scale += t.abs();
    }
    Ok(WeakFormBalance {
        gradient_term: grad,
        source_term: src,
        scale,
    })
}

/// `Σ_i Σ D_i^+u D_i^+φ 𝒉 - Σ_{Ω_h} f φ 𝒉`.
pub fn weak_form_residual(u: &GridFunction, f: &GridFunction, phi: &GridFunction) -> Result<f64> {
    Ok(weak_form_balance(u, f, phi)?.residual())
}

/// Weak form against the point mass at interior flat index `k`.
pub fn point_mass_balance(u: &GridFunction, f: &GridFunction, k: usize) -> Result<WeakFormBalance> {
    u.same_mesh(f)?;
    let mesh = u.mesh();
    if k >= mesh.len() || !mesh.is_interior(&mesh.multi_index(k)) {
        return Err(Error::InvalidParameter(format!(
            "flat index {k} is not an interior point"
        )));
    }
    let cell = mesh.cell_volume();
    let uv = u.values();
    let mut grad = 0.0;
    let mut scale = 0.0;
    for i in 0..mesh.dim() {
        let s = mesh.stride(i);
        let h = mesh.spacing()[i];
        let right = -(uv[k + s] - uv[k]) / h / h * cell;
        let left = (uv[k] - uv[k - s]) / h / h * cell;
        grad += right + left;
        scale += right.abs() + left.abs();
    }
    let src = f.values()[k] * cell;
    Ok(WeakFormBalance {
        gradient_term: grad,
        source_term: src,
        scale: scale + src.abs(),
    })
}

/// Unit point mass at a closed-grid index.
pub fn point_mass(mesh: &Mesh, index: &[usize]) -> Result<GridFunction> {
    let k = mesh.flat_index(index)?;
    let mut v = vec![0.0; mesh.len()];
    v[k] = 1.0;
    GridFunction::from_values(mesh, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoxDomain;

    fn mesh(counts: &[usize]) -> Mesh {
        Mesh::new(BoxDomain::unit(counts.len()).unwrap(), counts.to_vec()).unwrap()
    }

    #[test]
    fn constant_has_zero_differences() {
        let m = mesh(&[3, 4]);
        let u = GridFunction::from_fn(&m, |_| 2.5).unwrap();
        for axis in 0..2 {
            for dir in [Direction::Forward, Direction::Backward] {
                assert!(diff(&u, axis, dir)
                    .unwrap()
                    .values()
                    .iter()
                    .all(|&v| v == 0.0));
            }
        }
        assert_eq!(discrete_laplacian(&u).max_abs(), 0.0);
    }

    #[test]
    fn hat_forward_differences() {
        let m = mesh(&[2]);
        let u = GridFunction::from_values(&m, vec![0.0, 1.0, 0.0]).unwrap();
        let d = diff(&u, 0, Direction::Forward).unwrap();
        assert_eq!(d.values(), &[2.0, -2.0]);
        assert_eq!(d.get(&[2]), None);
        let b = diff(&u, 0, Direction::Backward).unwrap();
        assert_eq!(b.get(&[0]), None);
        assert_eq!(b.get(&[2]), Some(-2.0));
    }

    #[test]
    fn linear_has_unit_slope() {
        let m = mesh(&[7]);
        let u = GridFunction::from_fn(&m, |x| x[0]).unwrap();
        for v in diff(&u, 0, Direction::Forward).unwrap().values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn center_point_mass_laplacian() {
        let m = mesh(&[2, 2]);
        let u = point_mass(&m, &[1, 1]).unwrap();
        assert_eq!(-discrete_laplacian(&u).get(&[1, 1]).unwrap(), 16.0);
    }

    #[test]
    fn quadratic_second_difference_is_exact() {
        let m = mesh(&[9]);
        let u = GridFunction::from_fn(&m, |x| x[0] * x[0]).unwrap();
        let l = discrete_laplacian(&u);
        for k in 1..9 {
            assert!((l.get(&[k]).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_operator_matches_laplacian() {
        let m = Mesh::new(
            BoxDomain::new(vec![0.0, -1.0, 0.5], vec![1.0, 1.0, 2.0]).unwrap(),
            vec![4, 5, 3],
        )
        .unwrap();
        let x: Vec<f64> = (0..m.interior_len())
            .map(|k| ((k * 37 % 11) as f64).sin())
            .collect();
        let u = GridFunction::from_interior(&m, &x).unwrap();
        let lap = discrete_laplacian(&u).interior_values();
        let op = InteriorLaplacian::new(&m);
        let mut out = vec![0.0; x.len()];
        op.apply(&x, &mut out);
        for (a, b) in out.iter().zip(lap) {
            assert!((a + b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn zero_data_weak_form() {
        let m = mesh(&[4, 4]);
        let z = GridFunction::zeros(&m);
        let phi = point_mass(&m, &[2, 1]).unwrap();
        assert_eq!(weak_form_residual(&z, &z, &phi).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_source_gives_minus_cell_volume() {
        let m = mesh(&[5, 3]);
        let u = GridFunction::from_fn(&m, |x| (3.0 * x[0]).sin() + x[1] * x[1]).unwrap();
        let lap = discrete_laplacian(&u);
        let idx = [2, 1];
        let k = m.flat_index(&idx).unwrap();
        let mut f: Vec<f64> = lap.values().iter().map(|v| -v).collect();
        f[k] += 1.0;
        let f = GridFunction::from_values(&m, f).unwrap();
        let phi = point_mass(&m, &idx).unwrap();
        let r = weak_form_residual(&u, &f, &phi).unwrap();
        assert!((r + m.cell_volume()).abs() < 1e-12);
        let pm = point_mass_balance(&u, &f, k).unwrap();
        assert!((pm.residual() - r).abs() < 1e-12);
    }

    #[test]
    fn rejects_boundary_test_function() {
        let m = mesh(&[3]);
        let u = GridFunction::zeros(&m);
        let phi = point_mass(&m, &[0]).unwrap();
        assert!(weak_form_residual(&u, &u, &phi).is_err());
    }

    #[test]
    fn laplacian_consistency_order() {
        let pi = std::f64::consts::PI;
        let mut errs = Vec::new();
        for n in [8, 16, 32, 64] {
            let m = mesh(&[n, n]);
            let u = GridFunction::from_fn(&m, |x| (pi * x[0]).sin() * (pi * x[1]).sin()).unwrap();
            let l = discrete_laplacian(&u);
            let mut err: f64 = 0.0;
            for k in m.interior_indices() {
                let x = m.coordinate(&m.multi_index(k));
                let exact = -2.0 * pi * pi * (pi * x[0]).sin() * (pi * x[1]).sin();
                err = err.max((l.at(k) - exact).abs());
            }
            errs.push(err);
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() >= 1.9, "{errs:?}");
        }
    }
}
