//! Box domains, uniform meshes and grid functions.
//!
//! Grid points are stored in row-major lexicographic order with the last
//! axis varying fastest. Axes are numbered from zero.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An n-dimensional open box `(a_1, b_1) x ... x (a_n, b_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidDomain(format!(
                "{} lower corners but {} upper corners",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (a, b)) in lower.iter().zip(&upper).enumerate() {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(Error::InvalidDomain(format!(
                    "axis {i}: need a < b, got ({a}, {b})"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The unit cube `(0,1)^n`.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n], vec![1.0; n])
    }

    /// The interval `(-l, l)`.
    pub fn symmetric_interval(l: f64) -> Result<Self> {
        Self::new(vec![-l], vec![l])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    /// Lebesgue measure `|Ω|`.
    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i)).product()
    }

    /// Euclidean diagonal `sqrt(Σ (b_i - a_i)^2)`.
    pub fn diagonal(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.width(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// First Dirichlet eigenvalue of the continuous Laplacian, `Σ π²/(b_i - a_i)²`.
    pub fn first_eigenvalue(&self) -> f64 {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        (0..self.dim()).map(|i| pi2 / self.width(i).powi(2)).sum()
    }
}

/// A uniform grid on a [`BoxDomain`] with `N_i` subintervals along axis `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    domain: BoxDomain,
    counts: Vec<usize>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    len: usize,
}

impl Mesh {
    pub fn new(domain: BoxDomain, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != domain.dim() {
            return Err(Error::InvalidMesh(format!(
                "{} counts for a {}-dimensional domain",
                counts.len(),
                domain.dim()
            )));
        }
        if let Some(i) = counts.iter().position(|&c| c < 2) {
            return Err(Error::InvalidMesh(format!(
                "axis {i} has N = {} subintervals, at least 2 are required",
                counts[i]
            )));
        }
        let spacing = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| domain.width(i) / c as f64)
            .collect();
        let mut strides = vec![1usize; counts.len()];
        for i in (0..counts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (counts[i + 1] + 1);
        }
        let len = counts.iter().map(|c| c + 1).product();
        Ok(Self {
            domain,
            counts,
            spacing,
            strides,
            len,
        })
    }

    /// Same number of subintervals along every axis.
    pub fn uniform(domain: BoxDomain, n: usize) -> Result<Self> {
        let dim = domain.dim();
        Self::new(domain, vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    /// Cell volume `𝒉 = Π h_i`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Number of closed-grid points `Π (N_i + 1)`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of interior points `Π (N_i - 1)`.
    pub fn interior_len(&self) -> usize {
        self.counts.iter().map(|c| c - 1).product()
    }

    /// Flat-index step along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        self.check_index(index)?;
        Ok(self.flat_unchecked(index))
    }

    pub(crate) fn flat_unchecked(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        self.multi_index_into(flat, &mut out);
        out
    }

    pub fn multi_index_into(&self, mut flat: usize, out: &mut [usize]) {
        for (i, s) in self.strides.iter().enumerate() {
            out[i] = flat / s;
            flat %= s;
        }
    }

    fn check_index(&self, index: &[usize]) -> Result<()> {
        if index.len() != self.dim() || index.iter().zip(&self.counts).any(|(k, n)| k > n) {
            return Err(Error::IndexOutOfRange {
                index: index.to_vec(),
                counts: self.counts.clone(),
            });
        }
        Ok(())
    }

    /// Coordinate `a_i + k h_i`; the last node is pinned to `b_i` exactly.
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        if k == self.counts[axis] {
            self.domain.upper[axis]
        } else {
            self.domain.lower[axis] + k as f64 * self.spacing[axis]
        }
    }

    pub fn coordinate(&self, index: &[usize]) -> Vec<f64> {
        index
            .iter()
            .enumerate()
            .map(|(i, &k)| self.coord(i, k))
            .collect()
    }

    pub fn is_interior(&self, index: &[usize]) -> bool {
        index
            .iter()
            .zip(&self.counts)
            .all(|(&k, &n)| k > 0 && k < n)
    }

    pub fn classify(&self, index: &[usize]) -> Result<PointClass> {
        self.check_index(index)?;
        let mut tags = Vec::new();
        for (i, (&k, &n)) in index.iter().zip(&self.counts).enumerate() {
            if k == 0 {
                tags.push(PointTag::BackwardBoundary(i));
            }
            if k == n {
                tags.push(PointTag::ForwardBoundary(i));
            }
        }
        if tags.is_empty() {
            tags.push(PointTag::Interior);
        }
        Ok(PointClass { tags })
    }

    /// `min_i min(x_i - a_i, b_i - x_i)`; zero on the boundary.
    pub fn dist_to_boundary(&self, index: &[usize]) -> Result<f64> {
        self.check_index(index)?;
        Ok(self.dist_unchecked(index))
    }

    pub(crate) fn dist_unchecked(&self, index: &[usize]) -> f64 {
        index
            .iter()
            .enumerate()
            .map(|(i, &k)| (k.min(self.counts[i] - k)) as f64 * self.spacing[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Flat indices of interior points in lexicographic order.
    pub fn interior_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.interior_len());
        let mut idx = vec![0usize; self.dim()];
        for flat in 0..self.len {
            self.multi_index_into(flat, &mut idx);
            if self.is_interior(&idx) {
                out.push(flat);
            }
        }
        out
    }

    pub fn boundary_len(&self) -> usize {
        self.len - self.interior_len()
    }

    /// Mesh of the sub-box spanned by closed-grid indices `lo..=hi`.
    pub fn sub_mesh(&self, lo: &[usize], hi: &[usize]) -> Result<Mesh> {
        self.check_index(lo)?;
        self.check_index(hi)?;
        let lower = (0..self.dim()).map(|i| self.coord(i, lo[i])).collect();
        let upper = (0..self.dim()).map(|i| self.coord(i, hi[i])).collect();
        let counts = lo
            .iter()
            .zip(hi)
            .map(|(l, h)| h.saturating_sub(*l))
            .collect();
        Mesh::new(BoxDomain::new(lower, upper)?, counts)
    }
}

/// One classification tag of a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointTag {
    Interior,
    /// `x_i = b_i`
    ForwardBoundary(usize),
    /// `x_i = a_i`
    BackwardBoundary(usize),
}

/// Classification of a grid point; corner points carry several boundary tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointClass {
    pub tags: Vec<PointTag>,
}

impl PointClass {
    pub fn is_interior(&self) -> bool {
        self.tags == [PointTag::Interior]
    }

    pub fn has(&self, tag: PointTag) -> bool {
        self.tags.contains(&tag)
    }
}

/// Real values on the closed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    mesh: Mesh,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(mesh: &Mesh) -> Self {
        Self {
            mesh: mesh.clone(),
            values: vec![0.0; mesh.len()],
        }
    }

    pub fn from_values(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                mesh.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grid value at flat index {k}")));
        }
        Ok(Self {
            mesh: mesh.clone(),
            values,
        })
    }

    /// Samples `f` at every closed-grid coordinate.
    pub fn from_fn(mesh: &Mesh, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut idx = vec![0usize; mesh.dim()];
        let mut x = vec![0.0; mesh.dim()];
        let mut values = Vec::with_capacity(mesh.len());
        for flat in 0..mesh.len() {
            mesh.multi_index_into(flat, &mut idx);
            for i in 0..mesh.dim() {
                x[i] = mesh.coord(i, idx[i]);
            }
            values.push(f(&x));
        }
        Self::from_values(mesh, values)
    }

    /// Evaluates `f` on multi-indices.
    pub fn from_index_fn(mesh: &Mesh, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let mut idx = vec![0usize; mesh.dim()];
        let mut values = Vec::with_capacity(mesh.len());
        for flat in 0..mesh.len() {
            mesh.multi_index_into(flat, &mut idx);
            values.push(f(&idx));
        }
        Self::from_values(mesh, values)
    }

    /// Interior values in lexicographic order, zero on the boundary.
    pub fn from_interior(mesh: &Mesh, interior: &[f64]) -> Result<Self> {
        if interior.len() != mesh.interior_len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} interior values, got {}",
                mesh.interior_len(),
                interior.len()
            )));
        }
        let mut values = vec![0.0; mesh.len()];
        for (v, flat) in interior.iter().zip(mesh.interior_indices()) {
            values[flat] = *v;
        }
        Self::from_values(mesh, values)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.values[self.mesh.flat_index(index)?])
    }

    pub fn at(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    pub fn interior_values(&self) -> Vec<f64> {
        self.mesh
            .interior_indices()
            .into_iter()
            .map(|k| self.values[k])
            .collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(&self.mesh, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `u₊ = max(u, 0)`.
    pub fn positive_part(&self) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|v| v.max(0.0)).collect(),
        }
    }

    /// `u₋ = max(-u, 0)`.
    pub fn negative_part(&self) -> Self {
        Self {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|v| (-v).max(0.0)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// True when every boundary value is exactly zero.
    pub fn vanishes_on_boundary(&self) -> bool {
        let mut idx = vec![0usize; self.mesh.dim()];
        (0..self.mesh.len()).all(|k| {
            self.mesh.multi_index_into(k, &mut idx);
            self.mesh.is_interior(&idx) || self.values[k] == 0.0
        })
    }

    pub fn same_mesh(&self, other: &GridFunction) -> Result<()> {
        if self.mesh != other.mesh {
            return Err(Error::MeshMismatch);
        }
        Ok(())
    }

    /// Values on the sub-box `lo..=hi` as a function on [`Mesh::sub_mesh`].
    pub fn restrict(&self, lo: &[usize], hi: &[usize]) -> Result<Self> {
        let sub = self.mesh.sub_mesh(lo, hi)?;
        let mut idx = vec![0usize; sub.dim()];
        let mut values = Vec::with_capacity(sub.len());
        for k in 0..sub.len() {
            sub.multi_index_into(k, &mut idx);
            for i in 0..idx.len() {
                idx[i] += lo[i];
            }
            values.push(self.values[self.mesh.flat_unchecked(&idx)]);
        }
        Self::from_values(&sub, values)
    }

    /// CSV with columns `i1..in, x1..xn, value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let n = self.mesh.dim();
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=n).map(|i| format!("i{i}")).collect();
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("value".into());
        w.write_record(&header)?;
        let mut idx = vec![0usize; n];
        for k in 0..self.mesh.len() {
            self.mesh.multi_index_into(k, &mut idx);
            let mut row: Vec<String> = idx.iter().map(|v| v.to_string()).collect();
            row.extend((0..n).map(|i| format!("{:e}", self.mesh.coord(i, idx[i]))));
            row.push(format!("{:e}", self.values[k]));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`GridFunction::write_csv`] back onto `mesh`.
    pub fn read_csv<R: Read>(mesh: &Mesh, reader: R) -> Result<Self> {
        let n = mesh.dim();
        let mut r = csv::Reader::from_reader(reader);
        let mut values = vec![f64::NAN; mesh.len()];
        let mut idx = vec![0usize; n];
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != 2 * n + 1 {
                return Err(Error::InvalidParameter(format!(
                    "expected {} columns, found {}",
                    2 * n + 1,
                    rec.len()
                )));
            }
            for i in 0..n {
                idx[i] = rec[i].trim().parse().map_err(|e| {
                    Error::InvalidParameter(format!("bad index {:?}: {e}", &rec[i]))
                })?;
            }
            let v: f64 = rec[2 * n].trim().parse().map_err(|e| {
                Error::InvalidParameter(format!("bad value {:?}: {e}", &rec[2 * n]))
            })?;
            values[mesh.flat_index(&idx)?] = v;
        }
        Self::from_values(mesh, values)
    }
}

/// Parses `a1:b1,a2:b2,...`.
pub fn parse_domain(s: &str) -> Result<BoxDomain> {
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for part in s.split(',') {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| Error::InvalidDomain(format!("expected a:b, got {part:?}")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidDomain(format!("bad number {t:?}")))
        };
        lower.push(num(a)?);
        upper.push(num(b)?);
    }
    BoxDomain::new(lower, upper)
}

/// Parses `N1xN2...` on the unit box or `N1xN2...@a1:b1,a2:b2,...`.
pub fn parse_mesh(s: &str) -> Result<Mesh> {
    let (counts, domain) = match s.split_once('@') {
        Some((c, d)) => (c, Some(parse_domain(d)?)),
        None => (s, None),
    };
    let counts = counts
        .split('x')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidMesh(format!("bad count {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let domain = match domain {
        Some(d) => d,
        None => BoxDomain::unit(counts.len())?,
    };
    Mesh::new(domain, counts)
}
