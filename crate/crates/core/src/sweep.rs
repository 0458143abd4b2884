//! Mesh-refinement sweeps: solve on a list of meshes, compare with the a
//! priori bound and export CSV/JSON tables.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds1d::{apriori_bound_1d, Bound1DReport};
use crate::boundsnd::{apriori_bound_nd, NdBoundReport};
use crate::error::{invalid, Error, Result};
use crate::grid::{BoxDomain, Mesh};
use crate::norms::d_norm_squared;
use crate::solver::{solve_nonlinear, InitialGuess, Nonlinearity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// compute `M̄` once and check every row against it
    Subcritical,
    /// record `‖u_h‖_∞` only
    Supercritical,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub domain: BoxDomain,
    pub nonlinearity: Nonlinearity,
    pub meshes: Vec<Vec<usize>>,
    pub mode: SweepMode,
    pub seed: u64,
    pub tol: f64,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub counts: Vec<usize>,
    pub spacing: Vec<f64>,
    pub u_inf: f64,
    pub u_d: f64,
    pub residual: f64,
    pub m_bar: Option<f64>,
    pub passed: Option<bool>,
    pub wall_ms: u64,
}

impl SweepRecord {
    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }
}

/// A record with the solver diagnostics that do not go into the CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(flatten)]
    pub record: SweepRecord,
    pub converged: bool,
    pub min_value: f64,
    pub newton_iters: usize,
}

/// Which bound the subcritical rows were checked against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum SweepBound {
    OneDimensional(Bound1DReport),
    Nd(NdBoundReport),
}

impl SweepBound {
    pub fn mbar(&self) -> f64 {
        match self {
            SweepBound::OneDimensional(r) => r.mbar,
            SweepBound::Nd(r) => r.mbar,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub nonlinearity: String,
    pub mode: SweepMode,
    pub seed: u64,
    pub bound: Option<SweepBound>,
    pub rows: Vec<SweepRow>,
}

impl SweepOutcome {
    pub fn records(&self) -> Vec<SweepRecord> {
        self.rows.iter().map(|r| r.record.clone()).collect()
    }

    /// Relative change of `‖u_h‖_∞` between the two finest meshes.
    pub fn finest_pair_variation(&self) -> Option<f64> {
        let n = self.rows.len();
        if n < 2 {
            return None;
        }
        let (a, b) = (self.rows[n - 2].record.u_inf, self.rows[n - 1].record.u_inf);
        Some((a - b).abs() / a.abs().max(b.abs()))
    }
}

/// `M̄` for the configured problem. One-dimensional domains use the minorant
/// `(g, K)` on the symmetric interval of the same length; higher dimensions
/// use the growth metadata.
pub fn sweep_bound(domain: &BoxDomain, f: &Nonlinearity) -> Result<SweepBound> {
    if domain.dim() == 1 {
        let growth = f
            .growth_1d()
            .ok_or_else(|| invalid(format!("{} has no 1D minorant", f.id())))??;
        let half = 0.5 * domain.width(0);
        let centre = domain.lower()[0] + half;
        let report = apriori_bound_1d(|x, s| f.evaluate(&[x + centre], s), &growth, half)?;
        Ok(SweepBound::OneDimensional(report))
    } else {
        let m = f
            .metadata()
            .ok_or_else(|| invalid(format!("{} has no metadata", f.id())))?;
        f.validate_metadata(domain)?;
        Ok(SweepBound::Nd(apriori_bound_nd(
            domain.dim(),
            m.p,
            m.lambda,
            m.c1,
            m.c2,
            m.c3,
            domain,
        )?))
    }
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    if config.meshes.is_empty() {
        return Err(invalid("sweep needs at least one mesh"));
    }
    let bound = match config.mode {
        SweepMode::Subcritical => Some(sweep_bound(&config.domain, &config.nonlinearity)?),
        SweepMode::Supercritical => None,
    };
    let meshes = config
        .meshes
        .iter()
        .map(|c| Mesh::new(config.domain.clone(), c.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = meshes
        .par_iter()
        .map(|mesh| {
            let start = Instant::now();
            let r = solve_nonlinear(
                mesh,
                &config.nonlinearity,
                InitialGuess::ScaledEigen(None),
                config.tol,
            )?;
            let u_inf = r.u.max_abs();
            let m_bar = bound.map(|b| b.mbar());
            Ok(SweepRow {
                record: SweepRecord {
                    n: mesh.dim(),
                    counts: mesh.counts().to_vec(),
                    spacing: mesh.spacing().to_vec(),
                    u_inf,
                    u_d: d_norm_squared(&r.u).sqrt(),
                    residual: r.residual_inf,
                    m_bar,
                    passed: m_bar.map(|m| r.converged && u_inf <= m),
                    wall_ms: start.elapsed().as_millis() as u64,
                },
                converged: r.converged,
                min_value: r.min_value,
                newton_iters: r.newton_iters,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        b.record
            .max_spacing()
            .total_cmp(&a.record.max_spacing())
            .then_with(|| a.record.counts.cmp(&b.record.counts))
    });
    Ok(SweepOutcome {
        nonlinearity: config.nonlinearity.id().to_string(),
        mode: config.mode,
        seed: config.seed,
        bound,
        rows,
    })
}

fn header(n: usize) -> Vec<String> {
    let mut h = vec!["n".to_string()];
    h.extend((1..=n).map(|i| format!("N_{i}")));
    h.extend((1..=n).map(|i| format!("h_{i}")));
    h.extend(["u_inf", "u_D", "residual", "M_bar", "passed", "wall_ms"].map(String::from));
    h
}

/// Writes `n, N_1..N_n, h_1..h_n, u_inf, u_D, residual, M_bar, passed, wall_ms`.
pub fn write_csv<W: Write>(records: &[SweepRecord], writer: W) -> Result<()> {
    let first = records
        .first()
        .ok_or_else(|| invalid("no records to write"))?;
    let n = first.n;
    if records.iter().any(|r| r.n != n) {
        return Err(invalid(
            "records of different dimensions cannot share a table",
        ));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header(n))?;
    for r in records {
        let mut row = vec![r.n.to_string()];
        row.extend(r.counts.iter().map(|c| c.to_string()));
        row.extend(r.spacing.iter().map(|h| h.to_string()));
        row.push(r.u_inf.to_string());
        row.push(r.u_d.to_string());
        row.push(r.residual.to_string());
        row.push(r.m_bar.map_or(String::new(), |m| m.to_string()));
        row.push(r.passed.map_or(String::new(), |p| p.to_string()));
        row.push(r.wall_ms.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| invalid(format!("cannot parse {what} from {s:?}")))
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<SweepRecord>> {
    let mut rd = csv::Reader::from_reader(reader);
    let cols = rd.headers()?.len();
    if cols < 8 || (cols - 7) % 2 != 0 {
        return Err(invalid(format!("unexpected column count {cols}")));
    }
    let n = (cols - 7) / 2;
    if rd.headers()?.iter().collect::<Vec<_>>() != header(n) {
        return Err(invalid("sweep header does not match the column contract"));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let opt = |i: usize| -> Option<&str> { Some(&row[i]).filter(|s| !s.is_empty()) };
        out.push(SweepRecord {
            n: parse(&row[0], "n")?,
            counts: (1..=n)
                .map(|i| parse(&row[i], "N"))
                .collect::<Result<_>>()?,
            spacing: (n + 1..=2 * n)
                .map(|i| parse(&row[i], "h"))
                .collect::<Result<_>>()?,
            u_inf: parse(&row[2 * n + 1], "u_inf")?,
            u_d: parse(&row[2 * n + 2], "u_D")?,
            residual: parse(&row[2 * n + 3], "residual")?,
            m_bar: opt(2 * n + 4).map(|s| parse(s, "M_bar")).transpose()?,
            passed: opt(2 * n + 5).map(|s| parse(s, "passed")).transpose()?,
            wall_ms: parse(&row[2 * n + 6], "wall_ms")?,
        });
    }
    Ok(out)
}

/// `max_h,u_inf` pairs for plotting.
pub fn write_plot_csv<W: Write>(records: &[SweepRecord], writer: W) -> Result<()> {
    if records.is_empty() {
        return Err(invalid("no records to write"));
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["max_h", "u_inf"])?;
    for r in records {
        w.write_record([r.max_spacing().to_string(), r.u_inf.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `sweep.csv`, `sweep.json` and `sweep_plot.csv` into `dir`.
pub fn write_outputs(outcome: &SweepOutcome, dir: &Path) -> Result<()> {
    if outcome.rows.is_empty() {
        return Err(invalid("no records to write"));
    }
    std::fs::create_dir_all(dir)?;
    let records = outcome.records();
    write_csv(
        &records,
        BufWriter::new(File::create(dir.join("sweep.csv"))?),
    )?;
    write_plot_csv(
        &records,
        BufWriter::new(File::create(dir.join("sweep_plot.csv"))?),
    )?;
    let mut json = BufWriter::new(File::create(dir.join("sweep.json"))?);
    serde_json::to_writer_pretty(&mut json, outcome)?;
    json.flush().map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize, m: Option<f64>) -> SweepRecord {
        SweepRecord {
            n,
            counts: vec![8; n],
            spacing: vec![0.125; n],
            u_inf: 0.1 + 1e-17,
            u_d: 1.0 / 3.0,
            residual: 1.2345678901234567e-13,
            m_bar: m,
            passed: m.map(|_| true),
            wall_ms: 12,
        }
    }

    #[test]
    fn empty_is_an_error() {
        assert!(write_csv(&[], Vec::new()).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let recs = vec![record(2, Some(1.5e63)), record(2, None)];
        let mut buf = Vec::new();
        write_csv(&recs[..1], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 2);
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("n,N_1,N_2,h_1,h_2,u_inf,u_D,residual,M_bar,passed,wall_ms\n"));
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn mixed_dimensions_rejected() {
        assert!(write_csv(&[record(1, None), record(2, None)], Vec::new()).is_err());
    }
}
