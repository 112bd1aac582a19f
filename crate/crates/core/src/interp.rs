//! Kernel interpolation on scattered points: Gram assembly, bandwidth
//! statistics, Cholesky solves and conditioning reports.

use std::io::Read;

use nalgebra::{DMatrix, DVector};

use crate::certify::eigen_range;
use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::par::{self, Exec};

/// Largest point set handled with dense storage.
pub const MAX_POINTS: usize = 500;

/// Distinct points in ℝ^dim.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    min_separation: f64,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        if points.is_empty() {
            return Err(Error::Input("point set is empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Input(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::Input(format!("point {i} has a non-finite coordinate")));
            }
        }
        let mut min_separation = f64::INFINITY;
        for i in 0..points.len() {
            for j in 0..i {
                let d = dist(&points[i], &points[j]);
                if d == 0.0 {
                    return Err(Error::Input(format!("points {j} and {i} coincide")));
                }
                min_separation = min_separation.min(d);
            }
        }
        Ok(PointSet {
            dim,
            points,
            min_separation,
        })
    }

    /// Reads `x1,...,xm[,value]` CSV. Columns named `value` hold data values;
    /// every other column is a coordinate.
    pub fn from_csv<R: Read>(reader: R) -> Result<(PointSet, Option<Vec<f64>>)> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Input(format!("csv header: {e}")))?
            .clone();
        let value_col = headers.iter().position(|h| h.eq_ignore_ascii_case("value"));
        let dim = headers.len() - usize::from(value_col.is_some());
        let mut points = Vec::new();
        let mut values = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Input(format!("csv row {}: {e}", row + 1)))?;
            let mut p = Vec::with_capacity(dim);
            for (c, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Input(format!("csv row {}, column {}: cannot parse {field:?}", row + 1, c + 1))
                })?;
                if Some(c) == value_col {
                    values.push(v);
                } else {
                    p.push(v);
                }
            }
            points.push(p);
        }
        let ps = PointSet::new(dim, points)?;
        Ok((ps, value_col.map(|_| values)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Smallest pairwise distance; infinite for a single point.
    pub fn min_separation(&self) -> f64 {
        self.min_separation
    }

    /// Indices sorted lexicographically by coordinates.
    pub fn coordinate_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.points[a]
                .iter()
                .zip(&self.points[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointOrdering {
    Natural,
    CoordinateSorted,
}

/// A symmetric Gram matrix K_ij = k(‖p_i − p_j‖).
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// max |i−j| over nonzero entries under `ordering`.
    pub bandwidth: usize,
    pub ordering: PointOrdering,
    /// Fraction of nonzero entries.
    pub fill: f64,
}

fn bandwidth_under(m: &DMatrix<f64>, order: &[usize]) -> usize {
    let n = order.len();
    let mut pos = vec![0; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let mut bw = 0;
    for i in 0..n {
        for j in 0..i {
            if m[(i, j)] != 0.0 {
                bw = bw.max(pos[i].abs_diff(pos[j]));
            }
        }
    }
    bw
}

/// Assembles the Gram matrix in the natural point order. Entries at distance
/// ≥ support are exact zeros. The bandwidth is the smaller of the natural and
/// coordinate-sorted orderings.
pub fn build_gram(ps: &PointSet, k: &RadialKernel, exec: Exec) -> Result<GramSystem> {
    let n = ps.len();
    if n > MAX_POINTS {
        return Err(Error::Input(format!("at most {MAX_POINTS} points supported, got {n}")));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let vals = par::try_map(exec, &pairs, |&(i, j)| {
        if i == j {
            k.eval(0.0)
        } else {
            k.eval(dist(&ps.points[i], &ps.points[j]))
        }
    })?;
    let mut matrix = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(vals) {
        matrix[(i, j)] = v;
        matrix[(j, i)] = v;
    }
    let natural: Vec<usize> = (0..n).collect();
    let bw_nat = bandwidth_under(&matrix, &natural);
    let bw_sort = bandwidth_under(&matrix, &ps.coordinate_order());
    let (bandwidth, ordering) = if bw_sort < bw_nat {
        (bw_sort, PointOrdering::CoordinateSorted)
    } else {
        (bw_nat, PointOrdering::Natural)
    };
    let nnz = matrix.iter().filter(|v| **v != 0.0).count();
    Ok(GramSystem {
        fill: nnz as f64 / (n * n) as f64,
        matrix,
        rhs: DVector::zeros(n),
        bandwidth,
        ordering,
    })
}

fn reject_degenerate(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateKernel("Gram matrix is identically zero".into()));
    }
    Ok(())
}

/// Relative residual bound accepted from [`solve_interpolate`].
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Solves K w = values by Cholesky with iterative refinement.
pub fn solve_interpolate(gs: &GramSystem, values: &[f64]) -> Result<Vec<f64>> {
    let n = gs.matrix.nrows();
    if values.len() != n {
        return Err(Error::Input(format!("{} values for {n} points", values.len())));
    }
    reject_degenerate(&gs.matrix)?;
    let b = DVector::from_column_slice(values);
    let chol = match gs.matrix.clone().cholesky() {
        Some(c) => c,
        None => {
            let (lambda_min, lambda_max) = eigen_range(gs.matrix.clone());
            return Err(Error::NotPositiveDefinite { lambda_min, lambda_max });
        }
    };
    let mut w = chol.solve(&b);
    let bnorm = b.norm();
    for _ in 0..3 {
        let r = &b - &gs.matrix * &w;
        if r.norm() <= 1e-2 * RESIDUAL_TOLERANCE * bnorm {
            break;
        }
        w += chol.solve(&r);
    }
    let res = (&b - &gs.matrix * &w).norm();
    if res > RESIDUAL_TOLERANCE * bnorm {
        return Err(Error::PrecisionLoss {
            what: "interpolation solve",
            value: res,
            error: RESIDUAL_TOLERANCE * bnorm,
        });
    }
    Ok(w.iter().copied().collect())
}

/// Interpolant Σ_j w_j k(‖q − p_j‖) at each query point.
pub fn predict(ps: &PointSet, k: &RadialKernel, weights: &[f64], queries: &[Vec<f64>], exec: Exec) -> Result<Vec<f64>> {
    if weights.len() != ps.len() {
        return Err(Error::Input(format!(
            "{} weights for {} points",
            weights.len(),
            ps.len()
        )));
    }
    if let Some(q) = queries.iter().find(|q| q.len() != ps.dim()) {
        return Err(Error::Input(format!(
            "query has {} coordinates, expected {}",
            q.len(),
            ps.dim()
        )));
    }
    par::try_map(exec, queries, |q| {
        let mut s = 0.0;
        for (p, w) in ps.points.iter().zip(weights) {
            s += w * k.eval(dist(q, p))?;
        }
        Ok(s)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionRow {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub condition: f64,
    pub bandwidth: usize,
    pub fill: f64,
}

/// Spectrum, condition number, bandwidth and fill of each kernel's Gram matrix.
pub fn condition_report(ps: &PointSet, kernels: &[RadialKernel], exec: Exec) -> Result<Vec<ConditionRow>> {
    kernels
        .iter()
        .map(|k| {
            let g = build_gram(ps, k, exec)?;
            reject_degenerate(&g.matrix)?;
            let (lo, hi) = eigen_range(g.matrix);
            Ok(ConditionRow {
                lambda_min: lo,
                lambda_max: hi,
                condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
                bandwidth: g.bandwidth,
                fill: g.fill,
            })
        })
        .collect()
}
