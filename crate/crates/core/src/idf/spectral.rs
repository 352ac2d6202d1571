use std::fmt::Write;

use nalgebra::{DMatrix, SymmetricEigen};

use super::boundary::BoundaryLoop;
use crate::error::{invalid, HfrepError, Result};

/// Largest eigen-residual `‖Lφ − λφ‖` accepted from the eigensolver.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Graph Laplacian of a closed loop with inverse edge-length weights.
/// Zero-length edges are rejected.
pub fn boundary_laplacian(l: &BoundaryLoop) -> Result<DMatrix<f64>> {
    let n = l.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let len = l.edge_length(i);
        if !(len > 0.0) {
            return Err(invalid(format!("edge {i} of the boundary loop has zero length")));
        }
        let (a, b) = (i, (i + 1) % n);
        let w = 1.0 / len;
        m[(a, b)] -= w;
        m[(b, a)] -= w;
        m[(a, a)] += w;
        m[(b, b)] += w;
    }
    Ok(m)
}

/// The `m` smallest eigenpairs of a Laplacian with unit-norm eigenvectors
/// (columns of `vectors`), plus the diffusion time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub t: f64,
}

impl SpectralBasis {
    pub fn vertex_count(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn mode_count(&self) -> usize {
        self.values.len()
    }

    /// Diffusion coordinates of vertex `i`: `e^{-λ_k t} φ_k(i)` for every
    /// mode except the constant one.
    pub fn embedding(&self, i: usize) -> Vec<f64> {
        (1..self.mode_count())
            .map(|k| (-self.values[k] * self.t).exp() * self.vectors[(i, k)])
            .collect()
    }

    /// Diffusion distance between boundary vertices `i` and `j`.
    pub fn diffusion_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.embedding(i), self.embedding(j));
        a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    /// Header `n m t`, the eigenvalues, then one row of eigenvector entries
    /// per vertex.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {:?}", self.vertex_count(), self.mode_count(), self.t).unwrap();
        let join = |it: &mut dyn Iterator<Item = f64>| it.map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ");
        writeln!(s, "{}", join(&mut self.values.iter().copied())).unwrap();
        for i in 0..self.vertex_count() {
            writeln!(s, "{}", join(&mut self.vectors.row(i).iter().copied())).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut nums = |what: &str| -> Result<Vec<f64>> {
            let line = lines.next().ok_or_else(|| HfrepError::Parse(format!("missing {what}")))?;
            line.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| HfrepError::Parse(format!("bad number '{t}' in {what}"))))
                .collect()
        };
        let head = nums("header")?;
        if head.len() != 3 || head[0] < 1.0 || head[1] < 1.0 {
            return Err(HfrepError::Parse("header must be 'n m t'".into()));
        }
        let (n, m, t) = (head[0] as usize, head[1] as usize, head[2]);
        let values = nums("eigenvalues")?;
        if values.len() != m {
            return Err(HfrepError::Parse(format!("expected {m} eigenvalues")));
        }
        let mut data = Vec::with_capacity(n * m);
        for i in 0..n {
            let row = nums("eigenvector row")?;
            if row.len() != m {
                return Err(HfrepError::Parse(format!("row {i} needs {m} entries")));
            }
            data.extend(row);
        }
        Ok(SpectralBasis { values, vectors: DMatrix::from_row_slice(n, m, &data), t })
    }
}

/// The `m` lowest eigenpairs of a symmetric matrix, ascending, each checked
/// against [`RESIDUAL_LIMIT`]. `t` is set to `1/λ₂` (or 1 when λ₂ vanishes).
pub fn spectral_decompose(lap: &DMatrix<f64>, m: usize) -> Result<SpectralBasis> {
    let n = lap.nrows();
    if n == 0 || lap.ncols() != n {
        return Err(invalid("Laplacian must be square and non-empty"));
    }
    if m == 0 || m > n {
        return Err(invalid(format!("mode count {m} must lie in 1..={n}")));
    }
    let eig = SymmetricEigen::try_new(lap.clone(), f64::EPSILON, 10_000)
        .ok_or(HfrepError::NonConvergence { residual: f64::INFINITY })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let order = &order[..m];
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, m, |i, c| eig.eigenvectors[(i, order[c])]);

    let mut worst = 0.0f64;
    for c in 0..m {
        let v = vectors.column(c);
        worst = worst.max((lap * v - v * values[c]).norm());
    }
    if !(worst <= RESIDUAL_LIMIT) {
        return Err(HfrepError::NonConvergence { residual: worst });
    }
    let t = match values.get(1) {
        Some(&l2) if l2 > 1e-12 => 1.0 / l2,
        _ => 1.0,
    };
    Ok(SpectralBasis { values, vectors, t })
}
