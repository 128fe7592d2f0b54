//! Orthonormal frames: `k×m` matrices with orthonormal rows representing a
//! projection onto a `k`-dimensional subspace.

use serde::{Deserialize, Serialize};

use super::rng::RngStream;
use crate::{Error, Result, ORTHONORMALITY_TOL, RANK_TOL};

/// A `k×m` matrix with orthonormal rows, stored row-major.
///
/// Frames are immutable after construction and always satisfy
/// `max|B Bᵀ − I| ≤ 1e-10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Frame {
    /// Build a frame from row-major entries, checking the orthonormality
    /// invariant.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > cols {
            return Err(Error::Shape {
                context: "frame requires 1 <= k <= m",
                expected: cols,
                got: rows,
            });
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape {
                context: "frame entry count",
                expected: rows * cols,
                got: entries.len(),
            });
        }
        let frame = Frame {
            rows,
            cols,
            entries,
        };
        let dev = frame.orthonormality_deviation();
        if dev > ORTHONORMALITY_TOL {
            return Err(Error::Rank {
                expected: rows,
                tol: ORTHONORMALITY_TOL,
            });
        }
        Ok(frame)
    }

    /// The identity frame `I_m`.
    pub fn identity(m: usize) -> Self {
        let mut entries = vec![0.0; m * m];
        for i in 0..m {
            entries[i * m + i] = 1.0;
        }
        Frame {
            rows: m,
            cols: m,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `max_{i,j} |(B Bᵀ − I)_{ij}|`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.rows {
                let dot = dot(self.row(i), self.row(j));
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((dot - target).abs());
            }
        }
        dev
    }

    /// Apply the frame to a point: `y = B x` in `R^k`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Flip the sign of one row. The result is still a valid frame.
    pub fn negate_row(&self, i: usize) -> Frame {
        let mut out = self.clone();
        for v in out.entries[i * out.cols..(i + 1) * out.cols].iter_mut() {
            *v = -*v;
        }
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormalize the rows of a `k×m` matrix by modified Gram–Schmidt with a
/// re-orthogonalization pass. The row space is preserved and the result is
/// deterministic.
///
/// Fails with a rank error when the numerical rank drops below `k` at
/// tolerance `1e-10` (relative to the row scale).
pub fn orthonormalize(rows: usize, cols: usize, entries: &[f64]) -> Result<Frame> {
    if rows == 0 || cols == 0 || rows > cols {
        return Err(Error::Shape {
            context: "orthonormalize requires 1 <= k <= m",
            expected: cols,
            got: rows,
        });
    }
    if entries.len() != rows * cols {
        return Err(Error::Shape {
            context: "orthonormalize entry count",
            expected: rows * cols,
            got: entries.len(),
        });
    }
    let mut b = entries.to_vec();
    for i in 0..rows {
        let scale = norm(&entries[i * cols..(i + 1) * cols]).max(1.0);
        // Two MGS passes kill the O(eps * condition) residual of a single pass.
        for _pass in 0..2 {
            for j in 0..i {
                let proj = dot_rows(&b, cols, i, j);
                for c in 0..cols {
                    b[i * cols + c] -= proj * b[j * cols + c];
                }
            }
        }
        let len = norm(&b[i * cols..(i + 1) * cols]);
        if len <= RANK_TOL * scale {
            return Err(Error::Rank {
                expected: rows,
                tol: RANK_TOL,
            });
        }
        for c in 0..cols {
            b[i * cols + c] /= len;
        }
    }
    Frame::new(rows, cols, b)
}

fn dot_rows(m: &[f64], cols: usize, i: usize, j: usize) -> f64 {
    dot(&m[i * cols..(i + 1) * cols], &m[j * cols..(j + 1) * cols])
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Draw a frame uniformly (Haar) on the Stiefel manifold: orthonormalize a
/// `k×m` matrix of independent standard normals, regenerating on the
/// measure-zero rank-deficiency event.
pub fn random_frame(k: usize, m: usize, rng: &RngStream) -> Frame {
    assert!(k >= 1 && k <= m, "random_frame requires 1 <= k <= m");
    let mut attempt = 0u64;
    loop {
        let g = rng.substream(attempt).normal_vec(k * m);
        if let Ok(frame) = orthonormalize(k, m, &g) {
            return frame;
        }
        attempt += 1;
    }
}

/// Orthonormal basis of the orthogonal complement of `B`: an `(m−k)×m` frame
/// whose rows are orthogonal to every row of `B`. Built deterministically by
/// pivoted Gram–Schmidt over the coordinate vectors.
pub fn complement_frame(b: &Frame) -> Result<Frame> {
    let k = b.rows();
    let m = b.cols();
    if k == m {
        return Err(Error::EmptyComplement { dim: m });
    }
    // Basis under construction: rows of B followed by accepted residuals.
    let mut basis: Vec<Vec<f64>> = (0..k).map(|i| b.row(i).to_vec()).collect();
    let mut out: Vec<f64> = Vec::with_capacity((m - k) * m);
    while basis.len() < m {
        // Pick the coordinate vector with the largest residual against the
        // current basis; ties break toward the smallest index.
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for j in 0..m {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            for _pass in 0..2 {
                for row in &basis {
                    let proj = dot(&e, row);
                    for c in 0..m {
                        e[c] -= proj * row[c];
                    }
                }
            }
            let len = norm(&e);
            if best.as_ref().map_or(true, |(l, _, _)| len > *l) {
                best = Some((len, j, e));
            }
        }
        let (len, _, mut e) = best.expect("m > 0");
        debug_assert!(len > 1e-7, "complement residual collapsed");
        for c in 0..m {
            e[c] /= len;
        }
        out.extend_from_slice(&e);
        basis.push(e);
    }
    Frame::new(m - k, m, out)
}

/// Stack two mutually orthogonal frames into one.
pub fn stack(top: &Frame, bottom: &Frame) -> Result<Frame> {
    if top.cols() != bottom.cols() {
        return Err(Error::Shape {
            context: "stacked frames must share the ambient dimension",
            expected: top.cols(),
            got: bottom.cols(),
        });
    }
    let mut entries = top.entries().to_vec();
    entries.extend_from_slice(bottom.entries());
    Frame::new(top.rows() + bottom.rows(), top.cols(), entries)
}
