//! The empirical sample: an `n×m` observation matrix with optional row
//! labels.

use crate::numerics::frame::Frame;
use crate::{Error, Result};

/// An `n×m` matrix of observations, row-major, standing in for the
/// empirical distribution of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    n: usize,
    m: usize,
    points: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl Sample {
    pub fn new(n: usize, m: usize, points: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::DegenerateSample {
                context: "sample requires n >= 1 and m >= 1",
            });
        }
        if points.len() != n * m {
            return Err(Error::Shape {
                context: "sample entry count",
                expected: n * m,
                got: points.len(),
            });
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateSample {
                context: "sample entries must be finite",
            });
        }
        Ok(Sample {
            n,
            m,
            points,
            labels: None,
        })
    }

    /// Convenience constructor for one-dimensional samples.
    pub fn from_1d(values: &[f64]) -> Result<Self> {
        Sample::new(values.len(), 1, values.to_vec())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Shape {
                context: "label count",
                expected: self.n,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.m..(i + 1) * self.m]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.m)
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.points[i * self.m + j]).collect()
    }

    /// Coordinate-wise mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut mu = vec![0.0; self.m];
        for row in self.rows() {
            for (m, x) in mu.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in mu.iter_mut() {
            *m /= self.n as f64;
        }
        mu
    }

    /// Sample covariance with 1/(n−1) normalization (row-major `m×m`).
    pub fn covariance(&self) -> Vec<f64> {
        let mu = self.mean();
        let mut cov = vec![0.0; self.m * self.m];
        for row in self.rows() {
            for i in 0..self.m {
                let di = row[i] - mu[i];
                for j in i..self.m {
                    cov[i * self.m + j] += di * (row[j] - mu[j]);
                }
            }
        }
        let denom = (self.n.max(2) - 1) as f64;
        for i in 0..self.m {
            for j in i..self.m {
                cov[i * self.m + j] /= denom;
                cov[j * self.m + i] = cov[i * self.m + j];
            }
        }
        cov
    }

    /// Project every row through `B`: row i of the output is `B xᵢ`.
    /// Labels are preserved.
    pub fn project(&self, b: &Frame) -> Result<Sample> {
        if b.cols() != self.m {
            return Err(Error::Shape {
                context: "projection frame width must match sample dimension",
                expected: self.m,
                got: b.cols(),
            });
        }
        let k = b.rows();
        let mut out = Vec::with_capacity(self.n * k);
        for row in self.rows() {
            out.extend(b.apply(row));
        }
        let mut s = Sample::new(self.n, k, out)?;
        s.labels = self.labels.clone();
        Ok(s)
    }

    /// Apply `x ↦ a·x + b` row-wise (same dimension).
    pub fn affine_image(&self, a: &[f64], shift: &[f64]) -> Sample {
        // `a` is a full m×m matrix, row-major.
        let m = self.m;
        let mut out = Vec::with_capacity(self.n * m);
        for row in self.rows() {
            for i in 0..m {
                let mut acc = shift[i];
                for j in 0..m {
                    acc += a[i * m + j] * row[j];
                }
                out.push(acc);
            }
        }
        let mut s = Sample::new(self.n, m, out).expect("affine image keeps shape");
        s.labels = self.labels.clone();
        s
    }
}
