//! Synthetic data generators for tests, demos and the CLI.
//!
//! The proprietary customs data sets are not redistributable; these
//! generators produce structurally similar clouds (a two-line price/weight
//! analog, the four-component square mixture, diagonal Gaussians).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::rng::RngStream;
use crate::sample::Sample;

/// Mixture of four bivariate normals with variance `eta² I` and means at the
/// square vertices (1,1), (1,−1), (−1,1), (−1,−1), equal weights.
pub fn square_mixture(n: usize, eta: f64, rng: &RngStream) -> Sample {
    let mut r = rng.rng();
    let mut pts = Vec::with_capacity(n * 2);
    for _ in 0..n {
        let vertex = r.random_range(0..4u8);
        let (cx, cy) = match vertex {
            0 => (1.0, 1.0),
            1 => (1.0, -1.0),
            2 => (-1.0, 1.0),
            _ => (-1.0, -1.0),
        };
        let z1: f64 = r.sample(StandardNormal);
        let z2: f64 = r.sample(StandardNormal);
        pts.push(cx + eta * z1);
        pts.push(cy + eta * z2);
    }
    Sample::new(n, 2, pts).expect("mixture sample is finite")
}

/// Centered Gaussian with independent components and the given standard
/// deviations (dimension = `sds.len()`).
pub fn gaussian_diag(n: usize, sds: &[f64], rng: &RngStream) -> Sample {
    let m = sds.len();
    let mut r = rng.rng();
    let mut pts = Vec::with_capacity(n * m);
    for _ in 0..n {
        for &sd in sds {
            let z: f64 = r.sample(StandardNormal);
            pts.push(sd * z);
        }
    }
    Sample::new(n, m, pts).expect("gaussian sample is finite")
}

/// Spherical standard normal in dimension `m`.
pub fn gaussian_spherical(n: usize, m: usize, rng: &RngStream) -> Sample {
    gaussian_diag(n, &vec![1.0; m], rng)
}

/// Two-column "weight, price" cloud on a log scale: points concentrate near
/// the line `p = w + offset` with a small symmetric residual, plus a heavy
/// lower-price tail mimicking undervalued declarations.
pub fn pod_lines(n: usize, tail_fraction: f64, rng: &RngStream) -> Sample {
    let mut r = rng.rng();
    let mut pts = Vec::with_capacity(n * 2);
    let offset = -1.0;
    for _ in 0..n {
        let w = 2.0 + 6.0 * r.random::<f64>();
        let z: f64 = r.sample(StandardNormal);
        let mut p = w + offset + 0.06 * z;
        if r.random::<f64>() < tail_fraction {
            let e: f64 = r.sample(StandardNormal);
            p -= 0.4 + 0.5 * e.abs();
        }
        pts.push(w);
        pts.push(p);
    }
    Sample::new(n, 2, pts).expect("pod sample is finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_has_four_clusters() {
        let s = square_mixture(4000, 0.05, &RngStream::new(1));
        let mut counts = [0usize; 4];
        for row in s.rows() {
            let idx = match (row[0] > 0.0, row[1] > 0.0) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            counts[idx] += 1;
        }
        for c in counts {
            let f = c as f64 / 4000.0;
            assert!((f - 0.25).abs() < 0.05, "cluster fraction {f}");
        }
    }

    #[test]
    fn gaussian_diag_matches_requested_scales() {
        let s = gaussian_diag(20_000, &[1.0, 5.0], &RngStream::new(2));
        let cov = s.covariance();
        assert!((cov[0] - 1.0).abs() < 0.1);
        assert!((cov[3] - 25.0).abs() < 1.5);
    }

    #[test]
    fn pod_lines_sits_near_a_line() {
        let s = pod_lines(2000, 0.05, &RngStream::new(3));
        let near = s
            .rows()
            .filter(|r| (r[1] - (r[0] - 1.0)).abs() < 0.2)
            .count();
        assert!(near as f64 / 2000.0 > 0.85);
    }
}
