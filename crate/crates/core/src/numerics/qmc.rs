//! Low-discrepancy nodes for box quadrature.
//!
//! A Halton sequence in co-prime prime bases with a Cranley–Patterson random
//! shift per replicate. The shift randomization makes the quadrature
//! unbiased and gives a standard-error estimate from replicate spread while
//! staying fully deterministic for a fixed stream.

use super::rng::RngStream;

const PRIMES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Shifted Halton generator in `dim` dimensions.
pub struct ShiftedHalton {
    dim: usize,
    shift: Vec<f64>,
    index: u64,
}

impl ShiftedHalton {
    /// A new generator whose shift is drawn from `rng`. Supports up to 20
    /// dimensions, which covers the small-m regime this crate targets.
    pub fn new(dim: usize, rng: &RngStream) -> Self {
        assert!(dim >= 1 && dim <= PRIMES.len(), "unsupported QMC dimension");
        ShiftedHalton {
            dim,
            shift: rng.uniform_vec(dim),
            index: 0,
        }
    }

    /// Next node in the unit cube `[0,1)^dim`.
    pub fn next_node(&mut self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        self.index += 1;
        for (d, o) in out.iter_mut().enumerate() {
            let v = radical_inverse(PRIMES[d], self.index) + self.shift[d];
            *o = v - v.floor();
        }
    }
}

fn radical_inverse(base: u64, mut i: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut inv = inv_base;
    let mut result = 0.0;
    while i > 0 {
        result += (i % base) as f64 * inv;
        i /= base;
        inv *= inv_base;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_land_in_unit_cube_and_are_deterministic() {
        let rng = RngStream::new(5);
        let mut a = ShiftedHalton::new(3, &rng);
        let mut b = ShiftedHalton::new(3, &rng);
        let mut na = [0.0; 3];
        let mut nb = [0.0; 3];
        for _ in 0..100 {
            a.next_node(&mut na);
            b.next_node(&mut nb);
            assert_eq!(na, nb);
            for v in na {
                assert!((0.0..1.0).contains(&v));
            }
        }
    }

    #[test]
    fn integrates_linear_function_accurately() {
        // \int x dx over [0,1]^2 = 0.5 on each axis.
        let rng = RngStream::new(9);
        let mut h = ShiftedHalton::new(2, &rng);
        let mut node = [0.0; 2];
        let n = 4096;
        let mut acc = [0.0; 2];
        for _ in 0..n {
            h.next_node(&mut node);
            acc[0] += node[0];
            acc[1] += node[1];
        }
        assert!((acc[0] / n as f64 - 0.5).abs() < 2e-3);
        assert!((acc[1] / n as f64 - 0.5).abs() < 2e-3);
    }
}
