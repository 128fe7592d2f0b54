//! Estimators of the dispersion measure `sigma(F)`, the integral of the
//! data depth over the whole space: exact order-statistics formulas in one
//! dimension, a simplex-volume Monte Carlo (the multivariate Gini
//! coefficient) and a box quadrature in general dimension, the Mahalanobis
//! closed form, and the closed-form oracle for the four-component square
//! mixture.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::depth::{
    halfspace_depth_1d_sorted, BarycentricSolver, Depth2dScratch, DepthKind, HalfspaceApproxEval,
};
use crate::numerics::eigen::jacobi_eigen;
use crate::numerics::qmc::ShiftedHalton;
use crate::numerics::rng::RngStream;
use crate::numerics::special::{ln_gamma, std_normal_cdf, std_normal_pdf};
use crate::sample::Sample;
use crate::{Error, Result};

/// How a dispersion value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorMethod {
    Exact1D,
    GiniMC,
    BoxQMC,
    ClosedForm,
}

/// A nonnegative dispersion value with its estimator tag and, for the
/// Monte-Carlo methods, a standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionEstimate {
    pub value: f64,
    pub method: EstimatorMethod,
    pub std_error: Option<f64>,
    pub draws: Option<usize>,
}

impl DispersionEstimate {
    fn exact(value: f64) -> Self {
        DispersionEstimate {
            value,
            method: EstimatorMethod::Exact1D,
            std_error: None,
            draws: None,
        }
    }

    /// Standard error, treating exact estimates as zero-noise.
    pub fn se(&self) -> f64 {
        self.std_error.unwrap_or(0.0)
    }
}

// ---------------------------------------------------------------------------
// Exact one-dimensional formulas
// ---------------------------------------------------------------------------

/// Exact integral of the empirical halfspace depth over the line:
/// with order statistics x₍₁₎ ≤ … ≤ x₍ₙ₎,
/// `sigma = Σᵢ min(i, n−i)/n · (x₍ᵢ₊₁₎ − x₍ᵢ₎)`.
pub fn dispersion_halfspace_1d(s: &Sample) -> Result<DispersionEstimate> {
    require_1d(s)?;
    let mut v = s.points().to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(DispersionEstimate::exact(halfspace_1d_sorted(&v)))
}

pub(crate) fn halfspace_1d_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let w = |i: usize| i.min(n - i) as f64 / n as f64;
    symmetric_gap_sum(sorted, w)
}

/// Sum `w(i) · gap_i` pairing the i-th and (n−i)-th gaps first. The weight
/// sequences used here are symmetric, so negating the sample (which reverses
/// the gap order) reproduces the value bitwise.
fn symmetric_gap_sum(sorted: &[f64], w: impl Fn(usize) -> f64) -> f64 {
    let n = sorted.len();
    if n < 2 {
        return 0.0;
    }
    let gap = |i: usize| sorted[i] - sorted[i - 1];
    let mut acc = 0.0;
    let mut lo = 1;
    let mut hi = n - 1;
    while lo < hi {
        acc += w(lo) * (gap(lo) + gap(hi));
        lo += 1;
        hi -= 1;
    }
    if lo == hi {
        acc += w(lo) * gap(lo);
    }
    acc
}

/// Exact integral of the empirical simplicial depth over the line:
/// `sigma = 2 Σᵢ (i/n)(1−i/n)(x₍ᵢ₊₁₎−x₍ᵢ₎)`, which equals Gini's mean
/// difference `(1/n²) Σᵢ Σⱼ |xᵢ − xⱼ|`.
pub fn dispersion_simplicial_1d(s: &Sample) -> Result<DispersionEstimate> {
    require_1d(s)?;
    let mut v = s.points().to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(DispersionEstimate::exact(simplicial_1d_sorted(&v)))
}

pub(crate) fn simplicial_1d_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let nf = n as f64;
    let w = |i: usize| {
        let f = i as f64 / nf;
        2.0 * f * (1.0 - f)
    };
    symmetric_gap_sum(sorted, w)
}

// ---------------------------------------------------------------------------
// Gini Monte Carlo (simplicial dispersion in general dimension)
// ---------------------------------------------------------------------------

/// Unbiased estimate of the simplicial dispersion as the mean volume of
/// `draws` random simplices with i.i.d.-with-replacement vertex indices
/// (matching the multivariate Gini coefficient definition). Volume is
/// `|det| / q!`.
pub fn dispersion_gini_mc(
    s: &Sample,
    draws: usize,
    rng: &RngStream,
) -> Result<DispersionEstimate> {
    let q = s.m();
    if s.n() < q + 1 {
        return Err(Error::DegenerateSample {
            context: "Gini MC needs n >= q + 1",
        });
    }
    assert!(draws >= 1, "dispersion_gini_mc requires draws >= 1");
    let mut rgen = rng.rng();
    let mut mat = vec![0.0; q * q];
    let inv_fact = 1.0 / factorial(q);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..draws {
        let base = rand::Rng::random_range(&mut rgen, 0..s.n());
        let p0 = s.point(base);
        for r in 0..q {
            let i = rand::Rng::random_range(&mut rgen, 0..s.n());
            let p = s.point(i);
            for c in 0..q {
                mat[r * q + c] = p[c] - p0[c];
            }
        }
        let vol = det_in_place(&mut mat, q).abs() * inv_fact;
        sum += vol;
        sum_sq += vol * vol;
    }
    let mean = sum / draws as f64;
    let var = (sum_sq / draws as f64 - mean * mean).max(0.0);
    let se = (var / draws as f64).sqrt();
    Ok(DispersionEstimate {
        value: mean,
        method: EstimatorMethod::GiniMC,
        std_error: Some(se),
        draws: Some(draws),
    })
}

fn factorial(q: usize) -> f64 {
    (1..=q).map(|i| i as f64).product::<f64>().max(1.0)
}

fn det_in_place(a: &mut [f64], k: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..k {
        let mut pivot = col;
        let mut best = a[col * k + col].abs();
        for r in (col + 1)..k {
            let v = a[r * k + col].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..k {
                a.swap(pivot * k + c, col * k + c);
            }
            det = -det;
        }
        let d = a[col * k + col];
        det *= d;
        for r in (col + 1)..k {
            let f = a[r * k + col] / d;
            if f != 0.0 {
                for c in col..k {
                    a[r * k + c] -= f * a[col * k + c];
                }
            }
        }
    }
    det
}

// ---------------------------------------------------------------------------
// Box quadrature (halfspace and simplicial dispersion in general dimension)
// ---------------------------------------------------------------------------

/// Integrate the chosen empirical depth over the axis-aligned bounding box
/// of the sample (exact box, no padding: empirical halfspace and simplicial
/// depth vanish outside the convex hull) using shifted low-discrepancy nodes.
/// Eight independent shifts give an unbiased value and a standard error.
pub fn dispersion_box_qmc(
    s: &Sample,
    kind: DepthKind,
    nodes: usize,
    rng: &RngStream,
) -> Result<DispersionEstimate> {
    dispersion_box_qmc_with(s, kind, nodes, None, rng)
}

/// As [`dispersion_box_qmc`] with an explicit direction budget for the
/// randomized halfspace depth used when `q >= 3` (default `500·q`).
pub fn dispersion_box_qmc_with(
    s: &Sample,
    kind: DepthKind,
    nodes: usize,
    approx_dirs: Option<usize>,
    rng: &RngStream,
) -> Result<DispersionEstimate> {
    let q = s.m();
    assert!(nodes >= 8, "dispersion_box_qmc requires nodes >= 8");
    let mut lo = vec![f64::INFINITY; q];
    let mut hi = vec![f64::NEG_INFINITY; q];
    for row in s.rows() {
        for (j, &v) in row.iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    if vol <= 0.0 {
        // Degenerate (axis-flat) support: the depth integral is zero.
        return Ok(DispersionEstimate {
            value: 0.0,
            method: EstimatorMethod::BoxQMC,
            std_error: Some(0.0),
            draws: Some(nodes),
        });
    }

    let eval = DepthIntegrand::new(s, kind, approx_dirs, &rng.substream(1))?;
    let replicates = 8usize;
    let per_rep = (nodes / replicates).max(1);
    let mut rep_values = Vec::with_capacity(replicates);
    let mut node = vec![0.0; q];
    let mut x = vec![0.0; q];
    for r in 0..replicates {
        let mut halton = ShiftedHalton::new(q, &rng.substream(100 + r as u64));
        let mut acc = 0.0;
        for i in 0..per_rep {
            halton.next_node(&mut node);
            for j in 0..q {
                x[j] = lo[j] + node[j] * (hi[j] - lo[j]);
            }
            acc += eval.depth(&x, (r * per_rep + i) as u64);
        }
        rep_values.push(acc / per_rep as f64 * vol);
    }
    let mean = rep_values.iter().sum::<f64>() / replicates as f64;
    let var = rep_values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (replicates as f64 - 1.0);
    Ok(DispersionEstimate {
        value: mean,
        method: EstimatorMethod::BoxQMC,
        std_error: Some((var / replicates as f64).sqrt()),
        draws: Some(per_rep * replicates),
    })
}

/// Depth evaluation strategy fixed once per quadrature call.
enum DepthIntegrand<'a> {
    Halfspace1d {
        sorted: Vec<f64>,
    },
    Halfspace2d {
        points: &'a [f64],
        scratch: std::cell::RefCell<Depth2dScratch>,
    },
    HalfspaceApprox {
        eval: HalfspaceApproxEval,
    },
    Simplicial1d {
        sorted: Vec<f64>,
    },
    SimplicialExact {
        sample: &'a Sample,
        solver: std::cell::RefCell<BarycentricSolver>,
        /// Distinct-tuple fraction `n(n−1)…(n−q)/n^{q+1}`: converts the
        /// subset (U-statistic) depth to the i.i.d.-with-replacement
        /// convention of the Gini identity. Repeated-index simplices are
        /// degenerate and contribute zero volume almost everywhere.
        repl_factor: f64,
    },
    SimplicialMc {
        sample: &'a Sample,
        rng: RngStream,
        draws: usize,
        repl_factor: f64,
    },
    Mahalanobis {
        mean: Vec<f64>,
        eig_vals: Vec<f64>,
        eig_rows: Vec<f64>,
        q: usize,
    },
}

impl<'a> DepthIntegrand<'a> {
    fn new(
        s: &'a Sample,
        kind: DepthKind,
        approx_dirs: Option<usize>,
        rng: &RngStream,
    ) -> Result<Self> {
        let q = s.m();
        Ok(match kind {
            DepthKind::Halfspace => match q {
                1 => {
                    let mut sorted = s.points().to_vec();
                    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                    DepthIntegrand::Halfspace1d { sorted }
                }
                2 => DepthIntegrand::Halfspace2d {
                    points: s.points(),
                    scratch: std::cell::RefCell::new(Depth2dScratch::default()),
                },
                _ => DepthIntegrand::HalfspaceApprox {
                    eval: HalfspaceApproxEval::new(s, approx_dirs.unwrap_or(500 * q), rng),
                },
            },
            DepthKind::Simplicial => match q {
                1 => {
                    let mut sorted = s.points().to_vec();
                    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                    DepthIntegrand::Simplicial1d { sorted }
                }
                _ => {
                    let repl_factor: f64 =
                        (1..=q).map(|j| 1.0 - j as f64 / s.n() as f64).product();
                    if binomial_small(s.n(), q + 1) <= 200_000 {
                        DepthIntegrand::SimplicialExact {
                            sample: s,
                            solver: std::cell::RefCell::new(BarycentricSolver::new(q)),
                            repl_factor,
                        }
                    } else {
                        DepthIntegrand::SimplicialMc {
                            sample: s,
                            rng: rng.substream(7),
                            draws: 1024,
                            repl_factor,
                        }
                    }
                }
            },
            DepthKind::Mahalanobis => {
                let cov = s.covariance();
                let (vals, vecs) = jacobi_eigen(q, &cov)?;
                crate::depth::check_condition(&vals)?;
                DepthIntegrand::Mahalanobis {
                    mean: s.mean(),
                    eig_vals: vals,
                    eig_rows: vecs.entries().to_vec(),
                    q,
                }
            }
        })
    }

    fn depth(&self, x: &[f64], node_index: u64) -> f64 {
        match self {
            DepthIntegrand::Halfspace1d { sorted } => halfspace_depth_1d_sorted(x[0], sorted),
            DepthIntegrand::Halfspace2d { points, scratch } => {
                crate::depth::halfspace_depth_2d_points(
                    (x[0], x[1]),
                    points,
                    &mut scratch.borrow_mut(),
                )
            }
            DepthIntegrand::HalfspaceApprox { eval } => eval.depth(x),
            DepthIntegrand::Simplicial1d { sorted } => {
                let n = sorted.len() as f64;
                let le = sorted.partition_point(|&v| v <= x[0]) as f64;
                let lt = sorted.partition_point(|&v| v < x[0]) as f64;
                let f = le / n;
                let fm = lt / n;
                2.0 * f * (1.0 - f) + (f * f - fm * fm)
            }
            DepthIntegrand::SimplicialExact {
                sample,
                solver,
                repl_factor,
            } => repl_factor * simplicial_exact_inner(sample, x, &mut solver.borrow_mut()),
            DepthIntegrand::SimplicialMc {
                sample,
                rng,
                draws,
                repl_factor,
            } => {
                repl_factor
                    * crate::depth::simplicial_depth_mc(
                        x,
                        sample,
                        *draws,
                        &rng.substream(node_index),
                    )
                    .unwrap_or(0.0)
            }
            DepthIntegrand::Mahalanobis {
                mean,
                eig_vals,
                eig_rows,
                q,
            } => {
                let mut m2 = 0.0;
                for r in 0..*q {
                    let mut c = 0.0;
                    for j in 0..*q {
                        c += eig_rows[r * q + j] * (x[j] - mean[j]);
                    }
                    m2 += c * c / eig_vals[r];
                }
                1.0 / (1.0 + m2)
            }
        }
    }
}

fn simplicial_exact_inner(s: &Sample, x: &[f64], solver: &mut BarycentricSolver) -> f64 {
    let k = s.m() + 1;
    let n = s.n();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut contained = 0u64;
    let mut total = 0u64;
    loop {
        let vertices: Vec<&[f64]> = idx.iter().map(|&i| s.point(i)).collect();
        if solver.contains(&vertices, x) {
            contained += 1;
        }
        total += 1;
        if !advance_combination(&mut idx, n) {
            break;
        }
    }
    contained as f64 / total as f64
}

fn advance_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial_small(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

// ---------------------------------------------------------------------------
// Mahalanobis dispersion (closed form)
// ---------------------------------------------------------------------------

/// `sigma_M = tau_0 · det(Σ̂)^{1/2}`.
///
/// The radial kernel is `h(t) = 1/(1+t²)` for m = 1 (matching the
/// Mahalanobis depth transform, where the integral is finite) and the
/// integrable choice `h(t) = (1+t²)^{−(m+1)}` for m ≥ 2; `tau_0` is computed
/// once per dimension by radial quadrature.
pub fn mahalanobis_dispersion(s: &Sample) -> Result<DispersionEstimate> {
    let m = s.m();
    let cov = s.covariance();
    let (vals, _) = jacobi_eigen(m, &cov)?;
    crate::depth::check_condition(&vals)?;
    let det: f64 = vals.iter().product();
    Ok(DispersionEstimate {
        value: tau0(m) * det.sqrt(),
        method: EstimatorMethod::ClosedForm,
        std_error: None,
        draws: None,
    })
}

/// `tau_0(m) = ∫ h(‖x‖) dx` over `R^m` by radial quadrature, cached per
/// dimension. With `r = tan θ` the radial integrand is smooth on
/// `[0, π/2]`, so composite Simpson converges to well below 1e-10.
pub fn tau0(m: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&m) {
        return v;
    }
    let mf = m as f64;
    let omega = 2.0 * std::f64::consts::PI.powf(mf / 2.0) / ln_gamma(mf / 2.0).exp();
    // Integrand after r = tan(theta): h(tan θ) tan^{m-1}θ sec²θ.
    let g = |theta: f64| -> f64 {
        let c = theta.cos();
        let s = theta.sin();
        if m == 1 {
            // 1/(1+tan²) · sec² = 1
            1.0
        } else {
            // (1+tan²)^{-(m+1)} tan^{m-1} sec² = sin^{m-1} cos^{m+1}
            s.powi(m as i32 - 1) * c.powi(m as i32 + 1)
        }
    };
    let panels = 4096usize;
    let h = std::f64::consts::FRAC_PI_2 / panels as f64;
    let mut acc = g(0.0) + g(std::f64::consts::FRAC_PI_2);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(i as f64 * h);
    }
    let radial = acc * h / 3.0;
    let v = omega * radial;
    cache.lock().unwrap().insert(m, v);
    v
}

// ---------------------------------------------------------------------------
// Mixture-of-normals closed-form oracle
// ---------------------------------------------------------------------------

/// Raw absolute first moment of `N(mu, eta²)`:
/// `psi(mu) = mu (2Φ(mu/eta) − 1) + 2 eta φ(mu/eta)`.
///
/// The formula is even in `mu`; evaluating at `|mu|` makes that hold
/// bitwise.
pub fn psi(mu: f64, eta: f64) -> f64 {
    assert!(eta > 0.0, "psi requires eta > 0");
    let mu = mu.abs();
    let z = mu / eta;
    mu * (2.0 * std_normal_cdf(z) - 1.0) + 2.0 * eta * std_normal_pdf(z)
}

/// Closed-form population halfspace dispersion of the four-component normal
/// mixture with means at the square vertices (±1, ±1) and variance `eta² I`,
/// projected along `B₁(u) = (u, sqrt(1−u²))`:
/// `sigma(u) = (1/4) Σᵢ psi(muᵢ(u))` with
/// `mu₁ = u + sqrt(1−u²)`, `mu₂ = u − sqrt(1−u²)`, `mu₃ = −mu₂`, `mu₄ = −mu₁`.
///
/// Even in `u`; stationary at `u ∈ {−1/√2, 0, 1/√2}` with minima at
/// `±1/√2` and maxima at `u ∈ {−1, 0, 1}`.
pub fn mixture_dispersion_oracle(u: f64, eta: f64) -> f64 {
    assert!((-1.0..=1.0).contains(&u), "oracle requires |u| <= 1");
    assert!(eta > 0.0, "oracle requires eta > 0");
    let root = (1.0 - u * u).max(0.0).sqrt();
    let mu1 = u + root;
    let mu2 = u - root;
    0.25 * (psi(mu1, eta) + psi(mu2, eta) + psi(-mu2, eta) + psi(-mu1, eta))
}

fn require_1d(s: &Sample) -> Result<()> {
    if s.m() != 1 {
        return Err(Error::Shape {
            context: "dispersion formula requires a one-dimensional sample",
            expected: 1,
            got: s.m(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn s1(values: &[f64]) -> Sample {
        Sample::from_1d(values).unwrap()
    }

    /// Independent step-integral oracle: integrate the empirical depth as a
    /// piecewise-constant function over the gaps between order statistics,
    /// with the depth evaluated by direct counting at gap midpoints.
    fn step_integral_oracle(values: &[f64], simplicial: bool) -> f64 {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len() as f64;
        let mut acc = 0.0;
        for w in sorted.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let le = values.iter().filter(|&&v| v <= mid).count() as f64;
            let lt = values.iter().filter(|&&v| v < mid).count() as f64;
            let depth = if simplicial {
                let f = le / n;
                let fm = lt / n;
                2.0 * f * (1.0 - f) + (f * f - fm * fm)
            } else {
                (le / n).min(1.0 - lt / n)
            };
            acc += depth * (w[1] - w[0]);
        }
        acc
    }

    #[test]
    fn halfspace_1d_examples() {
        assert!((dispersion_halfspace_1d(&s1(&[0.0, 1.0])).unwrap().value - 0.5).abs() < 1e-15);
        assert!(
            (dispersion_halfspace_1d(&s1(&[0.0, 1.0, 2.0])).unwrap().value - 2.0 / 3.0).abs()
                < 1e-15
        );
        assert_eq!(
            dispersion_halfspace_1d(&s1(&[3.0, 3.0, 3.0])).unwrap().value,
            0.0
        );
    }

    #[test]
    fn halfspace_1d_matches_step_integral_oracle() {
        for seed in 0..20u64 {
            let rng = RngStream::new(seed);
            let n = 2 + (seed as usize * 7) % 60;
            let values = rng.normal_vec(n);
            let est = dispersion_halfspace_1d(&s1(&values)).unwrap().value;
            let oracle = step_integral_oracle(&values, false);
            assert!((est - oracle).abs() <= 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn simplicial_1d_examples() {
        assert!((dispersion_simplicial_1d(&s1(&[0.0, 1.0])).unwrap().value - 0.5).abs() < 1e-15);
        assert!(
            (dispersion_simplicial_1d(&s1(&[0.0, 1.0, 2.0])).unwrap().value - 8.0 / 9.0).abs()
                < 1e-15
        );
    }

    #[test]
    fn simplicial_1d_matches_gini_mean_difference() {
        for seed in 0..100u64 {
            let rng = RngStream::new(1000 + seed);
            let n = 2 + (seed as usize * 13) % 199;
            let values = rng.normal_vec(n);
            let est = dispersion_simplicial_1d(&s1(&values)).unwrap().value;
            let mut gini = 0.0;
            for &a in &values {
                for &b in &values {
                    gini += (a - b).abs();
                }
            }
            gini /= (n * n) as f64;
            assert!((est - gini).abs() <= 1e-10, "seed {seed}: {est} vs {gini}");
        }
    }

    #[test]
    fn one_dimensional_scale_equivariance() {
        let rng = RngStream::new(5);
        let values = rng.normal_vec(37);
        let base_h = dispersion_halfspace_1d(&s1(&values)).unwrap().value;
        let base_s = dispersion_simplicial_1d(&s1(&values)).unwrap().value;
        // Dyadic scale, zero shift: bitwise exact.
        for a in [2.0f64, -0.5, 8.0] {
            let scaled: Vec<f64> = values.iter().map(|v| a * v).collect();
            assert_eq!(
                dispersion_halfspace_1d(&s1(&scaled)).unwrap().value,
                a.abs() * base_h
            );
            assert_eq!(
                dispersion_simplicial_1d(&s1(&scaled)).unwrap().value,
                a.abs() * base_s
            );
        }
        // General affine map: exact up to roundoff.
        let mapped: Vec<f64> = values.iter().map(|v| -1.7 * v + 0.3).collect();
        let h = dispersion_halfspace_1d(&s1(&mapped)).unwrap().value;
        assert!((h - 1.7 * base_h).abs() < 1e-12);
    }

    #[test]
    fn gini_mc_collinear_is_zero() {
        let s = Sample::new(3, 2, vec![0.0, 0.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
        let est = dispersion_gini_mc(&s, 500, &RngStream::new(3)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn gini_mc_matches_exact_in_1d() {
        let rng = RngStream::new(9);
        let values = rng.substream(0).normal_vec(50);
        let s = s1(&values);
        let exact = dispersion_simplicial_1d(&s).unwrap().value;
        let est = dispersion_gini_mc(&s, 100_000, &rng.substream(1)).unwrap();
        let se = est.se().max(1e-6);
        assert!(
            (est.value - exact).abs() <= 3.0 * se,
            "{} vs {exact} (se {se})",
            est.value
        );
    }

    #[test]
    fn gini_mc_matches_exhaustive_square() {
        // All 4^3 ordered index triples of the square vertices.
        let pts = [1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0];
        let s = Sample::new(4, 2, pts.to_vec()).unwrap();
        let mut acc = 0.0;
        for i in 0..4usize {
            for j in 0..4usize {
                for k in 0..4usize {
                    let (a, b, c) = (s.point(i), s.point(j), s.point(k));
                    let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
                    acc += det.abs() / 2.0;
                }
            }
        }
        let exhaustive = acc / 64.0;
        assert!((exhaustive - 0.75).abs() < 1e-12);
        let est = dispersion_gini_mc(&s, 50_000, &RngStream::new(17)).unwrap();
        assert!((est.value - exhaustive).abs() <= 3.0 * est.se());
    }

    #[test]
    fn box_qmc_matches_exact_halfspace_1d() {
        let rng = RngStream::new(23);
        let values = rng.substream(0).normal_vec(100);
        let s = s1(&values);
        let exact = dispersion_halfspace_1d(&s).unwrap().value;
        let est = dispersion_box_qmc(&s, DepthKind::Halfspace, 1 << 14, &rng.substream(1)).unwrap();
        assert!(
            (est.value - exact).abs() <= 0.01 * exact,
            "{} vs {exact}",
            est.value
        );
    }

    #[test]
    fn box_qmc_constant_sample_is_zero() {
        let s = Sample::new(3, 2, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        let est = dispersion_box_qmc(&s, DepthKind::Halfspace, 64, &RngStream::new(2)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn box_qmc_simplicial_cross_checks_gini() {
        let rng = RngStream::new(31);
        let pts = rng.substream(0).normal_vec(60);
        let s = Sample::new(30, 2, pts).unwrap();
        let qmc = dispersion_box_qmc(&s, DepthKind::Simplicial, 4096, &rng.substream(1)).unwrap();
        let gini = dispersion_gini_mc(&s, 200_000, &rng.substream(2)).unwrap();
        let se = (qmc.se().powi(2) + gini.se().powi(2)).sqrt().max(1e-4);
        assert!(
            (qmc.value - gini.value).abs() <= 3.0 * se,
            "{} vs {} (se {se})",
            qmc.value,
            gini.value
        );
    }

    #[test]
    fn psi_examples() {
        let eta = 0.37;
        let expect = eta * (2.0f64 / std::f64::consts::PI).sqrt();
        assert!((psi(0.0, eta) - expect).abs() < 1e-14);
        assert!((psi(1.0, 0.001) - 1.0).abs() < 1e-6);
        for mu in [0.2, 0.9, 2.5] {
            assert_eq!(psi(mu, eta), psi(-mu, eta));
        }
    }

    #[test]
    fn psi_matches_monte_carlo_moment() {
        // E|X| for X ~ N(1, 1e-6) is 1 to well below 1e-6.
        let rng = RngStream::new(4);
        let draws = rng.normal_vec(200_000);
        let mc: f64 =
            draws.iter().map(|z| (1.0 + 0.001 * z).abs()).sum::<f64>() / draws.len() as f64;
        assert!((psi(1.0, 0.001) - mc).abs() < 1e-5);
    }

    #[test]
    fn oracle_values() {
        // All |mu_i| = 1 at u = 0.
        assert!((mixture_dispersion_oracle(0.0, 0.1) - psi(1.0, 0.1)).abs() < 1e-10);
        assert!((mixture_dispersion_oracle(0.0, 0.1) - 1.0).abs() < 1e-10);
        // Closed-form minimum value at u = 1/sqrt(2):
        // eta (φ(√2/eta) + φ(0)) + (√2/2)(Φ(√2/eta) − Φ(−√2/eta)).
        let v = mixture_dispersion_oracle(std::f64::consts::FRAC_1_SQRT_2, 0.1);
        assert!((v - 0.7470010092266908).abs() < 1e-10, "{v}");
    }

    #[test]
    fn oracle_is_even_in_u() {
        for i in 0..=100 {
            let u = -1.0 + 0.02 * i as f64;
            let a = mixture_dispersion_oracle(u, 0.1);
            let b = mixture_dispersion_oracle(-u, 0.1);
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_stationary_points() {
        let eta = 0.1;
        let h = 1e-4;
        for u0 in [0.0, std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2] {
            let fd = (mixture_dispersion_oracle(u0 + h, eta)
                - mixture_dispersion_oracle(u0 - h, eta))
                / (2.0 * h);
            assert!(fd.abs() <= 1e-6, "u0 = {u0}: fd = {fd}");
        }
        let min = mixture_dispersion_oracle(std::f64::consts::FRAC_1_SQRT_2, eta);
        let max = mixture_dispersion_oracle(0.0, eta);
        assert!(min < max);
    }

    #[test]
    fn tau0_known_values() {
        // m = 1 with h = 1/(1+t²): τ0 = π.
        assert!((tau0(1) - std::f64::consts::PI).abs() < 1e-10);
        // m = 2 with h = (1+t²)^{-3}: τ0 = π/2.
        assert!((tau0(2) - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        // m = 3: π²/8; m = 4: π²/12.
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert!((tau0(3) - pi2 / 8.0).abs() < 1e-10);
        assert!((tau0(4) - pi2 / 12.0).abs() < 1e-10);
    }

    #[test]
    fn mahalanobis_dispersion_scales_with_sd() {
        let rng = RngStream::new(6);
        let values = rng.normal_vec(200);
        let s_1 = s1(&values);
        let doubled: Vec<f64> = values.iter().map(|v| 2.0 * v).collect();
        let s_2 = s1(&doubled);
        let a = mahalanobis_dispersion(&s_1).unwrap().value;
        let b = mahalanobis_dispersion(&s_2).unwrap().value;
        assert!((b / a - 2.0).abs() < 1e-9);
    }

    #[test]
    fn mahalanobis_dispersion_affine_determinant() {
        let rng = RngStream::new(7);
        let pts = rng.normal_vec(400);
        let s = Sample::new(200, 2, pts).unwrap();
        let base = mahalanobis_dispersion(&s).unwrap().value;
        let a = [1.5f64, 0.4, -0.2, 0.9];
        let det_a: f64 = (a[0] * a[3] - a[1] * a[2]).abs();
        let imaged = s.affine_image(&a, &[3.0, -1.0]);
        let v = mahalanobis_dispersion(&imaged).unwrap().value;
        assert!((v - det_a * base).abs() <= 1e-8 * base.max(1.0));
    }

    #[test]
    fn mahalanobis_dispersion_of_whitened_sample_is_tau0() {
        // Whiten a 2-D sample exactly, so det(cov) = 1 and sigma_M = tau0(2).
        let rng = RngStream::new(8);
        let pts = rng.normal_vec(300 * 2);
        let s = Sample::new(300, 2, pts).unwrap();
        let cov = s.covariance();
        let (vals, vecs) = jacobi_eigen(2, &cov).unwrap();
        // Whitening matrix W = Λ^{-1/2} V (rows).
        let mut w = [0.0; 4];
        for r in 0..2 {
            for c in 0..2 {
                w[r * 2 + c] = vecs.row(r)[c] / vals[r].sqrt();
            }
        }
        let mu = s.mean();
        let whitened = s.affine_image(&w, &[
            -(w[0] * mu[0] + w[1] * mu[1]),
            -(w[2] * mu[0] + w[3] * mu[1]),
        ]);
        let v = mahalanobis_dispersion(&whitened).unwrap().value;
        assert!((v - tau0(2)).abs() < 1e-8, "{v} vs {}", tau0(2));
    }

    use crate::RngStream;
}
