//! Point-depth estimators for empirical distributions: halfspace (Tukey),
//! simplicial and Mahalanobis depth, exact in dimensions 1–2 and randomized
//! in general dimension.

use serde::{Deserialize, Serialize};

use crate::numerics::eigen::jacobi_eigen;
use crate::numerics::rng::RngStream;
use crate::sample::Sample;
use crate::{
    Error, Result, BARYCENTRIC_TOL, COVARIANCE_CONDITION_LIMIT, SIMPLICIAL_EXACT_LIMIT,
};

/// The depth function underlying a dispersion measure or subspace fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthKind {
    Halfspace,
    Simplicial,
    Mahalanobis,
}

impl std::fmt::Display for DepthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DepthKind::Halfspace => write!(f, "halfspace"),
            DepthKind::Simplicial => write!(f, "simplicial"),
            DepthKind::Mahalanobis => write!(f, "mahalanobis"),
        }
    }
}

// ---------------------------------------------------------------------------
// Halfspace depth, one dimension
// ---------------------------------------------------------------------------

/// Exact univariate halfspace depth: `min(#{Xᵢ ≤ x}, #{Xᵢ ≥ x}) / n`,
/// the empirical version of `min(F(x), 1 − F(x⁻))`.
pub fn halfspace_depth_1d(x: f64, s: &Sample) -> Result<f64> {
    require_dim(s, 1)?;
    Ok(halfspace_depth_1d_values(x, s.points()))
}

/// Slice-level exact univariate halfspace depth.
pub fn halfspace_depth_1d_values(x: f64, values: &[f64]) -> f64 {
    let n = values.len();
    let le = values.iter().filter(|&&v| v <= x).count();
    let ge = values.iter().filter(|&&v| v >= x).count();
    le.min(ge) as f64 / n as f64
}

/// Same, but on values already sorted ascending (binary search).
pub(crate) fn halfspace_depth_1d_sorted(x: f64, sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let le = sorted.partition_point(|&v| v <= x);
    let lt = sorted.partition_point(|&v| v < x);
    le.min(n - lt) as f64 / n as f64
}

// ---------------------------------------------------------------------------
// Halfspace depth, two dimensions (angular sweep)
// ---------------------------------------------------------------------------

/// Reusable buffers for [`halfspace_depth_2d_points`]; avoids per-call
/// allocation in quadrature inner loops.
#[derive(Default)]
pub struct Depth2dScratch {
    angles: Vec<f64>,
    breaks: Vec<f64>,
}

/// Exact bivariate halfspace (Tukey) depth by angular sweep, `O(n log n)`.
///
/// The minimum over closed halfplanes with `x` on the boundary is attained
/// on an open arc of boundary directions, so it suffices to count points in
/// the closed semicircle `[β, β+π]` at the midpoint of every arc between
/// consecutive breakpoints (the point angles and their antipodes).
pub fn halfspace_depth_2d(x: &[f64], s: &Sample) -> Result<f64> {
    require_dim(s, 2)?;
    let mut scratch = Depth2dScratch::default();
    Ok(halfspace_depth_2d_points(
        (x[0], x[1]),
        s.points(),
        &mut scratch,
    ))
}

/// Slice-level sweep; `points` is row-major `n×2`.
pub fn halfspace_depth_2d_points(
    x: (f64, f64),
    points: &[f64],
    scratch: &mut Depth2dScratch,
) -> f64 {
    let n = points.len() / 2;
    debug_assert!(n >= 1);
    let angles = &mut scratch.angles;
    angles.clear();
    let mut ties = 0usize;
    for p in points.chunks_exact(2) {
        let dx = p[0] - x.0;
        let dy = p[1] - x.1;
        if dx == 0.0 && dy == 0.0 {
            ties += 1;
        } else {
            angles.push(dy.atan2(dx));
        }
    }
    if angles.is_empty() {
        return ties as f64 / n as f64;
    }
    angles.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    let breaks = &mut scratch.breaks;
    breaks.clear();
    for &a in angles.iter() {
        breaks.push(a);
        // Antipodal image folded into [-pi, pi].
        breaks.push(if a >= 0.0 {
            a - std::f64::consts::PI
        } else {
            a + std::f64::consts::PI
        });
    }
    breaks.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();

    let nb = breaks.len();
    let mut min_count = angles.len();
    for i in 0..nb {
        let lo = breaks[i];
        let hi = if i + 1 < nb {
            breaks[i + 1]
        } else {
            breaks[0] + std::f64::consts::TAU
        };
        if hi - lo <= 0.0 {
            continue;
        }
        let mut mid = 0.5 * (lo + hi);
        if mid >= std::f64::consts::PI {
            mid -= std::f64::consts::TAU;
        }
        let c = count_closed_semicircle(angles, mid);
        if c < min_count {
            min_count = c;
            if c == 0 {
                break;
            }
        }
    }
    (ties + min_count) as f64 / n as f64
}

/// Number of sorted angles (in `[-pi, pi]`) inside the closed arc
/// `[lo, lo + pi]`, with circular wraparound.
fn count_closed_semicircle(sorted: &[f64], lo: f64) -> usize {
    let hi = lo + std::f64::consts::PI;
    if hi <= std::f64::consts::PI {
        let a = sorted.partition_point(|&v| v < lo);
        let b = sorted.partition_point(|&v| v <= hi);
        b - a
    } else {
        let a = sorted.partition_point(|&v| v < lo);
        let wrapped = hi - std::f64::consts::TAU;
        let b = sorted.partition_point(|&v| v <= wrapped);
        (sorted.len() - a) + b
    }
}

// ---------------------------------------------------------------------------
// Halfspace depth, general dimension (randomized directions)
// ---------------------------------------------------------------------------

/// Randomized halfspace depth: minimum over `n_dirs` Haar-uniform directions
/// `u` of the fraction of points with `<u, Xᵢ> ≤ <u, x>`. Always an upper
/// bound on the exact depth, and non-increasing as the direction set grows.
pub fn halfspace_depth_approx(
    x: &[f64],
    s: &Sample,
    n_dirs: usize,
    rng: &RngStream,
) -> Result<f64> {
    if x.len() != s.m() {
        return Err(Error::Shape {
            context: "query point dimension",
            expected: s.m(),
            got: x.len(),
        });
    }
    assert!(n_dirs >= 1, "halfspace_depth_approx requires n_dirs >= 1");
    let eval = HalfspaceApproxEval::new(s, n_dirs, rng);
    Ok(eval.depth(x))
}

/// Pre-drawn directions with sorted sample projections, so many query points
/// can be evaluated against one common direction set (and the approx depth
/// is monotone for nested sets by construction).
pub struct HalfspaceApproxEval {
    m: usize,
    n: usize,
    dirs: Vec<f64>,
    sorted_proj: Vec<f64>,
}

impl HalfspaceApproxEval {
    pub fn new(s: &Sample, n_dirs: usize, rng: &RngStream) -> Self {
        let m = s.m();
        let n = s.n();
        let mut dirs = Vec::with_capacity(n_dirs * m);
        let mut rgen = rng.rng();
        use rand_distr::StandardNormal;
        for _ in 0..n_dirs {
            loop {
                let v: Vec<f64> = (0..m)
                    .map(|_| rand::Rng::sample(&mut rgen, StandardNormal))
                    .collect();
                let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    dirs.extend(v.iter().map(|a| a / norm));
                    break;
                }
            }
        }
        let mut sorted_proj = vec![0.0; n_dirs * n];
        for d in 0..n_dirs {
            let u = &dirs[d * m..(d + 1) * m];
            for (i, row) in s.rows().enumerate() {
                sorted_proj[d * n + i] = dot(u, row);
            }
            sorted_proj[d * n..(d + 1) * n]
                .sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        }
        HalfspaceApproxEval {
            m,
            n,
            dirs,
            sorted_proj,
        }
    }

    pub fn depth(&self, x: &[f64]) -> f64 {
        let n_dirs = self.dirs.len() / self.m;
        let mut min_frac = 1.0f64;
        for d in 0..n_dirs {
            let u = &self.dirs[d * self.m..(d + 1) * self.m];
            let t = dot(u, x);
            let proj = &self.sorted_proj[d * self.n..(d + 1) * self.n];
            let le = proj.partition_point(|&v| v <= t);
            let lt = proj.partition_point(|&v| v < t);
            // Both u and -u come for free from one projection.
            let lower = le.min(self.n - lt);
            let frac = lower as f64 / self.n as f64;
            if frac < min_frac {
                min_frac = frac;
                if min_frac == 0.0 {
                    break;
                }
            }
        }
        min_frac
    }
}

// ---------------------------------------------------------------------------
// Simplicial depth
// ---------------------------------------------------------------------------

/// Exact univariate simplicial depth
/// `2 F(x)(1−F(x)) + (F²(x) − F²(x⁻))` with `F` the empirical CDF; the
/// probability that `x` lies in the closed segment of two draws with
/// replacement.
pub fn simplicial_depth_1d(x: f64, s: &Sample) -> Result<f64> {
    require_dim(s, 1)?;
    Ok(simplicial_depth_1d_values(x, s.points()))
}

/// Slice-level exact univariate simplicial depth.
pub fn simplicial_depth_1d_values(x: f64, values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let le = values.iter().filter(|&&v| v <= x).count() as f64;
    let lt = values.iter().filter(|&&v| v < x).count() as f64;
    let f = le / n;
    let f_minus = lt / n;
    2.0 * f * (1.0 - f) + (f * f - f_minus * f_minus)
}

/// Exact empirical simplicial depth: the fraction of `(m+1)`-subsets of
/// sample points (without replacement, U-statistic convention) whose closed
/// simplex contains `x`. Degenerate simplices are decided by the same
/// closed-containment test through a least-squares barycentric solve.
pub fn simplicial_depth_exact(x: &[f64], s: &Sample) -> Result<f64> {
    let m = s.m();
    let n = s.n();
    if x.len() != m {
        return Err(Error::Shape {
            context: "query point dimension",
            expected: m,
            got: x.len(),
        });
    }
    let k = m + 1;
    if n < k {
        return Err(Error::DegenerateSample {
            context: "simplicial depth needs at least m+1 points",
        });
    }
    let total = binomial(n, k);
    if total > SIMPLICIAL_EXACT_LIMIT {
        return Err(Error::Size { n, k });
    }
    let mut solver = BarycentricSolver::new(m);
    let mut idx: Vec<usize> = (0..k).collect();
    let mut contained = 0u64;
    loop {
        let vertices: Vec<&[f64]> = idx.iter().map(|&i| s.point(i)).collect();
        if solver.contains(&vertices, x) {
            contained += 1;
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    Ok(contained as f64 / total as f64)
}

/// Monte-Carlo simplicial depth: fraction of `draws` random `(m+1)`-subsets
/// containing `x`; unbiased for [`simplicial_depth_exact`] with standard
/// error at most `0.5/sqrt(draws)`.
pub fn simplicial_depth_mc(
    x: &[f64],
    s: &Sample,
    draws: usize,
    rng: &RngStream,
) -> Result<f64> {
    let m = s.m();
    let n = s.n();
    if x.len() != m {
        return Err(Error::Shape {
            context: "query point dimension",
            expected: m,
            got: x.len(),
        });
    }
    let k = m + 1;
    if n < k {
        return Err(Error::DegenerateSample {
            context: "simplicial depth needs at least m+1 points",
        });
    }
    assert!(draws >= 1, "simplicial_depth_mc requires draws >= 1");
    let mut rgen = rng.rng();
    let mut solver = BarycentricSolver::new(m);
    let mut idx = vec![0usize; k];
    let mut contained = 0u64;
    for _ in 0..draws {
        sample_distinct(&mut rgen, n, &mut idx);
        let vertices: Vec<&[f64]> = idx.iter().map(|&i| s.point(i)).collect();
        if solver.contains(&vertices, x) {
            contained += 1;
        }
    }
    Ok(contained as f64 / draws as f64)
}

fn sample_distinct(rng: &mut impl rand::Rng, n: usize, out: &mut [usize]) {
    let k = out.len();
    debug_assert!(k <= n);
    let mut filled = 0;
    while filled < k {
        let c = rng.random_range(0..n);
        if !out[..filled].contains(&c) {
            out[filled] = c;
            filled += 1;
        }
    }
}

/// Closed-simplex containment by sign-consistent barycentric coordinates.
/// `λ ≥ −1e-12` counts the boundary as inside.
pub struct BarycentricSolver {
    m: usize,
    a: Vec<f64>,
    rhs: Vec<f64>,
}

impl BarycentricSolver {
    pub fn new(m: usize) -> Self {
        let k = m + 1;
        BarycentricSolver {
            m,
            a: vec![0.0; k * k],
            rhs: vec![0.0; k],
        }
    }

    pub fn contains(&mut self, vertices: &[&[f64]], x: &[f64]) -> bool {
        let m = self.m;
        let k = m + 1;
        // System: sum_j λ_j v_j = x, sum_j λ_j = 1.
        for j in 0..k {
            for r in 0..m {
                self.a[r * k + j] = vertices[j][r];
            }
            self.a[m * k + j] = 1.0;
        }
        self.rhs[..m].copy_from_slice(x);
        self.rhs[m] = 1.0;
        let scale = vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(1.0f64, |acc, v| acc.max(v.abs()));
        match solve_partial_pivot(&mut self.a, &mut self.rhs, k, 1e-12 * scale) {
            Some(()) => self.rhs.iter().all(|&l| l >= -BARYCENTRIC_TOL),
            None => {
                // Degenerate simplex: fall back to a least-squares solve and
                // require the reconstruction to actually hit x.
                degenerate_contains(vertices, x, scale)
            }
        }
    }
}

fn degenerate_contains(vertices: &[&[f64]], x: &[f64], scale: f64) -> bool {
    let m = x.len();
    let k = m + 1;
    // Normal equations for [Vᵀ; 1ᵀ] λ = [x; 1] with eigenvalue cutoff.
    let mut at_a = vec![0.0; k * k];
    let mut at_b = vec![0.0; k];
    for i in 0..k {
        for j in 0..k {
            let mut acc = 1.0; // the all-ones row
            for r in 0..m {
                acc += vertices[i][r] * vertices[j][r];
            }
            at_a[i * k + j] = acc;
        }
        let mut acc = 1.0;
        for r in 0..m {
            acc += vertices[i][r] * x[r];
        }
        at_b[i] = acc;
    }
    let Ok((vals, vecs)) = jacobi_eigen(k, &at_a) else {
        return false;
    };
    let cutoff = vals[0].abs().max(1.0) * 1e-12;
    let mut lambda = vec![0.0; k];
    for r in 0..k {
        if vals[r] > cutoff {
            let num = dot(vecs.row(r), &at_b);
            for j in 0..k {
                lambda[j] += vecs.row(r)[j] * num / vals[r];
            }
        }
    }
    let sum: f64 = lambda.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return false;
    }
    for r in 0..m {
        let mut acc = 0.0;
        for j in 0..k {
            acc += lambda[j] * vertices[j][r];
        }
        if (acc - x[r]).abs() > 1e-9 * scale.max(1.0) {
            return false;
        }
    }
    lambda.iter().all(|&l| l >= -BARYCENTRIC_TOL)
}

fn solve_partial_pivot(a: &mut [f64], b: &mut [f64], k: usize, tol: f64) -> Option<()> {
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
        if best <= tol {
            return None;
        }
        if pivot != col {
            for c in 0..k {
                a.swap(pivot * k + c, col * k + c);
            }
            b.swap(pivot, col);
        }
        let d = a[col * k + col];
        for r in (col + 1)..k {
            let f = a[r * k + col] / d;
            if f != 0.0 {
                for c in col..k {
                    a[r * k + c] -= f * a[col * k + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..k).rev() {
        let mut acc = b[col];
        for c in (col + 1)..k {
            acc -= a[col * k + c] * b[c];
        }
        b[col] = acc / a[col * k + col];
    }
    Some(())
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if acc > 4 * SIMPLICIAL_EXACT_LIMIT {
            return acc;
        }
    }
    acc
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
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

// ---------------------------------------------------------------------------
// Mahalanobis depth
// ---------------------------------------------------------------------------

/// Mahalanobis depth `1/(1 + M²(x))` with
/// `M² = (x − x̄)ᵀ Σ̂⁻¹ (x − x̄)` and `Σ̂` the sample covariance
/// (1/(n−1) normalization). The `1/(1+t²)` transform is one of many
/// admissible monotone decreasing transformations and is not canonical.
pub fn mahalanobis_depth(x: &[f64], s: &Sample) -> Result<f64> {
    let m2 = mahalanobis_sq(x, s)?;
    Ok(1.0 / (1.0 + m2))
}

pub(crate) fn mahalanobis_sq(x: &[f64], s: &Sample) -> Result<f64> {
    let m = s.m();
    if x.len() != m {
        return Err(Error::Shape {
            context: "query point dimension",
            expected: m,
            got: x.len(),
        });
    }
    let cov = s.covariance();
    let (vals, vecs) = jacobi_eigen(m, &cov)?;
    check_condition(&vals)?;
    let mu = s.mean();
    let d: Vec<f64> = x.iter().zip(&mu).map(|(a, b)| a - b).collect();
    let mut m2 = 0.0;
    for r in 0..m {
        let c = dot(vecs.row(r), &d);
        m2 += c * c / vals[r];
    }
    Ok(m2)
}

pub(crate) fn check_condition(eigenvalues: &[f64]) -> Result<()> {
    let max = eigenvalues[0];
    let min = *eigenvalues.last().unwrap();
    if !(min > 0.0) || max / min > COVARIANCE_CONDITION_LIMIT {
        return Err(Error::SingularCovariance {
            limit: COVARIANCE_CONDITION_LIMIT,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

/// Depth of a point with the default per-dimension routing: exact halfspace
/// for m ≤ 2 and `n_dirs` random directions above (default `500·m`);
/// exact simplicial enumeration when feasible, Monte Carlo otherwise.
pub fn depth_point(
    x: &[f64],
    s: &Sample,
    kind: DepthKind,
    rng: &RngStream,
) -> Result<f64> {
    match kind {
        DepthKind::Halfspace => match s.m() {
            1 => halfspace_depth_1d(x[0], s),
            2 => halfspace_depth_2d(x, s),
            m => halfspace_depth_approx(x, s, 500 * m, rng),
        },
        DepthKind::Simplicial => match s.m() {
            1 => simplicial_depth_1d(x[0], s),
            m => {
                if binomial(s.n(), m + 1) <= 200_000 {
                    simplicial_depth_exact(x, s)
                } else {
                    simplicial_depth_mc(x, s, 20_000, rng)
                }
            }
        },
        DepthKind::Mahalanobis => mahalanobis_depth(x, s),
    }
}

fn require_dim(s: &Sample, m: usize) -> Result<()> {
    if s.m() != m {
        return Err(Error::Shape {
            context: "sample dimension",
            expected: m,
            got: s.m(),
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Verification oracles (test support)
// ---------------------------------------------------------------------------

/// Brute-force reference implementations used by the test and acceptance
/// suites. Kept independent of the production algorithms above.
pub mod oracle {
    /// Exact 2-D halfspace depth as a minimum over `O(n²)` candidate normal
    /// directions: perpendiculars and directions of each offset, plus
    /// perpendiculars of pairwise angular bisectors (covering every open arc
    /// between critical angles).
    pub fn halfspace_depth_2d_bruteforce(x: (f64, f64), points: &[f64]) -> f64 {
        let n = points.len() / 2;
        let mut ties = 0usize;
        let mut zs: Vec<(f64, f64)> = Vec::with_capacity(n);
        for p in points.chunks_exact(2) {
            let z = (p[0] - x.0, p[1] - x.1);
            if z.0 == 0.0 && z.1 == 0.0 {
                ties += 1;
            } else {
                zs.push(z);
            }
        }
        if zs.is_empty() {
            return ties as f64 / n as f64;
        }
        let units: Vec<(f64, f64)> = zs
            .iter()
            .map(|&(a, b)| {
                let l = (a * a + b * b).sqrt();
                (a / l, b / l)
            })
            .collect();
        let mut candidates: Vec<(f64, f64)> = Vec::new();
        for &(a, b) in &units {
            candidates.push((a, b));
            candidates.push((-a, -b));
            candidates.push((-b, a));
            candidates.push((b, -a));
        }
        for i in 0..units.len() {
            for j in (i + 1)..units.len() {
                for (sa, sb) in [(1.0, 1.0), (1.0, -1.0)] {
                    let v = (
                        sa * units[i].0 + sb * units[j].0,
                        sa * units[i].1 + sb * units[j].1,
                    );
                    let l = (v.0 * v.0 + v.1 * v.1).sqrt();
                    if l > 1e-12 {
                        let u = (v.0 / l, v.1 / l);
                        candidates.push(u);
                        candidates.push((-u.1, u.0));
                        candidates.push((u.1, -u.0));
                    }
                }
            }
        }
        let mut min_count = zs.len();
        for u in candidates {
            let c = zs
                .iter()
                .filter(|z| u.0 * z.0 + u.1 * z.1 <= 0.0)
                .count();
            min_count = min_count.min(c);
        }
        (ties + min_count) as f64 / n as f64
    }
}

// ---------------------------------------------------------------------------
