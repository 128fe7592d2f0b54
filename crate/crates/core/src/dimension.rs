//! Dimension selection and the dimension-reduction dispersion profile.
//!
//! The optimal dimension pair `(p*, q*)` is found by the recursive procedure
//! of the source method: fit one optimal direction per random subsample,
//! test the fitted directions for uniformity with the Rayleigh statistic
//! `R_k = k·d·‖B̄‖²`, and keep peeling one dimension while the test rejects.
//!
//! Fitted directions carry an arbitrary sign, so they are sign-canonicalized
//! before averaging. Canonicalized axes are *not* uniform on the sphere even
//! under perfect spherical symmetry (they live on a half-domain with a mean
//! offset), so the chi-square reference for `R_k` would reject always.
//! Stage p-values therefore come from a parametric-bootstrap null: the same
//! subsample-fit-and-canonicalize pipeline run on standard-normal spherical
//! data of matching shape. Tables are keyed by `(n, d, k, s, kind)`, built
//! from a fixed stream independent of the user seed, and cached per process.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::DepthKind;
use crate::dispersion::DispersionEstimate;
use crate::numerics::eigen::jacobi_eigen;
use crate::numerics::frame::Frame;
use crate::numerics::rng::RngStream;
use crate::numerics::special::chi_square_sf;
use crate::sample::Sample;
use crate::subspace::{
    dispersion_of_frame, maximize_dispersion, EstimatorSettings, SearchConfig,
};
use crate::{Error, Result};

/// Monotonicity radius for the halfspace dispersion profile: `1/sqrt(pi)`.
pub const R_HALFSPACE: f64 = 0.5641895835477563;

/// Monotonicity radius for the simplicial profile in ambient dimension `m`:
/// `1/(sqrt(pi)(m+1))`.
pub fn r_simplicial(m: usize) -> f64 {
    R_HALFSPACE / (m as f64 + 1.0)
}

/// Replicates in the bootstrap null table; `(M+1)·0.05` is an integer so the
/// rank test has exact size at the 5% level.
const NULL_REPLICATES: usize = 39;

const SALT_STAGE_DIRS: u64 = 0xD1A0;
const SALT_STAGE_FIT: u64 = 0xF17A;
const SALT_REFIT: u64 = 0x0EF1;

// ---------------------------------------------------------------------------
// Rayleigh statistic
// ---------------------------------------------------------------------------

/// Rayleigh uniformity statistic for unit vectors in `R^m`:
/// `R_k = k·m·‖B̄‖²` with `B̄` the mean direction, and the asymptotic
/// chi-square(m) p-value. Valid for directions uniform on the full sphere.
pub fn rayleigh_test(dirs: &[f64], m: usize) -> Result<(f64, f64)> {
    assert!(m >= 1, "rayleigh_test requires m >= 1");
    assert!(
        !dirs.is_empty() && dirs.len() % m == 0,
        "direction buffer must hold k >= 1 vectors of length m"
    );
    for (i, d) in dirs.chunks_exact(m).enumerate() {
        let norm: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NonUnitNorm {
                index: i,
                norm,
                tol: 1e-8,
            });
        }
    }
    let r = rayleigh_statistic(dirs, m);
    Ok((r, chi_square_sf(r, m)))
}

fn rayleigh_statistic(dirs: &[f64], m: usize) -> f64 {
    let k = dirs.len() / m;
    let mut mean = vec![0.0; m];
    for d in dirs.chunks_exact(m) {
        for (acc, v) in mean.iter_mut().zip(d) {
            *acc += v;
        }
    }
    let norm_sq: f64 = mean.iter().map(|v| (v / k as f64).powi(2)).sum();
    k as f64 * m as f64 * norm_sq
}

/// Flip a direction so its largest-|component| coordinate is positive
/// (ties break toward the smallest index).
pub fn canonicalize_sign(dir: &mut [f64]) {
    let mut arg = 0usize;
    for (i, v) in dir.iter().enumerate() {
        if v.abs() > dir[arg].abs() {
            arg = i;
        }
    }
    if dir[arg] < 0.0 {
        for v in dir.iter_mut() {
            *v = -*v;
        }
    }
}

// ---------------------------------------------------------------------------
// Recursive dimension selection
// ---------------------------------------------------------------------------

/// One stage of the recursive uniformity test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    /// 1-based stage counter (`1, 2, …`): stage `i` decides whether
    /// `p* = i − 1`.
    pub p_candidate: usize,
    /// Dimension of the working sample at this stage.
    pub ambient_dim: usize,
    pub r_k: f64,
    /// Bootstrap p-value of `R_k` against spherical data of matching shape.
    pub p_value: f64,
    pub accepted: bool,
}

/// Output of [`select_dimension`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimensionReport {
    pub stages: Vec<StageRecord>,
    pub p_star: usize,
    pub q_star: usize,
    /// Central-subspace basis on the original sample (`None` when p* = 0).
    pub b_p_star: Option<Frame>,
    /// Projection basis on the original sample (the identity when p* = 0).
    pub b_q_star: Frame,
    pub k: usize,
    pub sub_size: usize,
    pub alpha: f64,
}

/// Reduced-budget search used for the per-subsample direction fits; k of
/// these run per stage, so they must stay cheap.
fn subsample_search_config(rng: RngStream) -> SearchConfig {
    let lean = EstimatorSettings {
        qmc_nodes: 48,
        gini_draws: 48,
        approx_dirs: Some(24),
    };
    SearchConfig {
        restarts: 2,
        coarse_grid: 16,
        local_iters: 25,
        step_init: 0.4,
        step_decay: 0.85,
        rng,
        search_estimator: Some(lean),
        final_estimator: Some(lean),
    }
}

/// Optimal direction of one subsample: the one-row central basis `B_p` of a
/// `q = d−1` minimization, sign-canonicalized.
fn subsample_direction(
    working: &Sample,
    sub_size: usize,
    kind: DepthKind,
    stream: RngStream,
) -> Result<Vec<f64>> {
    let d = working.m();
    let mut rgen = stream.substream(0).rng();
    let mut pts = Vec::with_capacity(sub_size * d);
    for _ in 0..sub_size {
        let i = rand::Rng::random_range(&mut rgen, 0..working.n());
        pts.extend_from_slice(working.point(i));
    }
    let sub = Sample::new(sub_size, d, pts)?;
    let cfg = subsample_search_config(stream.substream(1));
    let fit = crate::subspace::search_frame_only(&sub, d - 1, kind, &cfg)?;
    let mut dir = fit.1.row(0).to_vec();
    canonicalize_sign(&mut dir);
    Ok(dir)
}

/// The canonicalized Rayleigh statistic of `k` subsample directions of a
/// working sample.
fn stage_statistic(
    working: &Sample,
    k: usize,
    sub_size: usize,
    kind: DepthKind,
    stream: &RngStream,
) -> Result<f64> {
    let d = working.m();
    let dirs: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|j| subsample_direction(working, sub_size, kind, stream.substream(j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let flat: Vec<f64> = dirs.into_iter().flatten().collect();
    Ok(rayleigh_statistic(&flat, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct NullKey {
    n: usize,
    d: usize,
    k: usize,
    sub_size: usize,
    kind_tag: u8,
}

fn kind_tag(kind: DepthKind) -> u8 {
    match kind {
        DepthKind::Halfspace => 0,
        DepthKind::Simplicial => 1,
        DepthKind::Mahalanobis => 2,
    }
}

/// Null distribution of the stage statistic under spherical symmetry:
/// the identical pipeline run on standard-normal data of the same shape.
/// Built once per key from a fixed stream (independent of the user seed)
/// and cached for the process lifetime.
fn null_table(
    n: usize,
    d: usize,
    k: usize,
    sub_size: usize,
    kind: DepthKind,
) -> Result<std::sync::Arc<Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<NullKey, std::sync::Arc<Vec<f64>>>>> = OnceLock::new();
    let key = NullKey {
        n,
        d,
        k,
        sub_size,
        kind_tag: kind_tag(kind),
    };
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let base = RngStream::new(0x5EED_7AB1_E000_0000 ^ ((n as u64) << 32) ^ ((d as u64) << 24)
        ^ ((k as u64) << 8) ^ sub_size as u64 ^ ((kind_tag(kind) as u64) << 60));
    let values: Vec<f64> = (0..NULL_REPLICATES)
        .into_par_iter()
        .map(|r| {
            let rep = base.substream(r as u64);
            let data = crate::synth::gaussian_spherical(n, d, &rep.substream(0));
            stage_statistic(&data, k, sub_size, kind, &rep.substream(1))
        })
        .collect::<Result<Vec<_>>>()?;
    let arc = std::sync::Arc::new(values);
    cache.lock().unwrap().insert(key, arc.clone());
    Ok(arc)
}

/// Recursive Rayleigh-test selection of the optimal dimensions `(p*, q*)`.
///
/// At each stage with working dimension `d` (initially `m`): draw `k`
/// subsamples of size `sub_size` with repetition, fit each subsample's
/// optimal direction, canonicalize signs, and compare the Rayleigh statistic
/// against its spherical bootstrap null. Acceptance at stage `i` sets
/// `p* = i − 1`; rejection fits `B_{d−1}` on the full working sample,
/// replaces the working sample by its projection, and recurses. If every
/// test rejects, `p* = m − 1`. Final frames are fit on the original sample
/// at `(p*, q*)`.
pub fn select_dimension(
    s: &Sample,
    k: usize,
    sub_size: usize,
    alpha: f64,
    kind: DepthKind,
    cfg: &SearchConfig,
) -> Result<DimensionReport> {
    let m = s.m();
    if m < 2 {
        return Err(Error::InvalidParameter {
            context: "select_dimension requires ambient dimension >= 2",
        });
    }
    if sub_size <= 1 || sub_size >= s.n() {
        return Err(Error::Subsample {
            sub_size,
            n: s.n(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            context: "alpha must lie in (0, 1)",
        });
    }
    if k < 2 {
        return Err(Error::InvalidParameter {
            context: "select_dimension requires k >= 2 subsamples",
        });
    }

    let mut stages = Vec::new();
    let mut working = s.clone();
    let mut first_stage_fit: Option<(Frame, Frame)> = None;
    let mut p_star = m - 1;
    let mut d = m;
    while d >= 2 {
        let stage_idx = m - d; // 0-based
        let dir_stream = cfg.rng.substream(SALT_STAGE_DIRS + stage_idx as u64);
        let r_k = stage_statistic(&working, k, sub_size, kind, &dir_stream)?;
        let table = null_table(working.n(), d, k, sub_size, kind)?;
        let exceed = table.iter().filter(|&&v| v >= r_k).count();
        let p_value = (1 + exceed) as f64 / (table.len() + 1) as f64;
        let accepted = p_value > alpha;
        stages.push(StageRecord {
            p_candidate: stage_idx + 1,
            ambient_dim: d,
            r_k,
            p_value,
            accepted,
        });
        if accepted {
            p_star = stage_idx;
            break;
        }
        if d == 2 {
            // Every test rejected.
            p_star = m - 1;
            break;
        }
        // Fit B_{d−1} on the full working sample and project. Only the
        // frames are needed here, so the search skips the per-point depth
        // finalization.
        let fit_cfg = SearchConfig {
            rng: cfg.rng.substream(SALT_STAGE_FIT + stage_idx as u64),
            ..*cfg
        };
        let (b_q, b_p) = crate::subspace::search_frame_only(&working, d - 1, kind, &fit_cfg)?;
        working = working.project(&b_q)?;
        if stage_idx == 0 {
            first_stage_fit = Some((b_p, b_q));
        }
        d -= 1;
    }

    let q_star = m - p_star;
    let (b_p_star, b_q_star) = if p_star == 0 {
        (None, Frame::identity(m))
    } else if p_star == 1 && first_stage_fit.is_some() {
        // The first-stage fit already is a full-budget (1, m−1) fit on the
        // original sample.
        let (b_p, b_q) = first_stage_fit.unwrap();
        (Some(b_p), b_q)
    } else {
        let refit_cfg = SearchConfig {
            rng: cfg.rng.substream(SALT_REFIT),
            ..*cfg
        };
        let (b_q, b_p) = crate::subspace::search_frame_only(s, q_star, kind, &refit_cfg)?;
        (Some(b_p), b_q)
    };

    Ok(DimensionReport {
        stages,
        p_star,
        q_star,
        b_p_star,
        b_q_star,
        k,
        sub_size,
        alpha,
    })
}

// ---------------------------------------------------------------------------
// Ball rescaling and the dispersion profile
// ---------------------------------------------------------------------------

/// Center the sample at its coordinate-wise mean and scale it so the largest
/// point norm equals `radius` exactly (samples already inside the ball are
/// still scaled out to touch the boundary).
pub fn rescale_to_ball(s: &Sample, radius: f64) -> Result<Sample> {
    assert!(radius > 0.0, "rescale_to_ball requires radius > 0");
    let mu = s.mean();
    let mut max_norm: f64 = 0.0;
    for row in s.rows() {
        let norm: f64 = row
            .iter()
            .zip(&mu)
            .map(|(v, m)| (v - m) * (v - m))
            .sum::<f64>()
            .sqrt();
        max_norm = max_norm.max(norm);
    }
    if max_norm == 0.0 {
        return Err(Error::DegenerateSample {
            context: "rescale_to_ball: all points identical",
        });
    }
    let scale = radius / max_norm;
    let mut pts = Vec::with_capacity(s.n() * s.m());
    for row in s.rows() {
        for (v, m) in row.iter().zip(&mu) {
            pts.push((v - m) * scale);
        }
    }
    let mut out = Sample::new(s.n(), s.m(), pts)?;
    if let Some(labels) = s.labels() {
        out = out.with_labels(labels.to_vec())?;
    }
    Ok(out)
}

/// One entry of the dispersion profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub p: usize,
    pub sigma_max: f64,
    pub std_error: f64,
    pub frame: Frame,
}

/// Maximal dispersion per projecting dimension after ball rescaling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersionProfile {
    pub radius: f64,
    pub per_p: Vec<ProfileEntry>,
}

/// Dimension-reduction profile: rescale the sample into the monotonicity
/// ball (`r_H` for halfspace, `r_Δ = r_H/(m+1)` for simplicial, ambient m),
/// then record the maximal dispersion for every `p = 1..m` (`p = m` is the
/// dispersion of the full rescaled sample). In the small ball the sequence
/// is non-increasing up to estimator noise.
pub fn dispersion_profile(
    s: &Sample,
    kind: DepthKind,
    cfg: &SearchConfig,
) -> Result<DispersionProfile> {
    let m = s.m();
    if s.n() < m + 1 {
        return Err(Error::DegenerateSample {
            context: "dispersion_profile needs n >= m + 1",
        });
    }
    let radius = match kind {
        DepthKind::Simplicial => r_simplicial(m),
        _ => R_HALFSPACE,
    };
    let rescaled = rescale_to_ball(s, radius)?;
    let mut per_p = Vec::with_capacity(m);
    for p in 1..=m {
        if p == m {
            let est = cfg
                .final_estimator
                .unwrap_or_else(|| EstimatorSettings::default_for(m));
            let frame = Frame::identity(m);
            let d = dispersion_of_frame(
                &rescaled,
                &frame,
                kind,
                &est,
                &cfg.rng.substream(0x9F0F + p as u64),
            )?;
            per_p.push(ProfileEntry {
                p,
                sigma_max: d.value,
                std_error: d.se(),
                frame,
            });
        } else {
            let fit_cfg = SearchConfig {
                rng: cfg.rng.substream(0x9000 + p as u64),
                ..*cfg
            };
            let fit = maximize_dispersion(&rescaled, p, kind, &fit_cfg)?;
            per_p.push(ProfileEntry {
                p,
                sigma_max: fit.sigma.value,
                std_error: fit.sigma.se(),
                frame: fit.b_p.expect("p >= 1 frame"),
            });
        }
    }
    Ok(DispersionProfile { radius, per_p })
}

// ---------------------------------------------------------------------------
// PCA cross-check
// ---------------------------------------------------------------------------

/// Eigen-decomposition frames of the sample covariance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaFrames {
    /// Top-p principal directions (rows, descending eigenvalue order).
    pub b_p: Frame,
    /// Bottom-q principal directions; `None` when p = m.
    pub b_q: Option<Frame>,
    pub eigenvalues: Vec<f64>,
}

/// PCA frames via the Jacobi eigensolver: `B_p` spans the first `p`
/// principal directions and `B_q` the last `q = m − p`.
pub fn pca_frames(s: &Sample, p: usize) -> Result<PcaFrames> {
    let m = s.m();
    if p < 1 || p > m {
        return Err(Error::InvalidParameter {
            context: "pca_frames requires 1 <= p <= m",
        });
    }
    let cov = s.covariance();
    let (vals, vecs) = jacobi_eigen(m, &cov)?;
    crate::depth::check_condition(&vals)?;
    let b_p = Frame::new(p, m, vecs.entries()[..p * m].to_vec())?;
    let b_q = if p < m {
        Some(Frame::new(m - p, m, vecs.entries()[p * m..].to_vec())?)
    } else {
        None
    };
    Ok(PcaFrames {
        b_p,
        b_q,
        eigenvalues: vals,
    })
}

/// One-shot dispersion estimate of a raw (unprojected) sample.
pub fn full_sample_dispersion(
    s: &Sample,
    kind: DepthKind,
    est: &EstimatorSettings,
    rng: &RngStream,
) -> Result<DispersionEstimate> {
    dispersion_of_frame(s, &Frame::identity(s.m()), kind, est, rng)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn rayleigh_aligned_directions() {
        // Ten copies of e1 in R^3: R = 30, far in the chi-square tail
        // (sf(30, 3) = 1.38e-6 by numerical integration).
        let dirs: Vec<f64> = (0..10).flat_map(|_| vec![1.0, 0.0, 0.0]).collect();
        let (r, p) = rayleigh_test(&dirs, 3).unwrap();
        assert!((r - 30.0).abs() < 1e-12);
        assert!(p < 1e-5);
        assert!((p - 1.3800570312932547e-6).abs() < 1e-9);
    }

    #[test]
    fn rayleigh_cancelling_directions() {
        let dirs = vec![1.0, 0.0, 0.0, -1.0, 0.0, 0.0];
        let (r, p) = rayleigh_test(&dirs, 3).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn rayleigh_rejects_non_unit() {
        let dirs = vec![2.0, 0.0];
        assert!(matches!(
            rayleigh_test(&dirs, 2),
            Err(Error::NonUnitNorm { .. })
        ));
    }

    #[test]
    fn rayleigh_range_bound() {
        // R_k is in [0, k·m].
        let rng = RngStream::new(2);
        for trial in 0..5u64 {
            let dirs: Vec<f64> = (0..20)
                .flat_map(|i| {
                    let f = crate::numerics::frame::random_frame(
                        1,
                        3,
                        &rng.substream(100 * trial + i),
                    );
                    f.row(0).to_vec()
                })
                .collect();
            let (r, p) = rayleigh_test(&dirs, 3).unwrap();
            assert!(r >= 0.0 && r <= 60.0);
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn rayleigh_null_is_uniform() {
        // 200 replications of 500 Haar directions in R^3: KS distance of
        // the p-values from U(0,1) below 0.1 at this fixed seed.
        let root = RngStream::new(31);
        let mut pvals = Vec::with_capacity(200);
        for rep in 0..200u64 {
            let stream = root.substream(rep);
            let mut dirs = Vec::with_capacity(500 * 3);
            for i in 0..500u64 {
                let f =
                    crate::numerics::frame::random_frame(1, 3, &stream.substream(i));
                dirs.extend_from_slice(f.row(0));
            }
            let (_, p) = rayleigh_test(&dirs, 3).unwrap();
            pvals.push(p);
        }
        pvals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = pvals.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &p) in pvals.iter().enumerate() {
            ks = ks.max((p - i as f64 / n).abs());
            ks = ks.max(((i + 1) as f64 / n - p).abs());
        }
        assert!(ks < 0.1, "KS distance {ks}");
    }

    #[test]
    fn canonicalize_flips_on_dominant_negative() {
        let mut d = vec![-0.029, 0.021, -0.999];
        canonicalize_sign(&mut d);
        assert!(d[2] > 0.0);
        let mut d = vec![0.1, 0.9, -0.2];
        canonicalize_sign(&mut d);
        assert!((d[1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn rescale_to_ball_examples() {
        let s = Sample::new(3, 2, vec![0.0, 0.0, 1.0, 0.0, 3.0, 0.0]).unwrap();
        let r = rescale_to_ball(&s, R_HALFSPACE).unwrap();
        let max_norm = r
            .rows()
            .map(|row| (row[0] * row[0] + row[1] * row[1]).sqrt())
            .fold(0.0f64, f64::max);
        assert!((max_norm - R_HALFSPACE).abs() < 1e-12);
        // Already inside the ball: still rescaled out to the boundary.
        let tiny = Sample::new(2, 1, vec![-0.001, 0.001]).unwrap();
        let r = rescale_to_ball(&tiny, 2.0).unwrap();
        assert!((r.points()[0].abs() - 2.0).abs() < 1e-12);
        // r_H constant.
        assert!((R_HALFSPACE - 0.5641895835477563).abs() < 1e-15);
        let constant = Sample::new(3, 1, vec![4.0, 4.0, 4.0]).unwrap();
        assert!(matches!(
            rescale_to_ball(&constant, 1.0),
            Err(Error::DegenerateSample { .. })
        ));
    }

    #[test]
    fn profile_of_line_sample() {
        // Points on a line in R^3: sigma_max(1) > 0 and sigma_max(p >= 2) = 0
        // for the simplicial (Gini) estimator.
        let v = [0.6, 0.0, 0.8];
        let pts: Vec<f64> = (-8..=8)
            .flat_map(|t| v.iter().map(move |c| t as f64 * c).collect::<Vec<_>>())
            .collect();
        let s = Sample::new(17, 3, pts).unwrap();
        let cfg = SearchConfig {
            restarts: 2,
            coarse_grid: 12,
            local_iters: 30,
            ..SearchConfig::new(RngStream::new(3))
        };
        let profile = dispersion_profile(&s, DepthKind::Simplicial, &cfg).unwrap();
        assert_eq!(profile.per_p.len(), 3);
        assert!(profile.per_p[0].sigma_max > 0.0);
        assert!(profile.per_p[1].sigma_max < 1e-12);
        assert!(profile.per_p[2].sigma_max < 1e-12);
        assert!((profile.radius - r_simplicial(3)).abs() < 1e-15);
    }

    #[test]
    fn pca_frames_dominant_axis() {
        let s = synth::gaussian_diag(3000, &[5.0, 1.0, 1.0], &RngStream::new(4));
        let pca = pca_frames(&s, 1).unwrap();
        assert!(pca.b_p.row(0)[0].abs() > 0.97);
        let trace = s.covariance()[0] + s.covariance()[4] + s.covariance()[8];
        let sum: f64 = pca.eigenvalues.iter().sum();
        assert!((sum - trace).abs() < 1e-8 * trace.abs().max(1.0));
        assert_eq!(pca.b_q.as_ref().unwrap().rows(), 2);
    }

    #[test]
    fn subsample_error() {
        let s = synth::gaussian_spherical(10, 3, &RngStream::new(5));
        let cfg = SearchConfig::new(RngStream::new(6));
        assert!(matches!(
            select_dimension(&s, 10, 1, 0.05, DepthKind::Simplicial, &cfg),
            Err(Error::Subsample { .. })
        ));
        assert!(matches!(
            select_dimension(&s, 10, 10, 0.05, DepthKind::Simplicial, &cfg),
            Err(Error::Subsample { .. })
        ));
    }

    #[test]
    fn select_dimension_is_deterministic() {
        let s = synth::gaussian_diag(60, &[1.0, 1.0, 4.0], &RngStream::new(7));
        let cfg = SearchConfig {
            restarts: 2,
            coarse_grid: 8,
            local_iters: 20,
            ..SearchConfig::new(RngStream::new(8))
        };
        let a = select_dimension(&s, 40, 15, 0.05, DepthKind::Simplicial, &cfg).unwrap();
        let b = select_dimension(&s, 40, 15, 0.05, DepthKind::Simplicial, &cfg).unwrap();
        assert_eq!(a.p_star, b.p_star);
        assert_eq!(a.stages.len(), b.stages.len());
        for (x, y) in a.stages.iter().zip(&b.stages) {
            assert_eq!(x.r_k, y.r_k);
            assert_eq!(x.p_value, y.p_value);
        }
        // Stage dimensions decrease by one and candidates are consecutive.
        for (i, st) in a.stages.iter().enumerate() {
            assert_eq!(st.p_candidate, i + 1);
            assert_eq!(st.ambient_dim, 3 - i);
        }
        assert!(!a.stages.is_empty());
    }

    #[test]
    fn select_dimension_strong_anisotropy() {
        // Scenario (i) analog at reduced budget: sd (1, 1, 5) should reject
        // the first stage and accept the second, giving p* = 1, q* = 2.
        let s = synth::gaussian_diag(100, &[1.0, 1.0, 5.0], &RngStream::new(1009));
        let cfg = SearchConfig {
            restarts: 3,
            coarse_grid: 24,
            local_iters: 60,
            search_estimator: Some(EstimatorSettings {
                qmc_nodes: 96,
                gini_draws: 96,
                approx_dirs: Some(48),
            }),
            final_estimator: Some(EstimatorSettings::default_for(2)),
            ..SearchConfig::new(RngStream::new(1010))
        };
        let report = select_dimension(&s, 200, 20, 0.05, DepthKind::Simplicial, &cfg).unwrap();
        assert_eq!(report.p_star, 1, "stages: {:?}", report.stages);
        assert_eq!(report.q_star, 2);
        assert!(!report.stages[0].accepted);
        assert!(report.stages[1].accepted);
        let b_p = report.b_p_star.as_ref().unwrap();
        assert!(
            b_p.row(0)[2].abs() > 0.9,
            "direction {:?}",
            b_p.row(0)
        );
    }
}
