//! Search over orthonormal frames for the least- and most-dispersed
//! projection of a sample, central subspace depth, and quantile bands.
//!
//! The empirical objective is non-smooth and non-convex (the square-mixture
//! example has several stationary directions), so the optimizer is
//! gradient-free: multi-start coarse screening over Haar-random frames
//! followed by local descent with annealed Givens rotations that mix
//! complement directions into the frame. Within one restart all objective
//! evaluations share one random stream (common random numbers), and the
//! reported dispersion is re-evaluated with a larger, fresh budget.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{
    depth_point, halfspace_depth_2d_points, mahalanobis_depth, simplicial_depth_mc, DepthKind,
    Depth2dScratch, HalfspaceApproxEval,
};
use crate::dispersion::{
    dispersion_box_qmc_with, dispersion_gini_mc, dispersion_halfspace_1d,
    dispersion_simplicial_1d, mahalanobis_dispersion, DispersionEstimate,
};
use crate::numerics::frame::{complement_frame, orthonormalize, random_frame, Frame};
use crate::numerics::rng::RngStream;
use crate::sample::Sample;
use crate::{Error, Result};

const SALT_RESTART: u64 = 0x5EA0;
const SALT_OBJECTIVE: u64 = 0x0B1E;
const SALT_COARSE: u64 = 0xC0A5;
const SALT_FINAL: u64 = 0xF1A1;
const SALT_DEPTHS: u64 = 0xDE11;

/// Monte-Carlo/quadrature budgets for dispersion evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSettings {
    /// Quadrature nodes for the halfspace box integral (q >= 2).
    pub qmc_nodes: usize,
    /// Simplex draws for the Gini Monte Carlo (q >= 2).
    pub gini_draws: usize,
    /// Directions for randomized halfspace depth (q >= 3); `None` = 500·q.
    pub approx_dirs: Option<usize>,
}

impl EstimatorSettings {
    /// Reporting-quality budget for dimension `q` (spec default routing).
    pub fn default_for(q: usize) -> Self {
        EstimatorSettings {
            qmc_nodes: 4096 * q.max(1),
            gini_draws: 4096 * q.max(1),
            approx_dirs: None,
        }
    }

    /// Lean budget for objective evaluations inside the search loop.
    pub fn search_default() -> Self {
        EstimatorSettings {
            qmc_nodes: 128,
            gini_draws: 128,
            approx_dirs: Some(64),
        }
    }
}

/// Configuration of the frame search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Haar-random candidate frames screened per restart.
    pub coarse_grid: usize,
    pub local_iters: usize,
    /// Initial Givens rotation step (radians).
    pub step_init: f64,
    /// Multiplicative step decay applied when no rotation improves.
    pub step_decay: f64,
    pub rng: RngStream,
    /// Budget used during the search; `None` = [`EstimatorSettings::search_default`].
    pub search_estimator: Option<EstimatorSettings>,
    /// Budget for the final reported sigma; `None` = [`EstimatorSettings::default_for`].
    pub final_estimator: Option<EstimatorSettings>,
}

impl SearchConfig {
    pub fn new(rng: RngStream) -> Self {
        SearchConfig {
            restarts: 8,
            coarse_grid: 64,
            local_iters: 200,
            step_init: 0.3,
            step_decay: 0.95,
            rng,
            search_estimator: None,
            final_estimator: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidParameter {
                context: "restarts must be >= 1",
            });
        }
        if !(self.step_decay > 0.0 && self.step_decay < 1.0) {
            return Err(Error::InvalidParameter {
                context: "step_decay must lie in (0, 1)",
            });
        }
        Ok(())
    }
}

/// Which functional the search optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveKind {
    /// Minimize sigma of the projection onto `B_q` (deeply immersed subspace).
    MinimizeSigmaQ,
    /// Maximize sigma of the projection onto `B_p`.
    MaximizeSigmaP,
}

/// Result of a subspace fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceFit {
    /// Central-subspace basis (`p×m`); `None` when p = 0.
    pub b_p: Option<Frame>,
    /// Projection basis (`q×m`); `None` when q = 0 (maximization with p = m).
    pub b_q: Option<Frame>,
    /// Final re-evaluated dispersion of the objective projection.
    pub sigma: DispersionEstimate,
    /// Deepest point of the objective projection (exact for q = 1, grid
    /// refined for q = 2, coordinate-wise median seed above).
    pub nu: Vec<f64>,
    /// Central-subspace depth of every sample point under the objective
    /// projection.
    pub depths: Vec<f64>,
    pub restarts_used: usize,
    /// Set when the best and 5th-best coarse candidates are within one
    /// combined standard error: the optimum direction is not well separated
    /// (e.g. spherical data).
    pub degenerate_flat: bool,
    pub objective: ObjectiveKind,
}

impl SubspaceFit {
    /// The frame whose projection the objective scored (`B_q` for
    /// minimization, `B_p` for maximization).
    pub fn objective_frame(&self) -> &Frame {
        match self.objective {
            ObjectiveKind::MinimizeSigmaQ => self.b_q.as_ref().expect("q >= 1"),
            ObjectiveKind::MaximizeSigmaP => self.b_p.as_ref().expect("p >= 1"),
        }
    }
}

/// Project the sample through the frame; labels are preserved.
pub fn project(s: &Sample, b: &Frame) -> Result<Sample> {
    s.project(b)
}

/// Dispersion of the projected sample, routed per the estimator defaults:
/// exact formulas for q = 1, Gini MC for simplicial, box quadrature for
/// halfspace, and the closed form for Mahalanobis.
pub fn dispersion_of_frame(
    s: &Sample,
    b_q: &Frame,
    kind: DepthKind,
    est: &EstimatorSettings,
    rng: &RngStream,
) -> Result<DispersionEstimate> {
    let projected = s.project(b_q)?;
    dispersion_of_projected(&projected, kind, est, rng)
}

fn dispersion_of_projected(
    projected: &Sample,
    kind: DepthKind,
    est: &EstimatorSettings,
    rng: &RngStream,
) -> Result<DispersionEstimate> {
    let q = projected.m();
    match kind {
        DepthKind::Halfspace => {
            if q == 1 {
                dispersion_halfspace_1d(projected)
            } else {
                dispersion_box_qmc_with(projected, kind, est.qmc_nodes, est.approx_dirs, rng)
            }
        }
        DepthKind::Simplicial => {
            if q == 1 {
                dispersion_simplicial_1d(projected)
            } else {
                dispersion_gini_mc(projected, est.gini_draws, rng)
            }
        }
        DepthKind::Mahalanobis => mahalanobis_dispersion(projected),
    }
}

/// Search for the frame pair minimizing the dispersion of the q-dimensional
/// projection (the deeply-immersed subspace `S_q`; `B_p` spans the central
/// subspace).
pub fn minimize_dispersion(
    s: &Sample,
    q: usize,
    kind: DepthKind,
    cfg: &SearchConfig,
) -> Result<SubspaceFit> {
    fit(s, q, kind, cfg, ObjectiveKind::MinimizeSigmaQ)
}

/// Search for the frame pair maximizing the dispersion of the p-dimensional
/// projection.
pub fn maximize_dispersion(
    s: &Sample,
    p: usize,
    kind: DepthKind,
    cfg: &SearchConfig,
) -> Result<SubspaceFit> {
    fit(s, p, kind, cfg, ObjectiveKind::MaximizeSigmaP)
}

/// Frame-only search (no final re-evaluation, depths or deepest point):
/// returns the best frame and its orthogonal complement. Used where many
/// fits are needed and only the direction matters.
pub(crate) fn search_frame_only(
    s: &Sample,
    k: usize,
    kind: DepthKind,
    cfg: &SearchConfig,
) -> Result<(Frame, Frame)> {
    let searched = search(s, k, kind, cfg, ObjectiveKind::MinimizeSigmaQ)?;
    Ok((searched.frame, searched.complement))
}

struct SearchOutcome {
    frame: Frame,
    complement: Frame,
    degenerate_flat: bool,
}

fn search(
    s: &Sample,
    k: usize,
    kind: DepthKind,
    cfg: &SearchConfig,
    objective: ObjectiveKind,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    let m = s.m();
    debug_assert!(k >= 1 && k < m);
    let search_est = cfg
        .search_estimator
        .unwrap_or_else(EstimatorSettings::search_default);
    let sign = match objective {
        ObjectiveKind::MinimizeSigmaQ => 1.0,
        ObjectiveKind::MaximizeSigmaP => -1.0,
    };

    // Independent restarts, deterministic regardless of scheduling.
    let restarts: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            run_restart(
                s,
                k,
                kind,
                cfg,
                &search_est,
                sign,
                cfg.rng.substream(SALT_RESTART + r as u64),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best_idx = 0usize;
    for (i, r) in restarts.iter().enumerate() {
        if r.objective < restarts[best_idx].objective {
            best_idx = i;
        }
    }

    // Flat-optimum flag from the pooled coarse screen: best vs 5th-best
    // within one combined standard error.
    let mut coarse: Vec<(f64, f64)> = restarts
        .iter()
        .flat_map(|r| r.coarse.iter().copied())
        .collect();
    coarse.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let degenerate_flat = if coarse.len() >= 5 {
        let (v0, se0) = coarse[0];
        let (v4, se4) = coarse[4];
        (v4 - v0) < (se0 * se0 + se4 * se4).sqrt()
    } else {
        false
    };

    let winner = restarts.into_iter().nth(best_idx).expect("non-empty");
    Ok(SearchOutcome {
        frame: winner.frame,
        complement: winner.complement,
        degenerate_flat,
    })
}

fn fit(
    s: &Sample,
    k: usize,
    kind: DepthKind,
    cfg: &SearchConfig,
    objective: ObjectiveKind,
) -> Result<SubspaceFit> {
    cfg.validate()?;
    let m = s.m();
    if k < 1 || k > m {
        return Err(Error::InvalidParameter {
            context: "projection dimension must satisfy 1 <= k <= m",
        });
    }
    if s.n() <= k {
        return Err(Error::DegenerateSample {
            context: "fit needs n > projection dimension",
        });
    }
    let final_est = cfg
        .final_estimator
        .unwrap_or_else(|| EstimatorSettings::default_for(k));

    if k == m {
        // Trivial identity fit: no orthogonal directions to search over.
        let frame = Frame::identity(m);
        return finalize(
            s,
            frame,
            None,
            kind,
            &final_est,
            cfg,
            objective,
            cfg.restarts,
            false,
        );
    }

    let searched = search(s, k, kind, cfg, objective)?;
    finalize(
        s,
        searched.frame,
        Some(searched.complement),
        kind,
        &final_est,
        cfg,
        objective,
        cfg.restarts,
        searched.degenerate_flat,
    )
}

struct RestartOutcome {
    frame: Frame,
    complement: Frame,
    /// Signed objective (sigma for minimize, −sigma for maximize).
    objective: f64,
    /// (signed objective, std error) of every coarse candidate.
    coarse: Vec<(f64, f64)>,
}

fn run_restart(
    s: &Sample,
    k: usize,
    kind: DepthKind,
    cfg: &SearchConfig,
    est: &EstimatorSettings,
    sign: f64,
    stream: RngStream,
) -> Result<RestartOutcome> {
    let obj_stream = stream.substream(SALT_OBJECTIVE);
    let eval = |frame: &Frame| -> Result<(f64, f64)> {
        let d = dispersion_of_frame(s, frame, kind, est, &obj_stream)?;
        Ok((sign * d.value, d.se()))
    };

    let coarse_n = cfg.coarse_grid.max(1);
    let mut coarse = Vec::with_capacity(coarse_n);
    let mut best: Option<(f64, Frame)> = None;
    for c in 0..coarse_n {
        let frame = random_frame(k, s.m(), &stream.substream(SALT_COARSE + c as u64));
        let (obj, se) = eval(&frame)?;
        coarse.push((obj, se));
        if best.as_ref().map_or(true, |(b, _)| obj < *b) {
            best = Some((obj, frame));
        }
    }
    let (mut cur_obj, mut frame) = best.expect("coarse grid non-empty");
    let mut comp = complement_frame(&frame)?;

    let mut step = cfg.step_init;
    let mut accepted = 0usize;
    for _it in 0..cfg.local_iters {
        if step < 1e-7 {
            break;
        }
        let mut best_move: Option<(f64, usize, usize, f64)> = None;
        for i in 0..k {
            for j in 0..comp.rows() {
                for dir in [step, -step] {
                    let cand = rotate_rows(&frame, &comp, i, j, dir);
                    let (obj, _) = eval(&cand.0)?;
                    if obj < cur_obj
                        && best_move.as_ref().map_or(true, |(b, _, _, _)| obj < *b)
                    {
                        best_move = Some((obj, i, j, dir));
                    }
                }
            }
        }
        match best_move {
            Some((obj, i, j, dir)) => {
                let (nf, nc) = rotate_rows(&frame, &comp, i, j, dir);
                frame = nf;
                comp = nc;
                cur_obj = obj;
                accepted += 1;
                if accepted % 64 == 0 {
                    // Kill accumulated rounding drift.
                    frame = orthonormalize(k, s.m(), frame.entries())?;
                    comp = reorthonormalize_complement(&frame, &comp)?;
                }
            }
            None => step *= cfg.step_decay,
        }
    }
    frame = orthonormalize(k, s.m(), frame.entries())?;
    comp = reorthonormalize_complement(&frame, &comp)?;
    // The bookkeeping invariant: the returned frame is the best evaluated.
    let (final_obj, _) = eval(&frame)?;
    Ok(RestartOutcome {
        frame,
        complement: comp,
        objective: final_obj.min(cur_obj),
        coarse,
    })
}

/// Rotate row `i` of the frame with row `j` of the complement by `angle`.
fn rotate_rows(frame: &Frame, comp: &Frame, i: usize, j: usize, angle: f64) -> (Frame, Frame) {
    let (c, sn) = (angle.cos(), angle.sin());
    let m = frame.cols();
    let mut fe = frame.entries().to_vec();
    let mut ce = comp.entries().to_vec();
    for col in 0..m {
        let a = fe[i * m + col];
        let b = ce[j * m + col];
        fe[i * m + col] = c * a + sn * b;
        ce[j * m + col] = -sn * a + c * b;
    }
    (
        Frame::new(frame.rows(), m, fe).expect("rotation preserves orthonormality"),
        Frame::new(comp.rows(), m, ce).expect("rotation preserves orthonormality"),
    )
}

/// Re-derive the complement rows against a freshly orthonormalized frame by
/// projecting the previous complement out of the frame's span.
fn reorthonormalize_complement(frame: &Frame, comp: &Frame) -> Result<Frame> {
    let m = frame.cols();
    let mut rows = frame.entries().to_vec();
    rows.extend_from_slice(comp.entries());
    let full = orthonormalize(frame.rows() + comp.rows(), m, &rows)?;
    Frame::new(
        comp.rows(),
        m,
        full.entries()[frame.rows() * m..].to_vec(),
    )
}

#[allow(clippy::too_many_arguments)]
fn finalize(
    s: &Sample,
    frame: Frame,
    complement: Option<Frame>,
    kind: DepthKind,
    final_est: &EstimatorSettings,
    cfg: &SearchConfig,
    objective: ObjectiveKind,
    restarts_used: usize,
    degenerate_flat: bool,
) -> Result<SubspaceFit> {
    let m = s.m();
    let comp = match complement {
        Some(c) => Some(c),
        None if frame.rows() < m => Some(complement_frame(&frame)?),
        None => None,
    };
    let sigma = dispersion_of_frame(s, &frame, kind, final_est, &cfg.rng.substream(SALT_FINAL))?;
    let projected = s.project(&frame)?;
    let depths = per_point_depths(&projected, kind, final_est, &cfg.rng.substream(SALT_DEPTHS))?;
    let nu = deepest_point(&projected, kind, &depths, &cfg.rng.substream(SALT_DEPTHS))?;

    let (b_p, b_q) = match objective {
        ObjectiveKind::MinimizeSigmaQ => (comp, Some(frame)),
        ObjectiveKind::MaximizeSigmaP => (Some(frame), comp),
    };
    Ok(SubspaceFit {
        b_p,
        b_q,
        sigma,
        nu,
        depths,
        restarts_used,
        degenerate_flat,
        objective,
    })
}

/// Depth of every projected sample point with respect to the projected
/// sample. Randomized estimators share one direction/draw budget across
/// points so the values are comparable.
pub fn per_point_depths(
    projected: &Sample,
    kind: DepthKind,
    est: &EstimatorSettings,
    rng: &RngStream,
) -> Result<Vec<f64>> {
    let q = projected.m();
    let n = projected.n();
    match kind {
        DepthKind::Halfspace => match q {
            1 => {
                let mut sorted = projected.points().to_vec();
                sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                Ok(projected
                    .points()
                    .iter()
                    .map(|&x| crate::depth::halfspace_depth_1d_sorted(x, &sorted))
                    .collect())
            }
            2 => {
                let mut scratch = Depth2dScratch::default();
                Ok((0..n)
                    .map(|i| {
                        let p = projected.point(i);
                        halfspace_depth_2d_points((p[0], p[1]), projected.points(), &mut scratch)
                    })
                    .collect())
            }
            _ => {
                let eval = HalfspaceApproxEval::new(
                    projected,
                    est.approx_dirs.unwrap_or(500 * q),
                    rng,
                );
                Ok((0..n).map(|i| eval.depth(projected.point(i))).collect())
            }
        },
        DepthKind::Simplicial => match q {
            1 => {
                let values = projected.points();
                Ok(values
                    .iter()
                    .map(|&x| crate::depth::simplicial_depth_1d_values(x, values))
                    .collect())
            }
            _ => {
                if crate::depth::simplicial_depth_exact(projected.point(0), projected).is_ok() {
                    (0..n)
                        .map(|i| crate::depth::simplicial_depth_exact(projected.point(i), projected))
                        .collect()
                } else {
                    (0..n)
                        .map(|i| {
                            simplicial_depth_mc(
                                projected.point(i),
                                projected,
                                est.gini_draws.max(1024),
                                &rng.substream(i as u64),
                            )
                        })
                        .collect()
                }
            }
        },
        DepthKind::Mahalanobis => (0..n)
            .map(|i| mahalanobis_depth(projected.point(i), projected))
            .collect(),
    }
}

/// Deepest point of the projection: exact over the line for q = 1 (midpoint
/// of the maximizing interval, a median), sample-point argmax refined on a
/// shrinking local grid for q = 2, coordinate-wise median seed otherwise.
fn deepest_point(
    projected: &Sample,
    kind: DepthKind,
    depths: &[f64],
    rng: &RngStream,
) -> Result<Vec<f64>> {
    let q = projected.m();
    match q {
        1 => {
            let mut best = f64::NEG_INFINITY;
            for &d in depths {
                if d > best {
                    best = d;
                }
            }
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (i, &d) in depths.iter().enumerate() {
                if d >= best - 1e-12 {
                    let v = projected.point(i)[0];
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            Ok(vec![0.5 * (lo + hi)])
        }
        2 => {
            let mut best = 0usize;
            for (i, &d) in depths.iter().enumerate() {
                if d > depths[best] {
                    best = i;
                }
            }
            let mut center = [projected.point(best)[0], projected.point(best)[1]];
            let mut best_depth = depths[best];
            // Local grid refinement with shrinking radius.
            let mut lo = [f64::INFINITY; 2];
            let mut hi = [f64::NEG_INFINITY; 2];
            for row in projected.rows() {
                for j in 0..2 {
                    lo[j] = lo[j].min(row[j]);
                    hi[j] = hi[j].max(row[j]);
                }
            }
            let mut radius =
                ((hi[0] - lo[0]).max(hi[1] - lo[1])) / (projected.n() as f64).sqrt().max(2.0);
            let mut scratch = Depth2dScratch::default();
            for _round in 0..3 {
                for gi in -2i32..=2 {
                    for gj in -2i32..=2 {
                        let cand = [
                            center[0] + gi as f64 * radius / 2.0,
                            center[1] + gj as f64 * radius / 2.0,
                        ];
                        let d = match kind {
                            DepthKind::Halfspace => halfspace_depth_2d_points(
                                (cand[0], cand[1]),
                                projected.points(),
                                &mut scratch,
                            ),
                            _ => depth_point(&cand, projected, kind, rng)?,
                        };
                        if d > best_depth {
                            best_depth = d;
                            center = cand;
                        }
                    }
                }
                radius *= 0.5;
            }
            Ok(center.to_vec())
        }
        _ => {
            // Approximate: coordinate-wise median.
            let mut nu = Vec::with_capacity(q);
            for j in 0..q {
                let mut col = projected.column(j);
                col.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                let n = col.len();
                nu.push(if n % 2 == 1 {
                    col[n / 2]
                } else {
                    0.5 * (col[n / 2 - 1] + col[n / 2])
                });
            }
            Ok(nu)
        }
    }
}

/// Depth of the affine flat `S_{B_q}(y)` with respect to the sample: the
/// depth of `y` under the projected sample.
pub fn central_subspace_depth(
    y: &[f64],
    s: &Sample,
    b_q: &Frame,
    kind: DepthKind,
    rng: &RngStream,
) -> Result<f64> {
    let projected = s.project(b_q)?;
    depth_point(y, &projected, kind, rng)
}

// ---------------------------------------------------------------------------
// Quantile bands
// ---------------------------------------------------------------------------

/// Band thresholds on the quantile order scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandThresholds {
    /// Probability content of the central band (order window
    /// `[(1−c)/2, (1+c)/2]`).
    pub central_content: f64,
    /// Lower edge of the blue flag window (exclusive).
    pub blue_lo: f64,
    /// Upper edge of the blue flag window (inclusive); orders above are red.
    pub blue_hi: f64,
}

impl Default for BandThresholds {
    fn default() -> Self {
        BandThresholds {
            central_content: 0.5,
            blue_lo: 0.95,
            blue_hi: 0.975,
        }
    }
}

impl BandThresholds {
    pub fn validate(&self) -> Result<()> {
        let c_hi = 0.5 + self.central_content / 2.0;
        let ok = self.central_content > 0.0
            && self.central_content < 1.0
            && c_hi < self.blue_lo
            && self.blue_lo < self.blue_hi
            && self.blue_hi < 1.0;
        if !ok {
            return Err(Error::InvalidParameter {
                context: "band thresholds must be strictly increasing within (0, 1)",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Central,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailFlag {
    Blue,
    Red,
}

/// Per-point quantile order and band assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandAssignment {
    pub order: f64,
    pub band: Band,
    pub flag: Option<TailFlag>,
}

/// Quantile bands of the one-dimensional projection: order for point i is
/// `(midrank − 0.5)/n` (midranks for ties), Central for orders within the
/// central window, Blue for `(0.95, 0.975]` and Red above (upper tail by
/// default; `two_sided` adds the mirrored lower-tail flags).
pub fn quantile_bands(
    s: &Sample,
    b_q: &Frame,
    thresholds: &BandThresholds,
    two_sided: bool,
) -> Result<Vec<BandAssignment>> {
    if b_q.rows() != 1 {
        return Err(Error::BandDimension { q: b_q.rows() });
    }
    thresholds.validate()?;
    let projected = s.project(b_q)?;
    let values = projected.points();
    Ok(band_orders(values)
        .into_iter()
        .map(|order| assignment(order, thresholds, two_sided))
        .collect())
}

/// Midrank-based quantile orders of raw values.
pub fn band_orders(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut orders = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        // Ranks are 1-based; the tied group shares the midrank.
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        let order = (midrank - 0.5) / n as f64;
        for &k in &idx[i..=j] {
            orders[k] = order;
        }
        i = j + 1;
    }
    orders
}

pub fn assignment(order: f64, t: &BandThresholds, two_sided: bool) -> BandAssignment {
    let c_lo = 0.5 - t.central_content / 2.0;
    let c_hi = 0.5 + t.central_content / 2.0;
    let band = if order >= c_lo && order <= c_hi {
        Band::Central
    } else {
        Band::Outer
    };
    let mut flag = None;
    if order > t.blue_hi {
        flag = Some(TailFlag::Red);
    } else if order > t.blue_lo {
        flag = Some(TailFlag::Blue);
    } else if two_sided {
        if order < 1.0 - t.blue_hi {
            flag = Some(TailFlag::Red);
        } else if order < 1.0 - t.blue_lo {
            flag = Some(TailFlag::Blue);
        }
    }
    BandAssignment { order, band, flag }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn unit(v: &[f64]) -> Vec<f64> {
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect()
    }

    fn align(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs()
    }

    #[test]
    fn dispersion_of_frame_on_line_orthogonal_is_zero() {
        // Points t·v in R²; projecting onto the orthogonal of v collapses
        // them to a point mass.
        let v = unit(&[1.0, 2.0]);
        let pts: Vec<f64> = (0..10)
            .flat_map(|t| vec![t as f64 * v[0], t as f64 * v[1]])
            .collect();
        let s = Sample::new(10, 2, pts).unwrap();
        let b = Frame::new(1, 2, vec![-v[1], v[0]]).unwrap();
        let est = EstimatorSettings::default_for(1);
        let d = dispersion_of_frame(&s, &b, DepthKind::Halfspace, &est, &RngStream::new(1))
            .unwrap();
        assert!(d.value < 1e-12);
    }

    #[test]
    fn dispersion_of_frame_e1_is_first_coordinate_dispersion() {
        let rng = RngStream::new(2);
        let s = Sample::new(40, 2, rng.normal_vec(80)).unwrap();
        let b = Frame::new(1, 2, vec![1.0, 0.0]).unwrap();
        let est = EstimatorSettings::default_for(1);
        let d = dispersion_of_frame(&s, &b, DepthKind::Halfspace, &est, &rng).unwrap();
        let first = Sample::from_1d(&s.column(0)).unwrap();
        let expect = dispersion_halfspace_1d(&first).unwrap();
        assert_eq!(d.value, expect.value);
    }

    #[test]
    fn dispersion_of_frame_is_rotation_invariant_within_noise() {
        // Replacing B_q by U·B_q rotates the projected cloud; simplex
        // volumes are invariant, so Gini MC agrees within combined SE.
        let rng = RngStream::new(3);
        let s = Sample::new(60, 3, rng.substream(0).normal_vec(180)).unwrap();
        let b = random_frame(2, 3, &rng.substream(1));
        let theta: f64 = 0.9;
        let u = [theta.cos(), -theta.sin(), theta.sin(), theta.cos()];
        let mut rotated = vec![0.0; 6];
        for r in 0..2 {
            for c in 0..3 {
                rotated[r * 3 + c] =
                    u[r * 2] * b.row(0)[c] + u[r * 2 + 1] * b.row(1)[c];
            }
        }
        let bu = Frame::new(2, 3, rotated).unwrap();
        let est = EstimatorSettings {
            gini_draws: 60_000,
            ..EstimatorSettings::default_for(2)
        };
        let d1 =
            dispersion_of_frame(&s, &b, DepthKind::Simplicial, &est, &rng.substream(7)).unwrap();
        let d2 =
            dispersion_of_frame(&s, &bu, DepthKind::Simplicial, &est, &rng.substream(8)).unwrap();
        let se = (d1.se().powi(2) + d2.se().powi(2)).sqrt();
        assert!((d1.value - d2.value).abs() <= 3.0 * se);
    }

    #[test]
    fn gauge_invariance_sign_flip_q1() {
        let rng = RngStream::new(4);
        let s = Sample::new(30, 2, rng.normal_vec(60)).unwrap();
        let b = Frame::new(1, 2, unit(&[0.6, -0.8])).unwrap();
        let est = EstimatorSettings::default_for(1);
        let d1 = dispersion_of_frame(&s, &b, DepthKind::Halfspace, &est, &rng).unwrap();
        let d2 =
            dispersion_of_frame(&s, &b.negate_row(0), DepthKind::Halfspace, &est, &rng).unwrap();
        assert_eq!(d1.value, d2.value);
    }

    #[test]
    fn minimize_rank_one_sample_in_r3() {
        // Points t·v: any 2-frame orthogonal-complementing v gives sigma 0.
        let v = unit(&[0.3, -0.5, 0.81]);
        let pts: Vec<f64> = (-10..=10)
            .flat_map(|t| v.iter().map(move |c| t as f64 * 0.2 * c).collect::<Vec<_>>())
            .collect();
        let s = Sample::new(21, 3, pts).unwrap();
        let cfg = SearchConfig {
            restarts: 4,
            coarse_grid: 32,
            local_iters: 80,
            ..SearchConfig::new(RngStream::new(5))
        };
        let fit = minimize_dispersion(&s, 2, DepthKind::Simplicial, &cfg).unwrap();
        assert!(fit.sigma.value < 1e-10, "sigma {}", fit.sigma.value);
        let b_p = fit.b_p.as_ref().unwrap();
        assert!(align(b_p.row(0), &v) >= 0.999, "alignment {}", align(b_p.row(0), &v));
    }

    #[test]
    fn minimize_finds_low_variance_plane_complement() {
        // N(0, diag(1,1,25)): the least-dispersed 2-D projection drops e3,
        // so B_p aligns with e3 (also the paper's scenario-(i) fit).
        let s = synth::gaussian_diag(5000, &[1.0, 1.0, 5.0], &RngStream::new(6));
        let cfg = SearchConfig {
            restarts: 4,
            coarse_grid: 32,
            local_iters: 100,
            ..SearchConfig::new(RngStream::new(7))
        };
        let fit = minimize_dispersion(&s, 2, DepthKind::Simplicial, &cfg).unwrap();
        let b_p = fit.b_p.as_ref().unwrap();
        let e3 = [0.0, 0.0, 1.0];
        assert!(align(b_p.row(0), &e3) >= 0.95, "alignment {}", align(b_p.row(0), &e3));
    }

    #[test]
    fn maximize_line_sample() {
        let v = unit(&[2.0, 1.0, -1.0]);
        let pts: Vec<f64> = (-12..=12)
            .flat_map(|t| v.iter().map(move |c| t as f64 * 0.3 * c).collect::<Vec<_>>())
            .collect();
        let s = Sample::new(25, 3, pts).unwrap();
        let cfg = SearchConfig {
            restarts: 4,
            coarse_grid: 32,
            local_iters: 80,
            ..SearchConfig::new(RngStream::new(8))
        };
        let fit = maximize_dispersion(&s, 1, DepthKind::Halfspace, &cfg).unwrap();
        let b_p = fit.b_p.as_ref().unwrap();
        assert!(align(b_p.row(0), &v) >= 0.999);
    }

    #[test]
    fn maximize_elliptical_aligns_with_top_eigenvector() {
        let s = synth::gaussian_diag(4000, &[3.0, 1.0], &RngStream::new(9));
        let cfg = SearchConfig {
            restarts: 4,
            coarse_grid: 24,
            local_iters: 80,
            ..SearchConfig::new(RngStream::new(10))
        };
        let fit = maximize_dispersion(&s, 1, DepthKind::Halfspace, &cfg).unwrap();
        let b_p = fit.b_p.as_ref().unwrap();
        assert!(align(b_p.row(0), &[1.0, 0.0]) >= 0.95);
    }

    #[test]
    fn reported_sigma_reproduces_at_fixed_seed() {
        let s = synth::gaussian_diag(200, &[1.0, 2.0], &RngStream::new(11));
        let cfg = SearchConfig {
            restarts: 2,
            coarse_grid: 8,
            local_iters: 30,
            ..SearchConfig::new(RngStream::new(12))
        };
        let fit = minimize_dispersion(&s, 1, DepthKind::Halfspace, &cfg).unwrap();
        let est = cfg
            .final_estimator
            .unwrap_or_else(|| EstimatorSettings::default_for(1));
        let again = dispersion_of_frame(
            &s,
            fit.b_q.as_ref().unwrap(),
            DepthKind::Halfspace,
            &est,
            &cfg.rng.substream(SALT_FINAL),
        )
        .unwrap();
        assert!((fit.sigma.value - again.value).abs() <= 1e-9 * fit.sigma.value.max(1e-30));
    }

    #[test]
    fn found_sigma_not_worse_than_fresh_random_frames() {
        let s = synth::gaussian_diag(300, &[1.0, 1.0, 4.0], &RngStream::new(13));
        let cfg = SearchConfig {
            restarts: 3,
            coarse_grid: 16,
            local_iters: 50,
            ..SearchConfig::new(RngStream::new(14))
        };
        let fit = minimize_dispersion(&s, 2, DepthKind::Simplicial, &cfg).unwrap();
        let est = EstimatorSettings::default_for(2);
        let probe = RngStream::new(99);
        for c in 0..50 {
            let frame = random_frame(2, 3, &probe.substream(c));
            let d = dispersion_of_frame(&s, &frame, DepthKind::Simplicial, &est, &probe).unwrap();
            let slack = 3.0 * (d.se().powi(2) + fit.sigma.se().powi(2)).sqrt();
            assert!(fit.sigma.value <= d.value + slack);
        }
    }

    #[test]
    fn trivial_full_dimension_fit() {
        let s = synth::gaussian_diag(100, &[1.0, 2.0], &RngStream::new(15));
        let cfg = SearchConfig::new(RngStream::new(16));
        let fit = minimize_dispersion(&s, 2, DepthKind::Mahalanobis, &cfg).unwrap();
        assert!(fit.b_p.is_none());
        assert_eq!(fit.b_q.as_ref().unwrap().rows(), 2);
        assert_eq!(fit.depths.len(), 100);
    }

    #[test]
    fn degenerate_sample_error() {
        let s = Sample::new(2, 3, vec![0.0; 6]).unwrap();
        let cfg = SearchConfig::new(RngStream::new(17));
        assert!(matches!(
            minimize_dispersion(&s, 2, DepthKind::Halfspace, &cfg),
            Err(Error::DegenerateSample { .. })
        ));
    }

    #[test]
    fn central_subspace_depth_reduces_to_plain_depth() {
        let rng = RngStream::new(18);
        let s = Sample::new(25, 2, rng.normal_vec(50)).unwrap();
        let id = Frame::identity(2);
        for i in 0..5 {
            let d1 =
                central_subspace_depth(s.point(i), &s, &id, DepthKind::Halfspace, &rng).unwrap();
            let d2 = crate::depth::halfspace_depth_2d(s.point(i), &s).unwrap();
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn central_subspace_depth_1d_example() {
        // Projected sample {1,..,5}, y = 3 -> depth 0.6.
        let pts = vec![1.0, 9.0, 2.0, 9.0, 3.0, 9.0, 4.0, 9.0, 5.0, 9.0];
        let s = Sample::new(5, 2, pts).unwrap();
        let b = Frame::new(1, 2, vec![1.0, 0.0]).unwrap();
        let d = central_subspace_depth(&[3.0], &s, &b, DepthKind::Halfspace, &RngStream::new(1))
            .unwrap();
        assert_eq!(d, 0.6);
    }

    #[test]
    fn central_subspace_depth_similarity_invariance() {
        // P1: identical per-point depth multiset under x -> aUx + b with
        // frame B_q U^T.
        let rng = RngStream::new(19);
        let s = Sample::new(40, 2, rng.substream(0).normal_vec(80)).unwrap();
        let b = Frame::new(1, 2, unit(&[0.8, 0.6])).unwrap();
        let theta: f64 = -0.35;
        let a = 2.5;
        let u = [theta.cos(), -theta.sin(), theta.sin(), theta.cos()];
        let au = [a * u[0], a * u[1], a * u[2], a * u[3]];
        let shift = [1.0, -2.0];
        let imaged = s.affine_image(&au, &shift);
        // B_q Uᵀ (row vector times Uᵀ), so the frame tracks the rotation.
        let but = Frame::new(
            1,
            2,
            vec![
                b.row(0)[0] * u[0] + b.row(0)[1] * u[1],
                b.row(0)[0] * u[2] + b.row(0)[1] * u[3],
            ],
        )
        .unwrap();
        for i in 0..s.n() {
            let y0 = b.apply(s.point(i));
            let y1 = but.apply(imaged.point(i));
            let d0 =
                central_subspace_depth(&y0, &s, &b, DepthKind::Halfspace, &rng).unwrap();
            let d1 =
                central_subspace_depth(&y1, &imaged, &but, DepthKind::Halfspace, &rng).unwrap();
            assert!((d0 - d1).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_sample_nu_and_monotonicity() {
        // P2/P3 for q = 1: concatenation of ±z has center 0; nu is within
        // one inter-point gap and depth decays away from nu.
        let rng = RngStream::new(20);
        let z = rng.normal_vec(25);
        let mut values: Vec<f64> = z.iter().copied().collect();
        values.extend(z.iter().map(|v| -v));
        let pts: Vec<f64> = values.iter().flat_map(|&v| vec![v, 0.5 * v]).collect();
        let s = Sample::new(50, 2, pts).unwrap();
        let cfg = SearchConfig {
            restarts: 2,
            coarse_grid: 16,
            local_iters: 40,
            ..SearchConfig::new(RngStream::new(21))
        };
        let fit = minimize_dispersion(&s, 1, DepthKind::Halfspace, &cfg).unwrap();
        let projected = s.project(fit.b_q.as_ref().unwrap()).unwrap();
        let mut sorted = projected.points().to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let max_gap = sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0f64, f64::max);
        assert!(fit.nu[0].abs() <= max_gap + 1e-12, "nu {}", fit.nu[0]);
        // Monotone decay away from nu on a grid.
        let span = sorted.last().unwrap() - sorted[0];
        for dir in [-1.0, 1.0] {
            let mut prev = f64::INFINITY;
            for step in 0..10 {
                let x = fit.nu[0] + dir * span * step as f64 / 9.0;
                let d = crate::depth::halfspace_depth_1d_values(x, projected.points());
                assert!(d <= prev + 1e-12);
                prev = d;
            }
        }
    }

    #[test]
    fn depth_zero_beyond_projected_range() {
        // P4 analogue.
        let rng = RngStream::new(22);
        let s = Sample::new(30, 3, rng.normal_vec(90)).unwrap();
        let b = random_frame(1, 3, &rng.substream(3));
        let d = central_subspace_depth(&[50.0], &s, &b, DepthKind::Halfspace, &rng).unwrap();
        assert_eq!(d, 0.0);
        let d = central_subspace_depth(&[50.0], &s, &b, DepthKind::Simplicial, &rng).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn quantile_band_examples() {
        // 100 distinct sorted values.
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let pts: Vec<f64> = values.iter().flat_map(|&v| vec![v, 0.0]).collect();
        let s = Sample::new(100, 2, pts).unwrap();
        let b = Frame::new(1, 2, vec![1.0, 0.0]).unwrap();
        let bands = quantile_bands(&s, &b, &BandThresholds::default(), false).unwrap();
        assert!((bands[98].order - 0.985).abs() < 1e-12);
        assert_eq!(bands[98].flag, Some(TailFlag::Red));
        assert!((bands[97].order - 0.975).abs() < 1e-12);
        assert_eq!(bands[97].flag, Some(TailFlag::Blue));
        assert!((bands[49].order - 0.495).abs() < 1e-12);
        assert_eq!(bands[49].band, Band::Central);
        assert_eq!(bands[49].flag, None);
        // Every point has exactly one band; flags only in the tails.
        for b in &bands {
            if b.flag.is_some() {
                assert_eq!(b.band, Band::Outer);
            }
        }
    }

    #[test]
    fn quantile_band_midranks_for_ties() {
        let values = [1.0, 2.0, 2.0, 3.0];
        let orders = band_orders(&values);
        // Tied pair at ranks 2,3 -> midrank 2.5 -> order (2.5-0.5)/4 = 0.5.
        assert_eq!(orders[1], 0.5);
        assert_eq!(orders[2], 0.5);
        assert_eq!(orders[0], 0.125);
        assert_eq!(orders[3], 0.875);
    }

    #[test]
    fn quantile_band_two_sided_mirrors() {
        let values: Vec<f64> = (1..=200).map(|i| i as f64).collect();
        let pts: Vec<f64> = values.iter().flat_map(|&v| vec![v, 1.0]).collect();
        let s = Sample::new(200, 2, pts).unwrap();
        let b = Frame::new(1, 2, vec![1.0, 0.0]).unwrap();
        let bands = quantile_bands(&s, &b, &BandThresholds::default(), true).unwrap();
        // order of rank 1 = 0.0025 < 0.025 -> red on the lower tail.
        assert_eq!(bands[0].flag, Some(TailFlag::Red));
        assert_eq!(bands[7].flag, Some(TailFlag::Blue)); // order 0.0375
        assert_eq!(bands[199].flag, Some(TailFlag::Red));
    }

    #[test]
    fn quantile_band_dimension_error() {
        let s = Sample::new(4, 2, vec![0.0; 8]).unwrap();
        let b = Frame::identity(2);
        assert!(matches!(
            quantile_bands(&s, &b, &BandThresholds::default(), false),
            Err(Error::BandDimension { q: 2 })
        ));
    }
}
