//! The analysis pipelines and their file outputs.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use central_depth::depth::DepthKind;
use central_depth::dimension::{
    canonicalize_sign, dispersion_profile, select_dimension, DimensionReport, DispersionProfile,
};
use central_depth::dispersion::{mixture_dispersion_oracle, DispersionEstimate};
use central_depth::subspace::{
    assignment, band_orders, maximize_dispersion, minimize_dispersion, per_point_depths,
    quantile_bands, Band, BandAssignment, BandThresholds, EstimatorSettings, SearchConfig,
    SubspaceFit, TailFlag,
};
use central_depth::{Frame, RngStream, Sample};

use crate::cluster::{cut_tree_1d, Linkage};
use crate::io::{read_csv, CliError, CsvIngest};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    PointDepth,
    CentralSubspace,
    SelectDim,
    Profile,
    Cluster,
}

/// Full pipeline configuration; echoed verbatim into the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input_path: String,
    pub columns: Vec<String>,
    pub id_col: Option<String>,
    pub log_transform: bool,
    pub strict: bool,
    pub depth: DepthKind,
    pub mode: Mode,
    pub q: Option<usize>,
    pub groups: usize,
    pub linkage: Linkage,
    pub seed: u64,
    pub alpha: f64,
    pub k: usize,
    pub sub_size: usize,
    pub bands: BandThresholds,
    pub two_sided: bool,
    pub restarts: usize,
    pub coarse_grid: usize,
    pub local_iters: usize,
    pub output_dir: String,
}

impl AnalysisConfig {
    pub fn new(input_path: impl Into<String>, mode: Mode) -> Self {
        AnalysisConfig {
            input_path: input_path.into(),
            columns: Vec::new(),
            id_col: None,
            log_transform: false,
            strict: false,
            depth: DepthKind::Halfspace,
            mode,
            q: None,
            groups: 3,
            linkage: Linkage::Complete,
            seed: 0,
            alpha: 0.05,
            k: 500,
            sub_size: 20,
            bands: BandThresholds::default(),
            two_sided: false,
            restarts: 8,
            coarse_grid: 64,
            local_iters: 200,
            output_dir: ".".to_string(),
        }
    }

    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            coarse_grid: self.coarse_grid,
            local_iters: self.local_iters,
            ..SearchConfig::new(RngStream::new(self.seed))
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        self.bands
            .validate()
            .map_err(|e| CliError::config(e.to_string()))?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::config("alpha must lie in (0, 1)"));
        }
        if self.groups < 1 {
            return Err(CliError::config("groups must be >= 1"));
        }
        Ok(())
    }
}

/// One output row per ingested point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointRecord {
    pub id: String,
    pub coords: Vec<f64>,
    pub projection: Option<Vec<f64>>,
    pub depth: Option<f64>,
    pub order: Option<f64>,
    pub band: Option<String>,
    pub cluster: Option<usize>,
}

/// Mode-specific fit summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FitSummary {
    PointDepth {
        depth_kind: DepthKind,
    },
    CentralSubspace {
        b_p: Option<Frame>,
        b_q: Frame,
        sigma: DispersionEstimate,
        nu: Vec<f64>,
        restarts_used: usize,
        degenerate_flat: bool,
    },
    SelectDim {
        report: DimensionReport,
    },
    Profile {
        profile: DispersionProfile,
    },
    Cluster {
        direction: Frame,
        groups: usize,
        sizes: Vec<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    pub rows_dropped: usize,
    pub warnings: Vec<String>,
    pub config: AnalysisConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub n: usize,
    pub m: usize,
    pub fit: FitSummary,
    pub points: Vec<PointRecord>,
}

fn band_label(b: &BandAssignment) -> String {
    match b.flag {
        Some(TailFlag::Red) => "Red".to_string(),
        Some(TailFlag::Blue) => "Blue".to_string(),
        None => match b.band {
            Band::Central => "Central".to_string(),
            Band::Outer => "Outer".to_string(),
        },
    }
}

fn labels_of(s: &Sample) -> Vec<String> {
    match s.labels() {
        Some(l) => l.to_vec(),
        None => (1..=s.n()).map(|i| i.to_string()).collect(),
    }
}

/// Run the configured pipeline end to end.
pub fn run_analyze(cfg: &AnalysisConfig) -> Result<AnalysisReport, CliError> {
    cfg.validate()?;
    let ingest: CsvIngest = read_csv(
        &cfg.input_path,
        &cfg.columns,
        cfg.id_col.as_deref(),
        cfg.log_transform,
        cfg.strict,
    )?;
    let s = &ingest.sample;
    let search = cfg.search_config();
    let rng = RngStream::new(cfg.seed).substream(0xA11A);
    let ids = labels_of(s);

    let (fit, points) = match cfg.mode {
        Mode::PointDepth => {
            let est = EstimatorSettings::default_for(s.m());
            let depths = per_point_depths(s, cfg.depth, &est, &rng)?;
            let orders = band_orders(&depths);
            let points = (0..s.n())
                .map(|i| PointRecord {
                    id: ids[i].clone(),
                    coords: s.point(i).to_vec(),
                    projection: None,
                    depth: Some(depths[i]),
                    order: Some(orders[i]),
                    band: Some(if orders[i] >= 0.5 { "Central" } else { "Outer" }.to_string()),
                    cluster: None,
                })
                .collect();
            (
                FitSummary::PointDepth {
                    depth_kind: cfg.depth,
                },
                points,
            )
        }
        Mode::CentralSubspace => {
            let q = cfg.q.unwrap_or(1);
            let fit = minimize_dispersion(s, q, cfg.depth, &search)?;
            let (fit, b_q) = orient_fit(fit, s.m());
            let projected = s.project(&b_q)?;
            let bands = if q == 1 {
                Some(quantile_bands(s, &b_q, &cfg.bands, cfg.two_sided)?)
            } else {
                None
            };
            let points = (0..s.n())
                .map(|i| PointRecord {
                    id: ids[i].clone(),
                    coords: s.point(i).to_vec(),
                    projection: Some(projected.point(i).to_vec()),
                    depth: Some(fit.depths[i]),
                    order: bands.as_ref().map(|b| b[i].order),
                    band: bands.as_ref().map(|b| band_label(&b[i])),
                    cluster: None,
                })
                .collect();
            (
                FitSummary::CentralSubspace {
                    b_p: fit.b_p.clone(),
                    b_q,
                    sigma: fit.sigma.clone(),
                    nu: fit.nu.clone(),
                    restarts_used: fit.restarts_used,
                    degenerate_flat: fit.degenerate_flat,
                },
                points,
            )
        }
        Mode::SelectDim => {
            let report = select_dimension(s, cfg.k, cfg.sub_size, cfg.alpha, cfg.depth, &search)?;
            let projected = s.project(&report.b_q_star)?;
            let est = EstimatorSettings::default_for(report.q_star);
            let depths = per_point_depths(&projected, cfg.depth, &est, &rng)?;
            let bands = if report.q_star == 1 {
                let orders = band_orders(projected.points());
                Some(
                    orders
                        .into_iter()
                        .map(|o| assignment(o, &cfg.bands, cfg.two_sided))
                        .collect::<Vec<_>>(),
                )
            } else {
                None
            };
            let points = (0..s.n())
                .map(|i| PointRecord {
                    id: ids[i].clone(),
                    coords: s.point(i).to_vec(),
                    projection: Some(projected.point(i).to_vec()),
                    depth: Some(depths[i]),
                    order: bands.as_ref().map(|b| b[i].order),
                    band: bands.as_ref().map(|b| band_label(&b[i])),
                    cluster: None,
                })
                .collect();
            (FitSummary::SelectDim { report }, points)
        }
        Mode::Profile => {
            let profile = dispersion_profile(s, cfg.depth, &search)?;
            let mut direction = profile.per_p[0].frame.clone();
            let mut row = direction.row(0).to_vec();
            canonicalize_sign(&mut row);
            direction = Frame::new(1, s.m(), row).map_err(CliError::Numeric)?;
            let projected = s.project(&direction)?;
            let est = EstimatorSettings::default_for(1);
            let depths = per_point_depths(&projected, cfg.depth, &est, &rng)?;
            let orders = band_orders(projected.points());
            let points = (0..s.n())
                .map(|i| PointRecord {
                    id: ids[i].clone(),
                    coords: s.point(i).to_vec(),
                    projection: Some(projected.point(i).to_vec()),
                    depth: Some(depths[i]),
                    order: Some(orders[i]),
                    band: Some(band_label(&assignment(
                        orders[i],
                        &cfg.bands,
                        cfg.two_sided,
                    ))),
                    cluster: None,
                })
                .collect();
            (FitSummary::Profile { profile }, points)
        }
        Mode::Cluster => {
            let fit = maximize_dispersion(s, 1, cfg.depth, &search)?;
            let mut row = fit.b_p.as_ref().expect("p = 1 frame").row(0).to_vec();
            canonicalize_sign(&mut row);
            let direction = Frame::new(1, s.m(), row).map_err(CliError::Numeric)?;
            let projected = s.project(&direction)?;
            let values: Vec<f64> = projected.points().to_vec();
            let labels = cut_tree_1d(&values, cfg.groups.min(s.n()), cfg.linkage);
            let mut sizes = vec![0usize; cfg.groups.min(s.n())];
            for &l in &labels {
                sizes[l - 1] += 1;
            }
            let points = (0..s.n())
                .map(|i| PointRecord {
                    id: ids[i].clone(),
                    coords: s.point(i).to_vec(),
                    projection: Some(vec![values[i]]),
                    depth: None,
                    order: None,
                    band: None,
                    cluster: Some(labels[i]),
                })
                .collect();
            (
                FitSummary::Cluster {
                    direction,
                    groups: cfg.groups,
                    sizes,
                },
                points,
            )
        }
    };

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance {
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            rows_dropped: ingest.rows_dropped,
            warnings: ingest.warnings.clone(),
            config: cfg.clone(),
        },
        n: s.n(),
        m: s.m(),
        fit,
        points,
    })
}

/// Sign convention for one-dimensional projection bases: larger projected
/// value means larger residual on the last selected column (the price axis
/// in the weight/price pipelines). Falls back to the largest-|component|
/// rule when the frame is orthogonal to that axis.
fn orient_fit(fit: SubspaceFit, m: usize) -> (SubspaceFit, Frame) {
    let b_q = fit.b_q.clone().expect("q >= 1");
    if b_q.rows() != 1 {
        return (fit, b_q);
    }
    let last = b_q.row(0)[m - 1];
    let flip = if last.abs() > 1e-12 {
        last < 0.0
    } else {
        let mut row = b_q.row(0).to_vec();
        let before = row.clone();
        canonicalize_sign(&mut row);
        row != before
    };
    if !flip {
        return (fit, b_q);
    }
    let oriented = b_q.negate_row(0);
    let mut fit = fit;
    // The 1-D depth and sigma are sign-invariant; the deepest point flips.
    fit.nu = fit.nu.iter().map(|v| -v).collect();
    fit.b_q = Some(oriented.clone());
    (fit, oriented)
}

// ---------------------------------------------------------------------------
// File outputs
// ---------------------------------------------------------------------------

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write `report.json`, `points.csv` and the per-figure `plotdata_*.csv`
/// series into `output_dir`. Reruns with the same config and seed produce
/// byte-identical files.
pub fn emit_outputs(report: &AnalysisReport, output_dir: impl AsRef<Path>) -> Result<(), CliError> {
    let dir = output_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;

    let json_path = dir.join("report.json");
    let mut json = serde_json::to_vec_pretty(report).expect("report serializes");
    json.push(b'\n');
    std::fs::write(&json_path, json).map_err(io_err(&json_path))?;

    let points_path = dir.join("points.csv");
    let mut w = std::io::BufWriter::new(
        std::fs::File::create(&points_path).map_err(io_err(&points_path))?,
    );
    let proj_width = report
        .points
        .first()
        .and_then(|p| p.projection.as_ref().map(|v| v.len()))
        .unwrap_or(0);
    let mut header = vec!["id".to_string()];
    header.extend((1..=report.m).map(|j| format!("x{j}")));
    header.extend((1..=proj_width).map(|j| format!("proj{j}")));
    header.extend(["depth", "order", "band", "cluster"].map(String::from));
    writeln!(w, "{}", header.join(",")).map_err(io_err(&points_path))?;
    for p in &report.points {
        let mut cells = vec![csv_escape(&p.id)];
        cells.extend(p.coords.iter().map(|v| format!("{v}")));
        if let Some(proj) = &p.projection {
            cells.extend(proj.iter().map(|v| format!("{v}")));
        } else {
            cells.extend((0..proj_width).map(|_| String::new()));
        }
        cells.push(p.depth.map(|v| format!("{v}")).unwrap_or_default());
        cells.push(p.order.map(|v| format!("{v}")).unwrap_or_default());
        cells.push(p.band.clone().unwrap_or_default());
        cells.push(p.cluster.map(|v| v.to_string()).unwrap_or_default());
        writeln!(w, "{}", cells.join(",")).map_err(io_err(&points_path))?;
    }
    w.flush().map_err(io_err(&points_path))?;

    match &report.fit {
        FitSummary::CentralSubspace { .. } | FitSummary::SelectDim { .. } => {
            if report.points.first().map_or(false, |p| {
                p.projection.as_ref().map_or(false, |v| v.len() == 1)
            }) {
                write_depth_vs_projection(report, dir)?;
            }
        }
        FitSummary::Profile { profile } => {
            write_depth_vs_projection(report, dir)?;
            let path = dir.join("plotdata_profile.csv");
            let mut out = String::from("p,sigma_max,std_error\n");
            for e in &profile.per_p {
                out.push_str(&format!("{},{},{}\n", e.p, e.sigma_max, e.std_error));
            }
            std::fs::write(&path, out).map_err(io_err(&path))?;
        }
        FitSummary::Cluster { .. } => {
            let path = dir.join("plotdata_clusters.csv");
            let mut rows: Vec<(f64, usize)> = report
                .points
                .iter()
                .map(|p| (p.projection.as_ref().unwrap()[0], p.cluster.unwrap()))
                .collect();
            rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut out = String::from("projection,cluster\n");
            for (v, c) in rows {
                out.push_str(&format!("{v},{c}\n"));
            }
            std::fs::write(&path, out).map_err(io_err(&path))?;
        }
        FitSummary::PointDepth { .. } => {}
    }
    if let FitSummary::SelectDim { report: dim } = &report.fit {
        let path = dir.join("plotdata_stages.csv");
        let mut out = String::from("p_candidate,ambient_dim,r_k,p_value,accepted\n");
        for st in &dim.stages {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                st.p_candidate, st.ambient_dim, st.r_k, st.p_value, st.accepted
            ));
        }
        std::fs::write(&path, out).map_err(io_err(&path))?;
    }
    Ok(())
}

fn write_depth_vs_projection(report: &AnalysisReport, dir: &Path) -> Result<(), CliError> {
    let path = dir.join("plotdata_depth_vs_projection.csv");
    let mut rows: Vec<(f64, f64, f64, String)> = report
        .points
        .iter()
        .filter_map(|p| {
            let proj = p.projection.as_ref()?.first().copied()?;
            Some((
                proj,
                p.depth?,
                p.order.unwrap_or(f64::NAN),
                p.band.clone().unwrap_or_default(),
            ))
        })
        .collect();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out = String::from("projection,depth,order,band\n");
    for (v, d, o, b) in rows {
        if o.is_nan() {
            out.push_str(&format!("{v},{d},,{b}\n"));
        } else {
            out.push_str(&format!("{v},{d},{o},{b}\n"));
        }
    }
    std::fs::write(&path, out).map_err(io_err(&path))
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write the closed-form mixture-dispersion series (the oracle demo):
/// a 101-point u-grid of `sigma(F_{B1(u)})`.
pub fn emit_oracle_demo(eta: f64, output_dir: impl AsRef<Path>) -> Result<(), CliError> {
    if !(eta > 0.0) {
        return Err(CliError::config("eta must be positive"));
    }
    let dir = output_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join("plotdata_dispersion_vs_u.csv");
    let mut out = String::from("u,sigma\n");
    for i in 0..=100 {
        let u = -1.0 + 0.02 * i as f64;
        let sigma = mixture_dispersion_oracle(u, eta);
        out.push_str(&format!("{u},{sigma}\n"));
    }
    std::fs::write(&path, out).map_err(io_err(&path))?;
    let json_path = dir.join("report.json");
    let body = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "mode": "oracle_demo",
        "eta": eta,
        "u_grid": 101,
    });
    let mut json = serde_json::to_vec_pretty(&body).expect("demo report serializes");
    json.push(b'\n');
    std::fs::write(&json_path, json).map_err(io_err(&json_path))?;
    Ok(())
}
