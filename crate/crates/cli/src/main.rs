//! `central-depth`: depth-based subspace analysis of CSV point clouds.

use clap::{Args, Parser, Subcommand};

use central_depth::depth::DepthKind;
use central_depth::synth;
use central_depth::RngStream;
use central_depth_cli::cluster::Linkage;
use central_depth_cli::pipeline::{emit_oracle_demo, AnalysisConfig, Mode};
use central_depth_cli::{emit_outputs, exit_code, run_analyze, CliError};

#[derive(Parser)]
#[command(
    name = "central-depth",
    version,
    about = "Central subspace data depth: depth, dispersion, subspace search and anomaly bands"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plain point depth with the 0.5 central-region flag.
    PointDepth(AnalyzeArgs),
    /// Minimal-dispersion subspace, central-subspace depths and quantile
    /// bands (q = 1 by default).
    CentralSubspace(AnalyzeArgs),
    /// Recursive Rayleigh-test selection of (p*, q*).
    SelectDim(AnalyzeArgs),
    /// Maximal-dispersion profile over p = 1..m after ball rescaling.
    Profile(AnalyzeArgs),
    /// Project onto the maximal-dispersion direction and cluster.
    Cluster(AnalyzeArgs),
    /// Emit the closed-form mixture dispersion curve (101-point u-grid).
    Oracle {
        /// Component standard deviation of the square mixture.
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        #[arg(long, default_value = ".")]
        out: String,
    },
    /// Generate a synthetic data set as CSV on stdout.
    Synth {
        /// One of: pod, mixture, gauss.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 500)]
        n: usize,
        /// Mixture component standard deviation (mixture kind).
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        /// Comma-separated standard deviations (gauss kind).
        #[arg(long, default_value = "1,1,5")]
        sds: String,
        /// Lower-tail contamination fraction (pod kind).
        #[arg(long, default_value_t = 0.07)]
        tail: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV file with a header row.
    #[arg(long)]
    input: String,
    /// Data columns, by header name or 0-based index (comma separated).
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Column holding row labels.
    #[arg(long)]
    id_col: Option<String>,
    /// Natural-log transform the selected columns.
    #[arg(long = "log")]
    log_transform: bool,
    /// Abort instead of dropping rows with non-positive values under --log.
    #[arg(long)]
    strict: bool,
    /// Depth function: halfspace | simplicial | mahalanobis.
    #[arg(long, default_value = "halfspace")]
    depth: String,
    /// Projection dimension for central-subspace mode.
    #[arg(long)]
    q: Option<usize>,
    /// Number of clusters for cluster mode.
    #[arg(long, default_value_t = 3)]
    groups: usize,
    /// Linkage for cluster mode: single | complete | average.
    #[arg(long, default_value = "complete")]
    linkage: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rayleigh-test level for select-dim.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Subsamples per select-dim stage.
    #[arg(long, default_value_t = 500)]
    k: usize,
    /// Subsample size for select-dim.
    #[arg(long, default_value_t = 20)]
    sub_size: usize,
    /// Flag both tails instead of the upper tail only.
    #[arg(long)]
    two_sided: bool,
    /// Central band probability content.
    #[arg(long, default_value_t = 0.5)]
    band_central: f64,
    /// Lower edge of the blue band (exclusive).
    #[arg(long, default_value_t = 0.95)]
    band_blue_lo: f64,
    /// Upper edge of the blue band (inclusive); above is red.
    #[arg(long, default_value_t = 0.975)]
    band_blue_hi: f64,
    /// Search restarts.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Coarse candidate frames per restart.
    #[arg(long, default_value_t = 64)]
    coarse_grid: usize,
    /// Local descent iterations.
    #[arg(long, default_value_t = 200)]
    local_iters: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: String,
}

fn parse_depth(s: &str) -> Result<DepthKind, CliError> {
    match s {
        "halfspace" => Ok(DepthKind::Halfspace),
        "simplicial" => Ok(DepthKind::Simplicial),
        "mahalanobis" => Ok(DepthKind::Mahalanobis),
        other => Err(CliError::config(format!(
            "unknown depth '{other}' (expected halfspace|simplicial|mahalanobis)"
        ))),
    }
}

fn build_config(args: &AnalyzeArgs, mode: Mode) -> Result<AnalysisConfig, CliError> {
    let mut cfg = AnalysisConfig::new(args.input.clone(), mode);
    cfg.columns = args.columns.clone();
    cfg.id_col = args.id_col.clone();
    cfg.log_transform = args.log_transform;
    cfg.strict = args.strict;
    cfg.depth = parse_depth(&args.depth)?;
    cfg.q = args.q;
    cfg.groups = args.groups;
    cfg.linkage = args
        .linkage
        .parse::<Linkage>()
        .map_err(CliError::config)?;
    cfg.seed = args.seed;
    cfg.alpha = args.alpha;
    cfg.k = args.k;
    cfg.sub_size = args.sub_size;
    cfg.two_sided = args.two_sided;
    cfg.bands.central_content = args.band_central;
    cfg.bands.blue_lo = args.band_blue_lo;
    cfg.bands.blue_hi = args.band_blue_hi;
    cfg.restarts = args.restarts;
    cfg.coarse_grid = args.coarse_grid;
    cfg.local_iters = args.local_iters;
    cfg.output_dir = args.out.clone();
    Ok(cfg)
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("CENTRAL_DEPTH_THREADS") {
        if let Ok(threads) = v.trim().parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    init_thread_pool();
    match cli.command {
        Command::PointDepth(a) => analyze(&a, Mode::PointDepth),
        Command::CentralSubspace(a) => analyze(&a, Mode::CentralSubspace),
        Command::SelectDim(a) => analyze(&a, Mode::SelectDim),
        Command::Profile(a) => analyze(&a, Mode::Profile),
        Command::Cluster(a) => analyze(&a, Mode::Cluster),
        Command::Oracle { eta, out } => emit_oracle_demo(eta, out),
        Command::Synth {
            kind,
            n,
            eta,
            sds,
            tail,
            seed,
        } => synth_csv(&kind, n, eta, &sds, tail, seed),
    }
}

fn analyze(args: &AnalyzeArgs, mode: Mode) -> Result<(), CliError> {
    let cfg = build_config(args, mode)?;
    let report = run_analyze(&cfg)?;
    emit_outputs(&report, &cfg.output_dir)?;
    eprintln!(
        "wrote report.json and points.csv for {} rows to {}",
        report.n, cfg.output_dir
    );
    Ok(())
}

fn synth_csv(kind: &str, n: usize, eta: f64, sds: &str, tail: f64, seed: u64) -> Result<(), CliError> {
    let rng = RngStream::new(seed);
    let (header, sample) = match kind {
        "pod" => ("w,p", synth::pod_lines(n, tail, &rng)),
        "mixture" => ("x1,x2", synth::square_mixture(n, eta, &rng)),
        "gauss" => {
            let sds: Vec<f64> = sds
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::config(format!("bad --sds: {e}")))?;
            let names: Vec<String> = (1..=sds.len()).map(|i| format!("x{i}")).collect();
            let s = synth::gaussian_diag(n, &sds, &rng);
            println!("id,{}", names.join(","));
            for (i, row) in s.rows().enumerate() {
                let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                println!("{},{}", i + 1, cells.join(","));
            }
            return Ok(());
        }
        other => {
            return Err(CliError::config(format!(
                "unknown synth kind '{other}' (expected pod|mixture|gauss)"
            )))
        }
    };
    println!("id,{header}");
    for (i, row) in sample.rows().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        println!("{},{}", i + 1, cells.join(","));
    }
    Ok(())
}

fn main() {
    if let Err(err) = run() {
        let record = serde_json::json!({
            "error": format!("{err}"),
            "exit_code": exit_code(&err),
        });
        eprintln!("{record}");
        std::process::exit(exit_code(&err));
    }
}
