use std::time::Instant;
use central_depth::depth::DepthKind;
use central_depth::dimension::select_dimension;
use central_depth::subspace::{minimize_dispersion, EstimatorSettings, SearchConfig};
use central_depth::{synth, RngStream};

fn main() {
    // 1. One full-budget q=2 halfspace fit on n=100 (stage fit / refit cost)
    let s = synth::gaussian_diag(100, &[1.0, 1.0, 5.0], &RngStream::new(1));
    let cfg = SearchConfig {
        restarts: 3,
        coarse_grid: 24,
        local_iters: 60,
        search_estimator: Some(EstimatorSettings { qmc_nodes: 96, gini_draws: 96, approx_dirs: Some(48) }),
        final_estimator: Some(EstimatorSettings::default_for(2)),
        ..SearchConfig::new(RngStream::new(2))
    };
    let t = Instant::now();
    let fit = minimize_dispersion(&s, 2, DepthKind::Halfspace, &cfg).unwrap();
    println!("full q=2 halfspace fit n=100: {:?} (b_p={:?})", t.elapsed(), fit.b_p.as_ref().unwrap().row(0));

    // 2. select_dimension scenario (i), halfspace, k=500, s=20 (includes null tables)
    let t = Instant::now();
    let rep = select_dimension(&s, 500, 20, 0.05, DepthKind::Halfspace, &cfg).unwrap();
    println!("select_dimension halfspace (incl tables): {:?} p*={} stages={:?}", t.elapsed(), rep.p_star,
        rep.stages.iter().map(|st| (st.ambient_dim, st.r_k, st.p_value)).collect::<Vec<_>>());
    // 3. second call reuses cached tables
    let s2 = synth::gaussian_diag(100, &[1.0, 1.0, 5.0], &RngStream::new(7));
    let t = Instant::now();
    let rep = select_dimension(&s2, 500, 20, 0.05, DepthKind::Halfspace, &cfg).unwrap();
    println!("select_dimension halfspace (cached): {:?} p*={}", t.elapsed(), rep.p_star);

    // 4. spherical case with cached tables
    let sph = synth::gaussian_spherical(100, 3, &RngStream::new(11));
    let t = Instant::now();
    let rep = select_dimension(&sph, 500, 20, 0.05, DepthKind::Halfspace, &cfg).unwrap();
    println!("select_dimension spherical (cached): {:?} p*={} p1={}", t.elapsed(), rep.p_star, rep.stages[0].p_value);

    // 5. criterion-1 style: mixture n=20000 q=1 minimize with default budget
    let mix = synth::square_mixture(20000, 0.1, &RngStream::new(21));
    let cfg1 = SearchConfig::new(RngStream::new(22));
    let t = Instant::now();
    let fit = minimize_dispersion(&mix, 1, DepthKind::Halfspace, &cfg1).unwrap();
    let d = fit.b_q.as_ref().unwrap().row(0).to_vec();
    println!("mixture q=1 minimize (default cfg): {:?} dir=({:.5},{:.5}) sigma={:.5}", t.elapsed(), d[0], d[1], fit.sigma.value);
}
