use central_depth::depth::DepthKind;
use central_depth::dimension::{rescale_to_ball, R_HALFSPACE};
use central_depth::dispersion::dispersion_halfspace_1d;
use central_depth::subspace::{maximize_dispersion, SearchConfig};
use central_depth::{RngStream, Sample, Frame};

fn load_iris() -> (Sample, Vec<usize>) {
    let text = std::fs::read_to_string("data/iris.csv").unwrap();
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        for j in 0..4 { pts.push(f[j].parse::<f64>().unwrap()); }
        labels.push(match f[4] { "setosa" => 0, "versicolor" => 1, _ => 2 });
    }
    (Sample::new(150, 4, pts).unwrap(), labels)
}

fn sigma_along(s: &Sample, dir: &[f64]) -> f64 {
    let n: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: Vec<f64> = dir.iter().map(|v| v / n).collect();
    let f = Frame::new(1, 4, u).unwrap();
    let p = s.project(&f).unwrap();
    dispersion_halfspace_1d(&p).unwrap().value
}

fn agreement(values: &[f64], labels: &[usize]) -> usize {
    let assign = central_depth_probe_cluster(values, 3);
    let mut best = 0;
    use std::collections::HashMap;
    // brute force over label permutations
    let perms = [[0,1,2],[0,2,1],[1,0,2],[1,2,0],[2,0,1],[2,1,0]];
    for perm in perms {
        let mut a = 0;
        for (v, &l) in assign.iter().zip(labels) {
            if perm[l] + 1 == *v { a += 1; }
        }
        best = best.max(a);
    }
    let _ : HashMap<u8,u8> = HashMap::new();
    best
}

// complete-linkage 1-D, same as the cli implementation
fn central_depth_probe_cluster(values: &[f64], groups: usize) -> Vec<usize> {
    let n = values.len();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut active = vec![true; n];
    let mut dist = vec![0.0; n * n];
    for i in 0..n { for j in (i+1)..n {
        let d = (values[i]-values[j]).abs(); dist[i*n+j]=d; dist[j*n+i]=d; } }
    let mut n_active = n;
    while n_active > groups {
        let mut best = (f64::INFINITY, 0usize, 0usize);
        for i in 0..n { if !active[i] { continue; }
            for j in (i+1)..n { if !active[j] { continue; }
                if dist[i*n+j] < best.0 { best = (dist[i*n+j], i, j); } } }
        let (_, i, j) = best;
        for kk in 0..n { if !active[kk] || kk==i || kk==j { continue; }
            let d = dist[i*n+kk].max(dist[j*n+kk]);
            dist[i*n+kk]=d; dist[kk*n+i]=d; }
        let moved = std::mem::take(&mut members[j]);
        members[i].extend(moved);
        active[j] = false; n_active -= 1;
    }
    let mut clusters: Vec<(f64, Vec<usize>)> = (0..n).filter(|&i| active[i])
        .map(|i| (members[i].iter().map(|&k| values[k]).sum::<f64>()/members[i].len() as f64, members[i].clone())).collect();
    clusters.sort_by(|a,b| a.0.partial_cmp(&b.0).unwrap());
    let mut labels = vec![0; n];
    for (r, (_, ms)) in clusters.iter().enumerate() { for &k in ms { labels[k] = r+1; } }
    labels
}

fn main() {
    let (iris, labels) = load_iris();
    let rescaled = rescale_to_ball(&iris, R_HALFSPACE).unwrap();
    // PCA direction for reference
    let pca = central_depth::dimension::pca_frames(&iris, 1).unwrap();
    let pc1 = pca.b_p.row(0).to_vec();
    println!("pc1 = {:?} sigma={:.6}", pc1, sigma_along(&rescaled, &pc1));
    let pf = iris.project(&pca.b_p).unwrap();
    println!("pc1 agreement: {}", agreement(pf.points(), &labels));
    for seed in 0..6u64 {
        for (budget, r, c, it) in [("default", 8, 64, 200), ("big", 24, 256, 400)] {
            let cfg = SearchConfig { restarts: r, coarse_grid: c, local_iters: it,
                ..SearchConfig::new(RngStream::new(100 + seed)) };
            let fit = maximize_dispersion(&rescaled, 1, DepthKind::Halfspace, &cfg).unwrap();
            let dir = fit.b_p.as_ref().unwrap().row(0).to_vec();
            let proj = iris.project(fit.b_p.as_ref().unwrap()).unwrap();
            let a = agreement(proj.points(), &labels);
            println!("seed {seed} {budget}: sigma={:.6} agree={} dir={:?}", fit.sigma.value, a,
                dir.iter().map(|v| (v*1000.0).round()/1000.0).collect::<Vec<_>>());
        }
    }
}
