//! Agglomerative hierarchical clustering of one-dimensional projections
//! (the hclust/cutree step of the clustering pipeline).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    Average,
}

impl std::str::FromStr for Linkage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(format!("unknown linkage '{other}'")),
        }
    }
}

/// Agglomerate `values` down to `groups` clusters with the chosen linkage
/// and return one label per value in `1..=groups`, numbered by ascending
/// cluster mean. Merge ties break toward the smallest cluster indices, so
/// the result is deterministic.
pub fn cut_tree_1d(values: &[f64], groups: usize, linkage: Linkage) -> Vec<usize> {
    let n = values.len();
    assert!(groups >= 1 && groups <= n, "need 1 <= groups <= n");
    // Active cluster state: member lists, pairwise distances maintained by
    // Lance-Williams updates.
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut active: Vec<bool> = vec![true; n];
    let mut dist: Vec<f64> = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (values[i] - values[j]).abs();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    let mut n_active = n;
    while n_active > groups {
        let mut best = (f64::INFINITY, 0usize, 0usize);
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..n {
                if !active[j] {
                    continue;
                }
                if dist[i * n + j] < best.0 {
                    best = (dist[i * n + j], i, j);
                }
            }
        }
        let (_, i, j) = best;
        let (wi, wj) = (members[i].len() as f64, members[j].len() as f64);
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let dik = dist[i * n + k];
            let djk = dist[j * n + k];
            let d = match linkage {
                Linkage::Single => dik.min(djk),
                Linkage::Complete => dik.max(djk),
                Linkage::Average => (wi * dik + wj * djk) / (wi + wj),
            };
            dist[i * n + k] = d;
            dist[k * n + i] = d;
        }
        let moved = std::mem::take(&mut members[j]);
        members[i].extend(moved);
        active[j] = false;
        n_active -= 1;
    }

    // Number surviving clusters by ascending mean projection.
    let mut clusters: Vec<(f64, &Vec<usize>)> = (0..n)
        .filter(|&i| active[i])
        .map(|i| {
            let mean = members[i].iter().map(|&k| values[k]).sum::<f64>()
                / members[i].len() as f64;
            (mean, &members[i])
        })
        .collect();
    clusters.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut labels = vec![0usize; n];
    for (rank, (_, member_list)) in clusters.iter().enumerate() {
        for &k in member_list.iter() {
            labels[k] = rank + 1;
        }
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_well_separated_groups() {
        let values = [0.0, 0.1, 0.2, 5.0, 5.1, 10.0, 10.2];
        let labels = cut_tree_1d(&values, 3, Linkage::Complete);
        assert_eq!(labels[..3], [1, 1, 1]);
        assert_eq!(labels[3..5], [2, 2]);
        assert_eq!(labels[5..], [3, 3]);
    }

    #[test]
    fn linkages_agree_on_clean_separation() {
        let values = [0.0, 0.2, 8.0, 8.1, 20.0];
        for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
            let labels = cut_tree_1d(&values, 3, linkage);
            assert_eq!(labels, vec![1, 1, 2, 2, 3]);
        }
    }

    #[test]
    fn one_group_is_all_ones() {
        let values = [3.0, 1.0, 2.0];
        assert_eq!(cut_tree_1d(&values, 1, Linkage::Complete), vec![1, 1, 1]);
    }
}
