//! The feature mapper: partitions the feature indices into correlated
//! subsets, one per ensemble autoencoder.
//!
//! Features are clustered by average-linkage agglomerative clustering on the
//! correlation distance `1 - |pearson|`, and the dendrogram is cut from the
//! root downward so that no emitted cluster exceeds the size cap `m`.

use kodama::{linkage, Method};
use serde::{Deserialize, Serialize};

use super::KitnetError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMap {
    clusters: Vec<Vec<usize>>,
    max_cluster_size: usize,
}

impl FeatureMap {
    /// Validates that the clusters partition `0..n` and respect the size cap.
    pub fn from_clusters(clusters: Vec<Vec<usize>>, n: usize, m: usize) -> Result<Self, KitnetError> {
        if m == 0 {
            return Err(KitnetError::Data("max cluster size must be >= 1".into()));
        }
        let mut seen = vec![false; n];
        for cluster in &clusters {
            if cluster.is_empty() {
                return Err(KitnetError::Data("empty feature cluster".into()));
            }
            if cluster.len() > m {
                return Err(KitnetError::Data(format!(
                    "cluster of size {} exceeds cap {m}",
                    cluster.len()
                )));
            }
            for &idx in cluster {
                if idx >= n || seen[idx] {
                    return Err(KitnetError::Data(format!(
                        "feature index {idx} missing, duplicated, or out of range"
                    )));
                }
                seen[idx] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(KitnetError::Data("clusters do not cover every feature".into()));
        }
        Ok(Self {
            clusters,
            max_cluster_size: m,
        })
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn max_cluster_size(&self) -> usize {
        self.max_cluster_size
    }

    pub fn n_features(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    /// Gathers the cluster's feature values out of a full vector.
    pub fn slice(&self, cluster: usize, x: &[f64]) -> Vec<f64> {
        self.clusters[cluster].iter().map(|&i| x[i]).collect()
    }
}

/// Builds the feature map from a window of training rows.
pub fn build_feature_map(rows: &[Vec<f64>], m: usize) -> Result<FeatureMap, KitnetError> {
    if rows.len() < 2 {
        return Err(KitnetError::Calibration(
            "feature map needs at least 2 training rows".into(),
        ));
    }
    if m == 0 {
        return Err(KitnetError::Calibration("max cluster size must be >= 1".into()));
    }
    let n = rows[0].len();
    if n == 0 {
        return Err(KitnetError::Data("zero-width training rows".into()));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(KitnetError::Data("ragged training rows".into()));
    }

    if n == 1 {
        return FeatureMap::from_clusters(vec![vec![0]], 1, m);
    }

    // condensed upper-triangle matrix of 1 - |pearson|
    let mut condensed = Vec::with_capacity(n * (n - 1) / 2);
    let stats = column_stats(rows, n);
    for i in 0..n - 1 {
        for j in i + 1..n {
            condensed.push(1.0 - pearson(rows, &stats, i, j).abs());
        }
    }
    let dendrogram = linkage(&mut condensed, n, Method::Average);

    // leaf sets per dendrogram node; node n + k is the cluster formed at
    // merge step k
    let steps = dendrogram.steps();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for step in steps {
        let mut merged = members[step.cluster1].clone();
        merged.extend_from_slice(&members[step.cluster2]);
        merged.sort_unstable();
        members.push(merged);
    }

    // cut top-down: emit any node whose cluster fits under the cap
    let mut clusters = Vec::new();
    let mut stack = vec![members.len() - 1];
    while let Some(node) = stack.pop() {
        if members[node].len() <= m {
            clusters.push(members[node].clone());
        } else {
            let step = &steps[node - n];
            stack.push(step.cluster2);
            stack.push(step.cluster1);
        }
    }
    clusters.sort_by_key(|c| c[0]);

    FeatureMap::from_clusters(clusters, n, m)
}

struct ColumnStats {
    means: Vec<f64>,
    stds: Vec<f64>,
}

fn column_stats(rows: &[Vec<f64>], n: usize) -> ColumnStats {
    let count = rows.len() as f64;
    let mut means = vec![0.0; n];
    for row in rows {
        for (m, &v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= count;
    }
    let mut stds = vec![0.0; n];
    for row in rows {
        for (j, &v) in row.iter().enumerate() {
            stds[j] += (v - means[j]) * (v - means[j]);
        }
    }
    for s in &mut stds {
        *s = (*s / count).sqrt();
    }
    ColumnStats { means, stds }
}

/// Pearson correlation between feature columns; a constant column has no
/// defined correlation and is treated as uncorrelated.
fn pearson(rows: &[Vec<f64>], stats: &ColumnStats, i: usize, j: usize) -> f64 {
    if stats.stds[i] == 0.0 || stats.stds[j] == 0.0 {
        return 0.0;
    }
    let mut cov = 0.0;
    for row in rows {
        cov += (row[i] - stats.means[i]) * (row[j] - stats.means[j]);
    }
    cov /= rows.len() as f64;
    (cov / (stats.stds[i] * stats.stds[j])).clamp(-1.0, 1.0)
}
