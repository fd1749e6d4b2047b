//! Correlation-based asset clustering.
//!
//! Agglomerative average-linkage clustering on the correlation distance
//! d_ij = √(2(1 − corr_ij)) of log returns. Merge order is deterministic:
//! the closest pair wins, ties broken by the smaller (min id, max id) pair.

use nalgebra::DMatrix;

use crate::error::{FinqError, Result};
use crate::portfolio::MarketData;

/// One dendrogram step: the two merged cluster ids and their average-linkage
/// distance. Leaves are 0..N−1; merged clusters take ids N, N+1, ….
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    pub merged: usize,
    pub distance: f64,
}

/// Asset partition with equal-weight representative indices per cluster.
/// Cluster ids are canonical: ordered by each cluster's smallest asset index.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetClustering {
    pub assignments: Vec<usize>,
    /// Per cluster, a weight vector over all assets summing to 1.
    pub representatives: Vec<Vec<f64>>,
    pub n_clusters: usize,
    pub merges: Vec<MergeStep>,
    /// Assets with zero return variance (correlation set to 0 against
    /// everything else).
    pub degenerate_assets: Vec<usize>,
}

impl AssetClustering {
    /// Members of each cluster, in cluster-id order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.n_clusters];
        for (asset, &cluster) in self.assignments.iter().enumerate() {
            members[cluster].push(asset);
        }
        members
    }

    /// Plain-text dendrogram trace for diagnostics.
    pub fn dendrogram_text(&self) -> String {
        let mut out = String::new();
        out.push_str("merge distance\n");
        for step in &self.merges {
            out.push_str(&format!(
                "{} + {} -> {} {:.6}\n",
                step.left, step.right, step.merged, step.distance
            ));
        }
        out
    }
}

/// Pearson correlation of log returns; zero-variance assets get correlation 0
/// against all others and are reported.
pub fn correlation_matrix(data: &MarketData) -> (DMatrix<f64>, Vec<usize>) {
    let returns = data.log_returns();
    let t = returns.nrows();
    let n = returns.ncols();
    let means: Vec<f64> = (0..n).map(|a| returns.column(a).iter().sum::<f64>() / t as f64).collect();
    let mut centered = returns.clone();
    for a in 0..n {
        for row in 0..t {
            centered[(row, a)] -= means[a];
        }
    }
    let sds: Vec<f64> = (0..n)
        .map(|a| (centered.column(a).iter().map(|r| r * r).sum::<f64>() / t as f64).sqrt())
        .collect();
    let degenerate: Vec<usize> = (0..n).filter(|&a| sds[a] == 0.0).collect();
    let mut corr = DMatrix::identity(n, n);
    for a in 0..n {
        for b in a + 1..n {
            let value = if sds[a] == 0.0 || sds[b] == 0.0 {
                0.0
            } else {
                let cov = centered
                    .column(a)
                    .iter()
                    .zip(centered.column(b).iter())
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
                    / t as f64;
                (cov / (sds[a] * sds[b])).clamp(-1.0, 1.0)
            };
            corr[(a, b)] = value;
            corr[(b, a)] = value;
        }
    }
    (corr, degenerate)
}

pub fn cluster_assets(data: &MarketData, n_clusters: usize) -> Result<AssetClustering> {
    let n = data.num_assets();
    if n_clusters == 0 || n_clusters > n {
        return Err(FinqError::Parameter(format!(
            "n_clusters must be in 1..={n}, got {n_clusters}"
        )));
    }
    let (corr, degenerate_assets) = correlation_matrix(data);

    // active clusters: (id, members); distances kept in a map keyed by id pair
    let mut next_id = n;
    let mut active: Vec<(usize, Vec<usize>)> = (0..n).map(|a| (a, vec![a])).collect();
    let mut dist: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
    for a in 0..n {
        for b in a + 1..n {
            let d = (2.0 * (1.0 - corr[(a, b)])).max(0.0).sqrt();
            dist.insert((a, b), d);
        }
    }
    let mut merges = Vec::new();
    while active.len() > n_clusters {
        let mut best: Option<((usize, usize), f64)> = None;
        for i in 0..active.len() {
            for j in i + 1..active.len() {
                let key = (active[i].0.min(active[j].0), active[i].0.max(active[j].0));
                let d = dist[&key];
                let better = match best {
                    None => true,
                    Some((bk, bd)) => d < bd || (d == bd && key < bk),
                };
                if better {
                    best = Some((key, d));
                }
            }
        }
        let ((id_a, id_b), d) = best.expect("more clusters than the target remain");
        let pos_a = active.iter().position(|(id, _)| *id == id_a).expect("active id");
        let pos_b = active.iter().position(|(id, _)| *id == id_b).expect("active id");
        let (size_a, size_b) = (active[pos_a].1.len() as f64, active[pos_b].1.len() as f64);

        // average linkage update: d(ab, c) = (|a|·d(a,c) + |b|·d(b,c)) / (|a|+|b|)
        let merged_id = next_id;
        next_id += 1;
        for (id_c, _) in &active {
            let id_c = *id_c;
            if id_c == id_a || id_c == id_b {
                continue;
            }
            let d_ac = dist[&(id_a.min(id_c), id_a.max(id_c))];
            let d_bc = dist[&(id_b.min(id_c), id_b.max(id_c))];
            let d_new = (size_a * d_ac + size_b * d_bc) / (size_a + size_b);
            dist.insert((id_c.min(merged_id), id_c.max(merged_id)), d_new);
        }
        let mut members = active[pos_a].1.clone();
        members.extend_from_slice(&active[pos_b].1);
        members.sort_unstable();
        let (hi, lo) = (pos_a.max(pos_b), pos_a.min(pos_b));
        active.remove(hi);
        active.remove(lo);
        active.push((merged_id, members));
        merges.push(MergeStep { left: id_a, right: id_b, merged: merged_id, distance: d });
    }

    // canonical cluster ids: sort by smallest member
    active.sort_by_key(|(_, members)| members[0]);
    let mut assignments = vec![0usize; n];
    let mut representatives = Vec::with_capacity(active.len());
    for (cluster, (_, members)) in active.iter().enumerate() {
        let mut rep = vec![0.0; n];
        for &asset in members {
            assignments[asset] = cluster;
            rep[asset] = 1.0 / members.len() as f64;
        }
        representatives.push(rep);
    }
    Ok(AssetClustering {
        assignments,
        representatives,
        n_clusters,
        merges,
        degenerate_assets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn market(prices: DMatrix<f64>) -> MarketData {
        let t = prices.nrows();
        let n = prices.ncols();
        MarketData::new(
            prices,
            (0..t).map(|i| format!("2022-{:02}-01", i + 1)).collect(),
            (0..n).map(|j| format!("A{j}")).collect(),
        )
        .unwrap()
    }

    fn block_market(seed: u64) -> MarketData {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = 24;
        // two blocks of three assets each, driven by a common factor plus noise
        let mut prices = DMatrix::zeros(t, 6);
        let mut levels = [100.0f64; 6];
        for row in 0..t {
            let factor_a: f64 = rng.gen_range(-0.05..0.05);
            let factor_b: f64 = rng.gen_range(-0.05..0.05);
            for asset in 0..6 {
                prices[(row, asset)] = levels[asset];
                let factor = if asset < 3 { factor_a } else { factor_b };
                let noise: f64 = rng.gen_range(-0.005..0.005);
                levels[asset] *= (factor + noise).exp();
            }
        }
        market(prices)
    }

    #[test]
    fn duplicated_series_are_recovered_exactly() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = 12;
        let mut prices = DMatrix::zeros(t, 4);
        let mut base = [50.0f64, 80.0];
        for row in 0..t {
            for group in 0..2 {
                prices[(row, group * 2)] = base[group];
                prices[(row, group * 2 + 1)] = base[group] * 2.0; // same returns
                base[group] *= (0.03 * rng.gen_range(-1.0..1.0f64)).exp();
            }
        }
        let clustering = cluster_assets(&market(prices), 2).unwrap();
        assert_eq!(clustering.assignments[0], clustering.assignments[1]);
        assert_eq!(clustering.assignments[2], clustering.assignments[3]);
        assert_ne!(clustering.assignments[0], clustering.assignments[2]);
    }

    #[test]
    fn singleton_clustering_is_identity() {
        let data = block_market(1);
        let clustering = cluster_assets(&data, 6).unwrap();
        assert_eq!(clustering.assignments, vec![0, 1, 2, 3, 4, 5]);
        for (cluster, rep) in clustering.representatives.iter().enumerate() {
            assert_eq!(rep[cluster], 1.0);
            assert_eq!(rep.iter().sum::<f64>(), 1.0);
        }
        assert!(clustering.merges.is_empty());
    }

    /// Independent oracle: naive average linkage recomputing cluster-to-
    /// cluster distances from the raw pairwise matrix at every step.
    #[test]
    fn merge_trace_matches_naive_average_linkage() {
        let data = block_market(42);
        let clustering = cluster_assets(&data, 2).unwrap();

        let (corr, _) = correlation_matrix(&data);
        let n = 6;
        let raw = |a: usize, b: usize| (2.0 * (1.0 - corr[(a, b)])).max(0.0).sqrt();
        let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|a| (a, vec![a])).collect();
        let mut next_id = n;
        let mut oracle_merges = Vec::new();
        while clusters.len() > 2 {
            let mut best: Option<((usize, usize), f64)> = None;
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    // brute-force mean over all cross pairs
                    let mut total = 0.0;
                    for &a in &clusters[i].1 {
                        for &b in &clusters[j].1 {
                            total += raw(a, b);
                        }
                    }
                    let d = total / (clusters[i].1.len() * clusters[j].1.len()) as f64;
                    let key = (
                        clusters[i].0.min(clusters[j].0),
                        clusters[i].0.max(clusters[j].0),
                    );
                    let better = match best {
                        None => true,
                        Some((bk, bd)) => d < bd - 1e-12 || ((d - bd).abs() <= 1e-12 && key < bk),
                    };
                    if better {
                        best = Some((key, d));
                    }
                }
            }
            let ((id_a, id_b), d) = best.unwrap();
            let pos_a = clusters.iter().position(|(id, _)| *id == id_a).unwrap();
            let pos_b = clusters.iter().position(|(id, _)| *id == id_b).unwrap();
            let mut members = clusters[pos_a].1.clone();
            members.extend_from_slice(&clusters[pos_b].1);
            members.sort_unstable();
            let (hi, lo) = (pos_a.max(pos_b), pos_a.min(pos_b));
            clusters.remove(hi);
            clusters.remove(lo);
            clusters.push((next_id, members));
            oracle_merges.push((id_a, id_b, next_id, d));
            next_id += 1;
        }
        assert_eq!(clustering.merges.len(), oracle_merges.len());
        for (got, want) in clustering.merges.iter().zip(&oracle_merges) {
            assert_eq!((got.left, got.right, got.merged), (want.0, want.1, want.2));
            assert!((got.distance - want.3).abs() < 1e-9);
        }
        // the two blocks are split
        assert_eq!(clustering.assignments[0], clustering.assignments[2]);
        assert_eq!(clustering.assignments[3], clustering.assignments[5]);
        assert_ne!(clustering.assignments[0], clustering.assignments[3]);
    }

    #[test]
    fn zero_variance_asset_is_flagged() {
        let mut prices = DMatrix::from_element(10, 3, 100.0);
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut level: f64 = 100.0;
        for row in 0..10 {
            prices[(row, 1)] = level;
            prices[(row, 2)] = level * 0.5;
            level *= (0.02 * rng.gen_range(-1.0..1.0f64)).exp();
        }
        let clustering = cluster_assets(&market(prices), 2).unwrap();
        assert_eq!(clustering.degenerate_assets, vec![0]);
    }

    /// Relabeling assets permutes the partition identically.
    #[test]
    fn permutation_equivariance() {
        let data = block_market(9);
        let clustering = cluster_assets(&data, 3).unwrap();

        let perm = [3usize, 0, 5, 1, 4, 2]; // new index -> old index
        let prices = data.prices();
        let permuted = DMatrix::from_fn(prices.nrows(), 6, |row, col| prices[(row, perm[col])]);
        let permuted_clustering = cluster_assets(&market(permuted), 3).unwrap();

        // compare partitions as sets of member sets mapped through the permutation
        let mut original: Vec<Vec<usize>> = clustering.members();
        let mut mapped: Vec<Vec<usize>> = permuted_clustering
            .members()
            .into_iter()
            .map(|cluster| {
                let mut members: Vec<usize> = cluster.into_iter().map(|a| perm[a]).collect();
                members.sort_unstable();
                members
            })
            .collect();
        original.sort();
        mapped.sort();
        assert_eq!(original, mapped);
    }
}
