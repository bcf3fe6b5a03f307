use partgram::clustering::{
    dbscan, extract_features, granularity_sweep, merge_cluster_boxes, EmbeddingTable,
};
use partgram::grammar::Aabb;
use partgram::synth;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Reachability-closure reference: core components by transitive closure
/// over core-core adjacency; each border point joins the adjacent component
/// with the smallest core index.
fn reference(points: &[Vec<f64>], eps: f64, min_pts: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = points.len();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| dist(&points[i], &points[j]) <= eps)
                .collect()
        })
        .collect();
    let core: Vec<bool> = (0..n)
        .map(|i| adj[i].iter().filter(|&&a| a).count() >= min_pts)
        .collect();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            reach[i][j] = core[i] && core[j] && adj[i][j];
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    // Component representative: smallest reachable core index.
    let rep: Vec<Option<usize>> = (0..n)
        .map(|i| core[i].then(|| (0..n).find(|&j| reach[i][j]).unwrap()))
        .collect();
    let mut label: Vec<Option<usize>> = rep.clone();
    for i in (0..n).filter(|&i| !core[i]) {
        label[i] = (0..n)
            .filter(|&j| core[j] && adj[i][j])
            .filter_map(|j| rep[j])
            .min();
    }
    let mut reps: Vec<usize> = label.iter().flatten().copied().collect();
    reps.sort_unstable();
    reps.dedup();
    let clusters = reps
        .iter()
        .map(|r| (0..n).filter(|&i| label[i] == Some(*r)).collect())
        .collect();
    let noise = (0..n).filter(|&i| label[i].is_none()).collect();
    (clusters, noise)
}

fn normalize(mut clusters: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort();
    clusters
}

fn instance(seed: u64) -> (Vec<Vec<f64>>, f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(0..=15);
    let d = rng.random_range(1..=8);
    // A coarse lattice makes exact-boundary distances common.
    let points = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| f64::from(rng.random_range(0..5u8)) * 0.25)
                .collect()
        })
        .collect();
    let eps = f64::from(rng.random_range(1..=8u8)) * 0.125;
    let min_pts = rng.random_range(1..=5);
    (points, eps, min_pts)
}

fn record_parts(seed: u64) -> (Vec<(Aabb, String)>, EmbeddingTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=10);
    let mut table = EmbeddingTable::new();
    let parts = (0..n)
        .map(|i| {
            let text = format!("part {}", i % 4);
            let v: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..1.0)).collect();
            table.insert(text.clone(), v).unwrap();
            (synth::aabb(&mut rng), text)
        })
        .collect();
    (parts, table)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dbscan_matches_reference(seed in any::<u64>()) {
        let (points, eps, min_pts) = instance(seed);
        let got = dbscan(&points, eps, min_pts).unwrap();
        let (clusters, noise) = reference(&points, eps, min_pts);
        let mut all: Vec<usize> = got.clusters.iter().flatten().chain(&got.noise).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..points.len()).collect::<Vec<_>>());
        prop_assert_eq!(normalize(got.clusters), normalize(clusters));
        let mut got_noise = got.noise;
        got_noise.sort_unstable();
        prop_assert_eq!(got_noise, noise);
    }

    #[test]
    fn merged_boxes_contain_members(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=12);
        let parts: Vec<Aabb> = (0..n).map(|_| synth::aabb(&mut rng)).collect();
        let k = rng.random_range(1..=n);
        let mut clusters = vec![Vec::new(); k];
        for i in 0..n {
            clusters[if i < k { i } else { rng.random_range(0..k) }].push(i);
        }
        let merged = merge_cluster_boxes(&parts, &clusters).unwrap();
        for (c, m) in clusters.iter().zip(&merged) {
            for &i in c {
                for a in 0..3 {
                    prop_assert!(m.min()[a] <= parts[i].min()[a]);
                    prop_assert!(parts[i].max()[a] <= m.max()[a]);
                }
            }
        }
    }

    #[test]
    fn features_have_unit_norm(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let (parts, table) = record_parts(seed);
        for f in extract_features(&parts, &table, alpha).unwrap() {
            let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() <= 1e-6);
        }
    }

    #[test]
    fn embedding_scale_does_not_change_clusters(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let (parts, table) = record_parts(seed);
        let mut scaled = EmbeddingTable::new();
        for (_, text) in &parts {
            let v = table.lookup(text).unwrap().iter().map(|x| x * scale).collect();
            scaled.insert(text.clone(), v).unwrap();
        }
        let eps = [0.2, 0.35, 0.6];
        let a = granularity_sweep(&parts, &table, 0.5, &eps, 2).unwrap();
        let b = granularity_sweep(&parts, &scaled, 0.5, &eps, 2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(&x.clusters, &y.clusters);
            prop_assert_eq!(&x.noise, &y.noise);
        }
    }
}
