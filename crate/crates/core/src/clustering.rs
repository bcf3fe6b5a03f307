//! Semantic granularity control: fuse part descriptions and box geometry into
//! one feature per part, cluster with DBSCAN, and merge each cluster's boxes.

use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::Aabb;

/// Floor applied to per-dimension standard deviations of the spatial block.
pub const SIGMA_FLOOR: f64 = 1e-8;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_EPS: f64 = 0.35;
pub const DEFAULT_MIN_PTS: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("no embedding for description {0:?}")]
    MissingEmbedding(String),
    #[error("embedding for {0:?} is the zero vector")]
    ZeroEmbedding(String),
    #[error("embedding dimension mismatch: expected {expected}, found {found} for {text:?}")]
    DimensionMismatch {
        text: String,
        expected: usize,
        found: usize,
    },
    #[error("embedding table line {line}: {message}")]
    TableLine { line: usize, message: String },
    #[error("feature extraction needs at least one part")]
    NoParts,
    #[error("alpha {0} is outside [0, 1]")]
    BadAlpha(f64),
    #[error("part {0}: combined feature is the zero vector")]
    ZeroFeature(usize),
    #[error("eps must be positive and finite, got {0}")]
    BadEps(f64),
    #[error("min_pts must be at least 1")]
    BadMinPts,
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("cluster {cluster} refers to part {index}, but there are {len} parts")]
    IndexOutOfRange {
        cluster: usize,
        index: usize,
        len: usize,
    },
    #[error("eps schedule must be strictly increasing")]
    UnsortedSchedule,
}

/// Precomputed text embeddings, keyed by exact text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

#[derive(Deserialize)]
struct EmbeddingLine {
    text: String,
    vector: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces a vector. The first vector fixes the dimension.
    pub fn insert(
        &mut self,
        text: impl Into<String>,
        vector: Vec<f64>,
    ) -> Result<(), ClusterError> {
        let text = text.into();
        if vector.is_empty() || (!self.vectors.is_empty() && vector.len() != self.dim) {
            return Err(ClusterError::DimensionMismatch {
                text,
                expected: self.dim.max(1),
                found: vector.len(),
            });
        }
        self.dim = vector.len();
        self.vectors.insert(text, vector);
        Ok(())
    }

    /// Reads `{"text": ..., "vector": [...]}` lines; blank lines are skipped.
    pub fn from_jsonl<R: BufRead>(reader: R) -> Result<Self, ClusterError> {
        let mut table = Self::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| ClusterError::TableLine {
                line: i + 1,
                message: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: EmbeddingLine =
                serde_json::from_str(&line).map_err(|e| ClusterError::TableLine {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            table.insert(entry.text, entry.vector)?;
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, text: &str) -> Option<&[f64]> {
        self.vectors.get(text).map(Vec::as_slice)
    }

    pub fn lookup(&self, text: &str) -> Result<&[f64], ClusterError> {
        self.get(text)
            .ok_or_else(|| ClusterError::MissingEmbedding(text.to_string()))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Builds one unit-norm feature per part: the L2-normalized description
/// embedding scaled by `1 - alpha`, followed by the z-scored
/// `(center, size)` of its box scaled by `alpha`, renormalized to unit length.
pub fn extract_features<S: AsRef<str>>(
    parts: &[(Aabb, S)],
    embeddings: &EmbeddingTable,
    alpha: f64,
) -> Result<Vec<Vec<f64>>, ClusterError> {
    if parts.is_empty() {
        return Err(ClusterError::NoParts);
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ClusterError::BadAlpha(alpha));
    }

    let semantic = parts
        .iter()
        .map(|(_, text)| {
            let text = text.as_ref();
            let v = embeddings.lookup(text)?;
            let n = norm(v);
            if n == 0.0 {
                return Err(ClusterError::ZeroEmbedding(text.to_string()));
            }
            Ok(v.iter().map(|x| x / n).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>, _>>()?;

    let spatial: Vec<[f64; 6]> = parts
        .iter()
        .map(|(b, _)| {
            let (c, s) = (b.center(), b.size());
            [c[0], c[1], c[2], s[0], s[1], s[2]]
        })
        .collect();
    let n = spatial.len() as f64;
    let mut mean = [0.0; 6];
    let mut sigma = [0.0; 6];
    for d in 0..6 {
        mean[d] = spatial.iter().map(|f| f[d]).sum::<f64>() / n;
        let var = spatial
            .iter()
            .map(|f| (f[d] - mean[d]).powi(2))
            .sum::<f64>()
            / n;
        sigma[d] = var.sqrt().max(SIGMA_FLOOR);
    }

    semantic
        .into_iter()
        .zip(&spatial)
        .enumerate()
        .map(|(i, (sem, sp))| {
            let mut f: Vec<f64> = sem.iter().map(|x| (1.0 - alpha) * x).collect();
            f.extend((0..6).map(|d| alpha * (sp[d] - mean[d]) / sigma[d]));
            let len = norm(&f);
            if len == 0.0 || !len.is_finite() {
                return Err(ClusterError::ZeroFeature(i));
            }
            f.iter_mut().for_each(|x| *x /= len);
            Ok(f)
        })
        .collect()
}

/// DBSCAN output. Cluster members are listed in ascending index order and
/// clusters in order of discovery.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Clustering {
    pub clusters: Vec<Vec<usize>>,
    pub noise: Vec<usize>,
}

/// DBSCAN under Euclidean distance with closed neighbourhoods (`d <= eps`,
/// the point itself included). Seeds are scanned in index order, and a
/// border point joins the first cluster that reaches it.
pub fn dbscan<P: AsRef<[f64]>>(
    points: &[P],
    eps: f64,
    min_pts: usize,
) -> Result<Clustering, ClusterError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(ClusterError::BadEps(eps));
    }
    if min_pts == 0 {
        return Err(ClusterError::BadMinPts);
    }
    let n = points.len();
    let neighbours = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&j| euclidean(points[i].as_ref(), points[j].as_ref()) <= eps)
            .collect()
    };

    const UNSEEN: usize = usize::MAX;
    const NOISE: usize = usize::MAX - 1;
    let mut label = vec![UNSEEN; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();

    for seed in 0..n {
        if label[seed] != UNSEEN {
            continue;
        }
        let hood = neighbours(seed);
        if hood.len() < min_pts {
            label[seed] = NOISE;
            continue;
        }
        let id = clusters.len();
        let mut members = vec![seed];
        label[seed] = id;
        let mut queue: Vec<usize> = hood;
        while let Some(p) = queue.pop() {
            if label[p] == NOISE {
                label[p] = id;
                members.push(p);
                continue;
            }
            if label[p] != UNSEEN {
                continue;
            }
            label[p] = id;
            members.push(p);
            let hood = neighbours(p);
            if hood.len() >= min_pts {
                queue.extend(
                    hood.into_iter()
                        .filter(|&q| label[q] == UNSEEN || label[q] == NOISE),
                );
            }
        }
        members.sort_unstable();
        clusters.push(members);
    }

    let noise = (0..n).filter(|&i| label[i] == NOISE).collect();
    Ok(Clustering { clusters, noise })
}

/// Component-wise min of the member minima and max of the member maxima.
pub fn merge_cluster_boxes(
    parts: &[Aabb],
    clusters: &[Vec<usize>],
) -> Result<Vec<Aabb>, ClusterError> {
    clusters
        .iter()
        .enumerate()
        .map(|(k, members)| {
            if members.is_empty() {
                return Err(ClusterError::EmptyCluster(k));
            }
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            for &i in members {
                let b = parts.get(i).ok_or(ClusterError::IndexOutOfRange {
                    cluster: k,
                    index: i,
                    len: parts.len(),
                })?;
                let (bmin, bmax) = (b.min(), b.max());
                for d in 0..3 {
                    lo[d] = lo[d].min(bmin[d]);
                    hi[d] = hi[d].max(bmax[d]);
                }
            }
            Ok(Aabb::new(lo, hi).expect("hull of valid boxes is valid"))
        })
        .collect()
}

/// Clustering of one object at one `eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterResult {
    pub eps: f64,
    pub clusters: Vec<Vec<usize>>,
    pub noise: Vec<usize>,
    /// One box per entry of `clusters`.
    #[serde(serialize_with = "serialize_boxes")]
    pub merged_boxes: Vec<Aabb>,
}

fn serialize_boxes<S: serde::Serializer>(boxes: &[Aabb], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(boxes.iter().map(Aabb::to_array))
}

impl ClusterResult {
    /// Clusters plus noise parts, each noise part standing alone.
    pub fn component_count(&self) -> usize {
        self.clusters.len() + self.noise.len()
    }

    /// The coarse decomposition: merged boxes followed by the boxes of
    /// noise parts.
    pub fn components(&self, parts: &[Aabb]) -> Vec<Aabb> {
        let mut out = self.merged_boxes.clone();
        out.extend(self.noise.iter().map(|&i| parts[i]));
        out
    }
}

/// Clusters the parts once per `eps` in the (strictly increasing) schedule.
pub fn granularity_sweep<S: AsRef<str>>(
    parts: &[(Aabb, S)],
    embeddings: &EmbeddingTable,
    alpha: f64,
    eps_schedule: &[f64],
    min_pts: usize,
) -> Result<Vec<ClusterResult>, ClusterError> {
    if eps_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ClusterError::UnsortedSchedule);
    }
    let features = extract_features(parts, embeddings, alpha)?;
    let boxes: Vec<Aabb> = parts.iter().map(|(b, _)| *b).collect();
    eps_schedule
        .iter()
        .map(|&eps| {
            let Clustering { clusters, noise } = dbscan(&features, eps, min_pts)?;
            let merged_boxes = merge_cluster_boxes(&boxes, &clusters)?;
            Ok(ClusterResult {
                eps,
                clusters,
                noise,
                merged_boxes,
            })
        })
        .collect()
}
