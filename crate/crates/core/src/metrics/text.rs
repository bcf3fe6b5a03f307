use std::collections::HashMap;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use thiserror::Error;

use crate::clustering::EmbeddingTable;

const METEOR_ALPHA: f64 = 0.9;
const METEOR_BETA: i32 = 3;
const METEOR_GAMMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TextError {
    #[error("reference text has no tokens")]
    EmptyReference,
    #[error("no embedding for {0:?}")]
    MissingEmbedding(String),
    #[error("embedding for {0:?} is the zero vector")]
    ZeroEmbedding(String),
}

/// Lowercased alphanumeric runs.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn tokens_pair(candidate: &str, reference: &str) -> Result<(Vec<String>, Vec<String>), TextError> {
    let r = tokenize(reference);
    if r.is_empty() {
        return Err(TextError::EmptyReference);
    }
    Ok((tokenize(candidate), r))
}

/// Clipped unigram precision times the brevity penalty.
pub fn bleu1(candidate: &str, reference: &str) -> Result<f64, TextError> {
    let (c, r) = tokens_pair(candidate, reference)?;
    if c.is_empty() {
        return Ok(0.0);
    }
    let mut avail: HashMap<&str, usize> = HashMap::new();
    for t in &r {
        *avail.entry(t).or_default() += 1;
    }
    let mut clipped = 0usize;
    for t in &c {
        if let Some(n) = avail.get_mut(t.as_str()).filter(|n| **n > 0) {
            *n -= 1;
            clipped += 1;
        }
    }
    let precision = clipped as f64 / c.len() as f64;
    let bp = (1.0 - r.len() as f64 / c.len() as f64).min(0.0).exp();
    Ok(precision * bp)
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// F1 of LCS precision and recall.
pub fn rouge_l(candidate: &str, reference: &str) -> Result<f64, TextError> {
    let (c, r) = tokens_pair(candidate, reference)?;
    let lcs = lcs_len(&c, &r);
    if lcs == 0 {
        return Ok(0.0);
    }
    let p = lcs as f64 / c.len() as f64;
    let rec = lcs as f64 / r.len() as f64;
    Ok(2.0 * p * rec / (p + rec))
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Pairs each unmatched hypothesis word, last to first, with the last
/// unmatched reference word of equal form.
fn align_stage(
    hyp: &mut Vec<(usize, String)>,
    reference: &mut Vec<(usize, String)>,
    matches: &mut Vec<(usize, usize)>,
) {
    let mut i = hyp.len();
    while i > 0 {
        i -= 1;
        if let Some(j) = reference.iter().rposition(|(_, w)| *w == hyp[i].1) {
            matches.push((hyp[i].0, reference[j].0));
            hyp.remove(i);
            reference.remove(j);
        }
    }
}

/// METEOR with exact and stem matching and the usual parameters
/// (recall-weighted mean with alpha 0.9, fragmentation penalty
/// `0.5·(chunks/matches)³`).
pub fn meteor_lite(candidate: &str, reference: &str) -> Result<f64, TextError> {
    let (c, r) = tokens_pair(candidate, reference)?;
    let mut hyp: Vec<(usize, String)> = c.iter().cloned().enumerate().collect();
    let mut refs: Vec<(usize, String)> = r.iter().cloned().enumerate().collect();
    let mut matches = Vec::new();
    align_stage(&mut hyp, &mut refs, &mut matches);
    let stem = |v: &mut Vec<(usize, String)>| {
        for (_, w) in v.iter_mut() {
            *w = stemmer().stem(w).into_owned();
        }
    };
    stem(&mut hyp);
    stem(&mut refs);
    align_stage(&mut hyp, &mut refs, &mut matches);
    if matches.is_empty() {
        return Ok(0.0);
    }
    matches.sort_by_key(|m| m.0);
    let chunks = 1 + matches
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count();
    let m = matches.len() as f64;
    let precision = m / c.len() as f64;
    let recall = m / r.len() as f64;
    let fmean = precision * recall / (METEOR_ALPHA * precision + (1.0 - METEOR_ALPHA) * recall);
    let penalty = METEOR_GAMMA * (chunks as f64 / m).powi(METEOR_BETA);
    Ok((1.0 - penalty) * fmean)
}

/// Cosine similarity of two precomputed embeddings, mapped to `[0, 1]`.
pub fn embedding_cosine(
    candidate: &str,
    reference: &str,
    table: &EmbeddingTable,
) -> Result<f64, TextError> {
    let get = |t: &str| {
        let v = table
            .get(t)
            .ok_or_else(|| TextError::MissingEmbedding(t.to_string()))?;
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(TextError::ZeroEmbedding(t.to_string()));
        }
        Ok((v, n))
    };
    let ((a, na), (b, nb)) = (get(candidate)?, get(reference)?);
    let cos = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb);
    Ok(((cos.clamp(-1.0, 1.0) + 1.0) / 2.0).clamp(0.0, 1.0))
}
