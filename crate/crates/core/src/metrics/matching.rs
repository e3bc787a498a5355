//! Maximum-cardinality bijective matching between predicted and
//! ground-truth edge pixels within a Euclidean radius.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EdgeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    /// Matching radius in pixels.
    pub t_e: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig { t_e: 2.0 }
    }
}

pub type Pixel = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub pairs: Vec<(Pixel, Pixel)>,
    pub n_pred: usize,
    pub n_gt: usize,
    pub precision: f64,
    pub recall: f64,
}

impl MatchResult {
    pub fn cardinality(&self) -> usize {
        self.pairs.len()
    }
}

const NONE: usize = usize::MAX;

/// Hopcroft-Karp on a left/right bipartite graph. Returns `match_left`.
pub fn max_bipartite_matching(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut match_l = vec![NONE; n_left];
    let mut match_r = vec![NONE; n_right];
    let mut dist = vec![usize::MAX; n_left];
    let mut queue = VecDeque::new();
    let mut next = vec![0usize; n_left];
    let mut stack: Vec<usize> = Vec::new();
    let mut via: Vec<usize> = Vec::new();

    loop {
        // layer the free left vertices
        queue.clear();
        for u in 0..n_left {
            if match_l[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut reachable_free = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NONE {
                    reachable_free = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !reachable_free {
            break;
        }

        // vertex-disjoint shortest augmenting paths, iterative DFS
        next.iter_mut().for_each(|n| *n = 0);
        let mut augmented = 0;
        for root in 0..n_left {
            if match_l[root] != NONE {
                continue;
            }
            stack.clear();
            via.clear();
            stack.push(root);
            while let Some(&u) = stack.last() {
                if next[u] < adj[u].len() {
                    let v = adj[u][next[u]];
                    next[u] += 1;
                    let w = match_r[v];
                    if w == NONE {
                        via.push(v);
                        for (k, &uk) in stack.iter().enumerate() {
                            match_l[uk] = via[k];
                            match_r[via[k]] = uk;
                        }
                        augmented += 1;
                        break;
                    } else if dist[w] == dist[u].wrapping_add(1) && dist[w] != usize::MAX {
                        via.push(v);
                        stack.push(w);
                    }
                } else {
                    dist[u] = usize::MAX;
                    stack.pop();
                    via.pop();
                }
            }
        }
        if augmented == 0 {
            break;
        }
    }
    match_l
        .into_iter()
        .map(|v| if v == NONE { None } else { Some(v) })
        .collect()
}

/// Candidate arcs `pred -> gt` within radius `t_e`, found by binning the
/// ground-truth pixels into square cells of side `ceil(t_e)`.
pub fn candidate_arcs(pred: &[Pixel], gt: &[Pixel], t_e: f64) -> Vec<Vec<usize>> {
    let cell = (t_e.ceil() as usize).max(1);
    let mut bins: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (j, &(r, c)) in gt.iter().enumerate() {
        bins.entry((r / cell, c / cell)).or_default().push(j);
    }
    let t2 = t_e * t_e;
    pred.iter()
        .map(|&(r, c)| {
            let (br, bc) = (r / cell, c / cell);
            let mut out = Vec::new();
            for nr in br.saturating_sub(1)..=br + 1 {
                for nc in bc.saturating_sub(1)..=bc + 1 {
                    if let Some(js) = bins.get(&(nr, nc)) {
                        for &j in js {
                            let (gr, gc) = gt[j];
                            let dr = r as f64 - gr as f64;
                            let dc = c as f64 - gc as f64;
                            if dr * dr + dc * dc <= t2 {
                                out.push(j);
                            }
                        }
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect()
}

/// Precision/recall conventions for empty sets: an empty prediction has
/// precision 1, an empty ground truth has recall 1.
pub fn precision_recall(matched: usize, n_pred: usize, n_gt: usize) -> (f64, f64) {
    let precision = if n_pred == 0 {
        1.0
    } else {
        matched as f64 / n_pred as f64
    };
    let recall = if n_gt == 0 {
        1.0
    } else {
        matched as f64 / n_gt as f64
    };
    (precision, recall)
}

/// Maximum one-to-one matching of predicted to ground-truth edge pixels no
/// further apart than `t_e`.
pub fn match_edges(pred: &EdgeMap, gt: &EdgeMap, cfg: &MatchConfig) -> Result<MatchResult> {
    if pred.dims() != gt.dims() {
        return Err(Error::shape(gt.dims(), pred.dims()));
    }
    if !(cfg.t_e >= 0.0) {
        return Err(Error::Config(format!("t_e must be >= 0, got {}", cfg.t_e)));
    }
    let p = pred.pixels();
    let g = gt.pixels();
    let adj = candidate_arcs(&p, &g, cfg.t_e);
    let m = max_bipartite_matching(&adj, g.len());
    let pairs: Vec<_> = m
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (p[i], g[j])))
        .collect();
    let (precision, recall) = precision_recall(pairs.len(), p.len(), g.len());
    Ok(MatchResult {
        pairs,
        n_pred: p.len(),
        n_gt: g.len(),
        precision,
        recall,
    })
}
