use rand::Rng;

use super::binning::BinnedMatrix;
use super::tree::{partition_rows, DecisionTree, TreeBuilder};

struct Pending {
    slot: usize,
    start: usize,
    end: usize,
    /// Features known to be constant within this node.
    constant: Vec<usize>,
}

/// Weighted class counts of a node; weights are bootstrap multiplicities.
fn node_counts(rows: &[u32], weights: &[u32], labels: &[bool]) -> (u64, u64) {
    rows.iter().fold((0, 0), |(w, p), &r| {
        let wr = u64::from(weights[r as usize]);
        (w + wr, p + if labels[r as usize] { wr } else { 0 })
    })
}

/// Sum over children of `pos^2/w + neg^2/w`; larger means lower weighted
/// Gini impurity.
fn purity(pos: u64, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let (p, n) = (pos as f64, (total - pos) as f64);
    (p * p + n * n) / total as f64
}

/// Grows one unpruned Gini tree on a bootstrap sample. At every node,
/// features are visited in random order until `max_features` non-constant
/// ones have been evaluated; leaves store the weighted class-1 fraction.
pub(crate) fn grow_tree<R: Rng>(data: &BinnedMatrix, labels: &[bool], max_features: usize, rng: &mut R) -> DecisionTree {
    let n = data.n_rows;
    let mut weights = vec![0u32; n];
    for _ in 0..n {
        weights[rng.gen_range(0..n)] += 1;
    }
    let mut rows: Vec<u32> = (0..n as u32).filter(|&r| weights[r as usize] > 0).collect();

    let n_features = data.n_cols();
    let mut builder = TreeBuilder::new();
    let mut stack = vec![Pending {
        slot: 0,
        start: 0,
        end: rows.len(),
        constant: Vec::new(),
    }];
    let mut hist_w = vec![0u64; super::binning::MAX_BINS];
    let mut hist_p = vec![0u64; super::binning::MAX_BINS];
    let mut is_constant = vec![false; n_features];
    let mut order: Vec<usize> = Vec::with_capacity(n_features);

    while let Some(node) = stack.pop() {
        let node_rows = &rows[node.start..node.end];
        let (total, pos) = node_counts(node_rows, &weights, labels);
        if pos == 0 || pos == total || node_rows.len() < 2 {
            builder.set_leaf(node.slot, pos as f64 / total as f64);
            continue;
        }

        for &f in &node.constant {
            is_constant[f] = true;
        }
        order.clear();
        order.extend((0..n_features).filter(|&f| !is_constant[f]));
        for &f in &node.constant {
            is_constant[f] = false;
        }

        let mut new_constant = node.constant.clone();
        let mut best: Option<(f64, usize, usize)> = None;
        let mut evaluated = 0;
        let mut k = 0;
        while k < order.len() && evaluated < max_features {
            let j = rng.gen_range(k..order.len());
            order.swap(k, j);
            let f = order[k];
            k += 1;

            let n_bins = data.n_bins(f);
            hist_w[..n_bins].fill(0);
            hist_p[..n_bins].fill(0);
            let column = data.column(f);
            for &r in node_rows {
                let b = column[r as usize] as usize;
                let w = u64::from(weights[r as usize]);
                hist_w[b] += w;
                if labels[r as usize] {
                    hist_p[b] += w;
                }
            }
            let occupied = hist_w[..n_bins].iter().filter(|&&w| w > 0).count();
            if occupied < 2 {
                new_constant.push(f);
                continue;
            }
            evaluated += 1;

            let (mut wl, mut pl) = (0u64, 0u64);
            for b in 0..n_bins - 1 {
                wl += hist_w[b];
                pl += hist_p[b];
                if wl == 0 || hist_w[b] == 0 {
                    continue;
                }
                if wl == total {
                    break;
                }
                let score = purity(pl, wl) + purity(pos - pl, total - wl);
                if best.is_none_or(|(s, _, _)| score > s) {
                    best = Some((score, f, b));
                }
            }
        }

        match best {
            None => builder.set_leaf(node.slot, pos as f64 / total as f64),
            Some((_, feature, bin)) => {
                let split_at = partition_rows(&mut rows[node.start..node.end], data.column(feature), bin as u8);
                let (left, right) = builder.split(node.slot, feature, data.cuts[feature][bin]);
                let mid = node.start + split_at;
                stack.push(Pending {
                    slot: right,
                    start: mid,
                    end: node.end,
                    constant: new_constant.clone(),
                });
                stack.push(Pending {
                    slot: left,
                    start: node.start,
                    end: mid,
                    constant: new_constant,
                });
            }
        }
    }
    builder.finish()
}
