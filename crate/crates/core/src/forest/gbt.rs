use super::binning::{BinnedMatrix, MAX_BINS};
use super::tree::{partition_rows, DecisionTree, TreeBuilder};

/// L2 penalty on leaf weights.
pub(crate) const LAMBDA: f64 = 1.0;

pub(crate) struct GrowOptions<'a> {
    pub features: &'a [usize],
    pub max_depth: usize,
    pub min_child_weight: f64,
}

struct Pending {
    slot: usize,
    start: usize,
    end: usize,
    depth: usize,
    grad: f64,
    hess: f64,
}

fn leaf_weight(grad: f64, hess: f64) -> f64 {
    -grad / (hess + LAMBDA)
}

fn score(grad: f64, hess: f64) -> f64 {
    grad * grad / (hess + LAMBDA)
}

/// Grows a depth-limited regression tree on second-order statistics. A split
/// needs positive gain and a hessian sum of at least `min_child_weight` on
/// each side; leaf weights are `-G / (H + lambda)`.
pub(crate) fn grow_tree(
    data: &BinnedMatrix,
    grad: &[f64],
    hess: &[f64],
    mut rows: Vec<u32>,
    opts: &GrowOptions<'_>,
) -> DecisionTree {
    let mut builder = TreeBuilder::new();
    let (g0, h0) = rows
        .iter()
        .fold((0.0, 0.0), |(g, h), &r| (g + grad[r as usize], h + hess[r as usize]));
    let mut stack = vec![Pending {
        slot: 0,
        start: 0,
        end: rows.len(),
        depth: 0,
        grad: g0,
        hess: h0,
    }];
    let mut hist_g = vec![0.0f64; MAX_BINS];
    let mut hist_h = vec![0.0f64; MAX_BINS];

    while let Some(node) = stack.pop() {
        if node.depth >= opts.max_depth || node.end - node.start < 2 {
            builder.set_leaf(node.slot, leaf_weight(node.grad, node.hess));
            continue;
        }
        let node_rows = &rows[node.start..node.end];
        let parent = score(node.grad, node.hess);
        // (gain, feature, bin, left grad, left hess)
        let mut best: Option<(f64, usize, usize, f64, f64)> = None;
        for &f in opts.features {
            let n_bins = data.n_bins(f);
            if n_bins < 2 {
                continue;
            }
            hist_g[..n_bins].fill(0.0);
            hist_h[..n_bins].fill(0.0);
            let column = data.column(f);
            for &r in node_rows {
                let b = column[r as usize] as usize;
                hist_g[b] += grad[r as usize];
                hist_h[b] += hess[r as usize];
            }
            let (mut gl, mut hl) = (0.0, 0.0);
            for b in 0..n_bins - 1 {
                if hist_h[b] == 0.0 && hist_g[b] == 0.0 {
                    continue;
                }
                gl += hist_g[b];
                hl += hist_h[b];
                let (gr, hr) = (node.grad - gl, node.hess - hl);
                if hl < opts.min_child_weight || hr < opts.min_child_weight {
                    continue;
                }
                let gain = score(gl, hl) + score(gr, hr) - parent;
                if gain > 0.0 && best.is_none_or(|(g, ..)| gain > g) {
                    best = Some((gain, f, b, gl, hl));
                }
            }
        }

        match best {
            None => builder.set_leaf(node.slot, leaf_weight(node.grad, node.hess)),
            Some((_, feature, bin, gl, hl)) => {
                let split_at = partition_rows(&mut rows[node.start..node.end], data.column(feature), bin as u8);
                if split_at == 0 || node.start + split_at == node.end {
                    // empty side (only reachable through rounding of sums)
                    builder.set_leaf(node.slot, leaf_weight(node.grad, node.hess));
                    continue;
                }
                let (left, right) = builder.split(node.slot, feature, data.cuts[feature][bin]);
                let mid = node.start + split_at;
                stack.push(Pending {
                    slot: right,
                    start: mid,
                    end: node.end,
                    depth: node.depth + 1,
                    grad: node.grad - gl,
                    hess: node.hess - hl,
                });
                stack.push(Pending {
                    slot: left,
                    start: node.start,
                    end: mid,
                    depth: node.depth + 1,
                    grad: gl,
                    hess: hl,
                });
            }
        }
    }
    builder.finish()
}
