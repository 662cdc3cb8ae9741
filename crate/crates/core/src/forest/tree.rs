use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Binary decision tree stored as a flat node list rooted at index 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn leaf(value: f64) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf { value }],
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// Incremental builder; children are appended after their parent.
pub(crate) struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder {
            nodes: vec![Node::Leaf { value: 0.0 }],
        }
    }

    pub fn set_leaf(&mut self, at: usize, value: f64) {
        self.nodes[at] = Node::Leaf { value };
    }

    /// Turns `at` into a split and returns the (left, right) child slots.
    pub fn split(&mut self, at: usize, feature: usize, threshold: f64) -> (usize, usize) {
        let left = self.nodes.len();
        let right = left + 1;
        self.nodes.push(Node::Leaf { value: 0.0 });
        self.nodes.push(Node::Leaf { value: 0.0 });
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        (left, right)
    }

    pub fn finish(self) -> DecisionTree {
        DecisionTree { nodes: self.nodes }
    }
}

/// Reorders `rows` in place so that rows with `bins[row] <= split_bin` come
/// first; returns the size of that left part.
pub(crate) fn partition_rows(rows: &mut [u32], bins: &[u8], split_bin: u8) -> usize {
    let mut left = 0;
    for i in 0..rows.len() {
        if bins[rows[i] as usize] <= split_bin {
            rows.swap(left, i);
            left += 1;
        }
    }
    left
}
