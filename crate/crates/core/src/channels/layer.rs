use serde::Serialize;

use super::JointPmf;
use crate::pmf::SortedPmf;

/// Sorted probabilities closer than this are treated as one value.
pub const LAYER_MERGE_TOL: f64 = 1e-12;

/// The distinct positive values `a_1 > a_2 > … > a_m` of a sorted pmf and
/// how many atoms reach each: `counts[j] = |{x : p(x) ≥ a_j}|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layers {
    pub values: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Layers {
    pub fn new(p: &SortedPmf) -> Self {
        let mut values: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for (i, &q) in p.probs().iter().enumerate() {
            if q <= 0.0 {
                break;
            }
            match values.last() {
                Some(&a) if a - q <= LAYER_MERGE_TOL => *counts.last_mut().unwrap() = i + 1,
                _ => {
                    values.push(q);
                    counts.push(i + 1);
                }
            }
        }
        Self { values, counts }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a_j − a_{j+1}` with `a_{m+1} = 0`.
    pub fn width(&self, j: usize) -> f64 {
        self.values[j] - self.values.get(j + 1).copied().unwrap_or(0.0)
    }
}

/// The layer channel: `Y` is the index of the layer `(a_{j+1}, a_j]` a
/// uniform draw from `(0, p(x)]` lands in, so
/// `p(x, j) = (a_j − a_{j+1}) · 1{p(x) ≥ a_j}`.
///
/// Every conditional `p_{X|Y}(·|j)` is uniform on the top `counts[j]`
/// atoms. Rows follow the sorted order of `p`.
pub fn layer_channel(p: &SortedPmf) -> JointPmf {
    let layers = Layers::new(p);
    let rows = p.len();
    let cols = layers.len();
    let mut data = vec![0.0; rows * cols];
    for j in 0..cols {
        let w = layers.width(j);
        for x in 0..layers.counts[j] {
            data[x * cols + j] = w;
        }
    }
    JointPmf::from_flat(rows, cols, data, false).expect("layer masses sum to one")
}
