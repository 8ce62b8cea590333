//! Joint distributions `p(x, y)` and the three notions of conditional
//! entropy: `Λ(X|Y)`, `H(X|Y)` and `H(X\Y)`, the entropy of the conditional
//! compression.
//!
//! Rows index `x`, columns index `y`. Columns with `p(y) = 0` have no
//! conditional pmf and are skipped everywhere.

mod compression;
mod layer;
mod region;

pub use compression::{
    brute_force_min_entropy, compression_pmf, conditional_compression, CompressionResult,
    TiePolicy, BRUTE_FORCE_MAX_COLS, BRUTE_FORCE_MAX_ROWS,
};
pub use layer::{layer_channel, Layers, LAYER_MERGE_TOL};
pub use region::{
    random_channel, region_sample, three_cond_entropies, CondEntropies, PointKind, RegionPoint,
    RegionSample,
};

use serde::Serialize;

use crate::entropy::{layered_entropy, min_entropy, shannon_entropy};
use crate::error::{Error, Result};
use crate::pmf::{Pmf, SUM_TOLERANCE};

/// A finite joint pmf stored row-major, `data[x * cols + y] = p(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPmf {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl JointPmf {
    /// Builds from nested rows; the total must be within 1e-9 of 1.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(matrix, false)
    }

    pub fn from_rows(matrix: Vec<Vec<f64>>, normalize: bool) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Ragged {
                    row,
                    found: r.len(),
                    expected: cols,
                });
            }
        }
        Self::from_flat(
            rows,
            cols,
            matrix.into_iter().flatten().collect(),
            normalize,
        )
    }

    pub fn from_flat(
        rows: usize,
        cols: usize,
        mut data: Vec<f64>,
        normalize: bool,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidEntry { index, value });
        }
        let sum: f64 = data.iter().sum();
        if sum <= 0.0 || (!normalize && (sum - 1.0).abs() > SUM_TOLERANCE) {
            return Err(Error::BadSum { sum });
        }
        if (sum - 1.0).abs() > 1e-12 {
            data.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self { rows, cols, data })
    }

    /// `p(x, y) = p_X(x) p_Y(y)`.
    pub fn product(px: &Pmf, py: &Pmf) -> Self {
        let data = px
            .probs()
            .iter()
            .flat_map(|&a| py.probs().iter().map(move |&b| a * b))
            .collect();
        Self {
            rows: px.len(),
            cols: py.len(),
            data,
        }
    }

    /// `p(x, y) = p_X(x) W(y|x)` for a row-stochastic channel `W`.
    pub fn from_channel(px: &Pmf, channel: &[Vec<f64>]) -> Result<Self> {
        if channel.len() != px.len() {
            return Err(Error::InvalidArgument(format!(
                "channel has {} rows for an alphabet of {}",
                channel.len(),
                px.len()
            )));
        }
        let rows = channel
            .iter()
            .zip(px.probs())
            .map(|(w, &p)| {
                let w = Pmf::new(w.clone())?;
                Ok(w.probs().iter().map(|&q| p * q).collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Self::new(rows)
    }

    /// `p(x, y) = p_Y(y) p(x|y)`, with `conditionals[y]` the pmf of `X`
    /// given `Y = y`.
    pub fn from_conditionals(py: &Pmf, conditionals: &[Vec<f64>]) -> Result<Self> {
        if conditionals.len() != py.len() {
            return Err(Error::InvalidArgument(format!(
                "{} conditionals for {} values of y",
                conditionals.len(),
                py.len()
            )));
        }
        let rows = conditionals.first().map_or(0, Vec::len);
        let mut data = vec![0.0; rows * py.len()];
        for (y, (cond, &w)) in conditionals.iter().zip(py.probs()).enumerate() {
            if cond.len() != rows {
                return Err(Error::Ragged {
                    row: y,
                    found: cond.len(),
                    expected: rows,
                });
            }
            let cond = Pmf::new(cond.clone())?;
            for (x, &q) in cond.probs().iter().enumerate() {
                data[x * py.len() + y] = w * q;
            }
        }
        Self::from_flat(rows, py.len(), data, false)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn column(&self, y: usize) -> Vec<f64> {
        (0..self.rows).map(|x| self.get(x, y)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.rows).map(|x| self.row(x).iter().sum()).collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.get(x, y)).sum())
            .collect()
    }

    pub fn p_x(&self) -> Pmf {
        Pmf::normalized(self.x_marginal()).expect("joint has positive mass")
    }

    pub fn p_y(&self) -> Pmf {
        Pmf::normalized(self.y_marginal()).expect("joint has positive mass")
    }

    /// `p_{X|Y}(·|y)`, or `None` when `p(y) = 0`.
    pub fn conditional_x_given_y(&self, y: usize) -> Option<Vec<f64>> {
        let col = self.column(y);
        let py: f64 = col.iter().sum();
        (py > 0.0).then(|| col.into_iter().map(|p| p / py).collect())
    }

    /// `(p(y), p_{X|Y}(·|y))` for every `y` with positive mass.
    pub fn conditionals(&self) -> impl Iterator<Item = (f64, Vec<f64>)> + '_ {
        (0..self.cols).filter_map(move |y| {
            let col = self.column(y);
            let py: f64 = col.iter().sum();
            (py > 0.0).then(|| (py, col.into_iter().map(|p| p / py).collect()))
        })
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for x in 0..self.rows {
            for y in 0..self.cols {
                data[y * self.rows + x] = self.get(x, y);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// The joint as a pmf over pairs, for `Λ(X, Y)` and `H(X, Y)`.
    pub fn flattened(&self) -> Pmf {
        Pmf::normalized(self.data.clone()).expect("joint has positive mass")
    }
}

/// `Σ_y p(y) f(p_{X|Y}(·|y))`.
fn average_over_y(j: &JointPmf, f: impl Fn(&[f64]) -> f64) -> f64 {
    j.conditionals().map(|(py, cond)| py * f(&cond)).sum()
}

pub fn cond_shannon(j: &JointPmf) -> f64 {
    average_over_y(j, shannon_entropy)
}

/// `H(X) − H(X|Y)`.
pub fn mutual_information(j: &JointPmf) -> f64 {
    shannon_entropy(&j.x_marginal()) - cond_shannon(j)
}

/// `Λ(X|Y) = E_Y[Λ(p_{X|Y}(·|Y))]`.
pub fn cond_layered(j: &JointPmf) -> f64 {
    average_over_y(j, |c| {
        layered_entropy(
            &Pmf::normalized(c.to_vec())
                .expect("conditional pmf")
                .sorted(),
        )
    })
}

/// `H_∞(X|Y) = E_Y[−log max_x p_{X|Y}(x|Y)]`.
pub fn cond_min_entropy(j: &JointPmf) -> f64 {
    average_over_y(j, min_entropy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_row_example;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn construction_and_marginals() {
        let j = two_row_example();
        assert_eq!((j.rows(), j.cols()), (2, 2));
        assert!(close(j.get(0, 0), 0.45, 1e-15));
        assert!(close(j.x_marginal()[0], 0.75, 1e-15));
        assert_eq!(j.y_marginal(), vec![0.5, 0.5]);
        assert_eq!(j.transpose().get(1, 0), j.get(0, 1));
        assert!(matches!(
            JointPmf::new(vec![vec![0.5], vec![0.25, 0.25]]),
            Err(Error::Ragged { row: 1, .. })
        ));
        assert!(matches!(
            JointPmf::new(vec![vec![0.5, 0.4]]),
            Err(Error::BadSum { .. })
        ));
        assert!(JointPmf::from_rows(vec![vec![1.0, 3.0]], true).is_ok());
    }

    #[test]
    fn shannon_conditionals() {
        let px = Pmf::new(vec![0.3, 0.7]).unwrap();
        let py = Pmf::new(vec![0.2, 0.5, 0.3]).unwrap();
        let prod = JointPmf::product(&px, &py);
        assert!(close(cond_shannon(&prod), shannon_entropy(&px), 1e-12));
        assert!(mutual_information(&prod).abs() < 1e-12);

        let id = JointPmf::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_eq!(cond_shannon(&id), 0.0);
        assert!(close(mutual_information(&id), 1.0, 1e-15));

        let bsc = JointPmf::new(vec![vec![0.45, 0.05], vec![0.05, 0.45]]).unwrap();
        assert!(close(mutual_information(&bsc), 0.531004406, 1e-9));
    }

    #[test]
    fn layered_conditionals() {
        let px = Pmf::new(vec![0.5, 0.3, 0.2]).unwrap();
        let constant = JointPmf::product(&px, &Pmf::new(vec![1.0]).unwrap());
        assert!(close(
            cond_layered(&constant),
            layered_entropy(&px.sorted()),
            1e-12
        ));
        assert!(close(cond_layered(&two_row_example()), 0.5, 1e-12));
        let id = JointPmf::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_eq!(cond_layered(&id), 0.0);
        assert_eq!(cond_min_entropy(&id), 0.0);
    }

    #[test]
    fn zero_mass_columns_are_skipped() {
        let j = JointPmf::new(vec![vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        assert!(j.conditional_x_given_y(1).is_none());
        assert!(close(cond_shannon(&j), 1.0, 1e-15));
    }
}
