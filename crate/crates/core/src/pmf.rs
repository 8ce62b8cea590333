//! Finite probability mass functions and their descending rearrangement.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest deviation of the total mass from 1 accepted without an explicit
/// normalize request.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Deviations below this are left alone; anything larger (but accepted) is
/// rescaled so stored vectors sum to 1 within 1e-12.
const RESCALE_THRESHOLD: f64 = 1e-12;

/// A probability vector over a finite alphabet, optionally labelled.
///
/// Zero entries are kept; they contribute nothing to any entropy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    probs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Pmf {
    /// Validates `probs` as a pmf. A total mass off by more than
    /// [`SUM_TOLERANCE`] is rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::build(probs, false)
    }

    /// Like [`Pmf::new`] but rescales any nonnegative vector with positive
    /// mass.
    pub fn normalized(probs: Vec<f64>) -> Result<Self> {
        Self::build(probs, true)
    }

    /// Validating constructor with the normalize flag spelled out.
    pub fn from_probs(probs: Vec<f64>, normalize: bool) -> Result<Self> {
        Self::build(probs, normalize)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
            labels: None,
        })
    }

    fn build(mut probs: Vec<f64>, normalize: bool) -> Result<Self> {
        check_entries(&probs)?;
        let sum: f64 = probs.iter().sum();
        if sum <= 0.0 || (!normalize && (sum - 1.0).abs() > SUM_TOLERANCE) {
            return Err(Error::BadSum { sum });
        }
        if (sum - 1.0).abs() > RESCALE_THRESHOLD {
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self {
            probs,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.probs.len() {
            return Err(Error::LabelMismatch {
                labels: labels.len(),
                probs: self.probs.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Number of strictly positive entries (no tolerance).
    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    pub fn sorted(&self) -> SortedPmf {
        SortedPmf::from_pmf(self)
    }

    /// `E[X]` when the entries are read as the law of a variable on
    /// `{1, ..., n}` in their given order.
    pub fn mean_index(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }
}

fn check_entries(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Empty);
    }
    if let Some((index, &value)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(Error::InvalidEntry { index, value });
    }
    Ok(())
}

/// The entries of a pmf in nonincreasing order, `p↓`.
///
/// `perm[i]` is the index in the source pmf of the `i`-th largest entry.
/// Ties keep ascending source order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortedPmf {
    probs: Vec<f64>,
    perm: Vec<usize>,
}

impl SortedPmf {
    pub fn from_pmf(pmf: &Pmf) -> Self {
        let p = pmf.probs();
        let mut perm: Vec<usize> = (0..p.len()).collect();
        // `sort_by` is stable, which gives the ascending-index tie-break.
        perm.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
        let probs = perm.iter().map(|&i| p[i]).collect();
        Self { probs, perm }
    }

    /// Wraps a vector that is already nonincreasing; the permutation is the
    /// identity.
    pub fn from_nonincreasing(probs: Vec<f64>) -> Result<Self> {
        let pmf = Pmf::new(probs)?;
        if let Some(index) = pmf.probs.windows(2).position(|w| w[0] < w[1]) {
            return Err(Error::NotSorted { index });
        }
        let perm = (0..pmf.len()).collect();
        Ok(Self {
            probs: pmf.probs,
            perm,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Pmf::uniform(n).map(|p| p.sorted())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `p↓(i)` with 1-based `i`, zero past the end.
    pub fn get(&self, i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        self.probs.get(i - 1).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().take_while(|&&p| p > 0.0).count()
    }

    /// Scatters the sorted entries back to source order.
    pub fn unsort(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.probs.len()];
        for (&src, &p) in self.perm.iter().zip(&self.probs) {
            out[src] = p;
        }
        out
    }

    pub fn to_pmf(&self) -> Pmf {
        Pmf {
            probs: self.probs.clone(),
            labels: None,
        }
    }

    pub fn layer_decomposition(&self) -> LayerDecomposition {
        LayerDecomposition::new(self)
    }

    /// Successive gaps `p↓(k) - p↓(k+1)`, `k = 1..=n`.
    pub(crate) fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.probs.len();
        (0..n).map(move |i| {
            let next = if i + 1 < n { self.probs[i + 1] } else { 0.0 };
            self.probs[i] - next
        })
    }
}

/// Mixture weights expressing `p↓` as `Σ_k w_k · Unif({1..k})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerDecomposition {
    /// `weights[k - 1] = k·(p↓(k) − p↓(k+1))`.
    weights: Vec<f64>,
}

impl LayerDecomposition {
    pub fn new(p: &SortedPmf) -> Self {
        let weights = p
            .gaps()
            .enumerate()
            .map(|(i, gap)| (i + 1) as f64 * gap)
            .collect();
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_k` for 1-based `k`.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.weights.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Rebuilds the sorted pmf from the uniform mixture.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.weights.len();
        let mut out = vec![0.0; n];
        // Accumulate from the widest layer down: out[i] = Σ_{k > i} w_k / k.
        let mut acc = 0.0;
        for i in (0..n).rev() {
            acc += self.weights[i] / (i + 1) as f64;
            out[i] = acc;
        }
        out
    }

    /// `Σ_k w_k log₂ k`, the layered entropy as a mixture of uniform entropies.
    pub fn layered_entropy(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, w)| w * ((i + 1) as f64).log2())
            .sum()
    }
}
