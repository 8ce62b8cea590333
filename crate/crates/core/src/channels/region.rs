use serde::Serialize;

use super::{compression_pmf, cond_layered, cond_shannon, layer_channel, JointPmf};
use crate::entropy::{shannon_entropy, EtaPreset};
use crate::error::{Error, Result};
use crate::pmf::Pmf;
use crate::rng::{stream_seed, Sampler};

/// `Λ(X|Y) ≤ H(X|Y) ≤ H(X\Y)` for one joint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CondEntropies {
    pub layered: f64,
    pub shannon: f64,
    pub compressed: f64,
}

impl CondEntropies {
    pub fn is_ordered(&self, tol: f64) -> bool {
        self.layered <= self.shannon + tol && self.shannon <= self.compressed + tol
    }

    /// `H(X\Y) ≤ H(X|Y) + log₂(1 + H(X|Y)/(eη)) + η`.
    pub fn compression_gap_holds(&self, eta: EtaPreset, tol: f64) -> Result<bool> {
        Ok(self.compressed <= eta.bound(self.shannon)? + tol)
    }

    /// `H(X\Y) ≤ Λ(X|Y) + log₂(1 + Λ(X|Y)/(eη)) + η + 1`.
    pub fn logarithmic_gap_holds(&self, eta: EtaPreset, tol: f64) -> Result<bool> {
        Ok(self.compressed <= eta.bound(self.layered)? + 1.0 + tol)
    }
}

pub fn three_cond_entropies(j: &JointPmf) -> CondEntropies {
    CondEntropies {
        layered: cond_layered(j),
        shannon: cond_shannon(j),
        compressed: shannon_entropy(&compression_pmf(j)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    /// `Y` constant: `(H(X), H(X))`.
    Constant,
    /// The layer channel: `(Λ(X), H(X))`.
    Layer,
    Sampled,
}

/// One point `(H(X|Y), H(X\Y))` of the achievable region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub h_cond: f64,
    pub h_diff: f64,
    /// Stream seed of the sampled channel; `None` for the two extremes.
    pub seed: Option<u64>,
    pub kind: PointKind,
}

impl RegionPoint {
    fn of(j: &JointPmf, seed: Option<u64>, kind: PointKind) -> Self {
        Self {
            h_cond: cond_shannon(j),
            h_diff: shannon_entropy(&compression_pmf(j)),
            seed,
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSample {
    pub points: Vec<RegionPoint>,
}

impl RegionSample {
    pub fn channel_seeds(&self) -> Vec<u64> {
        self.points.iter().filter_map(|p| p.seed).collect()
    }
}

/// `p(x, y) = p(x) W(y|x)` with every row `W(·|x)` uniform on the simplex.
pub fn random_channel(px: &Pmf, ny: usize, sampler: &mut Sampler) -> JointPmf {
    let data = px
        .probs()
        .iter()
        .flat_map(|&p| {
            sampler
                .dirichlet_ones(ny)
                .into_iter()
                .map(move |w| p * w)
                .collect::<Vec<_>>()
        })
        .collect();
    JointPmf::from_flat(px.len(), ny, data, true).expect("channel output is a joint pmf")
}

/// The constant-`Y` and layer-channel extremes followed by `n_channels`
/// random channels. Channel `i` is drawn from `stream_seed(seed, i)` with
/// `|Y| = 1 + i mod 2|X|`.
pub fn region_sample(p: &Pmf, n_channels: usize, seed: u64) -> Result<RegionSample> {
    if n_channels == 0 {
        return Err(Error::InvalidArgument(
            "at least one channel is required".into(),
        ));
    }
    let constant = JointPmf::product(p, &Pmf::uniform(1)?);
    let mut points = vec![
        RegionPoint::of(&constant, None, PointKind::Constant),
        RegionPoint::of(&layer_channel(&p.sorted()), None, PointKind::Layer),
    ];
    let max_y = 2 * p.len();
    points.extend((0..n_channels).map(|i| {
        let s = stream_seed(seed, i as u64);
        let j = random_channel(p, 1 + i % max_y, &mut Sampler::new(s));
        RegionPoint::of(&j, Some(s), PointKind::Sampled)
    }));
    Ok(RegionSample { points })
}
