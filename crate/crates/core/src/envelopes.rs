//! Variational forms of `Λ`: the linear-programming coupling, the concave
//! envelopes of min-entropy and of log-cardinality, and the layer-channel
//! fixed point.
//!
//! Maximizers are built in closed form; upper bounds are checked on sampled
//! feasible points.

use serde::Serialize;

use crate::channels::{
    compression_pmf, cond_min_entropy, cond_shannon, layer_channel, random_channel, JointPmf,
    Layers,
};
use crate::entropy::layered_entropy;
use crate::error::{Error, Result};
use crate::pmf::SortedPmf;
use crate::rng::{stream_seed, Sampler};

/// Constraint slack below which a sampled coupling still counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// A joint pmf of `(X, K)` with `K ∈ {1..kmax}`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coupling {
    rows: usize,
    kmax: usize,
    data: Vec<f64>,
}

impl Coupling {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// `p(x, k)` with `k` 1-based.
    pub fn get(&self, x: usize, k: usize) -> f64 {
        self.data[x * self.kmax + k - 1]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.kmax).map(<[f64]>::to_vec).collect()
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        self.data
            .chunks(self.kmax)
            .map(|r| r.iter().sum())
            .collect()
    }

    /// `p_K(k)` at index `k − 1`.
    pub fn k_marginal(&self) -> Vec<f64> {
        (1..=self.kmax)
            .map(|k| (0..self.rows).map(|x| self.get(x, k)).sum())
            .collect()
    }

    /// `E[log₂ K]`.
    pub fn objective(&self) -> f64 {
        self.k_marginal()
            .iter()
            .enumerate()
            .map(|(i, &q)| q * ((i + 1) as f64).log2())
            .sum()
    }

    /// `max_{x,k} p(x, k) − p_K(k)/k`; feasible iff `≤ 0` up to rounding.
    pub fn feasibility_residual(&self) -> f64 {
        let pk = self.k_marginal();
        let mut worst = f64::NEG_INFINITY;
        for x in 0..self.rows {
            for k in 1..=self.kmax {
                worst = worst.max(self.get(x, k) - pk[k - 1] / k as f64);
            }
        }
        worst
    }

    /// `max_x |p_{X}(x) − p(x)|` against the target marginal.
    pub fn marginal_residual(&self, p: &[f64]) -> f64 {
        self.x_marginal()
            .iter()
            .zip(p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_feasible(&self, p: &[f64]) -> bool {
        self.rows == p.len()
            && self.data.iter().all(|&v| v >= -FEASIBILITY_TOL)
            && self.feasibility_residual() <= FEASIBILITY_TOL
            && self.marginal_residual(p) <= FEASIBILITY_TOL
    }
}

/// The optimal coupling: `K` is the number of atoms in the layer a uniform
/// draw below `p(x)` lands in. Rows follow the sorted order of `p`, and
/// `E[log₂ K] = Λ(p)`.
pub fn lp_coupling_construct(p: &SortedPmf) -> Coupling {
    let layers = Layers::new(p);
    let n = p.len();
    let mut data = vec![0.0; n * n];
    for (j, &count) in layers.counts.iter().enumerate() {
        let w = layers.width(j);
        for x in 0..count {
            data[x * n + count - 1] += w;
        }
    }
    Coupling {
        rows: n,
        kmax: n,
        data,
    }
}

/// A random feasible coupling reached from `c` by `steps` moves that keep
/// the `X`-marginal fixed.
///
/// Two kinds of move are used: shifting a fraction of a whole column `k` to
/// a smaller `k'`, which is always feasible, and moving mass of a single `x`
/// between two columns, kept only if the result stays feasible.
pub fn perturb_coupling(c: &Coupling, steps: usize, sampler: &mut Sampler) -> Coupling {
    let mut cur = c.clone();
    if cur.kmax < 2 {
        return cur;
    }
    let target = c.x_marginal();
    for _ in 0..steps {
        let mut next = cur.clone();
        let k = sampler.range_inclusive(2, cur.kmax);
        let k2 = sampler.range_inclusive(1, cur.kmax);
        let t = sampler.unit();
        if sampler.bernoulli(0.5) {
            let k2 = 1 + (k2 - 1) % (k - 1);
            for x in 0..cur.rows {
                let moved = t * cur.get(x, k);
                next.data[x * cur.kmax + k - 1] -= moved;
                next.data[x * cur.kmax + k2 - 1] += moved;
            }
        } else {
            let x = sampler.below(cur.rows as u64) as usize;
            let moved = t * cur.get(x, k);
            next.data[x * cur.kmax + k - 1] -= moved;
            next.data[x * cur.kmax + k2 - 1] += moved;
        }
        if next.is_feasible(&target) {
            cur = next;
        }
    }
    cur
}

/// Outcome of a sampled envelope check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    /// `Λ(p)`.
    pub layered: f64,
    /// Largest sampled value of the quantity being bounded.
    pub max_sampled: f64,
    /// Its value at the layer channel, which attains the envelope.
    pub attained: f64,
    pub trials: usize,
    pub violations: usize,
}

impl EnvelopeCheck {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

fn envelope_check(
    p: &SortedPmf,
    trials: usize,
    seed: u64,
    channel: impl Fn(&mut Sampler, usize) -> JointPmf,
    value: impl Fn(&JointPmf) -> f64,
) -> Result<EnvelopeCheck> {
    check_trials(trials)?;
    let layered = layered_entropy(p);
    let attained = value(&layer_channel(p));
    let mut max_sampled = f64::NEG_INFINITY;
    let mut violations = 0;
    for i in 0..trials {
        let mut s = Sampler::new(stream_seed(seed, i as u64));
        let v = value(&channel(&mut s, i));
        max_sampled = max_sampled.max(v);
        if v > layered + 1e-9 {
            violations += 1;
        }
    }
    if (attained - layered).abs() > 1e-9 {
        violations += 1;
    }
    Ok(EnvelopeCheck {
        layered,
        max_sampled,
        attained,
        trials,
        violations,
    })
}

/// `H_∞(X|Y) ≤ Λ(X)` over random channels with Dirichlet rows, with
/// equality at the layer channel.
pub fn lp_objective_upper_check(p: &SortedPmf, trials: usize, seed: u64) -> Result<EnvelopeCheck> {
    let px = p.to_pmf();
    let max_y = 2 * p.len();
    envelope_check(
        p,
        trials,
        seed,
        |s, i| random_channel(&px, 1 + i % max_y, s),
        cond_min_entropy,
    )
}

/// A random channel whose every posterior `p_{X|Y}(·|y)` is uniform on its
/// support: repeatedly peel a uniform slab `c·1_S` off the remaining mass.
pub fn uniform_posterior_channel(p: &SortedPmf, sampler: &mut Sampler) -> JointPmf {
    let n = p.len();
    let mut rest = p.probs().to_vec();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let max_partial = 3 * n;
    while rest.iter().any(|&r| r > 0.0) {
        let live: Vec<usize> = (0..n).filter(|&x| rest[x] > 0.0).collect();
        let mut members: Vec<usize> = live
            .iter()
            .copied()
            .filter(|_| sampler.bernoulli(0.5))
            .collect();
        if members.is_empty() {
            members.push(live[sampler.below(live.len() as u64) as usize]);
        }
        let (argmin, min) =
            members
                .iter()
                .map(|&x| (x, rest[x]))
                .fold(
                    (members[0], f64::INFINITY),
                    |a, b| if b.1 < a.1 { b } else { a },
                );
        let full = columns.len() >= max_partial || sampler.bernoulli(0.5);
        let c = if full { min } else { min * sampler.unit() };
        let mut col = vec![0.0; n];
        for &x in &members {
            col[x] = c;
            rest[x] -= c;
        }
        if full {
            rest[argmin] = 0.0;
        }
        if c > 0.0 {
            columns.push(col);
        }
    }
    let cols = columns.len();
    let mut data = vec![0.0; n * cols];
    for (y, col) in columns.iter().enumerate() {
        for x in 0..n {
            data[x * cols + y] = col[x];
        }
    }
    JointPmf::from_flat(n, cols, data, true).expect("peeled slabs form a joint pmf")
}

/// `H(X|Y) ≤ Λ(X)` over random channels with uniform posteriors, with
/// equality at the layer channel.
pub fn uniform_conditional_envelope_check(
    p: &SortedPmf,
    trials: usize,
    seed: u64,
) -> Result<EnvelopeCheck> {
    envelope_check(
        p,
        trials,
        seed,
        |s, _| uniform_posterior_channel(p, s),
        cond_shannon,
    )
}

/// `max_i |p↓_{X\Y}(i) − p↓(i)|` when `Y` is the layer channel of `p`.
pub fn layer_fixed_point_residual(p: &SortedPmf) -> f64 {
    compression_pmf(&layer_channel(p))
        .probs()
        .iter()
        .zip(p.probs())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Compressing `X` against its own layer channel returns `p↓`.
pub fn layer_fixed_point_check(p: &SortedPmf) -> bool {
    layer_fixed_point_residual(p) <= 1e-12
}
