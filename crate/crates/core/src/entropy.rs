//! Layered entropy `Λ`, its Rényi family, and the classical entropies it is
//! compared against. Everything is in bits.
//!
//! For a pmf with descending rearrangement `p↓`,
//!
//! ```text
//! Λ(p)   = Σ_i p↓(i) · (i log i − (i−1) log(i−1))
//!        = Σ_j (p↓(j) − p↓(j+1)) · j log j          (layer form)
//! Λ_α(p) = 1/(1/α − 1) · log Σ_i p↓(i) · (i^{1/α} − (i−1)^{1/α})
//! L(p)   = Σ_i p↓(i) · ⌊log i⌋                       (optimal one-to-one code)
//! ```
//!
//! with `H_∞ ≤ Λ ≤ H`, `Λ − 2 < L ≤ Λ`, and for every `η > 0`
//! `H ≤ Λ + log(1 + Λ/(eη)) + η`.

use std::f64::consts::{E, LN_2, LOG2_E};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pmf::{Pmf, SortedPmf};

/// Orders within this distance of 0 or 1 use the closed-form limit.
pub const ORDER_SNAP: f64 = 1e-9;

impl AsRef<[f64]> for Pmf {
    fn as_ref(&self) -> &[f64] {
        self.probs()
    }
}

impl AsRef<[f64]> for SortedPmf {
    fn as_ref(&self) -> &[f64] {
        self.probs()
    }
}

/// `i log₂ i − (i−1) log₂(i−1)`, the weight of the `i`-th largest atom.
pub fn ell_increment(i: u64) -> Result<f64> {
    if i == 0 {
        return Err(Error::ZeroIndex);
    }
    Ok(ell(i as usize))
}

/// Unchecked [`ell_increment`] for `i ≥ 1`.
///
/// Evaluated as `log i + (i−1)·log(1 + 1/(i−1))`, which avoids the
/// cancellation of the two large products for big `i`.
#[inline]
pub(crate) fn ell(i: usize) -> f64 {
    debug_assert!(i >= 1);
    if i == 1 {
        return 0.0;
    }
    let m = (i - 1) as f64;
    (i as f64).log2() + m * (1.0 / m).ln_1p() / LN_2
}

pub fn layered_entropy(p: &SortedPmf) -> f64 {
    p.probs()
        .iter()
        .enumerate()
        .map(|(i, &q)| if q > 0.0 { q * ell(i + 1) } else { 0.0 })
        .sum()
}

/// Exact evaluation of `∫₀¹ |{x: p(x) > t}| · log|{x: p(x) > t}| dt`: the
/// level-set count is constant between consecutive sorted values.
pub fn layered_entropy_by_layers(p: &SortedPmf) -> f64 {
    p.gaps()
        .enumerate()
        .skip(1)
        .map(|(i, gap)| {
            let j = (i + 1) as f64;
            gap * j * j.log2()
        })
        .sum()
}

pub fn shannon_entropy<P: AsRef<[f64]> + ?Sized>(p: &P) -> f64 {
    -p.as_ref()
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| q * q.log2())
        .sum::<f64>()
}

pub fn min_entropy<P: AsRef<[f64]> + ?Sized>(p: &P) -> f64 {
    let m = p.as_ref().iter().copied().fold(0.0, f64::max);
    if m >= 1.0 {
        0.0
    } else {
        -m.log2()
    }
}

/// `log₂ |{x: p(x) > 0}|`.
pub fn hartley_entropy<P: AsRef<[f64]> + ?Sized>(p: &P) -> f64 {
    let n = p.as_ref().iter().filter(|&&q| q > 0.0).count();
    (n.max(1) as f64).log2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum OrderKind {
    Zero,
    One,
    Infinite,
    Generic(f64),
}

fn classify(alpha: f64) -> Result<OrderKind> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidOrder(alpha));
    }
    Ok(if alpha.is_infinite() {
        OrderKind::Infinite
    } else if alpha <= ORDER_SNAP {
        OrderKind::Zero
    } else if (alpha - 1.0).abs() <= ORDER_SNAP {
        OrderKind::One
    } else {
        OrderKind::Generic(alpha)
    })
}

/// Rényi entropy of order `alpha` (pass `f64::INFINITY` for min-entropy).
pub fn renyi_entropy<P: AsRef<[f64]> + ?Sized>(p: &P, alpha: f64) -> Result<f64> {
    let p = p.as_ref();
    Ok(match classify(alpha)? {
        OrderKind::Zero => hartley_entropy(p),
        OrderKind::One => shannon_entropy(p),
        OrderKind::Infinite => min_entropy(p),
        OrderKind::Generic(a) => {
            // Factor out the largest atom so p^α cannot underflow.
            let m = p.iter().copied().fold(0.0, f64::max);
            let s: f64 = p
                .iter()
                .filter(|&&q| q > 0.0)
                .map(|&q| (q / m).powf(a))
                .sum();
            (a * m.log2() + s.log2()) / (1.0 - a)
        }
    })
}

/// Discrete Rényi layered entropy `Λ_α`.
///
/// The sum `Σ p↓(i)(i^β − (i−1)^β)` with `β = 1/α` is evaluated in its
/// summation-by-parts form `Σ (p↓(i) − p↓(i+1)) i^β`, in the log domain, so
/// that every term is nonnegative and large `β` cannot overflow.
pub fn renyi_layered_entropy(p: &SortedPmf, alpha: f64) -> Result<f64> {
    Ok(match classify(alpha)? {
        OrderKind::Zero => hartley_entropy(p),
        OrderKind::One => layered_entropy(p),
        OrderKind::Infinite => min_entropy(p),
        OrderKind::Generic(a) => {
            let beta = 1.0 / a;
            let terms: Vec<f64> = p
                .gaps()
                .enumerate()
                .filter(|&(_, g)| g > 0.0)
                .map(|(i, g)| g.log2() + beta * ((i + 1) as f64).log2())
                .collect();
            let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let log_sum = top + terms.iter().map(|t| (t - top).exp2()).sum::<f64>().log2();
            log_sum / (beta - 1.0)
        }
    })
}

/// `log₂(2E[X] − 1)` with `X` distributed on `{1..n}` by `p` in its given
/// order; upper-bounds `Λ_{1/2}`.
pub fn renyi_half_mean_bound(p: &Pmf) -> f64 {
    (2.0 * p.mean_index() - 1.0).log2()
}

/// [`renyi_half_mean_bound`] after sorting, i.e. the smallest such bound over
/// all relabelings of the alphabet.
pub fn renyi_half_mean_bound_sorted(p: &SortedPmf) -> f64 {
    renyi_half_mean_bound(&p.to_pmf())
}

/// Optimal expected length of a one-to-one (not prefix-free) binary code,
/// `Σ_i p↓(i) ⌊log₂ i⌋`.
pub fn one_to_one_optimal_length(p: &SortedPmf) -> f64 {
    p.probs()
        .iter()
        .enumerate()
        .map(|(i, &q)| q * (i + 1).ilog2() as f64)
        .sum()
}

/// Upper bound on Shannon entropy from layered entropy:
/// `Λ + log₂(1 + Λ/(eη)) + η`.
pub fn bound_h_from_lambda(lambda: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidEta(eta));
    }
    Ok(lambda + (1.0 + lambda / (E * eta)).log2() + eta)
}

/// `η` minimising `log₂(1 + Λ/(eη)) + η`.
pub fn optimal_eta(lambda: f64) -> f64 {
    ((lambda * lambda + 4.0 * E * lambda * LOG2_E).sqrt() - lambda) / (2.0 * E)
}

/// Choice of the free parameter `η` in the `Λ → H` conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaPreset {
    /// `η = log₂ e`, good for large `Λ`.
    LogE,
    /// `η = √(Λ log₂e / e)`, good for small `Λ`.
    Sqrt,
    /// The minimiser [`optimal_eta`].
    Optimal,
    Fixed(f64),
}

impl EtaPreset {
    pub const PRESETS: [EtaPreset; 3] = [EtaPreset::LogE, EtaPreset::Sqrt, EtaPreset::Optimal];

    pub fn resolve(self, lambda: f64) -> f64 {
        match self {
            EtaPreset::LogE => LOG2_E,
            EtaPreset::Sqrt => (lambda * LOG2_E / E).sqrt(),
            EtaPreset::Optimal => optimal_eta(lambda),
            EtaPreset::Fixed(eta) => eta,
        }
    }

    /// [`bound_h_from_lambda`] at this preset. The data-dependent presets
    /// collapse to `η = 0` at `Λ = 0`, where the bound's limit is `0`.
    pub fn bound(self, lambda: f64) -> Result<f64> {
        let eta = self.resolve(lambda);
        if eta == 0.0 && lambda == 0.0 && !matches!(self, EtaPreset::Fixed(_)) {
            return Ok(0.0);
        }
        bound_h_from_lambda(lambda, eta)
    }

    pub fn name(self) -> String {
        match self {
            EtaPreset::LogE => "loge".into(),
            EtaPreset::Sqrt => "sqrt".into(),
            EtaPreset::Optimal => "opt".into(),
            EtaPreset::Fixed(v) => v.to_string(),
        }
    }
}

impl std::str::FromStr for EtaPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loge" => Ok(EtaPreset::LogE),
            "sqrt" => Ok(EtaPreset::Sqrt),
            "opt" => Ok(EtaPreset::Optimal),
            other => match other.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Ok(EtaPreset::Fixed(v)),
                Ok(v) => Err(Error::InvalidEta(v)),
                Err(_) => Err(Error::InvalidArgument(format!(
                    "eta must be loge, sqrt, opt or a positive number, got {other:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenyiEntry {
    pub alpha: f64,
    pub renyi: f64,
    pub layered: f64,
}

/// All single-variable entropies of one pmf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub shannon: f64,
    pub layered: f64,
    pub min_entropy: f64,
    pub renyi: Vec<RenyiEntry>,
    pub one_to_one_length: f64,
}

impl EntropyReport {
    pub fn new(p: &Pmf, alphas: &[f64]) -> Result<Self> {
        let sorted = p.sorted();
        let renyi = alphas
            .iter()
            .map(|&alpha| {
                Ok(RenyiEntry {
                    alpha,
                    renyi: renyi_entropy(p, alpha)?,
                    layered: renyi_layered_entropy(&sorted, alpha)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            shannon: shannon_entropy(p),
            layered: layered_entropy(&sorted),
            min_entropy: min_entropy(p),
            renyi,
            one_to_one_length: one_to_one_optimal_length(&sorted),
        })
    }

    /// `H_∞ ≤ Λ ≤ H` and `Λ − 2 < L ≤ Λ`, with slack `tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        self.min_entropy <= self.layered + tol
            && self.layered <= self.shannon + tol
            && self.one_to_one_length <= self.layered + tol
            && self.one_to_one_length > self.layered - 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(v: &[f64]) -> SortedPmf {
        Pmf::new(v.to_vec()).unwrap().sorted()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Composite Simpson rule, used as an independent check on `ell`.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn ell_values() {
        assert_eq!(ell_increment(0), Err(Error::ZeroIndex));
        assert_eq!(ell_increment(1).unwrap(), 0.0);
        assert!(close(ell_increment(2).unwrap(), 2.0, 1e-15));
        let e3 = ell_increment(3).unwrap();
        assert!(close(e3, 2.754887502163468, 1e-12));
        let quad = simpson(|t| (E * t).log2(), 2.0, 3.0, 2000);
        assert!(close(e3, quad, 1e-10));
    }

    #[test]
    fn ell_increasing_and_above_log() {
        let mut prev = -1.0;
        for i in 1..5000u64 {
            let v = ell_increment(i).unwrap();
            assert!(v > prev);
            assert!(v >= (i as f64).log2());
            let direct = if i == 1 {
                0.0
            } else {
                let f = i as f64;
                f * f.log2() - (f - 1.0) * (f - 1.0).log2()
            };
            assert!(close(v, direct, 1e-9 * v.max(1.0)));
            prev = v;
        }
    }

    #[test]
    fn layered_entropy_values() {
        for k in [1usize, 2, 4, 8] {
            let u = SortedPmf::uniform(k).unwrap();
            assert!(close(layered_entropy(&u), (k as f64).log2(), 1e-12));
        }
        let p = sorted(&[0.5, 0.25, 0.25]);
        assert!(close(layered_entropy(&p), 1.188721875541, 1e-11));
        assert!(close(layered_entropy_by_layers(&p), 1.188721875541, 1e-11));
        let p = sorted(&[0.5, 0.3, 0.2]);
        assert!(close(layered_entropy(&p), 1.150977500433, 1e-11));
        assert!(close(
            layered_entropy_by_layers(&p),
            layered_entropy(&p),
            1e-12
        ));
        assert!(close(
            p.layer_decomposition().layered_entropy(),
            layered_entropy(&p),
            1e-12
        ));
    }

    #[test]
    fn single_layer() {
        let u = SortedPmf::uniform(3).unwrap();
        assert!(close(layered_entropy_by_layers(&u), 3f64.log2(), 1e-12));
    }

    #[test]
    fn classical_entropies() {
        let u = Pmf::uniform(8).unwrap();
        assert!(close(shannon_entropy(&u), 3.0, 1e-12));
        assert!(close(min_entropy(&u), 3.0, 1e-12));
        let b = Pmf::new(vec![0.9, 0.1]).unwrap();
        assert!(close(shannon_entropy(&b), 0.468995593589, 1e-11));
        let d = Pmf::new(vec![1.0]).unwrap();
        assert_eq!(shannon_entropy(&d), 0.0);
        assert_eq!(min_entropy(&d), 0.0);
    }

    #[test]
    fn renyi_values() {
        let p = Pmf::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!(close(
            renyi_entropy(&p, 2.0).unwrap(),
            -(0.375f64).log2(),
            1e-12
        ));
        assert!(close(renyi_entropy(&p, 2.0).unwrap(), 1.415037499, 1e-9));
        let h = Pmf::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(renyi_entropy(&h, 0.0).unwrap(), 1.0);
        assert!(matches!(
            renyi_entropy(&h, -0.5),
            Err(Error::InvalidOrder(_))
        ));
        assert!(matches!(
            renyi_entropy(&h, f64::NAN),
            Err(Error::InvalidOrder(_))
        ));
        for k in [1usize, 3, 5, 16] {
            let u = Pmf::uniform(k).unwrap();
            for a in [0.0, 0.25, 0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
                assert!(close(
                    renyi_entropy(&u, a).unwrap(),
                    (k as f64).log2(),
                    1e-12
                ));
            }
        }
    }

    #[test]
    fn renyi_near_one_matches_shannon() {
        let p = Pmf::new(vec![0.6, 0.3, 0.1]).unwrap();
        let h = shannon_entropy(&p);
        assert_eq!(renyi_entropy(&p, 1.0 + 5e-10).unwrap(), h);
        assert!(close(renyi_entropy(&p, 1.0 + 1e-6).unwrap(), h, 1e-5));
    }

    /// Direct evaluation of the defining sum, without summation by parts.
    fn renyi_layered_direct(p: &SortedPmf, alpha: f64) -> f64 {
        let beta = 1.0 / alpha;
        let s: f64 = p
            .probs()
            .iter()
            .enumerate()
            .map(|(i, &q)| q * (((i + 1) as f64).powf(beta) - (i as f64).powf(beta)))
            .sum();
        s.log2() / (beta - 1.0)
    }

    #[test]
    fn renyi_layered_values() {
        let p = sorted(&[0.5, 0.25, 0.25]);
        let half = renyi_layered_entropy(&p, 0.5).unwrap();
        assert!(close(half, 2.5f64.log2(), 1e-12));
        let two = renyi_layered_entropy(&p, 2.0).unwrap();
        let expected = -2.0 * (0.5 + 0.25 * (3f64.sqrt() - 1.0)).log2();
        assert!(close(two, expected, 1e-12));
        assert!(close(two, 1.100031373, 1e-9));
        assert!(two <= renyi_entropy(&p, 2.0).unwrap() && two <= layered_entropy(&p));
        for a in [0.3, 0.5, 0.9, 1.5, 2.0, 3.0, 10.0] {
            assert!(close(
                renyi_layered_entropy(&p, a).unwrap(),
                renyi_layered_direct(&p, a),
                1e-12
            ));
        }
        assert_eq!(renyi_layered_entropy(&p, 1.0).unwrap(), layered_entropy(&p));
        assert_eq!(renyi_layered_entropy(&p, f64::INFINITY).unwrap(), 1.0);
        assert!(close(
            renyi_layered_entropy(&p, 0.0).unwrap(),
            3f64.log2(),
            1e-15
        ));
        assert!(renyi_layered_entropy(&p, -1.0).is_err());
    }

    #[test]
    fn renyi_layered_uniform_and_extreme_orders() {
        for k in [1usize, 2, 7, 12] {
            let u = SortedPmf::uniform(k).unwrap();
            for a in [0.0, 0.01, 0.25, 1.0, 4.0, 1e6, f64::INFINITY] {
                assert!(close(
                    renyi_layered_entropy(&u, a).unwrap(),
                    (k as f64).log2(),
                    1e-9
                ));
            }
        }
        // β = 1000 would overflow a direct power sum.
        let p = sorted(&[0.4, 0.3, 0.2, 0.1]);
        let v = renyi_layered_entropy(&p, 1e-3).unwrap();
        assert!(v.is_finite() && v <= 2.0 + 1e-9);
    }

    #[test]
    fn half_order_mean_bound() {
        let p = Pmf::new(vec![0.1, 0.6, 0.3]).unwrap();
        let l = renyi_layered_entropy(&p.sorted(), 0.5).unwrap();
        let sorted_bound = renyi_half_mean_bound_sorted(&p.sorted());
        assert!(l <= sorted_bound + 1e-12);
        assert!(sorted_bound <= renyi_half_mean_bound(&p));
    }

    #[test]
    fn one_to_one_lengths() {
        let u4 = SortedPmf::uniform(4).unwrap();
        assert_eq!(one_to_one_optimal_length(&u4), 1.0);
        assert_eq!(one_to_one_optimal_length(&sorted(&[1.0])), 0.0);
        assert_eq!(
            one_to_one_optimal_length(&SortedPmf::uniform(2).unwrap()),
            0.5
        );
        let l = layered_entropy(&u4);
        assert!(l - 2.0 < 1.0 && 1.0 <= l);
    }

    #[test]
    fn h_from_lambda_bound() {
        assert_eq!(bound_h_from_lambda(0.0, 0.7).unwrap(), 0.7);
        let v = bound_h_from_lambda(2.0, LOG2_E).unwrap();
        assert!(close(
            v,
            2.0 + (1.0 + 2.0 / (E * LOG2_E)).log2() + LOG2_E,
            1e-15
        ));
        assert!(close(v, 4.037233267, 1e-9));
        assert!(matches!(
            bound_h_from_lambda(1.0, 0.0),
            Err(Error::InvalidEta(_))
        ));
        assert!(matches!(
            bound_h_from_lambda(1.0, -1.0),
            Err(Error::InvalidEta(_))
        ));
        for lam in [0.0, 0.1, 1.0, 5.0] {
            for eta in [1e-3, 0.5, 1.0, 10.0] {
                assert!(bound_h_from_lambda(lam, eta).unwrap() >= lam);
            }
        }
        for p in EtaPreset::PRESETS {
            assert_eq!(
                p.bound(0.0).unwrap(),
                if p == EtaPreset::LogE { LOG2_E } else { 0.0 }
            );
        }
    }

    #[test]
    fn optimal_eta_minimises() {
        for lam in [0.05, 0.5, 2.0, 9.0] {
            let best = bound_h_from_lambda(lam, optimal_eta(lam)).unwrap();
            for k in 1..400 {
                let eta = k as f64 * 0.01;
                assert!(bound_h_from_lambda(lam, eta).unwrap() >= best - 1e-12);
            }
        }
    }

    #[test]
    fn eta_parsing() {
        assert_eq!("loge".parse::<EtaPreset>().unwrap(), EtaPreset::LogE);
        assert_eq!("opt".parse::<EtaPreset>().unwrap(), EtaPreset::Optimal);
        assert_eq!("0.5".parse::<EtaPreset>().unwrap(), EtaPreset::Fixed(0.5));
        assert!("-1".parse::<EtaPreset>().is_err());
        assert!("nope".parse::<EtaPreset>().is_err());
    }

    #[test]
    fn report_is_consistent() {
        let p = Pmf::new(vec![0.5, 0.25, 0.25]).unwrap();
        let r = EntropyReport::new(&p, &[0.0, 0.5, 1.0, 2.0, f64::INFINITY]).unwrap();
        assert!(r.is_consistent(1e-9));
        assert!(close(r.layered, 1.188721875541, 1e-11));
        assert_eq!(r.shannon, 1.5);
        assert_eq!(r.renyi.len(), 5);
    }
}
