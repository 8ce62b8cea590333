//! The strong functional representation bound chain on finite joints.
//!
//! Given `(X, Y)`, a geometric index `K` with conditional parameter
//! `ρ(x, y)` satisfies
//! `Λ(K) = Λ(K|X,Y) ≤ E[log₂(2/ρ − 1)] ≤ E[log₂(2^ι + ½)] + 1 ≤ I(X;Y) + log₂3`,
//! and every term is an exact finite sum except `Λ(K)`, which is a series
//! truncated with a rigorous tail bound.

use std::f64::consts::{E, LN_2, LOG2_E};
use std::str::FromStr;

use serde::Serialize;

use crate::channels::{mutual_information, JointPmf};
use crate::entropy::{bound_h_from_lambda, ell, optimal_eta};
use crate::error::{Error, Result};

/// Default truncation tolerance for geometric series.
pub const DEFAULT_TAIL_TOL: f64 = 1e-9;
/// Slack allowed on each inequality of the chain.
pub const CHAIN_SLACK: f64 = 1e-9;
/// Geometric series are never summed beyond this many terms.
pub const MAX_TERMS: u64 = 1 << 27;

/// `ρ` values this close to 1 are taken to be exactly 1.
const RHO_SNAP: f64 = 1e-12;
const CROSSING_TOL: f64 = 1e-6;

fn log2_3() -> f64 {
    3f64.log2()
}

/// `ι(x; y) = log₂ p(x,y) − log₂ p(x) − log₂ p(y)` on the support of the
/// joint; `None` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoDensityTable {
    rows: usize,
    cols: usize,
    iota: Vec<Option<f64>>,
}

impl InfoDensityTable {
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.iota[x * self.cols + y]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `E[ι(X; Y)]` under `j`, which is `I(X; Y)`.
    pub fn expectation(&self, j: &JointPmf) -> f64 {
        support(j)
            .map(|(x, y, p)| p * self.get(x, y).expect("support entry"))
            .sum()
    }
}

fn support(j: &JointPmf) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
    (0..j.rows())
        .flat_map(move |x| (0..j.cols()).map(move |y| (x, y, j.get(x, y))))
        .filter(|&(_, _, p)| p > 0.0)
}

pub fn info_density(j: &JointPmf) -> InfoDensityTable {
    let px = j.x_marginal();
    let py = j.y_marginal();
    let mut iota = vec![None; j.rows() * j.cols()];
    for (x, y, p) in support(j) {
        iota[x * j.cols() + y] = Some(p.log2() - px[x].log2() - py[y].log2());
    }
    InfoDensityTable {
        rows: j.rows(),
        cols: j.cols(),
        iota,
    }
}

/// `ρ(x, y) = 1 / E_{Y'}[max(2^{ι(x;y)}, 2^{ι(x;Y')})]` on the support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeomCoupling {
    rows: usize,
    cols: usize,
    rho: Vec<Option<f64>>,
}

impl GeomCoupling {
    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.rho[x * self.cols + y]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

pub fn rho(j: &JointPmf) -> GeomCoupling {
    let px = j.x_marginal();
    let py = j.y_marginal();
    let mut rho = vec![None; j.rows() * j.cols()];
    for (x, y, p) in support(j) {
        // With r = 2^ι(x;y): E_{Y'}[max(r, p(Y'|x)/p(Y'))] = Σ_y' max(p(y') r, p(y'|x)).
        let r = p / (px[x] * py[y]);
        let s: f64 = (0..j.cols())
            .filter(|&y2| py[y2] > 0.0)
            .map(|y2| (py[y2] * r).max(j.get(x, y2) / px[x]))
            .sum();
        let v = (1.0 / s).min(1.0);
        rho[x * j.cols() + y] = Some(if v > 1.0 - RHO_SNAP { 1.0 } else { v });
    }
    GeomCoupling {
        rows: j.rows(),
        cols: j.cols(),
        rho,
    }
}

/// `Λ` of a geometric pmf: the partial sum and a bound on the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeomLambda {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: u64,
}

impl GeomLambda {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

/// `Σ_{k>n} ρ q^{k−1} ell(k) ≤ qⁿ (log₂(e n) + 1/(ρ n ln 2))` with `q = 1 − ρ`,
/// using `ell(k) ≤ log₂(e k) ≤ log₂(e n) + (k − n)/(n ln 2)`.
fn tail_majorant(rho: f64, n: u64, q_pow_n: f64) -> f64 {
    if q_pow_n == 0.0 {
        return 0.0;
    }
    let n = n as f64;
    q_pow_n * ((E * n).log2() + 1.0 / (rho * n * LN_2))
}

/// `Λ(Geom(ρ)) = Σ_k ρ(1 − ρ)^{k−1} ell(k)`, summed until the tail bound
/// drops to `tail_tol`.
pub fn geom_layered_entropy(rho: f64, tail_tol: f64) -> Result<GeomLambda> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidRho(rho));
    }
    if !(tail_tol > 0.0 && tail_tol.is_finite()) {
        return Err(Error::InvalidTailTol(tail_tol));
    }
    let q = 1.0 - rho;
    // The pmf ρ q^{k−1} is nonincreasing, so it is its own sorted form.
    debug_assert!(q <= 1.0);
    let mut value = 0.0;
    let mut q_pow = 1.0;
    let mut k: u64 = 0;
    loop {
        k += 1;
        value += rho * q_pow * ell(k as usize);
        q_pow *= q;
        if k == 1 || k % 32 == 0 {
            let tail_bound = tail_majorant(rho, k, q_pow);
            if tail_bound <= tail_tol {
                return Ok(GeomLambda {
                    value,
                    tail_bound,
                    terms: k,
                });
            }
        }
        if k >= MAX_TERMS {
            return Err(Error::TruncationLimit(k));
        }
    }
}

/// The computable endpoint of the chain for one joint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundChain {
    /// `Λ(K)` without its tail.
    #[serde(rename = "lambda_K")]
    pub lambda_k: f64,
    /// Bound on the omitted tail of `Λ(K)`.
    pub tail_bound: f64,
    /// `E[log₂(2/ρ − 1)] = Λ_{1/2}(K|X,Y)`.
    pub mean_k_term: f64,
    /// `E[log₂(2^ι + ½)] + 1`.
    pub e_term: f64,
    #[serde(rename = "I")]
    pub mutual_information: f64,
    /// `I(X;Y) + log₂3`.
    pub i_log3: f64,
    pub pass: bool,
}

impl BoundChain {
    pub fn lambda_k_upper(&self) -> f64 {
        self.lambda_k + self.tail_bound
    }

    /// The `H(Y|S)` bound obtained from the numeric `Λ(K)`.
    pub fn h_bound(&self, eta: f64) -> Result<f64> {
        bound_h_from_lambda(self.lambda_k_upper(), eta)
    }

    fn holds(&self, slack: f64) -> bool {
        self.lambda_k_upper() <= self.mean_k_term + slack
            && self.mean_k_term <= self.e_term + slack
            && self.e_term <= self.i_log3 + slack
    }
}

pub fn bound_chain(j: &JointPmf, tail_tol: f64) -> Result<BoundChain> {
    let iota = info_density(j);
    let rho = rho(j);
    let mut lambda_k = 0.0;
    let mut tail_bound = 0.0;
    let mut mean_k_term = 0.0;
    let mut e_sum = 0.0;
    for (x, y, p) in support(j) {
        let r = rho.get(x, y).expect("support entry");
        let g = geom_layered_entropy(r, tail_tol)?;
        lambda_k += p * g.value;
        tail_bound += p * g.tail_bound;
        mean_k_term += p * (2.0 / r - 1.0).log2();
        e_sum += p * (iota.get(x, y).expect("support entry").exp2() + 0.5).log2();
    }
    let mi = mutual_information(j);
    let mut chain = BoundChain {
        lambda_k,
        tail_bound,
        mean_k_term,
        e_term: e_sum + 1.0,
        mutual_information: mi,
        i_log3: mi + log2_3(),
        pass: false,
    };
    chain.pass = chain.holds(CHAIN_SLACK);
    Ok(chain)
}

/// Closed-form upper bounds on `H(Y|S)` as functions of `I = I(X;Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SfrlVariant {
    /// `I + log₂(I + log₂3 + eη) + log₂(3/(eη)) + η`.
    Eta(f64),
    /// `I + log₂(I + 5.51) + 1.06`.
    LogE,
    /// [`SfrlVariant::Eta`] at the minimizing `η` for `Λ = I + log₂3`.
    EtaOpt,
    /// `I + log₂(I + 1) + 3.732`.
    Li2021,
    /// `I + log₂(I + 2) + 2`.
    Li2024,
}

impl SfrlVariant {
    pub fn name(self) -> String {
        match self {
            SfrlVariant::Eta(v) => format!("eta({v})"),
            SfrlVariant::LogE => "loge".into(),
            SfrlVariant::EtaOpt => "eta_opt".into(),
            SfrlVariant::Li2021 => "li2021".into(),
            SfrlVariant::Li2024 => "li2024".into(),
        }
    }
}

impl FromStr for SfrlVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loge" => Ok(SfrlVariant::LogE),
            "eta_opt" | "opt" => Ok(SfrlVariant::EtaOpt),
            "li2021" => Ok(SfrlVariant::Li2021),
            "li2024" => Ok(SfrlVariant::Li2024),
            other => match other.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => Ok(SfrlVariant::Eta(v)),
                Ok(v) => Err(Error::InvalidEta(v)),
                Err(_) => Err(Error::InvalidArgument(format!(
                    "unknown bound variant {other:?}"
                ))),
            },
        }
    }
}

fn eta_bound(i: f64, eta: f64) -> f64 {
    i + (i + log2_3() + E * eta).log2() + (3.0 / (E * eta)).log2() + eta
}

/// `η` minimizing the [`SfrlVariant::Eta`] bound at `I`.
pub fn sfrl_optimal_eta(i: f64) -> f64 {
    optimal_eta(i + log2_3())
}

pub fn sfrl_bound(i: f64, variant: SfrlVariant) -> Result<f64> {
    if !(i >= 0.0 && i.is_finite()) {
        return Err(Error::InvalidInformation(i));
    }
    Ok(match variant {
        SfrlVariant::Eta(eta) => {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidEta(eta));
            }
            eta_bound(i, eta)
        }
        SfrlVariant::LogE => i + (i + 5.51).log2() + 1.06,
        SfrlVariant::EtaOpt => eta_bound(i, sfrl_optimal_eta(i)),
        SfrlVariant::Li2021 => i + (i + 1.0).log2() + 3.732,
        SfrlVariant::Li2024 => i + (i + 2.0).log2() + 2.0,
    })
}

/// The `I` in `[lo, hi]` where bounds `a` and `b` meet, found by bisection
/// to within 1e-6.
pub fn crossing_point(a: SfrlVariant, b: SfrlVariant, lo: f64, hi: f64) -> Result<f64> {
    let diff = |i: f64| Ok::<f64, Error>(sfrl_bound(i, a)? - sfrl_bound(i, b)?);
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, f_hi) = (diff(lo)?, diff(hi)?);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        let f = diff(mid)?;
        if f == 0.0 {
            return Ok(mid);
        }
        if f.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One row of the bound comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    #[serde(rename = "I")]
    pub i: f64,
    pub li2021: f64,
    pub li2024: f64,
    pub loge: f64,
    pub eta_opt: f64,
}

pub fn curve_emit(grid: &[f64]) -> Result<Vec<CurveRow>> {
    grid.iter()
        .map(|&i| {
            Ok(CurveRow {
                i,
                li2021: sfrl_bound(i, SfrlVariant::Li2021)?,
                li2024: sfrl_bound(i, SfrlVariant::Li2024)?,
                loge: sfrl_bound(i, SfrlVariant::LogE)?,
                eta_opt: sfrl_bound(i, SfrlVariant::EtaOpt)?,
            })
        })
        .collect()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `log₂ e`, the `η` of the `loge` variant.
pub const ETA_LOGE: f64 = LOG2_E;
