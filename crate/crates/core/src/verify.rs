//! Randomized verification of every identity and inequality, grouped into
//! suites.
//!
//! Instance `i` of suite number `s` is drawn from
//! `stream_seed(seed, (s << 32) | i)`, so a report
//! depends only on the configuration. Inequalities are checked with slack
//! `tol`; identities with `min(tol, 1e-12)`.

use std::collections::BTreeMap;
use std::f64::consts::LOG2_E;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channels::{
    brute_force_min_entropy, compression_pmf, cond_layered, cond_min_entropy, cond_shannon,
    conditional_compression, layer_channel, region_sample, three_cond_entropies, JointPmf,
    PointKind, TiePolicy,
};
use crate::codes::{
    audit_prefix_free, conditional_codebooks, conditional_encoding_report, enumerative_code,
    huffman, keyframe_stream_demo, sample_frames, FrameModel, StreamMode,
};
use crate::entropy::{
    layered_entropy, layered_entropy_by_layers, min_entropy, one_to_one_optimal_length,
    renyi_entropy, renyi_half_mean_bound, renyi_half_mean_bound_sorted, renyi_layered_entropy,
    shannon_entropy, EtaPreset,
};
use crate::envelopes::{
    layer_fixed_point_residual, lp_coupling_construct, lp_objective_upper_check, perturb_coupling,
    uniform_conditional_envelope_check,
};
use crate::error::{Error, Result};
use crate::pmf::{Pmf, SortedPmf};
use crate::rng::{stream_seed, Sampler};
use crate::sample::{monotone_joint, random_joint, random_joint_upto, random_pmf, robin_hood};
use crate::sfrl::{
    bound_chain, crossing_point, curve_emit, info_density, linear_grid, rho, sfrl_bound,
    sfrl_optimal_eta, SfrlVariant, DEFAULT_TAIL_TOL,
};

/// Identities are never checked more loosely than this.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Failures kept per check; the rest are only counted.
const MAX_DETAILS: usize = 5;
/// Orders swept by the Rényi checks, increasing.
pub const ALPHA_GRID: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, f64::INFINITY];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Core,
    Channels,
    Envelopes,
    Codes,
    Sfrl,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["core", "channels", "envelopes", "codes", "sfrl", "all"];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Core => "core",
            Suite::Channels => "channels",
            Suite::Envelopes => "envelopes",
            Suite::Codes => "codes",
            Suite::Sfrl => "sfrl",
            Suite::All => "all",
        };
        f.write_str(name)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "core" => Suite::Core,
            "channels" => Suite::Channels,
            "envelopes" => Suite::Envelopes,
            "codes" => Suite::Codes,
            "sfrl" => Suite::Sfrl,
            "all" => Suite::All,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown suite {other:?}, expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub tail_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            seed: 42,
            tol: 1e-9,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

struct Checker {
    tol: f64,
    ident: f64,
    cases: usize,
    failure_count: usize,
    failures: Vec<Failure>,
    per_check: BTreeMap<&'static str, usize>,
}

impl Checker {
    fn new(tol: f64) -> Self {
        Self {
            tol,
            ident: tol.min(IDENTITY_TOL),
            cases: 0,
            failure_count: 0,
            failures: Vec::new(),
            per_check: BTreeMap::new(),
        }
    }

    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            return;
        }
        self.failure_count += 1;
        let seen = self.per_check.entry(name).or_default();
        *seen += 1;
        if *seen <= MAX_DETAILS {
            self.failures.push(Failure {
                check: name.into(),
                detail: detail(),
            });
        }
    }

    /// `a ≤ b` up to `tol`.
    fn le(&mut self, name: &'static str, a: f64, b: f64, ctx: impl fmt::Display) {
        let tol = self.tol;
        self.check(name, a <= b + tol, || format!("{ctx}: {a} > {b}"));
    }

    /// `a = b` up to the identity tolerance.
    fn same(&mut self, name: &'static str, a: f64, b: f64, ctx: impl fmt::Display) {
        let tol = self.ident;
        self.check(name, (a - b).abs() <= tol, || format!("{ctx}: {a} != {b}"));
    }

    /// `a = b` up to `tol`.
    fn near(&mut self, name: &'static str, a: f64, b: f64, ctx: impl fmt::Display) {
        let tol = self.tol;
        self.check(name, (a - b).abs() <= tol, || format!("{ctx}: {a} != {b}"));
    }

    fn report(self, suite: Suite) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            cases: self.cases,
            failure_count: self.failure_count,
            failures: self.failures,
        }
    }
}

fn validate(cfg: &VerifyConfig) -> Result<()> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    if !(cfg.tail_tol > 0.0 && cfg.tail_tol.is_finite()) {
        return Err(Error::InvalidTailTol(cfg.tail_tol));
    }
    Ok(())
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    validate(cfg)?;
    let mut c = Checker::new(cfg.tol);
    let suites: &[Suite] = match suite {
        Suite::All => &[
            Suite::Core,
            Suite::Channels,
            Suite::Envelopes,
            Suite::Codes,
            Suite::Sfrl,
        ],
        ref one => std::slice::from_ref(one),
    };
    for &s in suites {
        match s {
            Suite::Core => core_suite(&mut c, cfg)?,
            Suite::Channels => channels_suite(&mut c, cfg)?,
            Suite::Envelopes => envelopes_suite(&mut c, cfg)?,
            Suite::Codes => codes_suite(&mut c, cfg)?,
            Suite::Sfrl => sfrl_suite(&mut c, cfg)?,
            Suite::All => unreachable!("expanded above"),
        }
    }
    Ok(c.report(suite))
}

/// The sampler for instance `i` of a suite; suites use disjoint index ranges.
fn sampler(cfg: &VerifyConfig, suite: u64, i: usize) -> Sampler {
    Sampler::new(stream_seed(cfg.seed, (suite << 32) | i as u64))
}

fn pmf_for_trial(s: &mut Sampler, lo: usize, hi: usize) -> Pmf {
    let n = s.range_inclusive(lo, hi);
    let zero_prob = if s.below(4) == 0 { 0.3 } else { 0.0 };
    random_pmf(s, n, zero_prob)
}

fn core_suite(c: &mut Checker, cfg: &VerifyConfig) -> Result<()> {
    for k in 1..=64 {
        let u = SortedPmf::uniform(k)?;
        let log_k = (k as f64).log2();
        c.same(
            "uniform_layered",
            layered_entropy(&u),
            log_k,
            format!("k={k}"),
        );
        for alpha in ALPHA_GRID {
            c.same(
                "uniform_renyi_layered",
                renyi_layered_entropy(&u, alpha)?,
                log_k,
                format!("k={k}, alpha={alpha}"),
            );
        }
    }
    for i in 0..cfg.trials {
        let mut s = sampler(cfg, 0, i);
        let p = pmf_for_trial(&mut s, 2, 12);
        let sp = p.sorted();
        let ctx = format!("trial {i}");
        let lam = layered_entropy(&sp);
        let h = shannon_entropy(&p);
        c.same(
            "layered_by_layers",
            lam,
            layered_entropy_by_layers(&sp),
            &ctx,
        );
        let dec = sp.layer_decomposition();
        c.same("layered_by_decomposition", lam, dec.layered_entropy(), &ctx);
        let worst = dec
            .reconstruct()
            .iter()
            .zip(sp.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        c.same("decomposition_reconstructs", worst, 0.0, &ctx);
        c.same(
            "decomposition_sums_to_one",
            dec.weights().iter().sum::<f64>(),
            1.0,
            &ctx,
        );

        c.le("min_entropy_below_layered", min_entropy(&p), lam, &ctx);
        c.le("layered_below_shannon", lam, h, &ctx);
        for eta in EtaPreset::PRESETS {
            c.le(
                "shannon_from_layered_bound",
                h,
                eta.bound(lam)?,
                format!("{ctx}, eta={}", eta.name()),
            );
        }
        let l = one_to_one_optimal_length(&sp);
        c.le("one_to_one_below_layered", l, lam, &ctx);
        c.check(
            "one_to_one_above_layered_minus_two",
            lam - 2.0 < l + c.tol,
            || format!("{ctx}: L={l}, Λ={lam}"),
        );

        let mut prev = f64::INFINITY;
        for alpha in ALPHA_GRID {
            let la = renyi_layered_entropy(&sp, alpha)?;
            let ha = renyi_entropy(&p, alpha)?;
            c.le(
                "renyi_layered_nonincreasing",
                la,
                prev,
                format!("{ctx}, alpha={alpha}"),
            );
            c.le(
                "renyi_layered_below_renyi",
                la,
                ha,
                format!("{ctx}, alpha={alpha}"),
            );
            prev = la;
        }
        let half = renyi_layered_entropy(&sp, 0.5)?;
        c.le(
            "renyi_half_mean_bound_sorted",
            half,
            renyi_half_mean_bound_sorted(&sp),
            &ctx,
        );
        c.le(
            "renyi_half_mean_bound_given",
            half,
            renyi_half_mean_bound(&p),
            &ctx,
        );

        if let Some(q) = robin_hood(&mut s, p.probs()) {
            let lq = layered_entropy(&Pmf::normalized(q)?.sorted());
            c.le("schur_concave", lam, lq, &ctx);
        }
        let other = pmf_for_trial(&mut s, 1, 4);
        let prod = JointPmf::product(&p, &other).flattened();
        let l_other = layered_entropy(&other.sorted());
        c.le(
            "superadditive",
            lam + l_other,
            layered_entropy(&prod.sorted()),
            &ctx,
        );
        let m = s.range_inclusive(1, 4);
        let with_uniform = JointPmf::product(&p, &Pmf::uniform(m)?).flattened();
        c.near(
            "additive_with_uniform",
            layered_entropy(&with_uniform.sorted()),
            lam + (m as f64).log2(),
            &ctx,
        );
        let j = random_joint(&mut s, p.len(), m, 0.0);
        let lam_xy = layered_entropy(&j.flattened().sorted());
        c.le(
            "bounded_increase",
            lam_xy,
            layered_entropy(&j.p_x().sorted()) + (m as f64).log2(),
            &ctx,
        );
    }
    Ok(())
}

fn channels_suite(c: &mut Checker, cfg: &VerifyConfig) -> Result<()> {
    for i in 0..cfg.trials {
        let mut s = sampler(cfg, 1, i);
        let ctx = format!("trial {i}");
        let j = random_joint_upto(&mut s, 8, 8);
        let t = three_cond_entropies(&j);
        let u = compression_pmf(&j);
        c.same(
            "conditioning_property",
            t.layered,
            layered_entropy(&u),
            &ctx,
        );
        let cr = conditional_compression(&j, TiePolicy::AscendingIndex)?;
        let worst = cr
            .u_pmf()
            .probs()
            .iter()
            .zip(u.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        c.same("compression_matches_formula", worst, 0.0, &ctx);
        c.le("layered_below_shannon_cond", t.layered, t.shannon, &ctx);
        c.le(
            "shannon_cond_below_compressed",
            t.shannon,
            t.compressed,
            &ctx,
        );
        c.le(
            "concavity",
            t.layered,
            layered_entropy(&j.p_x().sorted()),
            &ctx,
        );
        for eta in [EtaPreset::LogE, EtaPreset::Sqrt] {
            c.le(
                "theorem2_upper",
                t.compressed,
                eta.bound(t.shannon)?,
                format!("{ctx}, eta={}", eta.name()),
            );
        }
        for eta in EtaPreset::PRESETS {
            c.le(
                "three_approx_upper",
                t.compressed,
                eta.bound(t.layered)? + 1.0,
                format!("{ctx}, eta={}", eta.name()),
            );
        }

        let rows = s.range_inclusive(1, 6);
        let m = monotone_joint(&mut s, rows, 1 + i % 5);
        c.near(
            "monotone_linearity",
            cond_layered(&m),
            layered_entropy(&m.p_x().sorted()),
            &ctx,
        );

        let p = pmf_for_trial(&mut s, 1, 10);
        let sp = p.sorted();
        let lam = layered_entropy(&sp);
        let lc = layer_channel(&sp);
        c.same("layer_channel_shannon", cond_shannon(&lc), lam, &ctx);
        c.same(
            "layer_channel_min_entropy",
            cond_min_entropy(&lc),
            lam,
            &ctx,
        );
        c.same(
            "layer_channel_fixed_point",
            layer_fixed_point_residual(&sp),
            0.0,
            &ctx,
        );

        let h = shannon_entropy(&p);
        let region = region_sample(&p, 4, s.next_u64())?;
        for pt in &region.points {
            c.le("region_below_diagonal", pt.h_cond, pt.h_diff, &ctx);
            c.le(
                "region_theorem2",
                pt.h_diff,
                EtaPreset::LogE.bound(pt.h_cond)?,
                &ctx,
            );
            if (pt.h_diff - h).abs() < 1e-9 {
                c.le("theorem1_converse", lam, pt.h_cond, &ctx);
            }
            if pt.kind == PointKind::Layer {
                c.same("region_layer_point", pt.h_cond, lam, &ctx);
            }
        }
    }
    let small = cfg.trials.div_ceil(4).min(50);
    for i in 0..small {
        let mut s = sampler(cfg, 2, i);
        let j = random_joint_upto(&mut s, 5, 4);
        let brute = brute_force_min_entropy(&j)?;
        c.near(
            "compression_optimal",
            shannon_entropy(&compression_pmf(&j)),
            brute,
            format!("instance {i}"),
        );
    }
    Ok(())
}

fn envelopes_suite(c: &mut Checker, cfg: &VerifyConfig) -> Result<()> {
    for i in 0..cfg.trials {
        let mut s = sampler(cfg, 3, i);
        let ctx = format!("trial {i}");
        let p = pmf_for_trial(&mut s, 1, 8);
        let sp = p.sorted();
        let lam = layered_entropy(&sp);
        let cp = lp_coupling_construct(&sp);
        c.same("coupling_objective", cp.objective(), lam, &ctx);
        c.le("coupling_feasible", cp.feasibility_residual(), 0.0, &ctx);
        c.same(
            "coupling_marginal",
            cp.marginal_residual(sp.probs()),
            0.0,
            &ctx,
        );
        for _ in 0..3 {
            let q = perturb_coupling(&cp, 10, &mut s);
            c.le("perturbed_feasible", q.feasibility_residual(), 0.0, &ctx);
            c.le("weak_duality", q.objective(), lam, &ctx);
        }
        let seed = s.next_u64();
        let a = lp_objective_upper_check(&sp, 5, seed)?;
        c.le("min_entropy_envelope", a.max_sampled, lam, &ctx);
        c.same("min_entropy_envelope_attained", a.attained, lam, &ctx);
        let b = uniform_conditional_envelope_check(&sp, 5, seed)?;
        c.le("log_cardinality_envelope", b.max_sampled, lam, &ctx);
        c.same("log_cardinality_envelope_attained", b.attained, lam, &ctx);
        c.same(
            "layer_fixed_point",
            layer_fixed_point_residual(&sp),
            0.0,
            &ctx,
        );
    }
    Ok(())
}

fn codes_suite(c: &mut Checker, cfg: &VerifyConfig) -> Result<()> {
    for i in 0..cfg.trials {
        let mut s = sampler(cfg, 4, i);
        let ctx = format!("trial {i}");
        let p = pmf_for_trial(&mut s, 1, 12);
        let sp = p.sorted();
        let en = enumerative_code(&sp);
        let l = one_to_one_optimal_length(&sp);
        c.check(
            "enumerative_length_exact",
            en.expected_length() == l,
            || format!("{ctx}: {} != {l}", en.expected_length()),
        );
        c.check("enumerative_injective", en.is_injective(), || ctx.clone());
        let hf = huffman(&p);
        let h = shannon_entropy(&p);
        c.check("huffman_prefix_free", hf.audit(), || ctx.clone());
        c.le("huffman_lower", h, hf.expected_length(), &ctx);
        c.check(
            "huffman_upper",
            hf.expected_length() < h + 1.0 + c.tol,
            || format!("{ctx}: {} ≥ {h} + 1", hf.expected_length()),
        );
        let round_trip = (0..p.len()).all(|x| {
            en.word(x).and_then(|w| en.decode_word(w)) == Some(x)
                && hf.word(x).map_or(p.probs()[x] == 0.0, |w| {
                    hf.decode_prefix(&w.0) == Some((x, w.len()))
                })
        });
        c.check("round_trip", round_trip, || ctx.clone());

        let j = random_joint_upto(&mut s, 8, 8);
        let r = conditional_encoding_report(&j);
        c.le("non_prefix_upper", r.ell_n, r.layered, &ctx);
        c.check(
            "non_prefix_lower",
            r.layered - 2.0 < r.ell_n + c.tol,
            || format!("{ctx}: {r:?}"),
        );
        c.le("cond_prefix_lower", r.shannon, r.ell_c, &ctx);
        c.check(
            "cond_prefix_upper",
            r.ell_c < r.shannon + 1.0 + c.tol,
            || format!("{ctx}: {r:?}"),
        );
        c.le("uncond_prefix_lower", r.compressed, r.ell_u, &ctx);
        c.check(
            "uncond_prefix_upper",
            r.ell_u < r.compressed + 1.0 + c.tol,
            || format!("{ctx}: {r:?}"),
        );
    }

    let py = Pmf::uniform(2)?;
    let example = JointPmf::from_conditionals(&py, &[vec![0.5, 0.5, 0.0], vec![0.5, 0.25, 0.25]])?;
    let books = conditional_codebooks(&example);
    let union = books
        .iter()
        .flatten()
        .flat_map(|b| b.words().iter().flatten());
    c.check(
        "conditional_union_not_prefix_free",
        !audit_prefix_free(union),
        || "union of per-y codes passed the prefix-free audit".into(),
    );

    let model = FrameModel::new(
        JointPmf::from_conditionals(
            &Pmf::new(vec![0.4, 0.35, 0.25])?,
            &[
                vec![0.5, 0.25, 0.25],
                vec![0.125, 0.75, 0.125],
                vec![0.2, 0.2, 0.6],
            ],
        )?,
        6,
    )?;
    for i in 0..cfg.trials.min(20) {
        let mut s = sampler(cfg, 5, i);
        let frames = sample_frames(&model, 24, &mut s);
        let mut loss = vec![false; 24];
        loss[s.range_inclusive(1, 5)] = true;
        let r = keyframe_stream_demo(&frames, &loss, &model, StreamMode::UncondPrefix)?;
        c.check(
            "uncond_keyframe_recovered",
            r.keyframe_recovered == Some(true),
            || format!("stream {i}"),
        );
        let clean = keyframe_stream_demo(&frames, &[false; 24], &model, StreamMode::CondPrefix)?;
        c.check("lossless_stream_decodes", clean.all_decoded(), || {
            format!("stream {i}")
        });
    }
    Ok(())
}

fn sfrl_suite(c: &mut Checker, cfg: &VerifyConfig) -> Result<()> {
    let log3 = 3f64.log2();
    for i in 0..cfg.trials {
        let mut s = sampler(cfg, 6, i);
        let ctx = format!("trial {i}");
        let j = random_joint_upto(&mut s, 8, 8);
        let chain = bound_chain(&j, cfg.tail_tol)?;
        c.le(
            "chain_lambda_k",
            chain.lambda_k_upper(),
            chain.mean_k_term,
            &ctx,
        );
        c.le("chain_mean_k", chain.mean_k_term, chain.e_term, &ctx);
        c.le("chain_e_term", chain.e_term, chain.i_log3, &ctx);
        let iota = info_density(&j);
        c.near(
            "info_density_mean",
            iota.expectation(&j),
            chain.mutual_information,
            &ctx,
        );
        let r = rho(&j);
        for x in 0..j.rows() {
            for y in 0..j.cols() {
                if let (Some(rv), Some(iv)) = (r.get(x, y), iota.get(x, y)) {
                    c.le("rho_lower_bound", 1.0, rv * (iv.exp2() + 1.0), &ctx);
                    c.le("rho_at_most_one", rv, 1.0, &ctx);
                }
            }
        }
        let mi = chain.mutual_information.max(0.0);
        for eta in [
            LOG2_E,
            EtaPreset::Sqrt.resolve(mi + log3),
            sfrl_optimal_eta(mi),
        ] {
            if eta > 0.0 {
                c.le(
                    "h_bound_below_closed_form",
                    chain.h_bound(eta)?,
                    sfrl_bound(mi, SfrlVariant::Eta(eta))?,
                    &ctx,
                );
            }
        }
        let px = pmf_for_trial(&mut s, 1, 6);
        let py = pmf_for_trial(&mut s, 1, 6);
        let prod = bound_chain(&JointPmf::product(&px, &py), cfg.tail_tol)?;
        c.check(
            "product_lambda_k_zero",
            prod.lambda_k == 0.0 && prod.tail_bound == 0.0,
            || format!("{ctx}: {}", prod.lambda_k),
        );
    }

    let x1 = crossing_point(SfrlVariant::LogE, SfrlVariant::Li2024, 0.0, 4.0)?;
    c.check("loge_li2024_crossing", (1.5..=2.0).contains(&x1), || {
        format!("crossing at {x1}")
    });
    let x2 = crossing_point(SfrlVariant::EtaOpt, SfrlVariant::Li2024, 0.0, 2.0)?;
    c.check("eta_opt_li2024_crossing", x2 > 0.0 && x2 <= 0.7, || {
        format!("crossing at {x2}")
    });
    c.check(
        "loge_li2021_no_crossing",
        crossing_point(SfrlVariant::LogE, SfrlVariant::Li2021, 0.0, 20.0).is_err(),
        || "unexpected crossing".into(),
    );
    for row in curve_emit(&linear_grid(0.0, 20.0, 200))? {
        c.le(
            "loge_below_li2021",
            row.loge,
            row.li2021,
            format!("I={}", row.i),
        );
        c.le(
            "eta_opt_below_loge_eta",
            row.eta_opt,
            sfrl_bound(row.i, SfrlVariant::Eta(LOG2_E))?,
            format!("I={}", row.i),
        );
    }
    Ok(())
}
