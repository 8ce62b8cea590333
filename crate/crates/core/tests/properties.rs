use layent::channels::{layer_channel, three_cond_entropies};
use layent::codes::{audit_prefix_free, pack_bits, unpack_bits};
use layent::entropy::{renyi_half_mean_bound, renyi_half_mean_bound_sorted};
use layent::envelopes::{layer_fixed_point_residual, perturb_coupling};
use layent::io::{fmt_sig, parse_pmf};
use layent::sample::{monotone_joint, robin_hood};
use layent::*;
use proptest::prelude::*;

const ALPHAS: [f64; 7] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, f64::INFINITY];

fn weights(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..1.0f64], 1..=max)
        .prop_filter("positive mass", |w| w.iter().sum::<f64>() > 1e-6)
}

fn pmf(max: usize) -> impl Strategy<Value = Pmf> {
    weights(max).prop_map(|w| Pmf::normalized(w).unwrap())
}

fn joint(max_rows: usize, max_cols: usize) -> impl Strategy<Value = JointPmf> {
    (1..=max_rows, 1..=max_cols)
        .prop_flat_map(|(r, c)| {
            prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.0..1.0f64], r * c)
                .prop_map(move |d| (r, c, d))
        })
        .prop_filter("positive mass", |(_, _, d)| d.iter().sum::<f64>() > 1e-6)
        .prop_map(|(r, c, d)| JointPmf::from_flat(r, c, d, true).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sorting_is_a_stable_permutation(p in pmf(12)) {
        let s = p.sorted();
        prop_assert!(s.probs().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(s.unsort(), p.probs().to_vec());
        for w in s.perm().windows(2) {
            let (a, b) = (w[0], w[1]);
            if p.probs()[a] == p.probs()[b] {
                prop_assert!(a < b);
            }
        }
    }

    #[test]
    fn layer_decomposition_reconstructs(p in pmf(12)) {
        let d = p.sorted().layer_decomposition();
        prop_assert!(d.weights().iter().all(|&w| w >= 0.0));
        prop_assert!((d.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (a, b) in d.reconstruct().iter().zip(p.sorted().probs()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn lambda_oracles_agree(p in pmf(12)) {
        let s = p.sorted();
        let a = layered_entropy(&s);
        prop_assert!((a - layered_entropy_by_layers(&s)).abs() <= 1e-12);
        prop_assert!((a - s.layer_decomposition().layered_entropy()).abs() <= 1e-12);
    }

    #[test]
    fn sandwich_and_h_bounds(p in pmf(12)) {
        let lam = layered_entropy(&p.sorted());
        let h = shannon_entropy(&p);
        prop_assert!(min_entropy(&p) <= lam + 1e-9);
        prop_assert!(lam <= h + 1e-9);
        for eta in EtaPreset::PRESETS {
            let b = eta.bound(lam).unwrap();
            prop_assert!(h <= b + 1e-9);
            prop_assert!(b >= lam);
        }
    }

    #[test]
    fn schur_concave(p in pmf(10), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        if let Some(q) = robin_hood(&mut s, p.probs()) {
            let q = Pmf::normalized(q).unwrap();
            prop_assert!(layered_entropy(&p.sorted()) <= layered_entropy(&q.sorted()) + 1e-9);
        }
    }

    #[test]
    fn superadditive_on_products(px in pmf(6), py in pmf(6)) {
        let j = JointPmf::product(&px, &py);
        let joint_lam = layered_entropy(&j.flattened().sorted());
        let sum = layered_entropy(&px.sorted()) + layered_entropy(&py.sorted());
        prop_assert!(joint_lam >= sum - 1e-9);
    }

    #[test]
    fn bounded_increase(j in joint(6, 6)) {
        let joint_lam = layered_entropy(&j.flattened().sorted());
        let lam_x = layered_entropy(&j.p_x().sorted());
        prop_assert!(joint_lam <= lam_x + (j.cols() as f64).log2() + 1e-9);
    }

    #[test]
    fn renyi_monotone_and_below_renyi(p in pmf(12)) {
        let s = p.sorted();
        let mut prev = f64::INFINITY;
        for alpha in ALPHAS {
            let la = renyi_layered_entropy(&s, alpha).unwrap();
            prop_assert!(la <= prev + 1e-9);
            prop_assert!(la <= renyi_entropy(&p, alpha).unwrap() + 1e-9);
            prev = la;
        }
        prop_assert!(renyi_layered_entropy(&s, 0.5).unwrap() <= renyi_half_mean_bound_sorted(&s) + 1e-9);
        if p.probs().windows(2).all(|w| w[0] >= w[1]) {
            prop_assert!(renyi_layered_entropy(&s, 0.5).unwrap() <= renyi_half_mean_bound(&p) + 1e-9);
        }
    }

    #[test]
    fn conditioning_property(j in joint(8, 8)) {
        prop_assert!((cond_layered(&j) - layered_entropy(&compression_pmf(&j))).abs() <= 1e-9);
    }

    #[test]
    fn theorem_two(j in joint(8, 8)) {
        let e = three_cond_entropies(&j);
        prop_assert!(e.compression_gap_holds(EtaPreset::LogE, 1e-9).unwrap());
        prop_assert!(e.compression_gap_holds(EtaPreset::Sqrt, 1e-9).unwrap());
        prop_assert!(e.layered <= e.shannon + 1e-9);
        prop_assert!(e.shannon <= e.compressed + 1e-9);
    }

    #[test]
    fn compression_matches_brute_force(j in joint(4, 3)) {
        let brute = brute_force_min_entropy(&j).unwrap();
        prop_assert!((shannon_entropy(&compression_pmf(&j)) - brute).abs() <= 1e-9);
    }

    #[test]
    fn monotone_linearity(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..6) {
        let j = monotone_joint(&mut Sampler::new(seed), rows, cols);
        prop_assert!((cond_layered(&j) - layered_entropy(&j.p_x().sorted())).abs() <= 1e-9);
    }

    #[test]
    fn layer_channel_attains_lambda(p in pmf(12)) {
        let s = p.sorted();
        let lam = layered_entropy(&s);
        prop_assert!((cond_shannon(&layer_channel(&s)) - lam).abs() <= 1e-12);
        prop_assert!(layer_fixed_point_residual(&s) <= 1e-12);
        prop_assert!((cond_min_entropy(&layer_channel(&s)) - lam).abs() <= 1e-9);
    }

    #[test]
    fn sampled_couplings_stay_below_lambda(p in pmf(8), seed in any::<u64>(), steps in 1usize..20) {
        let s = p.sorted();
        let c = lp_coupling_construct(&s);
        let lam = layered_entropy(&s);
        prop_assert!(c.is_feasible(s.probs()));
        prop_assert!((c.objective() - lam).abs() <= 1e-9);
        let perturbed = perturb_coupling(&c, steps, &mut Sampler::new(seed));
        prop_assert!(perturbed.is_feasible(s.probs()));
        prop_assert!(perturbed.objective() <= lam + 1e-9);
    }

    #[test]
    fn codes_round_trip(p in pmf(12)) {
        let s = p.sorted();
        let en = enumerative_code(&s);
        prop_assert_eq!(en.expected_length(), one_to_one_optimal_length(&s));
        prop_assert!(en.is_injective());
        let hf = huffman(&p);
        prop_assert!(hf.audit());
        let h = shannon_entropy(&p);
        prop_assert!(h <= hf.expected_length() + 1e-9 && hf.expected_length() < h + 1.0 + 1e-9);
        for x in 0..p.len() {
            let w = en.word(x).unwrap();
            prop_assert_eq!(en.decode_word(w), Some(x));
            if let Some(w) = hf.word(x) {
                prop_assert_eq!(hf.decode_prefix(&w.0), Some((x, w.len())));
            }
        }
        prop_assert!(audit_prefix_free(hf.words().iter().flatten()));
    }

    #[test]
    fn encoding_sandwiches(j in joint(8, 8)) {
        prop_assert!(conditional_encoding_report(&j).all_hold(1e-9));
    }

    #[test]
    fn bits_pack_round_trip(bits in prop::collection::vec(any::<bool>(), 0..300)) {
        let b = Bits(bits);
        prop_assert_eq!(unpack_bits(&pack_bits(&b).unwrap()).unwrap(), b);
    }

    #[test]
    fn rho_lower_bound(j in joint(6, 6)) {
        let r = rho(&j);
        let iota = info_density(&j);
        for x in 0..j.rows() {
            for y in 0..j.cols() {
                if let (Some(rv), Some(i)) = (r.get(x, y), iota.get(x, y)) {
                    prop_assert!(rv > 0.0 && rv <= 1.0);
                    prop_assert!(rv * (i.exp2() + 1.0) >= 1.0 - 1e-9);
                }
            }
        }
    }

    #[test]
    fn chain_is_sound(j in joint(8, 8)) {
        let c = bound_chain(&j, 1e-9).unwrap();
        prop_assert!(c.pass);
        prop_assert!(c.lambda_k_upper() <= c.e_term + 1e-9);
        prop_assert!(c.e_term <= c.i_log3 + 1e-9);
        let i = c.mutual_information.max(0.0);
        for eta in [std::f64::consts::LOG2_E, layent::sfrl::sfrl_optimal_eta(i)] {
            prop_assert!(c.h_bound(eta).unwrap() <= sfrl_bound(i, SfrlVariant::Eta(eta)).unwrap() + 1e-9);
        }
    }

    #[test]
    fn geometric_lambda_sandwich(rho in 0.01f64..=1.0) {
        let g = geom_layered_entropy(rho, 1e-9).unwrap();
        prop_assert!(g.tail_bound <= 1e-9);
        prop_assert!(g.value >= 0.0);
        // Λ of a pmf never exceeds its Shannon entropy: h(ρ)/ρ.
        let h = if rho >= 1.0 { 0.0 } else {
            -(rho * rho.log2() + (1.0 - rho) * (1.0 - rho).log2()) / rho
        };
        prop_assert!(g.upper() <= h + 1e-9);
    }

    #[test]
    fn fmt_sig_keeps_twelve_digits(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs());
    }

    #[test]
    fn pmf_csv_round_trip(p in pmf(12)) {
        let text: String = p.probs().iter().map(|q| format!("{q:?}\n")).collect();
        let parsed = parse_pmf(&text, false).unwrap();
        prop_assert_eq!(parsed.probs(), p.probs());
    }
}
