//! Discrete layered entropy `Λ`, its Rényi family, conditional compression,
//! the layer channel, one-to-one and prefix-free codes, and the
//! functional-representation bound chain, all on finite distributions.
//!
//! Entropies are in bits. Every computation is a pure function of its
//! inputs; random sweeps take an explicit seed (see [`rng`]).

pub mod channels;
pub mod codes;
pub mod entropy;
pub mod envelopes;
mod error;
pub mod io;
pub mod pmf;
pub mod rng;
pub mod sample;
pub mod sfrl;
pub mod simplex;
pub mod verify;

pub use channels::{
    brute_force_min_entropy, compression_pmf, cond_layered, cond_min_entropy, cond_shannon,
    conditional_compression, layer_channel, mutual_information, region_sample,
    three_cond_entropies, CompressionResult, CondEntropies, JointPmf, RegionSample, TiePolicy,
};
pub use codes::{
    conditional_encoding_report, enumerative_code, huffman, keyframe_stream_demo, Bits, Codebook,
    EncodingReport,
};
pub use entropy::{
    bound_h_from_lambda, ell_increment, layered_entropy, layered_entropy_by_layers, min_entropy,
    one_to_one_optimal_length, optimal_eta, renyi_entropy, renyi_layered_entropy, shannon_entropy,
    EntropyReport, EtaPreset,
};
pub use envelopes::{
    layer_fixed_point_check, lp_coupling_construct, lp_objective_upper_check,
    uniform_conditional_envelope_check, Coupling,
};
pub use error::{Error, Result};
pub use pmf::{LayerDecomposition, Pmf, SortedPmf};
pub use rng::Sampler;
pub use sfrl::{
    bound_chain, crossing_point, curve_emit, geom_layered_entropy, info_density, rho, sfrl_bound,
    BoundChain, GeomCoupling, InfoDensityTable, SfrlVariant,
};
pub use simplex::simplex_grid;
pub use verify::{run_suite, Suite, SuiteReport, VerifyConfig};

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::channels::JointPmf;
    use crate::pmf::Pmf;

    /// `Y` uniform on two values; `p(·|1) = (0.9, 0.1)`, `p(·|2) = (0.6, 0.4)`.
    pub fn two_row_example() -> JointPmf {
        let py = Pmf::uniform(2).unwrap();
        JointPmf::from_conditionals(&py, &[vec![0.9, 0.1], vec![0.6, 0.4]]).unwrap()
    }
}
