//! Bit-exact codebooks: optimal one-to-one codes, Huffman codes, and the
//! three ways of encoding `X` when the decoder may or may not know `Y`.

mod stream;

pub use stream::{
    keyframe_stream_demo, pack_bits, parse_loss_pattern, sample_frames, unpack_bits, DemoReport,
    FrameModel, FrameOutcome, FrameStatus, StreamMode,
};

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::channels::{compression_pmf, cond_layered, cond_shannon, JointPmf};
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::pmf::{Pmf, SortedPmf};

/// A finite bit string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(pub Vec<bool>);

impl Bits {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Bits) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_value(value: u64, len: u32) -> Self {
        Bits((0..len).rev().map(|b| value >> b & 1 == 1).collect())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!("{other:?} is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `true` iff no word is a prefix of another (equal words count as
/// prefixes of each other).
pub fn audit_prefix_free<'a>(words: impl IntoIterator<Item = &'a Bits>) -> bool {
    let mut sorted: Vec<&Bits> = words.into_iter().collect();
    sorted.sort();
    // In lexicographic order a word's extensions immediately follow it.
    sorted.windows(2).all(|w| !w[0].is_prefix_of(w[1]))
}

/// Words indexed by source symbol. Symbols without a word have zero
/// probability and are never emitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Codebook {
    words: Vec<Option<Bits>>,
    prefix_free: bool,
    expected_length: f64,
}

impl Codebook {
    pub fn words(&self) -> &[Option<Bits>] {
        &self.words
    }

    pub fn word(&self, symbol: usize) -> Option<&Bits> {
        self.words.get(symbol)?.as_ref()
    }

    pub fn prefix_free(&self) -> bool {
        self.prefix_free
    }

    pub fn expected_length(&self) -> f64 {
        self.expected_length
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Symbol whose word is exactly `bits`.
    pub fn decode_word(&self, bits: &Bits) -> Option<usize> {
        self.words.iter().position(|w| w.as_ref() == Some(bits))
    }

    /// Parses one word of a prefix-free codebook off the front of `bits`,
    /// returning the symbol and its length.
    pub fn decode_prefix(&self, bits: &[bool]) -> Option<(usize, usize)> {
        self.words.iter().enumerate().find_map(|(s, w)| {
            let w = w.as_ref()?;
            bits.starts_with(&w.0).then_some((s, w.len()))
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<&Bits> = self.words.iter().flatten().collect();
        seen.sort();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Runs the prefix-free audit on the actual words.
    pub fn audit(&self) -> bool {
        audit_prefix_free(self.words.iter().flatten())
    }

    /// `{symbol: bitstring}` with symbols named by `labels` or by 1-based
    /// index.
    pub fn to_json(&self, labels: Option<&[String]>) -> serde_json::Value {
        let map = self
            .words
            .iter()
            .enumerate()
            .filter_map(|(i, w)| {
                let key = labels.map_or_else(|| (i + 1).to_string(), |l| l[i].clone());
                Some((key, serde_json::Value::String(w.as_ref()?.to_string())))
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Rank `r` (0-based) gets the `r`-th string in length-then-lexicographic
/// order: `ε, 0, 1, 00, 01, …`.
pub fn enumerative_word(rank: usize) -> Bits {
    let len = (rank + 1).ilog2();
    Bits::from_value((rank + 1 - (1 << len)) as u64, len)
}

/// The optimal one-to-one code: the `i`-th most likely symbol gets the
/// `i`-th enumerated string, of length `⌊log₂ i⌋`.
pub fn enumerative_code(p: &SortedPmf) -> Codebook {
    let mut words = vec![None; p.len()];
    for (rank, &src) in p.perm().iter().enumerate() {
        words[src] = Some(enumerative_word(rank));
    }
    let expected_length = p
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &q)| q * (i + 1).ilog2() as f64)
        .sum();
    Codebook {
        prefix_free: p.len() == 1,
        words,
        expected_length,
    }
}

#[derive(Debug)]
struct Node {
    prob: f64,
    min_leaf: usize,
    id: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prob
            .total_cmp(&other.prob)
            .then(self.min_leaf.cmp(&other.min_leaf))
            .then(self.id.cmp(&other.id))
    }
}

/// Binary Huffman code over the atoms with positive probability.
///
/// The two lightest nodes are merged first, ties broken by smallest source
/// index and then by creation order; the first node taken gets bit `0`. A
/// single atom gets the empty word.
pub fn huffman(p: &Pmf) -> Codebook {
    let probs = p.probs();
    let mut words: Vec<Option<Bits>> = vec![None; probs.len()];
    // children[id] for internal nodes; leaves are ids 0..n.
    let mut children: Vec<Option<(usize, usize)>> = vec![None; probs.len()];
    let mut heap: BinaryHeap<Reverse<Node>> = probs
        .iter()
        .enumerate()
        .filter(|(_, &q)| q > 0.0)
        .map(|(i, &q)| {
            Reverse(Node {
                prob: q,
                min_leaf: i,
                id: i,
            })
        })
        .collect();
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().expect("two nodes");
        let Reverse(b) = heap.pop().expect("two nodes");
        let id = children.len();
        children.push(Some((a.id, b.id)));
        heap.push(Reverse(Node {
            prob: a.prob + b.prob,
            min_leaf: a.min_leaf.min(b.min_leaf),
            id,
        }));
    }
    if let Some(Reverse(root)) = heap.pop() {
        let mut stack = vec![(root.id, Vec::new())];
        while let Some((id, prefix)) = stack.pop() {
            match children[id] {
                Some((zero, one)) => {
                    let mut p0 = prefix.clone();
                    p0.push(false);
                    let mut p1 = prefix;
                    p1.push(true);
                    stack.push((one, p1));
                    stack.push((zero, p0));
                }
                None => words[id] = Some(Bits(prefix)),
            }
        }
    }
    let expected_length = words
        .iter()
        .zip(probs)
        .map(|(w, &q)| w.as_ref().map_or(0.0, |w| q * w.len() as f64))
        .sum();
    Codebook {
        words,
        prefix_free: true,
        expected_length,
    }
}

/// Per-`y` Huffman codes of `p_{X|Y}(·|y)`, `None` where `p(y) = 0`.
pub fn conditional_codebooks(j: &JointPmf) -> Vec<Option<Codebook>> {
    (0..j.cols())
        .map(|y| {
            j.conditional_x_given_y(y)
                .map(|c| huffman(&Pmf::normalized(c).expect("conditional pmf")))
        })
        .collect()
}

/// Optimal expected lengths in the three settings next to the
/// conditional entropies that bracket them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EncodingReport {
    /// One-to-one code chosen with knowledge of `y`.
    pub ell_n: f64,
    /// Prefix-free code chosen with knowledge of `y`.
    pub ell_c: f64,
    /// One prefix-free code for all `y`, applied to `X\Y`.
    pub ell_u: f64,
    pub layered: f64,
    pub shannon: f64,
    pub compressed: f64,
}

impl EncodingReport {
    /// `Λ(X|Y) − 2 < ℓ_n ≤ Λ(X|Y)`.
    pub fn non_prefix_holds(&self, tol: f64) -> bool {
        self.layered - 2.0 < self.ell_n + tol && self.ell_n <= self.layered + tol
    }

    /// `H(X|Y) ≤ ℓ_c < H(X|Y) + 1`.
    pub fn cond_prefix_holds(&self, tol: f64) -> bool {
        self.shannon <= self.ell_c + tol && self.ell_c < self.shannon + 1.0 + tol
    }

    /// `H(X\Y) ≤ ℓ_u < H(X\Y) + 1`.
    pub fn uncond_prefix_holds(&self, tol: f64) -> bool {
        self.compressed <= self.ell_u + tol && self.ell_u < self.compressed + 1.0 + tol
    }

    pub fn all_hold(&self, tol: f64) -> bool {
        self.non_prefix_holds(tol) && self.cond_prefix_holds(tol) && self.uncond_prefix_holds(tol)
    }
}

pub fn conditional_encoding_report(j: &JointPmf) -> EncodingReport {
    let mut ell_n = 0.0;
    let mut ell_c = 0.0;
    for (py, cond) in j.conditionals() {
        let cond = Pmf::normalized(cond).expect("conditional pmf");
        ell_n += py * enumerative_code(&cond.sorted()).expected_length();
        ell_c += py * huffman(&cond).expected_length();
    }
    let u = compression_pmf(j);
    EncodingReport {
        ell_n,
        ell_c,
        ell_u: huffman(&u.to_pmf()).expected_length(),
        layered: cond_layered(j),
        shannon: cond_shannon(j),
        compressed: shannon_entropy(&u),
    }
}
