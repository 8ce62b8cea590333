//! A toy video stream: frames coded conditionally on the previous frame,
//! with periodic keyframes coded on their own, sent in packets that may be
//! lost.
//!
//! With per-`y` prefix-free codes a decoder that has lost the previous
//! frame cannot tell where a word ends and may lose the next keyframe. With
//! a single prefix-free code for `X\Y` it stays in sync.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{conditional_codebooks, huffman, Bits, Codebook};
use crate::channels::{conditional_compression, CompressionResult, JointPmf, TiePolicy};
use crate::error::{Error, Result};
use crate::rng::Sampler;

/// `[bit count: u32 big-endian][bits, most significant first, zero padded]`.
pub fn pack_bits(bits: &Bits) -> Result<Vec<u8>> {
    let n = u32::try_from(bits.len())
        .map_err(|_| Error::Stream(format!("{} bits exceed the length header", bits.len())))?;
    let mut out = n.to_be_bytes().to_vec();
    out.extend(bits.0.chunks(8).map(|chunk| {
        chunk
            .iter()
            .enumerate()
            .fold(0u8, |b, (i, &bit)| b | (u8::from(bit) << (7 - i)))
    }));
    Ok(out)
}

pub fn unpack_bits(bytes: &[u8]) -> Result<Bits> {
    let header: [u8; 4] = bytes
        .get(..4)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| Error::Stream("missing length header".into()))?;
    let n = u32::from_be_bytes(header) as usize;
    let body = &bytes[4..];
    if body.len() != n.div_ceil(8) {
        return Err(Error::Stream(format!(
            "{n} bits need {} bytes, found {}",
            n.div_ceil(8),
            body.len()
        )));
    }
    Ok(Bits(
        (0..n)
            .map(|i| body[i / 8] >> (7 - i % 8) & 1 == 1)
            .collect(),
    ))
}

/// A first-order Markov frame source. `transition` has rows indexed by the
/// current frame and columns by the previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameModel {
    pub transition: JointPmf,
    pub keyframe_period: usize,
}

impl FrameModel {
    pub fn new(transition: JointPmf, keyframe_period: usize) -> Result<Self> {
        if transition.rows() != transition.cols() {
            return Err(Error::InvalidArgument(format!(
                "transition must be square, got {}x{}",
                transition.rows(),
                transition.cols()
            )));
        }
        if keyframe_period == 0 {
            return Err(Error::InvalidArgument(
                "keyframe period must be positive".into(),
            ));
        }
        Ok(Self {
            transition,
            keyframe_period,
        })
    }

    pub fn is_keyframe(&self, index: usize) -> bool {
        index % self.keyframe_period == 0
    }

    fn states(&self) -> usize {
        self.transition.rows()
    }
}

/// A frame sequence: the first from the marginal of the current frame,
/// each later one from `p(·|previous)`.
pub fn sample_frames(model: &FrameModel, n: usize, sampler: &mut Sampler) -> Vec<usize> {
    let draw = |p: &[f64], s: &mut Sampler| {
        let u = s.unit();
        let mut acc = 0.0;
        for (i, &q) in p.iter().enumerate() {
            acc += q;
            if u < acc {
                return i;
            }
        }
        p.iter().rposition(|&q| q > 0.0).unwrap_or(0)
    };
    let mut frames = Vec::with_capacity(n);
    let mut prev = None;
    for _ in 0..n {
        let p = match prev.and_then(|y| model.transition.conditional_x_given_y(y)) {
            Some(c) => c,
            None => model.transition.x_marginal(),
        };
        let x = draw(&p, sampler);
        frames.push(x);
        prev = Some(x);
    }
    frames
}

/// Reads `0`/`1` (or `.`/`x`) per frame, `1`/`x` meaning lost.
pub fn parse_loss_pattern(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' | '.' => Ok(false),
            '1' | 'x' => Ok(true),
            other => Err(Error::LossPattern(format!(
                "unexpected character {other:?}"
            ))),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamMode {
    /// Non-keyframes use a Huffman code of `p(·|previous)`.
    CondPrefix,
    /// Non-keyframes send the rank `X\Y` with one Huffman code.
    UncondPrefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameStatus {
    /// Every surviving parse agrees on the frame.
    Decoded,
    /// The bits were parsed but the frame is not determined.
    Ambiguous,
    /// The frame's packet was lost.
    Lost,
    /// No parse of the received bits reaches this frame.
    Desynchronized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameOutcome {
    pub index: usize,
    pub keyframe: bool,
    pub status: FrameStatus,
    pub decoded: Option<usize>,
    /// Whether `decoded` matches the frame that was sent.
    pub correct: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub mode: StreamMode,
    pub frames: Vec<FrameOutcome>,
    pub bits_sent: usize,
    pub first_loss: Option<usize>,
    /// The first keyframe after `first_loss` that was received.
    pub keyframe_after_loss: Option<usize>,
    pub keyframe_recovered: Option<bool>,
}

impl DemoReport {
    pub fn all_decoded(&self) -> bool {
        self.frames
            .iter()
            .all(|f| f.status == FrameStatus::Decoded && f.correct == Some(true))
    }
}

struct Coder {
    mode: StreamMode,
    keyframe: Codebook,
    conditional: Vec<Option<Codebook>>,
    compression: CompressionResult,
    rank_code: Codebook,
}

impl Coder {
    fn new(model: &FrameModel, mode: StreamMode) -> Result<Self> {
        let j = &model.transition;
        let compression = conditional_compression(j, TiePolicy::AscendingIndex)?;
        Ok(Self {
            mode,
            keyframe: huffman(&j.p_x()),
            conditional: conditional_codebooks(j),
            rank_code: huffman(compression.u_pmf()),
            compression,
        })
    }

    fn encode(&self, x: usize, prev: Option<usize>) -> Option<&Bits> {
        match (prev, self.mode) {
            (None, _) => self.keyframe.word(x),
            (Some(y), StreamMode::CondPrefix) => self.conditional.get(y)?.as_ref()?.word(x),
            (Some(y), StreamMode::UncondPrefix) => self.rank_code.word(self.compression.rank(x, y)),
        }
    }

    /// Every `(symbol, word length)` readable at the front of `bits` when
    /// the previous frame is `prev` (`None` for keyframes).
    fn parses(&self, bits: &[bool], prev: Option<usize>) -> Vec<(usize, usize)> {
        let parse = |book: &Codebook| book.decode_prefix(bits);
        match (prev, self.mode) {
            (None, _) => parse(&self.keyframe).into_iter().collect(),
            (Some(y), StreamMode::CondPrefix) => self
                .conditional
                .get(y)
                .and_then(Option::as_ref)
                .and_then(parse)
                .into_iter()
                .collect(),
            (Some(y), StreamMode::UncondPrefix) => parse(&self.rank_code)
                .and_then(|(u, len)| Some((self.compression.symbol(u, y)?, len)))
                .filter(|&(x, _)| {
                    self.conditional
                        .get(y)
                        .and_then(Option::as_ref)
                        .and_then(|c| c.word(x))
                        .is_some()
                })
                .into_iter()
                .collect(),
        }
    }
}

/// Encodes `frames`, drops the frames flagged in `loss`, and decodes what
/// arrives.
///
/// Received frames are grouped into packets, one per maximal run of
/// received frames. Each packet carries the index of its first frame and
/// the packed bits. Inside a packet the decoder follows every parse that is
/// consistent with what it knows, as a set of `(bit offset, previous
/// frame)` hypotheses, and reads no bits beyond the current word.
pub fn keyframe_stream_demo(
    frames: &[usize],
    loss: &[bool],
    model: &FrameModel,
    mode: StreamMode,
) -> Result<DemoReport> {
    if loss.len() != frames.len() {
        return Err(Error::LossPattern(format!(
            "{} loss flags for {} frames",
            loss.len(),
            frames.len()
        )));
    }
    if let Some(&x) = frames.iter().find(|&&x| x >= model.states()) {
        return Err(Error::InvalidArgument(format!(
            "frame value {x} outside an alphabet of {}",
            model.states()
        )));
    }
    let coder = Coder::new(model, mode)?;

    let mut words = Vec::with_capacity(frames.len());
    for (i, &x) in frames.iter().enumerate() {
        let prev = (!model.is_keyframe(i)).then(|| frames[i - 1]);
        let w = coder.encode(x, prev).ok_or_else(|| {
            Error::Stream(format!("frame {i} has zero probability under the model"))
        })?;
        words.push(w.clone());
    }
    let bits_sent = words.iter().map(Bits::len).sum();

    let mut packets: Vec<(usize, Vec<u8>)> = Vec::new();
    let mut i = 0;
    while i < frames.len() {
        if loss[i] {
            i += 1;
            continue;
        }
        let start = i;
        let mut bits = Bits::default();
        while i < frames.len() && !loss[i] {
            bits.0.extend_from_slice(&words[i].0);
            i += 1;
        }
        packets.push((start, pack_bits(&bits)?));
    }

    let mut outcomes: Vec<FrameOutcome> = (0..frames.len())
        .map(|index| FrameOutcome {
            index,
            keyframe: model.is_keyframe(index),
            status: FrameStatus::Lost,
            decoded: None,
            correct: None,
        })
        .collect();
    // Last frame value known to the decoder, tracked across packets.
    let mut known: Option<(usize, usize)> = None;
    for (start, bytes) in &packets {
        let bits = unpack_bits(bytes)?;
        let end = (*start..frames.len())
            .find(|&k| loss[k])
            .unwrap_or(frames.len());
        let initial: BTreeSet<(usize, Option<usize>)> = if model.is_keyframe(*start) {
            [(0, None)].into()
        } else {
            match known {
                Some((idx, x)) if idx + 1 == *start => [(0, Some(x))].into(),
                _ => (0..model.states()).map(|y| (0, Some(y))).collect(),
            }
        };
        let mut hyps = initial;
        for k in *start..end {
            let key = model.is_keyframe(k);
            let mut next = BTreeSet::new();
            for &(offset, prev) in &hyps {
                let context = if key { None } else { prev };
                if !key && prev.is_none() {
                    continue;
                }
                for (x, len) in coder.parses(&bits.0[offset..], context) {
                    next.insert((offset + len, Some(x)));
                }
            }
            let values: BTreeSet<usize> = next.iter().filter_map(|&(_, x)| x).collect();
            let outcome = &mut outcomes[k];
            outcome.status = match values.len() {
                0 => FrameStatus::Desynchronized,
                1 => FrameStatus::Decoded,
                _ => FrameStatus::Ambiguous,
            };
            if let (FrameStatus::Decoded, Some(&x)) = (outcome.status, values.first()) {
                outcome.decoded = Some(x);
                outcome.correct = Some(x == frames[k]);
                known = Some((k, x));
            }
            hyps = next;
        }
    }

    let first_loss = loss.iter().position(|&l| l);
    let keyframe_after_loss =
        first_loss.and_then(|f| (f + 1..frames.len()).find(|&k| model.is_keyframe(k) && !loss[k]));
    let keyframe_recovered = keyframe_after_loss
        .map(|k| outcomes[k].status == FrameStatus::Decoded && outcomes[k].correct == Some(true));
    Ok(DemoReport {
        mode,
        frames: outcomes,
        bits_sent,
        first_loss,
        keyframe_after_loss,
        keyframe_recovered,
    })
}
