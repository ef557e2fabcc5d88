//! Text ingestion, vocabulary construction and contiguous language-model
//! batching.
//!
//! Word mode follows the usual PTB conventions: whitespace tokens, literal
//! `<unk>` tokens kept as-is, `<eos>` appended per line. Char mode assigns
//! one id per distinct character and has no special tokens.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const UNK: &str = "<unk>";
pub const EOS: &str = "<eos>";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VocabMode {
    Word,
    Char,
}

/// Token table with dense ids 0..V-1.
#[derive(Clone, Debug)]
pub struct Vocab {
    mode: VocabMode,
    id_to_token: Vec<String>,
    token_to_id: HashMap<String, u32>,
    unk: Option<u32>,
    eos: Option<u32>,
}

impl Vocab {
    /// Rebuilds a vocabulary from an ordered token list (checkpoint load).
    pub fn from_tokens(mode: VocabMode, id_to_token: Vec<String>) -> Result<Vocab> {
        if id_to_token.is_empty() {
            return Err(Error::EmptyInput("vocabulary token list"));
        }
        let token_to_id: HashMap<String, u32> = id_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let unk = token_to_id.get(UNK).copied();
        let eos = token_to_id.get(EOS).copied();
        Ok(Vocab { mode, id_to_token, token_to_id, unk, eos })
    }

    pub fn mode(&self) -> VocabMode {
        self.mode
    }

    pub fn size(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.id_to_token[id as usize]
    }

    /// Encodes text to a token stream. Word mode maps unknown words to
    /// `<unk>`; char mode rejects characters outside the vocabulary.
    pub fn encode(&self, text: &str) -> Result<TokenStream> {
        let mut ids = Vec::new();
        match self.mode {
            VocabMode::Word => {
                let unk = self.unk.expect("word vocab always has <unk>");
                let eos = self.eos.expect("word vocab always has <eos>");
                for line in text.lines() {
                    for tok in line.split_whitespace() {
                        ids.push(self.id(tok).unwrap_or(unk));
                    }
                    ids.push(eos);
                }
            }
            VocabMode::Char => {
                let mut buf = [0u8; 4];
                for ch in text.chars() {
                    let s: &str = ch.encode_utf8(&mut buf);
                    match self.id(s) {
                        Some(id) => ids.push(id),
                        None => return Err(Error::UnknownToken(s.to_string())),
                    }
                }
            }
        }
        Ok(TokenStream(ids))
    }

    /// Inverse of `encode` up to `<unk>` substitution and whitespace
    /// normalization.
    pub fn decode(&self, ids: &[u32]) -> String {
        match self.mode {
            VocabMode::Word => {
                let mut out = String::new();
                let mut line_start = true;
                for &id in ids {
                    let tok = self.token(id);
                    if tok == EOS {
                        out.push('\n');
                        line_start = true;
                    } else {
                        if !line_start {
                            out.push(' ');
                        }
                        out.push_str(tok);
                        line_start = false;
                    }
                }
                out
            }
            VocabMode::Char => ids.iter().map(|&id| self.token(id)).collect(),
        }
    }
}

/// Builds a vocabulary from raw text.
///
/// Tokens are ranked by frequency descending, ties broken lexicographically
/// ascending, then truncated to `max_size`. Word mode always keeps `<unk>`
/// and `<eos>`.
pub fn build_vocab(text: &str, mode: VocabMode, max_size: usize) -> Result<Vocab> {
    if text.is_empty() {
        return Err(Error::EmptyInput("corpus text"));
    }
    let mut counts: HashMap<String, u64> = HashMap::new();
    match mode {
        VocabMode::Word => {
            if max_size < 2 {
                return Err(Error::VocabTooSmall(max_size));
            }
            for line in text.lines() {
                for tok in line.split_whitespace() {
                    *counts.entry(tok.to_string()).or_insert(0) += 1;
                }
                *counts.entry(EOS.to_string()).or_insert(0) += 1;
            }
            counts.entry(UNK.to_string()).or_insert(0);
            counts.entry(EOS.to_string()).or_insert(0);
        }
        VocabMode::Char => {
            let mut buf = [0u8; 4];
            for ch in text.chars() {
                *counts.entry(ch.encode_utf8(&mut buf).to_string()).or_insert(0) += 1;
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::EmptyInput("corpus text"));
    }

    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut tokens: Vec<String> = ranked.into_iter().map(|(t, _)| t).collect();

    if tokens.len() > max_size {
        if mode == VocabMode::Word {
            // Keep the specials even if frequency rank would drop them.
            let mut kept: Vec<String> = tokens[..max_size].to_vec();
            for special in [EOS, UNK] {
                if !kept.iter().any(|t| t == special) {
                    let evict = kept
                        .iter()
                        .rposition(|t| t != EOS && t != UNK)
                        .expect("max_size >= 2 leaves room for specials");
                    kept[evict] = special.to_string();
                }
            }
            tokens = kept;
        } else {
            tokens.truncate(max_size);
        }
    }
    Vocab::from_tokens(mode, tokens)
}

/// A sequence of token ids, all below the owning vocabulary's size.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenStream(pub Vec<u32>);

impl TokenStream {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// One BPTT window: `inputs[b][t]`'s target is the next token in lane `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub inputs: Vec<Vec<u32>>,
    pub targets: Vec<Vec<u32>>,
}

/// Iterator over contiguous training windows.
pub struct Batches<'a> {
    lanes: Vec<&'a [u32]>,
    seqlen: usize,
    window: usize,
    windows: usize,
}

impl<'a> Iterator for Batches<'a> {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        if self.window >= self.windows {
            return None;
        }
        let start = self.window * self.seqlen;
        let inputs = self.lanes.iter().map(|l| l[start..start + self.seqlen].to_vec()).collect();
        let targets =
            self.lanes.iter().map(|l| l[start + 1..start + self.seqlen + 1].to_vec()).collect();
        self.window += 1;
        Some(Batch { inputs, targets })
    }
}

impl<'a> ExactSizeIterator for Batches<'a> {
    fn len(&self) -> usize {
        self.windows - self.window
    }
}

/// Splits the stream into `batch` contiguous lanes and yields
/// `(inputs, targets)` windows of `seqlen`, targets shifted by one. The
/// trailing remainder of each lane is dropped.
pub fn batchify(stream: &TokenStream, batch: usize, seqlen: usize) -> Result<Batches<'_>> {
    if batch == 0 || seqlen == 0 {
        return Err(Error::StreamTooShort { len: stream.len(), batch, seqlen });
    }
    let lane_len = stream.len() / batch;
    // Each window needs seqlen inputs plus one lookahead token for targets.
    let windows = if lane_len == 0 { 0 } else { (lane_len - 1) / seqlen };
    if windows == 0 {
        return Err(Error::StreamTooShort { len: stream.len(), batch, seqlen });
    }
    let lanes = (0..batch)
        .map(|b| &stream.as_slice()[b * lane_len..(b + 1) * lane_len])
        .collect();
    Ok(Batches { lanes, seqlen, window: 0, windows })
}
