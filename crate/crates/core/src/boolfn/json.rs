//! On-disk function format.
//!
//! ```json
//! { "n": 3, "table": "e8", "junta": { "vars": [1, 2, 3], "inner_table": "e8" } }
//! ```
//!
//! Bit `i` of a table is the function value at integer index `i` (variable 1 is
//! the least significant bit). Bits are packed LSB-first into bytes and written
//! as lowercase hex; readers also accept a `base64:` prefix.

use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{BooleanFunction, JuntaBacking};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub n: usize,
    pub table: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junta: Option<JuntaFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JuntaFile {
    pub vars: Vec<usize>,
    pub inner_table: String,
}

/// Packs `bits` LSB-first and hex-encodes them.
pub fn encode_table(bits: impl IntoIterator<Item = bool>) -> String {
    let mut bytes = Vec::new();
    for (i, b) in bits.into_iter().enumerate() {
        if i % 8 == 0 {
            bytes.push(0u8);
        }
        if b {
            *bytes.last_mut().unwrap() |= 1 << (i % 8);
        }
    }
    hex::encode(bytes)
}

/// Decodes a table of exactly `len` bits.
pub fn decode_table(s: &str, len: usize) -> Result<Vec<bool>> {
    let bytes = match s.strip_prefix("base64:") {
        Some(b64) => base64::engine::general_purpose::STANDARD
            .decode(b64.trim())
            .map_err(|e| Error::Parse(format!("bad base64 table: {e}")))?,
        None => hex::decode(s.trim()).map_err(|e| Error::Parse(format!("bad hex table: {e}")))?,
    };
    if bytes.len() != len.div_ceil(8) {
        return Err(Error::Parse(format!(
            "table of {len} bits needs {} bytes, got {}",
            len.div_ceil(8),
            bytes.len()
        )));
    }
    let bits: Vec<bool> = (0..bytes.len() * 8).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect();
    if bits[len..].iter().any(|&b| b) {
        return Err(Error::Parse("nonzero padding bits in table".into()));
    }
    Ok(bits[..len].to_vec())
}

impl TryFrom<FunctionFile> for BooleanFunction {
    type Error = Error;

    fn try_from(file: FunctionFile) -> Result<Self> {
        super::check_dim(file.n)?;
        let bits = decode_table(&file.table, 1 << file.n)?;
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
            words[i / 64] |= 1 << (i % 64);
        }
        let mut f = BooleanFunction::from_words(file.n, words)?;
        if let Some(j) = file.junta {
            let inner = decode_table(&j.inner_table, 1 << j.vars.len())?;
            let structured = BooleanFunction::from_junta(file.n, j.vars, inner)?;
            if structured.table != f.table {
                return Err(Error::Parse("junta backing disagrees with the truth table".into()));
            }
            f = structured;
        }
        Ok(f)
    }
}

impl From<BooleanFunction> for FunctionFile {
    fn from(f: BooleanFunction) -> Self {
        let table = encode_table((0..1u32 << f.n).map(|x| f.eval_index(x)));
        let junta = f.junta.map(|JuntaBacking { vars, inner }| JuntaFile {
            vars,
            inner_table: encode_table(inner),
        });
        FunctionFile { n: f.n, table, junta }
    }
}
