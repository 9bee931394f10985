//! Token featurization: text to tokens, tokens to 253-dim vectors.
//!
//! Each token vector concatenates a 200-dim word embedding, 36 sparse
//! surface indicators, and a 17-dim POS one-hot, in that order. Sparse
//! indicators use the value 0.1.

mod embeddings;
mod pos;
mod surface;
mod tokenizer;

pub use embeddings::{EmbeddingTable, EMBED_DIM};
pub use pos::{pos_one_hot, PosTag, INDICATOR, POS_DIM, POS_TAGS};
pub use surface::{surface_features, SPECIAL_CHARS, SURFACE_DIM};
pub use tokenizer::{tokenize, Token};

use crate::error::{Error, Result};

/// Total width of a vectorized token.
pub const TOKEN_DIM: usize = EMBED_DIM + SURFACE_DIM + POS_DIM;

/// A featurized token: `[embedding | surface | pos]`, 253 values.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenVector(Vec<f64>);

impl TokenVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn embedding_part(&self) -> &[f64] {
        &self.0[..EMBED_DIM]
    }

    pub fn surface_part(&self) -> &[f64] {
        &self.0[EMBED_DIM..EMBED_DIM + SURFACE_DIM]
    }

    pub fn pos_part(&self) -> &[f64] {
        &self.0[EMBED_DIM + SURFACE_DIM..]
    }
}

/// Builds the full token vector. The token must carry a POS tag.
pub fn vectorize(token: &Token, table: &EmbeddingTable) -> Result<TokenVector> {
    let pos = token.pos.ok_or_else(|| {
        Error::Usage(format!(
            "token {:?} has no POS tag; vectorize needs one",
            token.surface
        ))
    })?;
    let mut v = Vec::with_capacity(TOKEN_DIM);
    v.extend_from_slice(table.embed(&token.surface));
    v.extend_from_slice(&surface_features(&token.surface));
    v.extend_from_slice(&pos_one_hot(pos));
    debug_assert_eq!(v.len(), TOKEN_DIM);
    Ok(TokenVector(v))
}

/// Vectorizes a whole sentence.
pub fn vectorize_sentence(tokens: &[Token], table: &EmbeddingTable) -> Result<Vec<TokenVector>> {
    tokens.iter().map(|t| vectorize(t, table)).collect()
}
