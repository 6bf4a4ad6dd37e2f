//! Versioned model files.
//!
//! Every model is stored as pretty-printed JSON inside a small envelope:
//!
//! ```text
//! { "format": "fpc-model", "version": 1, "kind": "fpc" | "linear", "model": { ... } }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! save/load cycle reproduces every parameter bit for bit.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::baseline::LinearModel;
use crate::error::{Error, Result};
use crate::fpc::FpcModel;

pub const FORMAT_NAME: &str = "fpc-model";
pub const FORMAT_VERSION: u32 = 1;

/// A model type that can live in the shared envelope.
pub trait StoredModel: Serialize + DeserializeOwned {
    const KIND: &'static str;

    /// Structural checks run after loading.
    fn check(&self) -> Result<()>;
}

impl StoredModel for FpcModel {
    const KIND: &'static str = "fpc";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

impl StoredModel for LinearModel {
    const KIND: &'static str = "linear";

    fn check(&self) -> Result<()> {
        self.validate()
    }
}

#[derive(Serialize)]
struct EnvelopeOut<'a, M> {
    format: &'a str,
    version: u32,
    kind: &'a str,
    model: &'a M,
}

#[derive(Deserialize)]
struct EnvelopeIn {
    format: String,
    version: u32,
    kind: String,
    model: serde_json::Value,
}

pub fn save<M: StoredModel>(model: &M) -> Result<String> {
    let env = EnvelopeOut {
        format: FORMAT_NAME,
        version: FORMAT_VERSION,
        kind: M::KIND,
        model,
    };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| Error::MalformedModel(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn open(text: &str) -> Result<EnvelopeIn> {
    let env: EnvelopeIn = serde_json::from_str(text).map_err(|e| Error::MalformedModel(e.to_string()))?;
    if env.format != FORMAT_NAME {
        return Err(Error::MalformedModel(format!(
            "unknown format `{}` (expected `{FORMAT_NAME}`)",
            env.format
        )));
    }
    if env.version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: env.version,
            expected: FORMAT_VERSION,
        });
    }
    Ok(env)
}

pub fn load<M: StoredModel>(text: &str) -> Result<M> {
    let env = open(text)?;
    if env.kind != M::KIND {
        return Err(Error::KindMismatch {
            expected: M::KIND.into(),
            found: env.kind,
        });
    }
    let model: M = serde_json::from_value(env.model).map_err(|e| Error::MalformedModel(e.to_string()))?;
    model.check().map_err(|e| Error::MalformedModel(e.to_string()))?;
    Ok(model)
}

/// Either model kind, for tools that accept both.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Fpc(FpcModel),
    Linear(LinearModel),
}

pub fn load_any(text: &str) -> Result<AnyModel> {
    let kind = open(text)?.kind;
    match kind.as_str() {
        FpcModel::KIND => load(text).map(AnyModel::Fpc),
        LinearModel::KIND => load(text).map(AnyModel::Linear),
        other => Err(Error::MalformedModel(format!("unknown model kind `{other}`"))),
    }
}
