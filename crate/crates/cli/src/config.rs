//! Recipe and training-config files with command-line overrides.
//!
//! Files are JSON objects using the same keys as the service API. Flags are
//! written over the file's values before the object is decoded, so a
//! decoding error always names the key that caused it.

use std::collections::BTreeSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use variantkg_core::gnn::ModelConfig;
use variantkg_core::graph::GraphRecipe;

use crate::backend::{client_error, Res};

pub type Object = Map<String, Value>;

/// Reads a JSON object, or an empty one without a path.
pub fn read_object(path: Option<&Path>) -> Res<Object> {
    let Some(path) = path else {
        return Ok(Object::new());
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| client_error("config_error", format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(client_error("config_error", format!("{}: expected a JSON object", path.display()))),
        Err(e) => Err(client_error("config_error", format!("{}: {e}", path.display()))),
    }
}

pub fn set(obj: &mut Object, key: &str, v: Option<impl Serialize>) {
    if let Some(v) = v {
        obj.insert(key.to_string(), serde_json::to_value(v).expect("plain value"));
    }
}

/// Decodes `obj`, rejecting keys that `template` does not have.
pub fn decode<T: DeserializeOwned>(obj: Object, template: &impl Serialize, what: &str) -> Res<T> {
    let known: BTreeSet<String> = match serde_json::to_value(template) {
        Ok(Value::Object(m)) => m.into_iter().map(|(k, _)| k).collect(),
        _ => BTreeSet::new(),
    };
    if let Some(k) = obj.keys().find(|k| !known.contains(*k)) {
        let valid: Vec<_> = known.into_iter().collect();
        return Err(client_error("config_error", format!("{what}: unknown key '{k}' (valid: {})", valid.join(", "))));
    }
    let de = Value::Object(obj);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            client_error("config_error", format!("{what}: {}", e.inner()))
        } else {
            client_error("config_error", format!("{what}: key '{path}': {}", e.inner()))
        }
    })
}

pub fn recipe(obj: Object) -> Res<GraphRecipe> {
    decode(obj, &GraphRecipe::new(Vec::new(), ""), "recipe")
}

pub fn model_config(obj: Object) -> Res<ModelConfig> {
    decode(obj, &ModelConfig::default(), "config")
}
