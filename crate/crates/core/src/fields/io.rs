//! JSON document form of a [`SpectralField`].

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{FieldError, SpectralField};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub k: Vec<i64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// `{n, K, real_flag, entries: [{k, re, im}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDocument {
    pub n: usize,
    #[serde(rename = "K")]
    pub cutoff: usize,
    pub real_flag: bool,
    pub entries: Vec<FieldEntry>,
}

impl<T: Real> From<&SpectralField<T>> for FieldDocument {
    fn from(f: &SpectralField<T>) -> Self {
        let entries = f
            .coeffs()
            .iter()
            .map(|(k, v)| FieldEntry {
                k: k.clone(),
                re: v.iter().map(|c| c.re.to_f64_lossy()).collect(),
                im: v.iter().map(|c| c.im.to_f64_lossy()).collect(),
            })
            .collect();
        FieldDocument { n: f.n(), cutoff: f.cutoff(), real_flag: f.real_flag(), entries }
    }
}

impl FieldDocument {
    /// Validates the document and converts it to a field.
    pub fn into_field<T: Real>(self) -> Result<SpectralField<T>, FieldError> {
        let n = self.n;
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in self.entries {
            if e.re.len() != n || e.im.len() != n {
                return Err(FieldError::DimensionMismatch { expected: n, got: e.re.len().max(e.im.len()) });
            }
            if e.re.iter().chain(&e.im).any(|x| !x.is_finite()) {
                return Err(FieldError::Format(format!("non-finite coefficient at {:?}", e.k)));
            }
            let v = e.re.iter().zip(&e.im).map(|(r, i)| Complex::new(T::lit(*r), T::lit(*i))).collect();
            entries.push((e.k, v));
        }
        let count = entries.len();
        let field = SpectralField::from_entries(n, self.cutoff, self.real_flag, entries)?;
        if field.len() != count {
            return Err(FieldError::Format("duplicate frequency entries".into()));
        }
        Ok(field)
    }
}

pub fn load_field<T: Real>(path: &Path) -> Result<SpectralField<T>, FieldError> {
    let text = std::fs::read_to_string(path).map_err(|e| FieldError::Format(format!("{}: {e}", path.display())))?;
    let doc: FieldDocument = serde_json::from_str(&text).map_err(|e| FieldError::Format(e.to_string()))?;
    doc.into_field()
}

pub fn save_field<T: Real>(field: &SpectralField<T>, path: &Path) -> Result<(), FieldError> {
    let mut text = serde_json::to_string_pretty(&FieldDocument::from(field)).map_err(|e| FieldError::Format(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| FieldError::Format(format!("{}: {e}", path.display())))
}
