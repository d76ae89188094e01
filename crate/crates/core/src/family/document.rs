//! JSON family documents.
//!
//! ```json
//! {"grid_size": 32, "gap": 1.0, "kernel_dim": 1, "plus_dim": 2, "minus_dim": 1,
//!  "a_plus": [[[re, im], ...], ...], "nonzero_modes": {...}}
//! ```
//!
//! `a_plus[v]` holds `A⁺` at vertex `v = i·n + j` in row-major order.

use super::{BaseGrid, CMatrix, SpectralFamily};
use crate::error::{Error, Result};
use crate::spectrum::{save_spectrum, spectrum_from_value};
use num_complex::Complex64;
use serde_json::{json, Value};

fn doc_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Document { path: path.into(), message: message.into() }
}

fn field_u64(obj: &serde_json::Map<String, Value>, key: &str) -> Result<u64> {
    obj.get(key)
        .ok_or_else(|| doc_err(key, "missing field"))?
        .as_u64()
        .ok_or_else(|| doc_err(key, "expected a nonnegative integer"))
}

pub fn load_family(document: &str) -> Result<SpectralFamily> {
    let root: Value = serde_json::from_str(document)?;
    let obj = root.as_object().ok_or_else(|| doc_err("", "expected an object"))?;
    let n = field_u64(obj, "grid_size")? as usize;
    let grid = BaseGrid::new(n).map_err(|e| doc_err("grid_size", e.to_string()))?;
    let gap = obj
        .get("gap")
        .and_then(Value::as_f64)
        .ok_or_else(|| doc_err("gap", "expected a number"))?;
    if !(gap > 0.0) {
        return Err(doc_err("gap", "gap must be positive"));
    }
    let kernel_dim = u32::try_from(field_u64(obj, "kernel_dim")?).map_err(|_| doc_err("kernel_dim", "too large"))?;
    let p = field_u64(obj, "plus_dim")? as usize;
    let q = field_u64(obj, "minus_dim")? as usize;
    let list = obj
        .get("a_plus")
        .and_then(Value::as_array)
        .ok_or_else(|| doc_err("a_plus", "expected an array"))?;
    if list.len() != grid.vertex_count() {
        return Err(doc_err("a_plus", format!("expected {} matrices, got {}", grid.vertex_count(), list.len())));
    }
    let mut a_plus = Vec::with_capacity(list.len());
    for (v, m) in list.iter().enumerate() {
        let entries = m
            .as_array()
            .filter(|e| e.len() == p * q)
            .ok_or_else(|| doc_err(format!("a_plus[{v}]"), format!("expected {} entries", p * q)))?;
        let mut vals = Vec::with_capacity(p * q);
        for (k, e) in entries.iter().enumerate() {
            let pair = e
                .as_array()
                .filter(|x| x.len() == 2)
                .and_then(|x| Some(Complex64::new(x[0].as_f64()?, x[1].as_f64()?)))
                .ok_or_else(|| doc_err(format!("a_plus[{v}][{k}]"), "expected [re, im]"))?;
            vals.push(pair);
        }
        a_plus.push(CMatrix::from_row_slice(q, p, &vals));
    }
    let nonzero_modes = match obj.get("nonzero_modes") {
        None | Some(Value::Null) => None,
        Some(v) => Some(spectrum_from_value(v, "nonzero_modes")?),
    };
    SpectralFamily::new(grid, p, q, a_plus, gap, kernel_dim, nonzero_modes)
}

pub fn save_family(family: &SpectralFamily) -> String {
    let a_plus: Vec<Value> = family
        .a_plus()
        .iter()
        .map(|m| {
            let mut row_major = Vec::with_capacity(m.len());
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    row_major.push(json!([m[(i, j)].re, m[(i, j)].im]));
                }
            }
            Value::Array(row_major)
        })
        .collect();
    let modes = family
        .nonzero_modes()
        .map(|s| serde_json::from_str::<Value>(&save_spectrum(s)).expect("spectrum document is JSON"))
        .unwrap_or(Value::Null);
    let doc = json!({
        "grid_size": family.grid().size(),
        "gap": family.gap(),
        "kernel_dim": family.kernel_dim(),
        "plus_dim": family.plus_dim(),
        "minus_dim": family.minus_dim(),
        "a_plus": a_plus,
        "nonzero_modes": modes,
    });
    serde_json::to_string(&doc).expect("family document serialises")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::qwz_chiral_family;

    #[test]
    fn round_trip() {
        let f = qwz_chiral_family(8, 1.0).unwrap();
        let back = load_family(&save_family(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn wrong_shape_reported() {
        let f = qwz_chiral_family(8, 1.0).unwrap();
        let mut doc: Value = serde_json::from_str(&save_family(&f)).unwrap();
        doc["a_plus"][5] = json!([[1.0, 0.0]]);
        let err = load_family(&doc.to_string()).unwrap_err().to_string();
        assert!(err.contains("a_plus[5]"), "{err}");
    }
}
