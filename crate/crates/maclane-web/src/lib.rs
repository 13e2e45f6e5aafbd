//! Browser bindings: cluster picture, invariant table and special fibre for a
//! polynomial typed into the demo page.

use maclane::arith::BaseField;
use maclane::clusters::{BuildOptions, ResidueMode};
use maclane::parse::parse_poly;
use maclane::report::{self, Analysis};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn analyse(p: u32, m: u32, expr: &str, geometric: bool) -> Result<Analysis, String> {
    let k = BaseField::unramified_default(p as u64, m as usize).map_err(|e| e.to_string())?;
    let f = parse_poly(&k, expr).map_err(|e| e.to_string())?;
    if f.len() < 2 {
        return Err("f must have positive degree".into());
    }
    let mode = if geometric { ResidueMode::Geometric } else { ResidueMode::Exact };
    let opts = BuildOptions { mode, extension_budget: 24, seed: 0 };
    report::analyse(&k, &f, &opts).map_err(|e| e.to_string())
}

fn header(a: &Analysis) -> String {
    format!("normalization shift c = {}\n", a.shift)
}

#[wasm_bindgen]
pub fn cluster_picture(p: u32, m: u32, expr: &str, geometric: bool) -> Result<String, String> {
    let a = analyse(p, m, expr, geometric)?;
    Ok(header(&a) + &report::picture_ascii(&a))
}

#[wasm_bindgen]
pub fn invariant_table(p: u32, m: u32, expr: &str, geometric: bool) -> Result<String, String> {
    let a = analyse(p, m, expr, geometric)?;
    Ok(header(&a) + &report::invariants_table(&a))
}

/// JSON {text, dot, graph}; `graph` holds {labels: [[mult, genus]], edges}
/// in geometric mode and is null otherwise.
#[wasm_bindgen]
pub fn special_fibre(p: u32, m: u32, expr: &str, geometric: bool) -> Result<String, String> {
    let a = analyse(p, m, expr, geometric)?;
    let dot = report::fibre_dot(&a).map_err(|e| e.to_string())?;
    let graph = if geometric {
        let g = a.fibre.dual_graph().map_err(|e| e.to_string())?;
        json!({ "labels": g.labels, "edges": g.edges })
    } else {
        serde_json::Value::Null
    };
    let out = json!({ "text": header(&a) + &report::fibre_ascii(&a), "dot": dot, "graph": graph });
    Ok(out.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEXTIC: &str = "(x^2-5)^3 - 5^5";

    #[test]
    fn exports_run_natively() {
        assert!(cluster_picture(5, 1, SEXTIC, false).unwrap().contains("radius 5/3"));
        assert!(invariant_table(5, 1, SEXTIC, false).unwrap().contains("gamma0"));
        let v: serde_json::Value = serde_json::from_str(&special_fibre(5, 1, SEXTIC, true).unwrap()).unwrap();
        assert_eq!(v["graph"]["labels"].as_array().unwrap().len(), 9);
        assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 8);
        let v: serde_json::Value = serde_json::from_str(&special_fibre(5, 1, SEXTIC, false).unwrap()).unwrap();
        assert!(v["graph"].is_null());
    }

    #[test]
    fn errors_are_messages() {
        assert!(cluster_picture(5, 1, "x +", false).unwrap_err().contains("position 3"));
        assert!(cluster_picture(4, 1, "x", false).is_err());
        assert!(invariant_table(5, 1, "(x-5)^2", false).is_err());
    }
}
