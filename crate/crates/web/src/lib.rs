//! WebAssembly bindings for the demo page in `www/`. Every export takes the
//! groupoid in the text format and returns a JSON string; errors come back
//! as a JS string.

use std::sync::Arc;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use eqsite::format::{parse_groupoid, parse_label_set, serialize};
use eqsite::galois::{dominates, gd_closure, is_definable};
use eqsite::generate::preset;
use eqsite::site::{Site, SiteObject};
use eqsite::OpenSubgroupoid;

fn js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

/// Text of a named preset groupoid.
#[wasm_bindgen]
pub fn preset_text(name: &str) -> Result<String, JsValue> {
    preset_source(name).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn site_summary(text: &str) -> Result<String, JsValue> {
    js(site_json(text))
}

#[wasm_bindgen]
pub fn hom_set(text: &str, source: &str, target: &str) -> Result<String, JsValue> {
    js(hom_json(text, source, target))
}

#[wasm_bindgen]
pub fn closure(text: &str, set: &str) -> Result<String, JsValue> {
    js(closure_json(text, set))
}

pub fn preset_source(name: &str) -> Result<String, String> {
    preset(name).map(|g| serialize(&g)).map_err(|e| e.to_string())
}

fn load_site(text: &str) -> Result<Site, String> {
    let g = parse_groupoid(text).map_err(|e| e.to_string())?;
    Site::new(Arc::new(g)).map_err(|e| e.to_string())
}

fn find<'a>(site: &'a Site, spec: &str) -> Result<&'a Arc<SiteObject>, String> {
    let g = site.groupoid();
    let arrows = parse_label_set(g.arrows(), spec).map_err(|e| e.to_string())?;
    let sub = OpenSubgroupoid::new(g, arrows).map_err(|e| e.to_string())?;
    site.object(sub).ok_or_else(|| format!("{} is not an open subgroupoid", sub.describe(g)))
}

/// Site objects with their elements and the matrix of hom-set sizes.
pub fn site_json(text: &str) -> Result<Value, String> {
    let site = load_site(text)?;
    let objects = site.objects();
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    for a in objects {
        rows.push(json!({
            "object": a.describe(),
            "arrows": site.groupoid().arrow_names(a.sub().arrows),
            "elements": a.sheaf().total().labels(),
        }));
        let mut row = Vec::new();
        for b in objects {
            row.push(site.hom(a, b).map_err(|e| e.to_string())?.len());
        }
        counts.push(row);
    }
    Ok(json!({ "objects": rows, "hom_counts": counts }))
}

/// Morphisms between two site objects named by their arrow lists.
pub fn hom_json(text: &str, source: &str, target: &str) -> Result<Value, String> {
    let site = load_site(text)?;
    let a = find(&site, source)?;
    let b = find(&site, target)?;
    let tsets = site.hom(a, b).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for t in &tsets {
        let graph = t.graph().map_err(|e| e.to_string())?;
        let map: Vec<(String, String)> = graph
            .graph
            .iter()
            .enumerate()
            .map(|(p, &q)| (a.sheaf().total().label(p).to_owned(), b.sheaf().total().label(q).to_owned()))
            .collect();
        out.push(json!({ "arrows": t.arrow_names(), "map": map }));
    }
    Ok(json!({ "source": a.describe(), "target": b.describe(), "morphisms": out }))
}

/// Domination closure of a set of objects, with a witness for each
/// excluded object.
pub fn closure_json(text: &str, set: &str) -> Result<Value, String> {
    let g = parse_groupoid(text).map_err(|e| e.to_string())?;
    let h0 = parse_label_set(g.objects(), set).map_err(|e| e.to_string())?;
    let closed = gd_closure(&g, h0).map_err(|e| e.to_string())?;
    let definable = is_definable(&g, h0).map_err(|e| e.to_string())?;
    let mut excluded = Vec::new();
    for x in g.all_objects().difference(closed).iter() {
        let q = dominates(&g, x, h0).map_err(|e| e.to_string())?;
        let witness = q.witness.map(|w| w.view(&g));
        excluded.push(json!({ "object": g.objects().label(x), "witness": witness }));
    }
    Ok(json!({
        "set": g.object_names(h0),
        "closure": g.object_names(closed),
        "definable": definable,
        "excluded": excluded,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_site() {
        let text = preset_source("Z2").unwrap();
        let v = site_json(&text).unwrap();
        assert_eq!(v["objects"].as_array().unwrap().len(), 3);
        assert_eq!(v["hom_counts"][1][1], 2);
    }

    #[test]
    fn z2_endomorphisms_of_regular_object() {
        let text = preset_source("Z2").unwrap();
        let v = hom_json(&text, "1", "1").unwrap();
        assert_eq!(v["morphisms"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn i2_closure_is_everything() {
        let text = preset_source("I2").unwrap();
        let v = closure_json(&text, "a").unwrap();
        assert_eq!(v["closure"], json!(["a", "b"]));
        assert_eq!(v["definable"], false);
    }

    #[test]
    fn d2_singleton_definable() {
        let text = preset_source("D2").unwrap();
        let v = closure_json(&text, "a").unwrap();
        assert_eq!(v["definable"], true);
        assert_eq!(v["excluded"][0]["object"], "b");
        assert!(v["excluded"][0]["witness"].is_object());
    }

    #[test]
    fn errors_are_strings() {
        assert!(hom_json("objects: a\n", "x", "y").is_err());
        assert!(preset_source("nope").is_err());
    }
}
