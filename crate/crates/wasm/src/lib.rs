//! Browser bindings for the demo page. Every export returns a JSON string;
//! the plain functions below are what the page calls, and they are tested
//! natively.

use hl7dt::interval::{Bound, IntervalElement};
use hl7dt::logic::{all_values, truth_table, BinaryOp};
use hl7dt::quantity::{Comparison, Position};
use hl7dt::{Ivl, LogicMode, Pq, Ts, UnitRegistry};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `{"op", "mode", "axis": [...], "rows": [[...]]}` for and, or, xor or implies.
pub fn truth_table_json(op: &str, mode: &str) -> Result<String, String> {
    let op: BinaryOp = op.parse().map_err(err)?;
    let mode: LogicMode = mode.parse().map_err(err)?;
    let grid = truth_table(op, mode);
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect())
        .collect();
    let axis: Vec<String> = all_values().iter().map(ToString::to_string).collect();
    Ok(
        json!({ "op": op.to_string(), "mode": format!("{mode:?}").to_lowercase(), "axis": axis, "rows": rows })
            .to_string(),
    )
}

/// Converts `from` into `to`, and reports how the two relate when `to` is
/// itself a quantity literal.
pub fn pq_json(from: &str, to: &str) -> Result<String, String> {
    let reg = UnitRegistry::standard();
    let a = Pq::parse(from, reg).map_err(err)?;
    let mut out = json!({ "input": a.to_string() });
    if let Ok(unit) = reg.parse(to) {
        out["converted"] = match a.convert(&unit) {
            Ok(p) => json!(p.to_string()),
            Err(e) => json!({ "error": e.to_string() }),
        };
    }
    if let Ok(b) = Pq::parse(to, reg) {
        let cmp = |op| a.compare(op, &b).to_string();
        out["compare"] = json!({
            "other": b.to_string(),
            "comparable": a.compares(&b),
            "equal": a.equal(&b).to_string(),
            "identical": a.identical(&b).to_string(),
            "lt": cmp(Comparison::Lt),
            "le": cmp(Comparison::Le),
            "gt": cmp(Comparison::Gt),
            "ge": cmp(Comparison::Ge),
        });
    }
    if out.get("converted").is_none() && out.get("compare").is_none() {
        return Err(format!("'{to}' is neither a unit nor a quantity"));
    }
    Ok(out.to_string())
}

fn position(p: &Position) -> Value {
    match p {
        Position::NegInf => json!("-inf"),
        Position::PosInf => json!("+inf"),
        Position::Trace => json!(0.0),
        Position::Value(v) => json!(v.to_f64()),
    }
}

fn bound(b: &Bound) -> Value {
    json!({ "at": position(&b.pos), "closed": b.closed })
}

fn describe<T: IntervalElement + std::fmt::Display>(i: &Ivl<T>) -> Value {
    let bounds = i.bounds();
    json!({
        "literal": i.to_string(),
        "form": format!("{:?}", i.form()).to_lowercase(),
        "low": bounds.as_ref().map(|b| bound(&b.0)),
        "high": bounds.as_ref().map(|b| bound(&b.1)),
    })
}

fn relate_as<T: IntervalElement + std::fmt::Display>(a: &str, b: &str) -> Result<String, String> {
    let reg = UnitRegistry::standard();
    let x: Ivl<T> = Ivl::parse(a, reg).map_err(err)?;
    let y: Ivl<T> = match Ivl::parse(b, reg) {
        Ok(y) if y.bounds().is_some() => y,
        _ => Ivl::point(T::parse_element(b, reg).map_err(err)?),
    };
    Ok(json!({
        "a": describe(&x),
        "b": describe(&y),
        "contains": x.contains(&y).map_err(err)?.to_string(),
        "contained_by": y.contains(&x).map_err(err)?.to_string(),
        "overlaps": x.overlaps(&y).map_err(err)?.to_string(),
        "equal": x.equal(&y).to_string(),
    })
    .to_string())
}

/// Relations between two intervals of kind `pq` or `ts`; `b` may also be a
/// single element. Bounds are returned as plain numbers for plotting (seconds
/// since 0001-01-01 for timestamps).
pub fn relate_json(kind: &str, a: &str, b: &str) -> Result<String, String> {
    match kind {
        "pq" | "ivl-pq" => relate_as::<Pq>(a, b),
        "ts" | "ivl-ts" => relate_as::<Ts>(a, b),
        other => Err(format!("unknown interval kind '{other}'")),
    }
}

#[wasm_bindgen(js_name = truthTable)]
pub fn truth_table_js(op: &str, mode: &str) -> Result<String, JsValue> {
    truth_table_json(op, mode).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = pq)]
pub fn pq_js(from: &str, to: &str) -> Result<String, JsValue> {
    pq_json(from, to).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = relate)]
pub fn relate_js(kind: &str, a: &str, b: &str) -> Result<String, JsValue> {
    relate_json(kind, a, b).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn table() {
        let t = parse(&truth_table_json("and", "altered").unwrap());
        assert_eq!(t["axis"].as_array().unwrap().len(), 11);
        let na = t["axis"].as_array().unwrap().iter().position(|v| v == "na").unwrap();
        assert!(t["rows"][na].as_array().unwrap().iter().all(|c| c == "false"));
        assert_eq!(parse(&truth_table_json("or", "hl7").unwrap())["rows"][9][0], "true");
        assert!(truth_table_json("nand", "hl7").is_err());
    }

    #[test]
    fn quantities() {
        let v = parse(&pq_json("120 ml", "l").unwrap());
        assert_eq!(v["converted"], "0.12 l");
        let v = parse(&pq_json("1 m", "100 cm").unwrap());
        assert_eq!(v["compare"]["equal"], "true");
        assert_eq!(v["compare"]["identical"], "false");
        let v = parse(&pq_json("trc ml", "0 ml").unwrap());
        assert_eq!(v["compare"]["gt"], "true");
        let v = parse(&pq_json("10 ml", "s").unwrap());
        assert!(v["converted"]["error"].as_str().unwrap().contains("does not compare"));
        assert!(pq_json("10 ml", "%%").is_err());
        assert!(pq_json("ten ml", "l").is_err());
    }

    #[test]
    fn intervals() {
        let v = parse(&relate_json("ts", "[2000;2003[", "2001..2002").unwrap());
        assert_eq!(v["contains"], "true");
        assert_eq!(v["a"]["high"]["closed"], false);
        let v = parse(&relate_json("pq", "[3ml;5ml]", "4 ml").unwrap());
        assert_eq!(v["contains"], "true");
        assert_eq!(v["b"]["low"]["at"], 4e-6);
        let v = parse(&relate_json("pq", "<5 m", "[1 m;2 m]").unwrap());
        assert_eq!(v["a"]["low"]["at"], "-inf");
        assert_eq!(v["overlaps"], "true");
        assert!(relate_json("xx", "[1 m;2 m]", "1 m").is_err());
    }
}
