//! JSON rendering of values: the type tag, the printed literal and the
//! type's components. Numbers are strings so they stay exact.

use hl7dt::interval::IntervalElement;
use hl7dt::numeric::DEFAULT_FRAC_DIGITS;
use hl7dt::terminology::CV_FIELDS;
use hl7dt::{AnyValue, ConceptRegistry, Ivl, Rational};
use serde_json::{json, Map, Value};

fn number(r: &Rational) -> Value {
    match r.terminating_digits() {
        Some(_) => Value::String(r.to_decimal_string(DEFAULT_FRAC_DIGITS)),
        None => Value::String(r.to_string()),
    }
}

fn interval<T: IntervalElement + std::fmt::Display>(i: &Ivl<T>, out: &mut Map<String, Value>) {
    let text = |v: Option<&T>| v.map_or(Value::Null, |v| Value::String(v.to_string()));
    out.insert("form".into(), json!(format!("{:?}", i.form()).to_lowercase()));
    out.insert("low".into(), text(i.low()));
    out.insert("high".into(), text(i.high()));
    out.insert("low_closed".into(), json!(i.low_closed()));
    out.insert("high_closed".into(), json!(i.high_closed()));
    out.insert("center".into(), text(i.center()));
    out.insert("width".into(), i.width().map_or(Value::Null, |w| json!(w.to_string())));
}

pub fn value(v: &AnyValue, terms: &ConceptRegistry) -> Value {
    let mut out = Map::new();
    out.insert("tag".into(), json!(v.tag().name()));
    out.insert("literal".into(), json!(v.to_string()));
    out.insert(
        "nullflavor".into(),
        v.flavor().map_or(Value::Null, |f| json!(f.symbol())),
    );
    match v {
        AnyValue::Null(_) => {}
        AnyValue::Bl(b) => {
            out.insert("value".into(), b.truth().map_or(Value::Null, Value::Bool));
        }
        AnyValue::Bn(b) => {
            out.insert("value".into(), json!(b.0));
        }
        AnyValue::Real(r) => {
            out.insert("value".into(), r.value().map_or(Value::Null, number));
            out.insert("precision".into(), json!(r.precision()));
        }
        AnyValue::Pq(p) => {
            out.insert("value".into(), p.value().map_or(Value::Null, number));
            out.insert("unit".into(), p.unit().map_or(Value::Null, |u| json!(u.to_string())));
            if let (Some(c), Some(u)) = (p.canonical_value(), p.unit()) {
                out.insert(
                    "canonical".into(),
                    json!({ "value": number(&c), "unit": u.canonical().base_expression() }),
                );
            }
        }
        AnyValue::Ts(t) => {
            if let Some(p) = t.point() {
                out.insert("offset_seconds".into(), number(p.offset()));
                out.insert("precision".into(), json!(format!("{:?}", p.precision()).to_lowercase()));
                out.insert("tz_minutes".into(), json!(p.tz()));
            }
        }
        AnyValue::IvlTs(i) => interval(i, &mut out),
        AnyValue::IvlPq(i) => interval(i, &mut out),
        AnyValue::Cv(c) => {
            for field in CV_FIELDS {
                let v = c.accessor(field, terms).ok().flatten();
                out.insert(field.into(), v.map_or(Value::Null, Value::String));
            }
        }
        AnyValue::Ii(i) => {
            out.insert("root".into(), json!(i.root()));
            out.insert("extension".into(), json!(i.extension()));
        }
        AnyValue::In(i) => {
            out.insert("root".into(), json!(i.root()));
            out.insert("extension".into(), json!(i.extension()));
        }
    }
    Value::Object(out)
}
