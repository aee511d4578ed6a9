//! Physical quantities (PQ): a rational value with a UCUM unit.
//!
//! Two quantities are *equal* when their canonical values coincide (`1 m`
//! and `100 cm`) and *identical* only when value and unit terms are the same.
//! Nullflavored quantities may keep a unit, which places `trc ml`, `ninf m`
//! and `pinf m` on the axis of their dimension. An `oth` value may carry a
//! shadow value but never satisfies a comparison.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::logic::Bl;
use crate::nullflavor::NullFlavor;
use crate::numeric::{decimal_prefix_len, parse_decimal, Rational, DEFAULT_FRAC_DIGITS};
use crate::ucum::{Dims, UnitExpr, UnitRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pq {
    flavor: Option<NullFlavor>,
    value: Option<Rational>,
    unit: Option<UnitExpr>,
}

/// Index discipline: compare by canonical value only, or additionally by the
/// literal unit and value so that `1 m` and `100 cm` are distinct keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discipline {
    EqualOps,
    IdenticalOps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl FromStr for Comparison {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lt" | "<" => Comparison::Lt,
            "le" | "<=" => Comparison::Le,
            "eq" | "equal" | "=" => Comparison::Eq,
            "ge" | ">=" => Comparison::Ge,
            "gt" | ">" => Comparison::Gt,
            _ => return Err(Error::parse("comparison", s, "expected lt, le, eq, ge or gt")),
        })
    }
}

impl Comparison {
    fn holds(self, ord: Ordering) -> bool {
        match self {
            Comparison::Lt => ord == Ordering::Less,
            Comparison::Le => ord != Ordering::Greater,
            Comparison::Eq => ord == Ordering::Equal,
            Comparison::Ge => ord != Ordering::Less,
            Comparison::Gt => ord == Ordering::Greater,
        }
    }
}

/// Place of a quantity on the axis of its dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Position {
    NegInf,
    Value(Rational),
    /// Above zero, below every positive value.
    Trace,
    PosInf,
}

impl Position {
    pub fn cmp(&self, other: &Position) -> Ordering {
        use Position::*;
        let rank = |p: &Position| match p {
            NegInf => 0,
            Value(_) | Trace => 1,
            PosInf => 2,
        };
        match (self, other) {
            (Value(a), Value(b)) => a.cmp(b),
            (Trace, Trace) => Ordering::Equal,
            (Trace, Value(v)) => {
                if v.is_positive() {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (Value(_), Trace) => other.cmp(self).reverse(),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl Pq {
    pub fn new(value: Rational, unit: UnitExpr) -> Pq {
        Pq {
            flavor: None,
            value: Some(value),
            unit: Some(unit),
        }
    }

    pub fn null(nf: NullFlavor) -> Pq {
        Pq {
            flavor: Some(nf),
            value: None,
            unit: None,
        }
    }

    /// A nullflavor positioned in a dimension, e.g. `trc ml`.
    pub fn null_with_unit(nf: NullFlavor, unit: UnitExpr) -> Pq {
        Pq {
            flavor: Some(nf),
            value: None,
            unit: Some(unit),
        }
    }

    /// `oth` carrying the out-of-domain value it stands for.
    pub fn other_with_shadow(value: Rational, unit: UnitExpr) -> Pq {
        Pq {
            flavor: Some(NullFlavor::Oth),
            value: Some(value),
            unit: Some(unit),
        }
    }

    pub fn flavor(&self) -> Option<NullFlavor> {
        self.flavor
    }

    pub fn is_null(&self) -> bool {
        self.flavor.is_some()
    }

    /// The value; for `oth` this is the shadow value, if any.
    pub fn value(&self) -> Option<&Rational> {
        self.value.as_ref()
    }

    pub fn unit(&self) -> Option<&UnitExpr> {
        self.unit.as_ref()
    }

    pub fn dims(&self) -> Option<&Dims> {
        self.unit.as_ref().map(UnitExpr::dims)
    }

    /// `value × factor` in base units, for non-null quantities.
    pub fn canonical_value(&self) -> Option<Rational> {
        match (self.flavor, &self.value, &self.unit) {
            (None, Some(v), Some(u)) => Some(v * &u.canonical().factor),
            _ => None,
        }
    }

    pub(crate) fn position(&self) -> Option<Position> {
        match self.flavor {
            None => self.canonical_value().map(Position::Value),
            Some(NullFlavor::Ninf) => Some(Position::NegInf),
            Some(NullFlavor::Pinf) => Some(Position::PosInf),
            Some(NullFlavor::Trc) => Some(Position::Trace),
            Some(_) => None,
        }
    }

    pub fn compares(&self, other: &Pq) -> bool {
        match (&self.unit, &other.unit) {
            (Some(a), Some(b)) => a.compares(b),
            _ => false,
        }
    }

    pub fn parse(s: &str, reg: &UnitRegistry) -> Result<Pq> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::parse("PQ", s, "empty literal"));
        }
        if let Ok(nf) = NullFlavor::parse(t) {
            return Ok(Pq::null(nf));
        }
        if let Some((head, rest)) = t.split_once(char::is_whitespace) {
            if let Ok(nf) = NullFlavor::parse(head) {
                return Ok(Pq::null_with_unit(nf, reg.parse(rest.trim())?));
            }
        }
        let n = decimal_prefix_len(t);
        if n == 0 {
            return Err(Error::parse("PQ", s, "expected a number or a nullflavor"));
        }
        let (value, _) = parse_decimal(&t[..n])?;
        let mut rest = t[n..].trim_start();
        let mut shadow = None;
        if let Some((unit_part, last)) = rest.rsplit_once(char::is_whitespace) {
            if let Ok(nf) = NullFlavor::parse(last) {
                if nf != NullFlavor::Oth {
                    return Err(Error::parse("PQ", s, "only oth may carry a value"));
                }
                shadow = Some(nf);
                rest = unit_part.trim_end();
            }
        }
        let unit = if rest.is_empty() {
            reg.parse("1")?
        } else {
            reg.parse(rest)?
        };
        Ok(match shadow {
            Some(_) => Pq::other_with_shadow(value, unit),
            None => Pq::new(value, unit),
        })
    }

    /// Canonical-value equality.
    pub fn equal(&self, other: &Pq) -> Bl {
        self.compare(Comparison::Eq, other)
    }

    /// Sameness of value and unit terms.
    pub fn identical(&self, other: &Pq) -> Bl {
        if let Some(b) = Bl::propagate(self.flavor, other.flavor) {
            return b;
        }
        Bl::from(self.value == other.value && self.unit == other.unit)
    }

    /// Relational predicate. Non-comparable units give `false`. `oth` never
    /// satisfies a predicate; `trc`, `ninf` and `pinf` take part through
    /// their position on the axis.
    pub fn compare(&self, op: Comparison, other: &Pq) -> Bl {
        if self.flavor == Some(NullFlavor::Oth) || other.flavor == Some(NullFlavor::Oth) {
            return Bl::propagate(self.flavor, other.flavor).expect("one side is oth");
        }
        if let (Some(a), Some(b)) = (&self.unit, &other.unit) {
            if !a.compares(b) {
                return Bl::FALSE;
            }
        }
        match (self.position(), other.position()) {
            (Some(pa), Some(pb)) if self.unit.is_some() && other.unit.is_some() => {
                if let Some(nf) = self.flavor.filter(|f| other.flavor == Some(*f)) {
                    // two traces (or two infinities) are not known to coincide
                    return Bl::null_lossy(nf);
                }
                Bl::from(op.holds(pa.cmp(&pb)))
            }
            _ => Bl::propagate(self.flavor, other.flavor).unwrap_or(Bl::FALSE),
        }
    }

    pub fn convert(&self, target: &UnitExpr) -> Result<Pq> {
        if let Some(nf) = self.flavor {
            return Err(Error::NullOperand(nf.to_string()));
        }
        let unit = self.unit.as_ref().expect("non-null PQ has a unit");
        if !unit.compares(target) {
            return Err(Error::NotComparable {
                left: unit.to_string(),
                right: target.to_string(),
            });
        }
        let v = self.value.as_ref().expect("non-null PQ has a value");
        let factor = unit.canonical().factor.checked_div(&target.canonical().factor)?;
        Ok(Pq::new(v * &factor, target.clone()))
    }

    fn additive(&self, other: &Pq, negate: bool) -> Result<Pq> {
        if let (Some(a), Some(b)) = (&self.unit, &other.unit) {
            if !a.compares(b) {
                return Err(Error::NotComparable {
                    left: a.to_string(),
                    right: b.to_string(),
                });
            }
        }
        if let Some(nf) = match (self.flavor, other.flavor) {
            (None, None) => None,
            (Some(a), Some(b)) => Some(a.lca(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
        } {
            return Ok(match self.unit.clone().or_else(|| other.unit.clone()) {
                Some(u) => Pq::null_with_unit(nf, u),
                None => Pq::null(nf),
            });
        }
        let unit = self.unit.as_ref().expect("non-null");
        let rhs = other.convert(unit)?;
        let (a, b) = (self.value.as_ref().expect("non-null"), rhs.value.expect("non-null"));
        let v = if negate { a - &b } else { a + &b };
        Ok(Pq::new(v, unit.clone()))
    }

    /// `self + other`, in `self`'s unit.
    pub fn plus(&self, other: &Pq) -> Result<Pq> {
        self.additive(other, false)
    }

    pub fn minus(&self, other: &Pq) -> Result<Pq> {
        self.additive(other, true)
    }

    pub fn scale(&self, k: &Rational) -> Pq {
        match (&self.flavor, &self.value) {
            (None, Some(v)) => Pq {
                value: Some(v * k),
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    pub fn negate(&self) -> Pq {
        self.scale(&Rational::from(-1))
    }

    /// Total order used by sorted indexes.
    ///
    /// Quantities with a unit are grouped by dimension vector, then ordered
    /// `ninf < values (trc just above zero) < pinf < other flavors by symbol
    /// < oth`. Flavors without a unit sort after every dimension group.
    pub fn order(&self, other: &Pq, discipline: Discipline) -> Ordering {
        let group = |p: &Pq| p.unit.as_ref().map(|u| *u.dims());
        let rank = |p: &Pq| match p.flavor {
            Some(NullFlavor::Ninf) => 0,
            None | Some(NullFlavor::Trc) => 1,
            Some(NullFlavor::Pinf) => 2,
            Some(NullFlavor::Oth) => 4,
            Some(_) => 3,
        };
        let by_group = match (group(self), group(other)) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        let primary = by_group.then_with(|| rank(self).cmp(&rank(other))).then_with(|| {
            match (self.position(), other.position()) {
                (Some(a), Some(b)) if self.unit.is_some() => a.cmp(&b),
                _ => {
                    let sym = |p: &Pq| p.flavor.map(NullFlavor::symbol).unwrap_or("");
                    sym(self).cmp(sym(other))
                }
            }
        });
        match discipline {
            Discipline::EqualOps => primary,
            Discipline::IdenticalOps => primary
                .then_with(|| {
                    let u = |p: &Pq| p.unit.as_ref().map(|u| u.to_string());
                    u(self).cmp(&u(other))
                })
                .then_with(|| self.value.cmp(&other.value)),
        }
    }

    pub fn to_literal(&self, max_frac_digits: u32) -> String {
        let unit = self.unit.as_ref().filter(|u| !u.is_unity()).map(|u| u.to_string());
        let value = self.value.as_ref().map(|v| v.to_decimal_string(max_frac_digits));
        match (self.flavor, value, unit) {
            (None, Some(v), Some(u)) => format!("{v} {u}"),
            (None, Some(v), None) => v,
            (Some(nf), Some(v), Some(u)) => format!("{v} {u} {nf}"),
            (Some(nf), Some(v), None) => format!("{v} {nf}"),
            (Some(nf), None, Some(u)) => format!("{nf} {u}"),
            (Some(nf), None, None) => nf.to_string(),
            (None, None, _) => unreachable!("non-null PQ has a value"),
        }
    }
}

impl fmt::Display for Pq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal(DEFAULT_FRAC_DIGITS))
    }
}

impl FromStr for Pq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pq::parse(s, UnitRegistry::standard())
    }
}

/// Sum in the unit of the first element; empty input yields `None`.
pub fn sum<'a>(items: impl IntoIterator<Item = &'a Pq>) -> Result<Option<Pq>> {
    let mut acc: Option<Pq> = None;
    for p in items {
        acc = Some(match acc {
            None => p.clone(),
            Some(a) => a.plus(p)?,
        });
    }
    Ok(acc)
}

/// Mean computed as the sum scaled by `1/n`.
pub fn average<'a>(items: impl IntoIterator<Item = &'a Pq>) -> Result<Option<Pq>> {
    let items: Vec<&Pq> = items.into_iter().collect();
    let n = items.len() as i64;
    Ok(sum(items)?.map(|s| s.scale(&Rational::new(1, n.max(1)).expect("n >= 1"))))
}

/// A PQ flavor: quantities whose unit compares to a fixed unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PqFlavor {
    pub name: String,
    pub predicate: UnitExpr,
}

impl PqFlavor {
    pub fn new(name: &str, predicate_unit: &str, reg: &UnitRegistry) -> Result<PqFlavor> {
        Ok(PqFlavor {
            name: name.to_string(),
            predicate: reg.parse(predicate_unit)?,
        })
    }

    /// `pq_time`: units that compare to seconds.
    pub fn time() -> PqFlavor {
        PqFlavor::new("pq_time", "s", UnitRegistry::standard()).expect("s is a base unit")
    }

    pub fn constraint_name(&self) -> String {
        format!("{}_compares_to_{}", self.name, self.predicate)
    }

    /// Unit check; a nullflavor without a unit passes.
    pub fn check(&self, p: &Pq) -> bool {
        p.unit().is_none_or(|u| u.compares(&self.predicate))
    }

    pub fn admit(&self, p: Pq) -> Result<Pq> {
        if self.check(&p) {
            Ok(p)
        } else {
            Err(Error::ConstraintViolation {
                flavor: self.name.clone(),
                constraint: self.constraint_name(),
            })
        }
    }
}
