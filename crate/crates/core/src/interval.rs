//! Intervals over ordered quantities: `IVL<TS>` and `IVL<PQ>`.
//!
//! A bound written at a coarse precision stands for the whole period it
//! denotes: a closed `2008` low bound starts at 2008-01-01, a closed `2009`
//! high bound runs to the end of 2009, and an open `2009` high bound stops
//! at the start of 2009. Quantities are points, so their bounds are exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::anyvalue::TypeTag;
use crate::error::{Error, Result};
use crate::logic::{Bl, LogicMode};
use crate::nullflavor::NullFlavor;
use crate::numeric::Rational;
use crate::quantity::{Position, Pq};
use crate::time::{Precision, Ts, TsPoint, MAX_FRACTION_DIGITS};
use crate::ucum::{Dims, UnitRegistry};

/// An element type intervals can be built over.
pub trait IntervalElement: Clone + PartialEq + fmt::Debug + fmt::Display + Sized {
    const TAG: TypeTag;
    const HAS_HULL: bool;
    const HAS_DASH: bool;

    fn parse_element(s: &str, reg: &UnitRegistry) -> Result<Self>;

    fn flavor(&self) -> Option<NullFlavor>;

    /// Start and end of the period the element covers; equal for a point.
    fn extent(&self) -> Option<(Position, Position)>;

    fn dims(&self) -> Option<Dims>;

    /// `ninf` or `pinf` on the axis of `like`.
    fn infinity(nf: NullFlavor, like: &Self) -> Self;

    fn offset_by(&self, delta: &Pq) -> Result<Self>;
}

impl IntervalElement for Pq {
    const TAG: TypeTag = TypeTag::IvlPq;
    const HAS_HULL: bool = false;
    const HAS_DASH: bool = true;

    fn parse_element(s: &str, reg: &UnitRegistry) -> Result<Pq> {
        Pq::parse(s, reg)
    }

    fn flavor(&self) -> Option<NullFlavor> {
        Pq::flavor(self)
    }

    fn extent(&self) -> Option<(Position, Position)> {
        self.unit()?;
        self.position().map(|p| (p.clone(), p))
    }

    fn dims(&self) -> Option<Dims> {
        Pq::dims(self).copied()
    }

    fn infinity(nf: NullFlavor, like: &Pq) -> Pq {
        match like.unit() {
            Some(u) => Pq::null_with_unit(nf, u.clone()),
            None => Pq::null(nf),
        }
    }

    fn offset_by(&self, delta: &Pq) -> Result<Pq> {
        self.plus(delta)
    }
}

fn seconds_dims() -> Dims {
    *UnitRegistry::standard().parse("s").expect("s").dims()
}

impl IntervalElement for Ts {
    const TAG: TypeTag = TypeTag::IvlTs;
    const HAS_HULL: bool = true;
    const HAS_DASH: bool = false;

    fn parse_element(s: &str, _reg: &UnitRegistry) -> Result<Ts> {
        Ts::parse(s)
    }

    fn flavor(&self) -> Option<NullFlavor> {
        Ts::flavor(self)
    }

    fn extent(&self) -> Option<(Position, Position)> {
        match self {
            Ts::Point(p) => {
                let (s, e) = p.span();
                Some((Position::Value(s), Position::Value(e)))
            }
            _ => self.position().map(|p| (p.clone(), p)),
        }
    }

    fn dims(&self) -> Option<Dims> {
        Some(seconds_dims())
    }

    fn infinity(nf: NullFlavor, _like: &Ts) -> Ts {
        Ts::Null(nf)
    }

    fn offset_by(&self, delta: &Pq) -> Result<Ts> {
        self.shift(delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IvlForm {
    Interval,
    Comparator,
    CenterWidth,
    Width,
    Center,
    Any,
    Hull,
    Dash,
}

/// An effective endpoint on the axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub pos: Position,
    pub closed: bool,
}

impl Bound {
    fn same(&self, other: &Bound) -> bool {
        self.pos.cmp(&other.pos) == Ordering::Equal && self.closed == other.closed
    }
}

fn is_infinite(p: &Position) -> bool {
    matches!(p, Position::NegInf | Position::PosInf)
}

fn low_bound(ext: (Position, Position), closed: bool) -> Bound {
    let (start, end) = ext;
    if is_infinite(&start) {
        return Bound {
            pos: start,
            closed: false,
        };
    }
    match (closed, start == end) {
        (true, _) => Bound {
            pos: start,
            closed: true,
        },
        (false, true) => Bound {
            pos: start,
            closed: false,
        },
        (false, false) => Bound { pos: end, closed: true },
    }
}

fn high_bound(ext: (Position, Position), closed: bool) -> Bound {
    let (start, end) = ext;
    if is_infinite(&start) {
        return Bound {
            pos: start,
            closed: false,
        };
    }
    match (closed, start == end) {
        (true, true) => Bound {
            pos: start,
            closed: true,
        },
        (true, false) => Bound {
            pos: end,
            closed: false,
        },
        (false, _) => Bound {
            pos: start,
            closed: false,
        },
    }
}

/// `a` starts no later than `b`.
fn low_le(a: &Bound, b: &Bound) -> bool {
    match a.pos.cmp(&b.pos) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.closed || !b.closed,
    }
}

/// `a` ends no earlier than `b`.
fn high_ge(a: &Bound, b: &Bound) -> bool {
    match a.pos.cmp(&b.pos) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.closed || !b.closed,
    }
}

fn non_empty(low: &Bound, high: &Bound) -> bool {
    match low.pos.cmp(&high.pos) {
        Ordering::Less => true,
        Ordering::Equal => low.closed && high.closed,
        Ordering::Greater => false,
    }
}

fn open_bracket(closed: bool) -> char {
    if closed {
        '['
    } else {
        ']'
    }
}

fn close_bracket(closed: bool) -> char {
    if closed {
        ']'
    } else {
        '['
    }
}

fn unknown() -> Bl {
    Bl::null_lossy(NullFlavor::Unk)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ivl<T> {
    low: Option<T>,
    high: Option<T>,
    low_closed: bool,
    high_closed: bool,
    center: Option<T>,
    width: Option<Pq>,
    form: IvlForm,
    literal: String,
}

pub type IvlTs = Ivl<Ts>;
pub type IvlPq = Ivl<Pq>;

impl<T: IntervalElement> Ivl<T> {
    /// Interval form from two bounds.
    pub fn new(low: T, high: T, low_closed: bool, high_closed: bool) -> Result<Ivl<T>> {
        let mut ivl = Ivl {
            low: Some(low),
            high: Some(high),
            low_closed,
            high_closed,
            center: None,
            width: None,
            form: IvlForm::Interval,
            literal: String::new(),
        };
        ivl.validate()?;
        ivl.literal = ivl.to_string();
        Ok(ivl)
    }

    /// The closed interval covering exactly one element.
    pub fn point(e: T) -> Ivl<T> {
        let mut ivl = Ivl {
            low: Some(e.clone()),
            high: Some(e),
            low_closed: true,
            high_closed: true,
            center: None,
            width: None,
            form: IvlForm::Interval,
            literal: String::new(),
        };
        ivl.literal = ivl.to_string();
        ivl
    }

    pub fn low(&self) -> Option<&T> {
        self.low.as_ref()
    }

    pub fn high(&self) -> Option<&T> {
        self.high.as_ref()
    }

    pub fn low_closed(&self) -> bool {
        self.low_closed
    }

    pub fn high_closed(&self) -> bool {
        self.high_closed
    }

    pub fn center(&self) -> Option<&T> {
        self.center.as_ref()
    }

    pub fn width(&self) -> Option<&Pq> {
        self.width.as_ref()
    }

    pub fn form(&self) -> IvlForm {
        self.form
    }

    /// The literal the value was parsed from.
    pub fn literal(&self) -> &str {
        &self.literal
    }

    pub fn dims(&self) -> Option<Dims> {
        [&self.low, &self.high, &self.center]
            .into_iter()
            .flatten()
            .find_map(|e| e.dims())
            .or_else(|| self.width.as_ref().and_then(|w| w.dims().copied()))
    }

    fn blank(form: IvlForm, literal: &str) -> Ivl<T> {
        Ivl {
            low: None,
            high: None,
            low_closed: true,
            high_closed: true,
            center: None,
            width: None,
            form,
            literal: literal.to_string(),
        }
    }

    pub fn parse(s: &str, reg: &UnitRegistry) -> Result<Ivl<T>> {
        let t = s.trim();
        let what = if T::TAG == TypeTag::IvlTs { "IVL<TS>" } else { "IVL<PQ>" };
        if t.is_empty() {
            return Err(Error::parse(what, s, "empty literal"));
        }
        let mut ivl = Ivl::blank(IvlForm::Center, s);
        let first = t.as_bytes()[0];
        let last = t.as_bytes()[t.len() - 1];
        if t.len() >= 2 && first == b'?' && last == b'?' {
            ivl.form = IvlForm::Any;
            ivl.center = Some(T::parse_element(&t[1..t.len() - 1], reg)?);
        } else if let Some(rest) = t.strip_prefix(['<', '>']) {
            let (inclusive, rest) = match rest.strip_prefix('=') {
                Some(r) => (true, r),
                None => (false, rest),
            };
            let a = T::parse_element(rest, reg)?;
            ivl.form = IvlForm::Comparator;
            if first == b'<' {
                ivl.low = Some(T::infinity(NullFlavor::Ninf, &a));
                ivl.low_closed = false;
                ivl.high_closed = inclusive;
                ivl.high = Some(a);
            } else {
                ivl.high = Some(T::infinity(NullFlavor::Pinf, &a));
                ivl.high_closed = false;
                ivl.low_closed = inclusive;
                ivl.low = Some(a);
            }
        } else if matches!(first, b'[' | b']') && matches!(last, b'[' | b']') && t.len() >= 2 {
            let inner = &t[1..t.len() - 1];
            ivl.low_closed = first == b'[';
            ivl.high_closed = last == b']';
            match inner.split_once(';') {
                Some((a, b)) => {
                    ivl.form = IvlForm::Interval;
                    ivl.low = Some(T::parse_element(a, reg)?);
                    ivl.high = Some(T::parse_element(b, reg)?);
                }
                None => {
                    ivl.form = IvlForm::Width;
                    ivl.width = Some(parse_width::<T>(inner, reg, s)?);
                }
            }
        } else if let Some((a, b)) = t.split_once("..").filter(|_| T::HAS_HULL) {
            ivl.form = IvlForm::Hull;
            ivl.low = Some(T::parse_element(a, reg)?);
            ivl.high = Some(T::parse_element(b, reg)?);
        } else if let Some((c, w)) = split_center_width(t, reg) {
            ivl.form = IvlForm::CenterWidth;
            let wb = w.as_bytes();
            ivl.low_closed = wb[0] == b'[';
            ivl.high_closed = wb[wb.len() - 1] == b']';
            let center = T::parse_element(c, reg)?;
            let width = parse_width::<T>(&w[1..w.len() - 1], reg, s)?;
            let half = width.scale(&Rational::new(1, 2).expect("nonzero"));
            ivl.low = Some(center.offset_by(&half.negate())?);
            ivl.high = Some(center.offset_by(&half)?);
            ivl.center = Some(center);
            ivl.width = Some(width);
        } else if let Some((a, b)) = if T::HAS_DASH { split_dash::<T>(t, reg)? } else { None } {
            ivl.form = IvlForm::Dash;
            ivl.low = Some(a);
            ivl.high = Some(b);
        } else {
            ivl.center = Some(T::parse_element(t, reg)?);
        }
        ivl.validate()?;
        Ok(ivl)
    }

    fn validate(&self) -> Result<()> {
        if let (Some(a), Some(b)) = (&self.low, &self.high) {
            if let (Some(da), Some(db)) = (a.dims(), b.dims()) {
                if da != db {
                    return Err(Error::NotComparable {
                        left: a.to_string(),
                        right: b.to_string(),
                    });
                }
            }
            if let (Some(ea), Some(eb)) = (a.extent(), b.extent()) {
                if ea.0.cmp(&eb.0) == Ordering::Greater {
                    return Err(Error::BoundsReversed(format!("{a} > {b}")));
                }
            }
        }
        if let (Some(c), Some(w)) = (&self.center, &self.width) {
            if let (Some(dc), Some(dw)) = (c.dims(), w.dims()) {
                if dc != *dw {
                    return Err(Error::NotComparable {
                        left: c.to_string(),
                        right: w.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Effective endpoints, or `None` when the literal gives no position.
    pub fn bounds(&self) -> Option<(Bound, Bound)> {
        match self.form {
            IvlForm::Width | IvlForm::Center | IvlForm::Any => None,
            IvlForm::CenterWidth => {
                // computed bounds are instants, not periods
                let lo = self.low.as_ref()?.extent()?.0;
                let hi = self.high.as_ref()?.extent()?.0;
                Some((
                    low_bound((lo.clone(), lo), self.low_closed),
                    high_bound((hi.clone(), hi), self.high_closed),
                ))
            }
            _ => Some((
                low_bound(self.low.as_ref()?.extent()?, self.low_closed),
                high_bound(self.high.as_ref()?.extent()?, self.high_closed),
            )),
        }
    }

    pub fn is_empty(&self) -> Option<bool> {
        self.bounds().map(|(l, h)| !non_empty(&l, &h))
    }

    fn check_dims(&self, other: &Ivl<T>) -> Result<()> {
        match (self.dims(), other.dims()) {
            (Some(a), Some(b)) if a != b => Err(Error::NotComparable {
                left: self.to_string(),
                right: other.to_string(),
            }),
            _ => Ok(()),
        }
    }

    /// Every point of `other` lies in `self`.
    pub fn contains(&self, other: &Ivl<T>) -> Result<Bl> {
        self.check_dims(other)?;
        let (Some((al, ah)), Some((bl, bh))) = (self.bounds(), other.bounds()) else {
            return Ok(unknown());
        };
        Ok(Bl::from(low_le(&al, &bl) && high_ge(&ah, &bh)))
    }

    /// Containment of an element; a timestamp is taken as its promotion.
    pub fn contains_element(&self, e: &T) -> Result<Bl> {
        if e.extent().is_none() {
            let nf = e.flavor().expect("element without extent is null");
            return Ok(Bl::null_lossy(nf));
        }
        self.contains(&Ivl::point(e.clone()))
    }

    pub fn overlaps(&self, other: &Ivl<T>) -> Result<Bl> {
        self.check_dims(other)?;
        let (Some((al, ah)), Some((bl, bh))) = (self.bounds(), other.bounds()) else {
            return Ok(unknown());
        };
        let lo = if low_le(&al, &bl) { bl } else { al };
        let hi = if high_ge(&ah, &bh) { bh } else { ah };
        Ok(Bl::from(non_empty(&lo, &hi)))
    }

    /// Same effective endpoints.
    pub fn equal(&self, other: &Ivl<T>) -> Bl {
        if let (Some(a), Some(b)) = (self.dims(), other.dims()) {
            if a != b {
                return Bl::FALSE;
            }
        }
        match (self.bounds(), other.bounds()) {
            (Some((al, ah)), Some((bl, bh))) => Bl::from(al.same(&bl) && ah.same(&bh)),
            _ => unknown(),
        }
    }

    /// Equal and written the same way.
    pub fn identical(&self, other: &Ivl<T>) -> Bl {
        self.equal(other)
            .and(Bl::from(self.literal == other.literal), LogicMode::Hl7)
    }

    fn bracketed(&self) -> String {
        let (Some(l), Some(h)) = (&self.low, &self.high) else {
            unreachable!("bracket form has both bounds")
        };
        format!(
            "{}{};{}{}",
            open_bracket(self.low_closed),
            l,
            h,
            close_bracket(self.high_closed)
        )
    }

    fn width_literal(&self) -> String {
        format!(
            "{}{}{}",
            open_bracket(self.low_closed),
            self.width.as_ref().expect("width form"),
            close_bracket(self.high_closed)
        )
    }
}

fn parse_width<T: IntervalElement>(inner: &str, reg: &UnitRegistry, literal: &str) -> Result<Pq> {
    let w = Pq::parse(inner, reg)?;
    if w.is_null() {
        return Ok(w);
    }
    if w.value().is_some_and(|v| v.is_negative()) {
        return Err(Error::BoundsReversed(format!("negative width in {literal}")));
    }
    if T::TAG == TypeTag::IvlTs && w.dims() != Some(&seconds_dims()) {
        return Err(Error::NotComparable {
            left: w.to_string(),
            right: "s".into(),
        });
    }
    Ok(w)
}

/// Splits `c [w]` at the whitespace before a trailing bracketed width whose
/// contents parse as a quantity; `1 [in_i]` stays a single value.
fn split_center_width<'a>(t: &'a str, reg: &UnitRegistry) -> Option<(&'a str, &'a str)> {
    t.char_indices()
        .rev()
        .filter(|(_, ch)| ch.is_whitespace())
        .find_map(|(i, _)| {
            let (c, w) = (t[..i].trim_end(), t[i..].trim_start());
            let wb = w.as_bytes();
            let bracketed = wb.len() >= 2 && matches!(wb[0], b'[' | b']') && matches!(wb[wb.len() - 1], b'[' | b']');
            (!c.is_empty() && bracketed && Pq::parse(&w[1..w.len() - 1], reg).is_ok()).then_some((c, w))
        })
}

/// Splits `a - b` at the first dash where both sides are comparable values.
fn split_dash<T: IntervalElement>(t: &str, reg: &UnitRegistry) -> Result<Option<(T, T)>> {
    let mut reversed = None;
    for (i, _) in t.match_indices('-').filter(|(i, _)| *i > 0) {
        let (a, b) = (t[..i].trim(), t[i + 1..].trim());
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let (Ok(a), Ok(b)) = (T::parse_element(a, reg), T::parse_element(b, reg)) else {
            continue;
        };
        if a.flavor().is_some() || b.flavor().is_some() || a.dims() != b.dims() {
            continue;
        }
        let (ea, eb) = (a.extent().expect("value"), b.extent().expect("value"));
        if ea.0.cmp(&eb.0) == Ordering::Greater {
            reversed.get_or_insert(format!("{a} > {b}"));
            continue;
        }
        return Ok(Some((a, b)));
    }
    match reversed {
        Some(msg) => Err(Error::BoundsReversed(msg)),
        None => Ok(None),
    }
}

impl<T: IntervalElement> fmt::Display for Ivl<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.form {
            IvlForm::Interval | IvlForm::Dash => f.write_str(&self.bracketed()),
            IvlForm::Hull => write!(
                f,
                "{}..{}",
                self.low.as_ref().expect("hull"),
                self.high.as_ref().expect("hull")
            ),
            IvlForm::Comparator => {
                let low = self.low.as_ref().expect("comparator");
                let high = self.high.as_ref().expect("comparator");
                if low.flavor() == Some(NullFlavor::Ninf) {
                    write!(f, "<{}{}", if self.high_closed { "=" } else { "" }, high)
                } else {
                    write!(f, ">{}{}", if self.low_closed { "=" } else { "" }, low)
                }
            }
            IvlForm::CenterWidth => {
                write!(f, "{} {}", self.center.as_ref().expect("center"), self.width_literal())
            }
            IvlForm::Width => f.write_str(&self.width_literal()),
            IvlForm::Center => write!(f, "{}", self.center.as_ref().expect("center")),
            IvlForm::Any => write!(f, "?{}?", self.center.as_ref().expect("any")),
        }
    }
}

impl FromStr for Ivl<Ts> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ivl::parse(s, UnitRegistry::standard())
    }
}

impl FromStr for Ivl<Pq> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ivl::parse(s, UnitRegistry::standard())
    }
}

/// The period a timestamp denotes, closed low and open high. Year and month
/// bounds keep their precision; finer ones are written to the second.
pub fn promotion(t: &Ts) -> Result<Ivl<Ts>> {
    let Ts::Point(p) = t else {
        return Err(Error::NullOperand(t.to_string()));
    };
    let (start, end) = p.span();
    let shown = match p.precision() {
        pr @ (Precision::Year | Precision::Month) => pr,
        pr => pr.max(Precision::Second),
    };
    let low = Ts::from_offset(start, shown, p.tz());
    let high = Ts::from_offset(end, shown, p.tz());
    Ivl::new(low, high, true, false)
}

/// The timestamp whose promotion is `i`, or `inv` when there is none.
pub fn demotion(i: &Ivl<Ts>) -> Ts {
    let inv = Ts::Null(NullFlavor::Inv);
    let Some((lo, hi)) = i.bounds() else {
        return inv;
    };
    let (Position::Value(start), Position::Value(end)) = (&lo.pos, &hi.pos) else {
        return inv;
    };
    if !lo.closed || hi.closed {
        return inv;
    }
    let tz = i.low().and_then(|t| t.point()).and_then(TsPoint::tz);
    for p in Precision::all(MAX_FRACTION_DIGITS) {
        let Ts::Point(cand) = Ts::from_offset(start.clone(), p, tz) else {
            unreachable!()
        };
        if cand.truncated(p).offset() == start && &cand.span().1 == end {
            return Ts::Point(cand);
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn its(s: &str) -> IvlTs {
        s.parse().unwrap()
    }

    fn ipq(s: &str) -> IvlPq {
        s.parse().unwrap()
    }

    #[test]
    fn literal_forms_ts() {
        let cases = [
            ("[20080101131251;20080131155629]", IvlForm::Interval),
            ("<20080101", IvlForm::Comparator),
            ("20010115135108 [10 s]", IvlForm::CenterWidth),
            ("[10 d]", IvlForm::Width),
            ("20010101", IvlForm::Center),
            ("?200101?", IvlForm::Any),
            ("20010101..20010131", IvlForm::Hull),
            ("[20010101;20010201[", IvlForm::Interval),
        ];
        for (lit, form) in cases {
            let i = its(lit);
            assert_eq!(i.form(), form, "{lit}");
            assert_eq!(i.to_string(), lit);
        }
        let c = its("<20080101");
        assert_eq!(c.low(), Some(&Ts::Null(NullFlavor::Ninf)));
        assert!(!c.low_closed() && !c.high_closed());
        assert!(its("<=20080101").high_closed());
        assert!(matches!(
            IvlTs::from_str("[20090101;20080101]"),
            Err(Error::BoundsReversed(_))
        ));
        assert!(matches!(IvlTs::from_str("[10 m]"), Err(Error::NotComparable { .. })));
        assert!(IvlTs::from_str("[2008;").is_err());
    }

    #[test]
    fn literal_forms_pq() {
        assert_eq!(ipq("-8m--2m").to_string(), "[-8 m;-2 m]");
        assert_eq!(ipq("-8m--2m").form(), IvlForm::Dash);
        assert_eq!(ipq("[100mm[Hg];120mm[Hg]]").to_string(), "[100 mm[Hg];120 mm[Hg]]");
        assert_eq!(ipq("3ml - 5ml").equal(&ipq("[3ml;5ml]")), Bl::TRUE);
        assert_eq!(ipq("1 m-1 - 2 m-1").to_string(), "[1 /m;2 /m]");
        assert_eq!(ipq("1 m-1").form(), IvlForm::Center);
        assert_eq!(ipq("100 mm[Hg]").form(), IvlForm::Center);
        assert_eq!(ipq("30m [20m]").form(), IvlForm::CenterWidth);
        assert_eq!(ipq("<1m").to_string(), "<1 m");
        assert_eq!(ipq("]NullFlavor.NINF m;1m[").equal(&ipq("<1m")), Bl::TRUE);
        assert_eq!(ipq("]NullFlavor.NINF m;1m[").identical(&ipq("<1m")), Bl::FALSE);
        assert!(matches!(IvlPq::from_str("5m-2m"), Err(Error::BoundsReversed(_))));
        assert!(matches!(IvlPq::from_str("[1 m;2 s]"), Err(Error::NotComparable { .. })));
        assert!(IvlPq::from_str("2001..2002").is_err());
    }

    #[test]
    fn equality() {
        assert_eq!(ipq("30m [20m]").equal(&ipq("[20m; 40m]")), Bl::TRUE);
        assert_eq!(ipq("30m [20m]").identical(&ipq("[20m; 40m]")), Bl::FALSE);
        assert_eq!(ipq("[1m;2m]").equal(&ipq("[1m;2m]")), Bl::TRUE);
        assert_eq!(ipq("[1m;2m]").identical(&ipq("[1m;2m]")), Bl::TRUE);
        assert_eq!(ipq("[1m;2m]").equal(&ipq("[100cm;2000mm]")), Bl::TRUE);
        assert_eq!(ipq("[1m;2m]").equal(&ipq("[1m;2m[")), Bl::FALSE);
        assert_eq!(ipq("[1m;2m]").equal(&ipq("[1s;2s]")), Bl::FALSE);
        assert_eq!(
            its("[20010101;20010201[").equal(&its("[20010101000000;20010201000000[")),
            Bl::TRUE
        );
        assert_eq!(its("?200101?").equal(&its("?200101?")), unknown());
    }

    #[test]
    fn promotion_and_demotion() {
        let p = promotion(&"20010131".parse().unwrap()).unwrap();
        assert_eq!(p.to_string(), "[20010131000000;20010201000000[");
        let p = promotion(&"2008".parse().unwrap()).unwrap();
        assert_eq!(p.to_string(), "[2008;2009[");
        assert_eq!(demotion(&p).to_string(), "2008");
        assert_eq!(demotion(&its("[20080101;20080115[")), Ts::Null(NullFlavor::Inv));
        assert_eq!(demotion(&its("[200801;200802[")).to_string(), "200801");
        assert_eq!(demotion(&its("[20080101;20080101]")).to_string(), "20080101");
        assert_eq!(demotion(&its("[10 d]")), Ts::Null(NullFlavor::Inv));
        assert!(promotion(&Ts::Null(NullFlavor::Nav)).is_err());
    }

    #[test]
    fn relations() {
        let probe = its("2001..2002");
        for (v, expect) in [
            ("[2000;2003[", true),
            ("[2000;2004[", true),
            ("[2000;2002[", false),
            ("[2002;2005[", false),
            ("[2001;2002]", true),
        ] {
            assert_eq!(its(v).contains(&probe).unwrap(), Bl::from(expect), "{v}");
        }
        assert_eq!(
            ipq("[3ml;5ml]").contains_element(&"4 ml".parse().unwrap()).unwrap(),
            Bl::TRUE
        );
        assert_eq!(
            ipq("[3ml;5ml[").contains_element(&"5 ml".parse().unwrap()).unwrap(),
            Bl::FALSE
        );
        assert_eq!(
            ipq("[3ml;5ml]").contains_element(&"0.005 l".parse().unwrap()).unwrap(),
            Bl::TRUE
        );
        assert_eq!(
            its("[10 d]").contains_element(&"20010101".parse().unwrap()).unwrap(),
            unknown()
        );
        assert!(ipq("[3ml;5ml]").contains_element(&"4 s".parse().unwrap()).is_err());
        assert_eq!(
            its("<20080101").contains_element(&"20071231".parse().unwrap()).unwrap(),
            Bl::TRUE
        );
        assert_eq!(
            its("<20080101").contains_element(&"20080101".parse().unwrap()).unwrap(),
            Bl::FALSE
        );
        assert_eq!(its("[2008;2009[").overlaps(&its("[20081231;2010[")).unwrap(), Bl::TRUE);
        assert_eq!(its("[2008;2009[").overlaps(&its("[2009;2010[")).unwrap(), Bl::FALSE);
        let trc = "trc ml".parse::<Pq>().unwrap();
        assert_eq!(ipq("]0 ml;1 ml[").contains_element(&trc).unwrap(), Bl::TRUE);
        assert_eq!(ipq("]0 ml;pinf ml[").contains_element(&trc).unwrap(), Bl::TRUE);
        assert_eq!(ipq("[1 ml;2 ml]").contains_element(&trc).unwrap(), Bl::FALSE);
    }

    /// Integer-valued bounds with random closures, as literal and as a
    /// membership predicate on the half-integer grid.
    fn arb_grid_ivl() -> impl Strategy<Value = (i64, i64, bool, bool)> {
        (-5i64..=5, 0i64..=6, any::<bool>(), any::<bool>()).prop_map(|(a, w, lc, hc)| (a, a + w, lc, hc))
    }

    fn grid_member((a, b, lc, hc): (i64, i64, bool, bool), x2: i64) -> bool {
        let (a2, b2) = (2 * a, 2 * b);
        (if lc { x2 >= a2 } else { x2 > a2 }) && (if hc { x2 <= b2 } else { x2 < b2 })
    }

    fn grid_pq((a, b, lc, hc): (i64, i64, bool, bool)) -> IvlPq {
        let lit = format!("{}{} m;{} m{}", open_bracket(lc), a, b, close_bracket(hc));
        ipq(&lit)
    }

    /// The same shape over whole seconds, each bound written at second
    /// precision so it denotes the period [k, k+1[.
    fn ts_second(k: i64) -> String {
        format!("2001010100{:02}{:02}", (k + 10) / 60, (k + 10) % 60)
    }

    fn ts_member((a, b, lc, hc): (i64, i64, bool, bool), x2: i64) -> bool {
        // x2 is twice a time in seconds relative to second 0
        let (a2, b2) = (2 * a, 2 * b);
        (if lc { x2 >= a2 } else { x2 >= a2 + 2 }) && (if hc { x2 < b2 + 2 } else { x2 < b2 })
    }

    fn grid_ts((a, b, lc, hc): (i64, i64, bool, bool)) -> IvlTs {
        let lit = format!(
            "{}{};{}{}",
            open_bracket(lc),
            ts_second(a),
            ts_second(b),
            close_bracket(hc)
        );
        its(&lit)
    }

    proptest! {
        #[test]
        fn pq_relations_match_grid_oracle(a in arb_grid_ivl(), b in arb_grid_ivl()) {
            let grid: Vec<i64> = (-14..=26).collect();
            let set = |i| grid.iter().filter(|&&x| grid_member(i, x)).copied().collect::<Vec<_>>();
            let (sa, sb) = (set(a), set(b));
            let (ia, ib) = (grid_pq(a), grid_pq(b));
            if !sb.is_empty() {
                let subset = sb.iter().all(|x| sa.contains(x));
                prop_assert_eq!(ia.contains(&ib).unwrap(), Bl::from(subset));
            }
            let meet = sb.iter().any(|x| sa.contains(x));
            prop_assert_eq!(ia.overlaps(&ib).unwrap(), Bl::from(meet));
            prop_assert_eq!(ia.is_empty(), Some(sa.is_empty()));
        }

        #[test]
        fn ts_relations_match_grid_oracle(a in arb_grid_ivl(), b in arb_grid_ivl()) {
            let grid: Vec<i64> = (-14..=30).collect();
            let set = |i| grid.iter().filter(|&&x| ts_member(i, x)).copied().collect::<Vec<_>>();
            let (sa, sb) = (set(a), set(b));
            let (ia, ib) = (grid_ts(a), grid_ts(b));
            if !sb.is_empty() {
                let subset = sb.iter().all(|x| sa.contains(x));
                prop_assert_eq!(ia.contains(&ib).unwrap(), Bl::from(subset));
            }
            let meet = sb.iter().any(|x| sa.contains(x));
            prop_assert_eq!(ia.overlaps(&ib).unwrap(), Bl::from(meet));
        }

        #[test]
        fn relation_laws(a in arb_grid_ivl(), b in arb_grid_ivl(), c in arb_grid_ivl()) {
            let (ia, ib, ic) = (grid_pq(a), grid_pq(b), grid_pq(c));
            prop_assert!(ia.contains(&ia).unwrap().is_true());
            if ia.contains(&ib).unwrap().is_true() && ib.contains(&ic).unwrap().is_true() {
                prop_assert!(ia.contains(&ic).unwrap().is_true());
            }
            prop_assert_eq!(ia.overlaps(&ib).unwrap(), ib.overlaps(&ia).unwrap());
            if ib.is_empty() == Some(false) && ia.contains(&ib).unwrap().is_true() {
                prop_assert!(ia.overlaps(&ib).unwrap().is_true());
            }
        }

        #[test]
        fn dash_equals_bracket(a in -1000i64..1000, w in 0i64..1000) {
            let dash = ipq(&format!("{}ml - {}ml", a, a + w));
            let bracket = ipq(&format!("[{}ml;{}ml]", a, a + w));
            prop_assert!(dash.equal(&bracket).is_true());
            prop_assert_eq!(dash.to_string(), bracket.to_string());
        }

        #[test]
        fn demotion_inverts_promotion(t in crate::time::tests::arb_ts()) {
            let p = promotion(&t).unwrap();
            prop_assert_eq!(demotion(&p), t.clone());
            let back: IvlTs = p.to_string().parse().unwrap();
            prop_assert!(back.equal(&p).is_true());
        }
    }
}
