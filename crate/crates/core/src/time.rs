//! Points in time (TS) with calendar precision.
//!
//! A timestamp is stored as an exact offset in seconds from
//! 0001-01-01T00:00:00 UTC on the proleptic Gregorian calendar. Timestamps
//! without a zone are placed on the same axis as if they were UTC; a zone is
//! kept only so that the literal can be printed back.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::logic::Bl;
use crate::nullflavor::NullFlavor;
use crate::numeric::Rational;
use crate::quantity::{Position, Pq};
use crate::ucum::UnitRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    Year,
    Month,
    Day,
    Hour,
    Minute,
    Second,
    /// Seconds with this many fractional digits (at least one).
    Fraction(u8),
}

impl Precision {
    /// Coarsest first; fractions up to `max_frac` digits.
    pub fn all(max_frac: u8) -> impl Iterator<Item = Precision> {
        [
            Precision::Year,
            Precision::Month,
            Precision::Day,
            Precision::Hour,
            Precision::Minute,
            Precision::Second,
        ]
        .into_iter()
        .chain((1..=max_frac).map(Precision::Fraction))
    }

    fn digits(self) -> usize {
        match self {
            Precision::Year => 4,
            Precision::Month => 6,
            Precision::Day => 8,
            Precision::Hour => 10,
            Precision::Minute => 12,
            Precision::Second | Precision::Fraction(_) => 14,
        }
    }
}

pub const MAX_FRACTION_DIGITS: u8 = 18;

const SECONDS_PER_DAY: i64 = 86_400;

/// Days since 1970-01-01 for a proleptic Gregorian date.
pub(crate) const fn days_from_civil(y: i64, m: u32, d: u32) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let m = m as i64;
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

pub(crate) const fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}

const EPOCH_DAYS: i64 = days_from_civil(1, 1, 1);

pub fn is_leap_year(y: i64) -> bool {
    (y % 4 == 0 && y % 100 != 0) || y % 400 == 0
}

pub fn days_in_month(y: i64, m: u32) -> u32 {
    match m {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(y) => 29,
        _ => 28,
    }
}

/// Broken-down local time.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Fields {
    year: i64,
    month: u32,
    day: u32,
    hour: u32,
    minute: u32,
    second: u32,
    frac: Rational,
}

impl Fields {
    fn to_local_offset(&self) -> Rational {
        let days = days_from_civil(self.year, self.month, self.day) - EPOCH_DAYS;
        let secs = days * SECONDS_PER_DAY + self.hour as i64 * 3600 + self.minute as i64 * 60 + self.second as i64;
        Rational::from(secs) + self.frac.clone()
    }

    fn from_local_offset(local: &Rational) -> Fields {
        let whole = local.floor();
        let frac = local - &Rational::from(whole.clone());
        let (days, secs) = whole.div_mod_floor(&BigInt::from(SECONDS_PER_DAY));
        let days = days.to_i64().expect("offset within calendar range");
        let secs = secs.to_i64().expect("seconds of day fit");
        let (year, month, day) = civil_from_days(days + EPOCH_DAYS);
        Fields {
            year,
            month,
            day,
            hour: (secs / 3600) as u32,
            minute: (secs / 60 % 60) as u32,
            second: (secs % 60) as u32,
            frac,
        }
    }
}

/// A non-null timestamp.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TsPoint {
    offset: Rational,
    precision: Precision,
    tz: Option<i32>,
}

impl TsPoint {
    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Zone offset in minutes east of UTC.
    pub fn tz(&self) -> Option<i32> {
        self.tz
    }

    fn tz_seconds(&self) -> Rational {
        Rational::from(self.tz.unwrap_or(0) as i64 * 60)
    }

    fn fields(&self) -> Fields {
        Fields::from_local_offset(&(&self.offset + &self.tz_seconds()))
    }

    /// Start and end of the period covered at this precision.
    pub fn span(&self) -> (Rational, Rational) {
        let start = self.truncated(self.precision).offset;
        let f = Fields::from_local_offset(&(&start + &self.tz_seconds()));
        let end_local = match self.precision {
            Precision::Year => Fields { year: f.year + 1, ..f }.to_local_offset(),
            Precision::Month => {
                let (year, month) = if f.month == 12 {
                    (f.year + 1, 1)
                } else {
                    (f.year, f.month + 1)
                };
                Fields { year, month, ..f }.to_local_offset()
            }
            p => {
                let step = match p {
                    Precision::Day => Rational::from(SECONDS_PER_DAY),
                    Precision::Hour => Rational::from(3600),
                    Precision::Minute => Rational::from(60),
                    Precision::Second => Rational::one(),
                    Precision::Fraction(n) => Rational::pow10(-(n as i32)),
                    _ => unreachable!(),
                };
                f.to_local_offset() + step
            }
        };
        let end = &end_local - &self.tz_seconds();
        (start, end)
    }

    /// The same instant truncated (in local time) to the start of the
    /// enclosing period at `p`, carrying precision `p`.
    pub fn truncated(&self, p: Precision) -> TsPoint {
        let mut f = self.fields();
        if p < Precision::Fraction(1) {
            f.frac = Rational::zero();
        }
        if let Precision::Fraction(n) = p {
            let scale = Rational::pow10(n as i32);
            f.frac = Rational::from((&f.frac * &scale).floor()) * Rational::pow10(-(n as i32));
        }
        if p < Precision::Second {
            f.second = 0;
        }
        if p < Precision::Minute {
            f.minute = 0;
        }
        if p < Precision::Hour {
            f.hour = 0;
        }
        if p < Precision::Day {
            f.day = 1;
        }
        if p < Precision::Month {
            f.month = 1;
        }
        TsPoint {
            offset: f.to_local_offset() - self.tz_seconds(),
            precision: p,
            tz: self.tz,
        }
    }

    /// Same offset and zone, different precision (no truncation).
    pub fn with_precision(&self, p: Precision) -> TsPoint {
        TsPoint {
            precision: p,
            ..self.clone()
        }
    }

    fn literal(&self) -> String {
        let f = self.fields();
        let mut s = format!(
            "{:04}{:02}{:02}{:02}{:02}{:02}",
            f.year, f.month, f.day, f.hour, f.minute, f.second
        );
        s.truncate(self.precision.digits());
        if let Precision::Fraction(n) = self.precision {
            let digits = (&f.frac * &Rational::pow10(n as i32)).floor();
            s.push_str(&format!(".{:0width$}", digits, width = n as usize));
        }
        if let Some(tz) = self.tz {
            let sign = if tz < 0 { '-' } else { '+' };
            s.push_str(&format!("{sign}{:02}{:02}", tz.abs() / 60, tz.abs() % 60));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ts {
    Point(TsPoint),
    Null(NullFlavor),
}

impl Ts {
    pub fn from_offset(offset: Rational, precision: Precision, tz: Option<i32>) -> Ts {
        Ts::Point(TsPoint { offset, precision, tz })
    }

    /// Builds a timestamp from calendar fields; `precision` decides which
    /// trailing fields are significant (the rest must be zero or one).
    #[allow(clippy::too_many_arguments)]
    pub fn from_fields(
        year: i64,
        month: u32,
        day: u32,
        hour: u32,
        minute: u32,
        second: u32,
        precision: Precision,
        tz: Option<i32>,
    ) -> Result<Ts> {
        let text = format!("{year:04}-{month:02}-{day:02} {hour:02}:{minute:02}:{second:02}");
        if !(1..=9999).contains(&year)
            || !(1..=12).contains(&month)
            || day == 0
            || day > days_in_month(year, month)
            || hour > 23
            || minute > 59
            || second > 59
        {
            return Err(Error::InvalidDate(text));
        }
        let f = Fields {
            year,
            month,
            day,
            hour,
            minute,
            second,
            frac: Rational::zero(),
        };
        let tz_secs = Rational::from(tz.unwrap_or(0) as i64 * 60);
        Ok(Ts::from_offset(f.to_local_offset() - tz_secs, precision, tz).truncate_to_precision())
    }

    fn truncate_to_precision(self) -> Ts {
        match self {
            Ts::Point(p) => Ts::Point(p.truncated(p.precision)),
            n => n,
        }
    }

    pub fn null(nf: NullFlavor) -> Ts {
        Ts::Null(nf)
    }

    pub fn point(&self) -> Option<&TsPoint> {
        match self {
            Ts::Point(p) => Some(p),
            Ts::Null(_) => None,
        }
    }

    pub fn flavor(&self) -> Option<NullFlavor> {
        match self {
            Ts::Point(_) => None,
            Ts::Null(nf) => Some(*nf),
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Ts::Null(_))
    }

    pub fn parse(s: &str) -> Result<Ts> {
        let t = s.trim();
        if let Ok(nf) = NullFlavor::parse(t) {
            return Ok(Ts::Null(nf));
        }
        let bad = |reason: &str| Error::parse("TS", s, reason);
        let (body, tz) = match t.rfind(['+', '-']) {
            Some(i) => {
                let z = &t[i + 1..];
                if z.len() != 4 || !z.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad("zone must be +HHMM or -HHMM"));
                }
                let (hh, mm): (i32, i32) = (z[..2].parse().unwrap(), z[2..].parse().unwrap());
                if hh > 23 || mm > 59 {
                    return Err(Error::InvalidDate(t.to_string()));
                }
                let sign = if t.as_bytes()[i] == b'-' { -1 } else { 1 };
                (&t[..i], Some(sign * (hh * 60 + mm)))
            }
            None => (t, None),
        };
        let (digits, frac) = match body.split_once('.') {
            Some((d, f)) => (d, Some(f)),
            None => (body, None),
        };
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected digits"));
        }
        let precision = match (digits.len(), frac) {
            (4, None) => Precision::Year,
            (6, None) => Precision::Month,
            (8, None) => Precision::Day,
            (10, None) => Precision::Hour,
            (12, None) => Precision::Minute,
            (14, None) => Precision::Second,
            (14, Some(f)) => {
                if f.is_empty() || f.len() > MAX_FRACTION_DIGITS as usize || !f.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad("bad fractional seconds"));
                }
                Precision::Fraction(f.len() as u8)
            }
            _ => return Err(bad("expected YYYY[MM[DD[HH[MM[SS[.f]]]]]]")),
        };
        let field = |from: usize, to: usize, default: u32| -> u32 {
            digits.get(from..to).map_or(default, |d| d.parse().unwrap())
        };
        let year = digits[..4].parse::<i64>().unwrap();
        let (month, day) = (field(4, 6, 1), field(6, 8, 1));
        let (hour, minute, second) = (field(8, 10, 0), field(10, 12, 0), field(12, 14, 0));
        let ts = Ts::from_fields(year, month, day, hour, minute, second, precision, tz)
            .map_err(|_| Error::InvalidDate(t.to_string()))?;
        Ok(match (ts, frac) {
            (Ts::Point(mut p), Some(f)) => {
                p.offset = p.offset + Rational::from(f.parse::<BigInt>().unwrap()) * Rational::pow10(-(f.len() as i32));
                Ts::Point(p)
            }
            (ts, _) => ts,
        })
    }

    pub(crate) fn position(&self) -> Option<Position> {
        match self {
            Ts::Point(p) => Some(Position::Value(p.offset.clone())),
            Ts::Null(NullFlavor::Ninf) => Some(Position::NegInf),
            Ts::Null(NullFlavor::Pinf) => Some(Position::PosInf),
            Ts::Null(_) => None,
        }
    }

    /// Adds a time quantity; the precision is kept.
    pub fn shift(&self, d: &Pq) -> Result<Ts> {
        let secs = seconds_of(d)?;
        match (self, secs) {
            (Ts::Point(p), Some(secs)) => Ok(Ts::Point(TsPoint {
                offset: &p.offset + &secs,
                ..p.clone()
            })),
            (Ts::Point(_), None) => Ok(Ts::Null(d.flavor().expect("null duration"))),
            (Ts::Null(nf), _) => Ok(Ts::Null(match d.flavor() {
                Some(o) => nf.lca(o),
                None => *nf,
            })),
        }
    }

    /// `self - other` in seconds.
    pub fn diff(&self, other: &Ts) -> Pq {
        let s = UnitRegistry::standard().parse("s").expect("s");
        match (self, other) {
            (Ts::Point(a), Ts::Point(b)) => Pq::new(&a.offset - &b.offset, s),
            _ => {
                let nf = match (self.flavor(), other.flavor()) {
                    (Some(a), Some(b)) => a.lca(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!(),
                };
                Pq::null_with_unit(nf, s)
            }
        }
    }

    /// Order on the time axis; `None` when a side has no position.
    pub fn cmp_offset(&self, other: &Ts) -> Option<Ordering> {
        let (a, b) = (self.position()?, other.position()?);
        Some(match (a, b) {
            (Position::Value(x), Position::Value(y)) => x.cmp(&y),
            (x, y) => rank(&x).cmp(&rank(&y)),
        })
    }

    /// Same instant.
    pub fn equal(&self, other: &Ts) -> Bl {
        if let (Ts::Point(a), Ts::Point(b)) = (self, other) {
            return Bl::from(a.offset == b.offset);
        }
        match (self.position(), other.position()) {
            (Some(_), Some(_)) if self.flavor() != other.flavor() => Bl::FALSE,
            _ => Bl::propagate(self.flavor(), other.flavor()).expect("one side is null"),
        }
    }

    /// Same instant, precision and zone.
    pub fn identical(&self, other: &Ts) -> Bl {
        match Bl::propagate(self.flavor(), other.flavor()) {
            Some(b) => b,
            None => Bl::from(self == other),
        }
    }
}

fn rank(p: &Position) -> u8 {
    match p {
        Position::NegInf => 0,
        Position::PosInf => 2,
        _ => 1,
    }
}

/// Value of a time quantity in seconds; `None` for a nullflavored one.
fn seconds_of(d: &Pq) -> Result<Option<Rational>> {
    let s = UnitRegistry::standard().parse("s").expect("s");
    if let Some(u) = d.unit() {
        if !u.compares(&s) {
            return Err(Error::NotComparable {
                left: u.to_string(),
                right: "s".into(),
            });
        }
    }
    if d.is_null() {
        return Ok(None);
    }
    Ok(Some(d.canonical_value().expect("non-null")))
}

impl fmt::Display for Ts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ts::Point(p) => f.write_str(&p.literal()),
            Ts::Null(nf) => write!(f, "{nf}"),
        }
    }
}

impl FromStr for Ts {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ts::parse(s)
    }
}
