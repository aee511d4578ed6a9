//! Storage-layout benchmark for physical quantities.
//!
//! Two encodings of the same table are compared:
//!
//! * **packed**: one fixed-width record per row holding the nullflavor
//!   nibble, an interned unit id and an order-preserving key of the
//!   canonical magnitude;
//! * **decomposed**: three string columns (value, unit, nullflavor) that
//!   have to be parsed and canonicalized again for every comparison.
//!
//! Both answer the same five queries (insert with unit validation,
//! sequential range scan, index build, equality probe, index range scan) and
//! must return identical row sets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{self, Write};
use std::time::Instant;

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::nullflavor::NullFlavor;
use crate::numeric::{Rational, DEFAULT_FRAC_DIGITS};
use crate::quantity::Pq;
use crate::ucum::{Dims, UnitRegistry};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n: usize,
    pub seed: u64,
    pub runs: usize,
    pub mu: f64,
    pub sigma: f64,
    /// Randomly drawn units in addition to `m`.
    pub random_units: usize,
    /// Share of rows that carry a nullflavor (with their unit kept).
    pub null_fraction: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 10_000,
            seed: 7,
            runs: 20,
            mu: 0.0,
            sigma: 10_000.0,
            random_units: 20,
            null_fraction: 0.001,
        }
    }
}

/// Flavors used for generated null rows.
const NULL_ROW_FLAVORS: [NullFlavor; 6] = [
    NullFlavor::Trc,
    NullFlavor::Nav,
    NullFlavor::Unk,
    NullFlavor::Msk,
    NullFlavor::Ninf,
    NullFlavor::Pinf,
];

/// A literal that every generated table contains, so the equality probe
/// finds at least one row.
pub const PLANTED_LITERAL: &str = "1.2 km";

/// Decimal digits kept in a key mantissa.
const KEY_DIGITS: u32 = 38;

/// Magnitude class, in sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
enum Class {
    NegInf = 0,
    Negative = 1,
    Zero = 2,
    Trace = 3,
    Positive = 4,
    PosInf = 5,
    /// Remaining flavors, sub-ordered by symbol.
    OtherFlavor = 6,
    Oth = 7,
}

/// Order-preserving key: dimension group, class, then a base-10 float with
/// a left-aligned 38-digit mantissa. Negative magnitudes store the
/// complement so that plain field order sorts them correctly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PackedKey {
    unitless: bool,
    dims: [i8; 7],
    class: Class,
    exp: i16,
    mant: u128,
}

fn dims8(d: &Dims) -> [i8; 7] {
    d.map(|x| x.clamp(i8::MIN as i32, i8::MAX as i32) as i8)
}

fn flavor_rank(nf: NullFlavor) -> i16 {
    let mut syms: Vec<&str> = NullFlavor::ALL.iter().map(|f| f.symbol()).collect();
    syms.sort_unstable();
    syms.iter().position(|s| *s == nf.symbol()).expect("member") as i16
}

impl PackedKey {
    fn null(nf: NullFlavor, dims: Option<&Dims>) -> PackedKey {
        let class = match nf {
            NullFlavor::Ninf => Class::NegInf,
            NullFlavor::Pinf => Class::PosInf,
            NullFlavor::Trc => Class::Trace,
            NullFlavor::Oth => Class::Oth,
            _ => Class::OtherFlavor,
        };
        PackedKey {
            unitless: dims.is_none(),
            dims: dims.map(dims8).unwrap_or_default(),
            class,
            exp: if class == Class::OtherFlavor {
                flavor_rank(nf)
            } else {
                0
            },
            mant: 0,
        }
    }

    /// Key for `digits × 10^e`, `digits` non-negative.
    fn from_digits(dims: &Dims, negative: bool, digits: u128, e: i32) -> Result<PackedKey> {
        let mut key = PackedKey {
            unitless: false,
            dims: dims8(dims),
            class: Class::Zero,
            exp: 0,
            mant: 0,
        };
        if digits == 0 {
            return Ok(key);
        }
        let len = digits.ilog10() + 1;
        if len > KEY_DIGITS {
            return Err(Error::parse(
                "packed key",
                &digits.to_string(),
                "more than 38 significant digits",
            ));
        }
        let mant = digits * 10u128.pow(KEY_DIGITS - len);
        let exp = i16::try_from(e + len as i32 - 1)
            .map_err(|_| Error::parse("packed key", &digits.to_string(), "exponent out of range"))?;
        if negative {
            key.class = Class::Negative;
            key.exp = -exp;
            key.mant = u128::MAX - mant;
        } else {
            key.class = Class::Positive;
            key.exp = exp;
            key.mant = mant;
        }
        Ok(key)
    }

    fn from_rational(dims: &Dims, v: &Rational) -> Result<PackedKey> {
        let (mant, e) = decimal_parts(v)
            .ok_or_else(|| Error::parse("packed key", &v.to_string(), "no finite decimal expansion"))?;
        let (sign, mag) = (mant.sign(), mant.magnitude().clone());
        let digits = mag
            .to_u128()
            .ok_or_else(|| Error::parse("packed key", &v.to_string(), "more than 38 significant digits"))?;
        PackedKey::from_digits(dims, sign == Sign::Minus, digits, e)
    }

    /// Key of any quantity whose canonical magnitude is a finite decimal.
    pub fn of(p: &Pq) -> Result<PackedKey> {
        match (p.flavor(), p.canonical_value()) {
            (Some(nf), _) => Ok(PackedKey::null(nf, p.dims())),
            (None, Some(v)) => PackedKey::from_rational(p.dims().expect("non-null"), &v),
            (None, None) => unreachable!("non-null PQ has a value"),
        }
    }
}

/// `v = mant × 10^e` with the smallest non-negative number of fraction digits.
fn decimal_parts(v: &Rational) -> Option<(BigInt, i32)> {
    let d = v.terminating_digits()?;
    let scaled = v * &Rational::pow10(d as i32);
    let mut mant = scaled.numer().clone();
    let mut e = -(d as i32);
    let ten = BigInt::from(10);
    while !mant.is_zero() && (&mant % &ten).is_zero() {
        mant /= &ten;
        e += 1;
    }
    Some((mant, e))
}

/// Canonical factor of a unit as `mant × 10^exp`, plus its dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitInfo {
    pub name: String,
    pub dims: Dims,
    mant: i128,
    exp: i32,
}

impl UnitInfo {
    fn new(name: &str, reg: &UnitRegistry) -> Result<UnitInfo> {
        let u = reg.parse(name)?;
        let (mant, exp) = decimal_parts(&u.canonical().factor)
            .ok_or_else(|| Error::UnsupportedUnit(format!("{name}: factor has no finite decimal expansion")))?;
        let mant = mant
            .to_i128()
            .ok_or_else(|| Error::UnsupportedUnit(format!("{name}: factor too wide")))?;
        Ok(UnitInfo {
            name: name.to_string(),
            dims: *u.dims(),
            mant,
            exp,
        })
    }

    /// Key of `value_mant × 10^value_exp` in this unit.
    fn key(&self, value_mant: i128, value_exp: i32) -> Result<PackedKey> {
        match value_mant.checked_mul(self.mant) {
            Some(m) => PackedKey::from_digits(&self.dims, m < 0, m.unsigned_abs(), value_exp + self.exp),
            None => {
                let v = Rational::from(BigInt::from(value_mant) * BigInt::from(self.mant))
                    * Rational::pow10(value_exp + self.exp);
                PackedKey::from_rational(&self.dims, &v)
            }
        }
    }
}

/// Parses a plain decimal (`-123.4567`) into mantissa and exponent without
/// going through a rational.
fn parse_plain_decimal(s: &str) -> Option<(i128, i32)> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let mut mant: i128 = 0;
    let mut frac = 0i32;
    let mut seen_dot = false;
    let mut any = false;
    for b in body.bytes() {
        match b {
            b'0'..=b'9' => {
                mant = mant.checked_mul(10)?.checked_add((b - b'0') as i128)?;
                any = true;
                if seen_dot {
                    frac += 1;
                }
            }
            b'.' if !seen_dot => seen_dot = true,
            _ => return None,
        }
    }
    any.then_some((if neg { -mant } else { mant }, -frac))
}

/// Generated (or hand-written) input: one PQ literal per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub literals: Vec<String>,
    /// The unit pool rows were drawn from.
    pub units: Vec<String>,
}

impl Dataset {
    pub fn from_literals<S: AsRef<str>>(rows: &[S]) -> Dataset {
        Dataset {
            literals: rows.iter().map(|s| s.as_ref().to_string()).collect(),
            units: Vec::new(),
        }
    }

    /// Units eligible for random draws: ratio atoms with an exact decimal
    /// factor, excluding `m`.
    pub fn candidate_units(reg: &UnitRegistry) -> Vec<String> {
        reg.ratio_atoms()
            .into_iter()
            .filter(|a| *a != "m" && UnitInfo::new(a, reg).is_ok())
            .map(str::to_string)
            .collect()
    }

    pub fn generate(cfg: &BenchConfig, reg: &UnitRegistry) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let candidates = Dataset::candidate_units(reg);
        let mut units: Vec<String> = candidates
            .choose_multiple(&mut rng, cfg.random_units.min(candidates.len()))
            .cloned()
            .collect();
        units.push("m".to_string());
        let normal = Normal::new(cfg.mu, cfg.sigma).expect("sigma is finite and positive");
        let mut literals = Vec::with_capacity(cfg.n);
        for _ in 0..cfg.n {
            let unit = units.choose(&mut rng).expect("non-empty pool");
            let x: f64 = normal.sample(&mut rng);
            let null_row = rng.random_bool(cfg.null_fraction.clamp(0.0, 1.0));
            literals.push(if null_row {
                let nf = NULL_ROW_FLAVORS.choose(&mut rng).expect("non-empty");
                format!("{nf} {unit}")
            } else {
                let scaled = (x * 10_000.0).round() as i64;
                let v = Rational::from(scaled) * Rational::pow10(-4);
                format!("{} {unit}", v.to_decimal_string(4))
            });
        }
        if cfg.n > 0 {
            literals[cfg.n / 2] = PLANTED_LITERAL.to_string();
        }
        Dataset { literals, units }
    }
}

/// Interned unit table shared by rows of one representation.
#[derive(Debug, Default)]
struct UnitTable {
    infos: Vec<UnitInfo>,
    ids: HashMap<String, u16>,
}

impl UnitTable {
    fn intern(&mut self, name: &str, reg: &UnitRegistry) -> Result<u16> {
        if let Some(id) = self.ids.get(name) {
            return Ok(*id);
        }
        let id = u16::try_from(self.infos.len()).map_err(|_| Error::UnsupportedUnit("too many units".into()))?;
        self.infos.push(UnitInfo::new(name, reg)?);
        self.ids.insert(name.to_string(), id);
        Ok(id)
    }
}

/// A key range; `None` leaves that side unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeQuery {
    pub low: Option<(PackedKey, bool)>,
    pub high: Option<(PackedKey, bool)>,
}

impl RangeQuery {
    /// Range between two quantities; each side inclusive or not.
    pub fn between(low: &Pq, low_inclusive: bool, high: &Pq, high_inclusive: bool) -> Result<RangeQuery> {
        Ok(RangeQuery {
            low: Some((PackedKey::of(low)?, low_inclusive)),
            high: Some((PackedKey::of(high)?, high_inclusive)),
        })
    }

    pub fn matches(&self, k: &PackedKey) -> bool {
        let above = match &self.low {
            Some((lo, inc)) => k > lo || (*inc && k == lo),
            None => true,
        };
        let below = match &self.high {
            Some((hi, inc)) => k < hi || (*inc && k == hi),
            None => true,
        };
        above && below
    }

    fn below_low(&self, k: &PackedKey) -> bool {
        match &self.low {
            Some((lo, inc)) => k < lo || (!*inc && k == lo),
            None => false,
        }
    }

    fn within_high(&self, k: &PackedKey) -> bool {
        match &self.high {
            Some((hi, inc)) => k < hi || (*inc && k == hi),
            None => true,
        }
    }
}

/// One packed record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackedRow {
    pub nibble: u8,
    pub unit: u16,
    pub key: PackedKey,
}

#[derive(Debug, Default)]
pub struct PackedTable {
    units: UnitTable,
    rows: Vec<PackedRow>,
}

impl PackedTable {
    pub fn insert(ds: &Dataset, reg: &UnitRegistry) -> Result<PackedTable> {
        let mut t = PackedTable::default();
        t.rows.reserve(ds.literals.len());
        for lit in &ds.literals {
            let p = Pq::parse(lit, reg)?;
            let unit_name = p.unit().map(|u| u.to_string()).unwrap_or_default();
            let unit = if p.unit().is_some() {
                t.units.intern(&unit_name, reg)?
            } else {
                u16::MAX
            };
            let key = PackedKey::of(&p)?;
            t.rows.push(PackedRow {
                nibble: p.flavor().map_or(0, NullFlavor::nibble),
                unit,
                key,
            });
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The stored row as a quantity; equal to the inserted one.
    pub fn decode(&self, row: usize, reg: &UnitRegistry) -> Result<Pq> {
        let r = &self.rows[row];
        let nf = NullFlavor::from_nibble(r.nibble);
        let info = self.units.infos.get(r.unit as usize);
        let unit = info.map(|i| reg.parse(&i.name)).transpose()?;
        Ok(match (nf, unit) {
            (Some(nf), Some(u)) => Pq::null_with_unit(nf, u),
            (Some(nf), None) => Pq::null(nf),
            (None, Some(u)) => {
                let info = info.expect("unit present");
                let k = &r.key;
                let (neg, mant, exp) = match k.class {
                    Class::Negative => (true, u128::MAX - k.mant, -k.exp),
                    _ => (false, k.mant, k.exp),
                };
                let canonical = if k.class == Class::Zero {
                    Rational::zero()
                } else {
                    let m = Rational::from(BigInt::from(mant)) * Rational::pow10(exp as i32 - (KEY_DIGITS as i32 - 1));
                    if neg {
                        -m
                    } else {
                        m
                    }
                };
                let factor = Rational::from(BigInt::from(info.mant)) * Rational::pow10(info.exp);
                Pq::new(canonical.checked_div(&factor)?, u)
            }
            (None, None) => unreachable!("non-null row has a unit"),
        })
    }

    pub fn seq_scan(&self, q: &RangeQuery) -> Vec<u32> {
        (0..self.rows.len() as u32)
            .filter(|&i| q.matches(&self.rows[i as usize].key))
            .collect()
    }

    pub fn build_index(&self) -> PackedIndex {
        let mut entries: Vec<(PackedKey, u32)> = self.rows.iter().enumerate().map(|(i, r)| (r.key, i as u32)).collect();
        entries.sort_unstable();
        PackedIndex { entries }
    }
}

#[derive(Debug)]
pub struct PackedIndex {
    entries: Vec<(PackedKey, u32)>,
}

impl PackedIndex {
    pub fn bytes(&self) -> usize {
        self.entries.len() * std::mem::size_of::<(PackedKey, u32)>()
    }

    pub fn order(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn range_scan(&self, q: &RangeQuery) -> Vec<u32> {
        let start = self.entries.partition_point(|e| q.below_low(&e.0));
        self.entries[start..]
            .iter()
            .take_while(|e| q.within_high(&e.0))
            .map(|e| e.1)
            .collect()
    }

    pub fn equal_scan(&self, key: &PackedKey) -> Vec<u32> {
        self.range_scan(&RangeQuery {
            low: Some((*key, true)),
            high: Some((*key, true)),
        })
    }
}

/// One row as three text columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposedRow {
    pub value: String,
    pub unit: String,
    pub flavor: String,
}

impl DecomposedRow {
    fn heap_bytes(&self) -> usize {
        self.value.capacity() + self.unit.capacity() + self.flavor.capacity()
    }
}

#[derive(Debug, Default)]
pub struct DecomposedTable {
    units: HashMap<String, UnitInfo>,
    rows: Vec<DecomposedRow>,
}

impl DecomposedTable {
    pub fn insert(ds: &Dataset, reg: &UnitRegistry) -> Result<DecomposedTable> {
        let mut t = DecomposedTable::default();
        t.rows.reserve(ds.literals.len());
        for lit in &ds.literals {
            let p = Pq::parse(lit, reg)?;
            let unit = p.unit().map(|u| u.to_string()).unwrap_or_default();
            if p.unit().is_some() && !t.units.contains_key(&unit) {
                t.units.insert(unit.clone(), UnitInfo::new(&unit, reg)?);
            }
            t.rows.push(DecomposedRow {
                value: p
                    .value()
                    .map(|v| v.to_decimal_string(DEFAULT_FRAC_DIGITS))
                    .unwrap_or_default(),
                unit,
                flavor: p.flavor().map(|f| f.symbol().to_string()).unwrap_or_default(),
            });
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Re-derives the sort key from the three columns.
    fn key(&self, r: &DecomposedRow) -> PackedKey {
        let info = self.units.get(&r.unit);
        if !r.flavor.is_empty() {
            let nf = NullFlavor::parse(&r.flavor).expect("stored token is valid");
            return PackedKey::null(nf, info.map(|i| &i.dims));
        }
        let info = info.expect("non-null row has a unit");
        match parse_plain_decimal(&r.value) {
            Some((m, e)) => info.key(m, e),
            None => {
                let v: Rational = r.value.parse().expect("stored value is a decimal");
                let factor = Rational::from(BigInt::from(info.mant)) * Rational::pow10(info.exp);
                PackedKey::from_rational(&info.dims, &(&v * &factor))
            }
        }
        .expect("inserted rows have representable keys")
    }

    pub fn seq_scan(&self, q: &RangeQuery) -> Vec<u32> {
        (0..self.rows.len() as u32)
            .filter(|&i| q.matches(&self.key(&self.rows[i as usize])))
            .collect()
    }

    pub fn build_index(&self) -> DecomposedIndex<'_> {
        let mut entries: Vec<(DecomposedRow, u32)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i as u32))
            .collect();
        entries.sort_unstable_by(|a, b| self.key(&a.0).cmp(&self.key(&b.0)).then(a.1.cmp(&b.1)));
        DecomposedIndex { table: self, entries }
    }
}

#[derive(Debug)]
pub struct DecomposedIndex<'t> {
    table: &'t DecomposedTable,
    entries: Vec<(DecomposedRow, u32)>,
}

impl DecomposedIndex<'_> {
    pub fn bytes(&self) -> usize {
        self.entries.len() * std::mem::size_of::<(DecomposedRow, u32)>()
            + self.entries.iter().map(|e| e.0.heap_bytes()).sum::<usize>()
    }

    pub fn order(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.1).collect()
    }

    pub fn range_scan(&self, q: &RangeQuery) -> Vec<u32> {
        let start = self.entries.partition_point(|e| q.below_low(&self.table.key(&e.0)));
        self.entries[start..]
            .iter()
            .take_while(|e| q.within_high(&self.table.key(&e.0)))
            .map(|e| e.1)
            .collect()
    }

    pub fn equal_scan(&self, key: &PackedKey) -> Vec<u32> {
        self.range_scan(&RangeQuery {
            low: Some((*key, true)),
            high: Some((*key, true)),
        })
    }
}

/// Row sets produced by the five queries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QueryResults {
    pub inserted: usize,
    pub seq_scan: Vec<u32>,
    pub index_order: Vec<u32>,
    pub equal_scan: Vec<u32>,
    pub range_scan: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Packed,
    Decomposed,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Packed => "packed",
            Representation::Decomposed => "decomposed",
        }
    }
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "packed" => Ok(Representation::Packed),
            "decomposed" => Ok(Representation::Decomposed),
            _ => Err(Error::parse("representation", s, "expected packed or decomposed")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurement {
    pub representation: Representation,
    pub operation: &'static str,
    pub n: usize,
    pub median_ns: u128,
    pub mean_ns: u128,
    pub index_bytes: Option<usize>,
}

pub const OPERATIONS: [&str; 6] = [
    "insert",
    "seq_scan",
    "index_build",
    "index_size",
    "equal_scan",
    "range_scan",
];

/// The scan bounds used by the benchmark: 1.0 km to 1.2 km inclusive, and
/// the 1.2 km equality probe.
pub fn standard_queries(reg: &UnitRegistry) -> Result<(RangeQuery, PackedKey)> {
    let lo = Pq::parse("1.0 km", reg)?;
    let hi = Pq::parse("1.2 km", reg)?;
    Ok((RangeQuery::between(&lo, true, &hi, true)?, PackedKey::of(&hi)?))
}

/// Times `f` over `runs` samples after one discarded warm-up. Each sample
/// repeats `f` `inner` times and records the per-call time.
fn time<T>(runs: usize, inner: usize, mut f: impl FnMut() -> T) -> (u128, u128, T) {
    let mut out = f();
    let mut samples = Vec::with_capacity(runs);
    for _ in 0..runs.max(1) {
        let t0 = Instant::now();
        for _ in 0..inner {
            out = std::hint::black_box(f());
        }
        samples.push(t0.elapsed().as_nanos() / inner as u128);
    }
    samples.sort_unstable();
    let median = samples[samples.len() / 2];
    let mean = samples.iter().sum::<u128>() / samples.len() as u128;
    (median, mean, out)
}

/// Repetitions per sample for the cheap index probes.
const PROBE_REPEATS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub units: Vec<String>,
    pub measurements: Vec<Measurement>,
    pub results: Vec<(Representation, QueryResults)>,
}

impl BenchReport {
    /// True when every representation returned the same row sets.
    pub fn results_agree(&self) -> bool {
        self.results.windows(2).all(|w| w[0].1 == w[1].1)
    }

    pub fn measurement(&self, rep: Representation, op: &str) -> Option<&Measurement> {
        self.measurements
            .iter()
            .find(|m| m.representation == rep && m.operation == op)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        let c = &self.config;
        writeln!(
            w,
            "# seed={} n={} runs={} mu={} sigma={} null_fraction={} units={}",
            c.seed,
            c.n,
            c.runs,
            c.mu,
            c.sigma,
            c.null_fraction,
            self.units.join(" ")
        )?;
        writeln!(w, "representation,operation,n,median_ns,index_bytes,mean_ns")?;
        for m in &self.measurements {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                m.representation.name(),
                m.operation,
                m.n,
                m.median_ns,
                m.index_bytes.map(|b| b.to_string()).unwrap_or_default(),
                m.mean_ns
            )?;
        }
        Ok(())
    }
}

fn measure(
    rep: Representation,
    n: usize,
    operation: &'static str,
    (median_ns, mean_ns): (u128, u128),
    index_bytes: Option<usize>,
) -> Measurement {
    Measurement {
        representation: rep,
        operation,
        n,
        median_ns,
        mean_ns,
        index_bytes,
    }
}

fn run_packed(ds: &Dataset, cfg: &BenchConfig, reg: &UnitRegistry) -> Result<(Vec<Measurement>, QueryResults)> {
    let rep = Representation::Packed;
    let (range, probe) = standard_queries(reg)?;
    let n = ds.literals.len();
    let (m0, a0, table) = time(cfg.runs, 1, || PackedTable::insert(ds, reg));
    let table = table?;
    let (m1, a1, seq) = time(cfg.runs, 1, || table.seq_scan(&range));
    let (m2, a2, index) = time(cfg.runs, 1, || table.build_index());
    let (m3, a3, eq) = time(cfg.runs, PROBE_REPEATS, || index.equal_scan(&probe));
    let (m4, a4, rs) = time(cfg.runs, PROBE_REPEATS, || index.range_scan(&range));
    let ms = vec![
        measure(rep, n, "insert", (m0, a0), None),
        measure(rep, n, "seq_scan", (m1, a1), None),
        measure(rep, n, "index_build", (m2, a2), None),
        measure(rep, n, "index_size", (0, 0), Some(index.bytes())),
        measure(rep, n, "equal_scan", (m3, a3), None),
        measure(rep, n, "range_scan", (m4, a4), None),
    ];
    let res = QueryResults {
        inserted: table.len(),
        seq_scan: seq,
        index_order: index.order(),
        equal_scan: eq,
        range_scan: rs,
    };
    Ok((ms, res))
}

fn run_decomposed(ds: &Dataset, cfg: &BenchConfig, reg: &UnitRegistry) -> Result<(Vec<Measurement>, QueryResults)> {
    let rep = Representation::Decomposed;
    let (range, probe) = standard_queries(reg)?;
    let n = ds.literals.len();
    let (m0, a0, table) = time(cfg.runs, 1, || DecomposedTable::insert(ds, reg));
    let table = table?;
    let (m1, a1, seq) = time(cfg.runs, 1, || table.seq_scan(&range));
    let (m2, a2, _) = time(cfg.runs, 1, || table.build_index().entries.len());
    let index = table.build_index();
    let (m3, a3, eq) = time(cfg.runs, PROBE_REPEATS, || index.equal_scan(&probe));
    let (m4, a4, rs) = time(cfg.runs, PROBE_REPEATS, || index.range_scan(&range));
    let ms = vec![
        measure(rep, n, "insert", (m0, a0), None),
        measure(rep, n, "seq_scan", (m1, a1), None),
        measure(rep, n, "index_build", (m2, a2), None),
        measure(rep, n, "index_size", (0, 0), Some(index.bytes())),
        measure(rep, n, "equal_scan", (m3, a3), None),
        measure(rep, n, "range_scan", (m4, a4), None),
    ];
    let res = QueryResults {
        inserted: table.len(),
        seq_scan: seq,
        index_order: index.order(),
        equal_scan: eq,
        range_scan: rs,
    };
    Ok((ms, res))
}

/// Generates the dataset and measures the requested representations.
pub fn run(cfg: &BenchConfig, reps: &[Representation], reg: &UnitRegistry) -> Result<BenchReport> {
    let ds = Dataset::generate(cfg, reg);
    run_on(&ds, cfg, reps, reg)
}

pub fn run_on(ds: &Dataset, cfg: &BenchConfig, reps: &[Representation], reg: &UnitRegistry) -> Result<BenchReport> {
    let mut measurements = Vec::new();
    let mut results = Vec::new();
    for &rep in reps {
        let (ms, res) = match rep {
            Representation::Packed => run_packed(ds, cfg, reg)?,
            Representation::Decomposed => run_decomposed(ds, cfg, reg)?,
        };
        measurements.extend(ms);
        results.push((rep, res));
    }
    Ok(BenchReport {
        config: cfg.clone(),
        units: ds.units.clone(),
        measurements,
        results,
    })
}

/// Orders quantities the way both indexes do.
pub fn key_order(a: &Pq, b: &Pq) -> Result<Ordering> {
    Ok(PackedKey::of(a)?.cmp(&PackedKey::of(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantity::Discipline;
    use proptest::prelude::*;

    fn reg() -> &'static UnitRegistry {
        UnitRegistry::standard()
    }

    fn small(n: usize, seed: u64) -> BenchConfig {
        BenchConfig {
            n,
            seed,
            runs: 1,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = Dataset::generate(&small(1000, 7), reg());
        let b = Dataset::generate(&small(1000, 7), reg());
        assert_eq!(a, b);
        assert_ne!(a, Dataset::generate(&small(1000, 8), reg()));
        assert_eq!(a.units.len(), 21);
        assert!(a.units.contains(&"m".to_string()));
        let mut seen: Vec<&String> = a.units.iter().collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 21);
        assert!(a.literals.contains(&PLANTED_LITERAL.to_string()));
    }

    #[test]
    fn generated_values_are_centred() {
        let cfg = BenchConfig {
            null_fraction: 0.0,
            ..small(20_000, 11)
        };
        let ds = Dataset::generate(&cfg, reg());
        let values: Vec<f64> = ds
            .literals
            .iter()
            .map(|l| Pq::parse(l, reg()).unwrap().value().unwrap().to_f64())
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert!(
            mean.abs() < 3.0 * cfg.sigma / (values.len() as f64).sqrt(),
            "mean {mean}"
        );
        for l in &ds.literals {
            let p = Pq::parse(l, reg()).unwrap();
            assert!(p.value().unwrap().terminating_digits().unwrap() <= 4);
        }
    }

    #[test]
    fn packed_rows_decode_to_equal_values() {
        let ds = Dataset::generate(&small(2000, 3), reg());
        let t = PackedTable::insert(&ds, reg()).unwrap();
        for (i, lit) in ds.literals.iter().enumerate() {
            let p = Pq::parse(lit, reg()).unwrap();
            let back = t.decode(i, reg()).unwrap();
            assert_eq!(back.flavor(), p.flavor(), "{lit}");
            if p.flavor().is_none() {
                assert!(back.equal(&p).is_true(), "{lit} vs {back}");
                assert_eq!(back.unit(), p.unit());
            }
        }
    }

    #[test]
    fn representations_agree() {
        let cfg = small(5000, 7);
        let report = run(&cfg, &[Representation::Packed, Representation::Decomposed], reg()).unwrap();
        assert!(report.results_agree());
        let r = &report.results[0].1;
        assert_eq!(r.inserted, 5000);
        assert!(!r.equal_scan.is_empty());
        let mut seq = r.seq_scan.clone();
        let mut range = r.range_scan.clone();
        seq.sort();
        range.sort();
        assert_eq!(seq, range);
        for id in &r.range_scan {
            assert!(r.seq_scan.contains(id));
        }
        let packed = report.measurement(Representation::Packed, "index_size").unwrap();
        let decomposed = report.measurement(Representation::Decomposed, "index_size").unwrap();
        assert!(packed.index_bytes < decomposed.index_bytes);
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("# seed=7 n=5000"));
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "representation,operation,n,median_ns,index_bytes,mean_ns"
        );
        assert_eq!(text.lines().count(), 2 + 12);
    }

    #[test]
    fn range_scan_brute_force() {
        let ds = Dataset::generate(&small(3000, 5), reg());
        let (range, probe) = standard_queries(reg()).unwrap();
        let lo: Pq = "1.0 km".parse().unwrap();
        let hi: Pq = "1.2 km".parse().unwrap();
        let expect: Vec<u32> = ds
            .literals
            .iter()
            .enumerate()
            .filter(|(_, l)| {
                let p = Pq::parse(l, reg()).unwrap();
                p.flavor().is_none()
                    && p.compare(crate::quantity::Comparison::Ge, &lo).is_true()
                    && p.compare(crate::quantity::Comparison::Le, &hi).is_true()
            })
            .map(|(i, _)| i as u32)
            .collect();
        let t = PackedTable::insert(&ds, reg()).unwrap();
        assert_eq!(t.seq_scan(&range), expect);
        let eq: Vec<u32> = ds
            .literals
            .iter()
            .enumerate()
            .filter(|(_, l)| Pq::parse(l, reg()).unwrap().equal(&hi).is_true())
            .map(|(i, _)| i as u32)
            .collect();
        assert_eq!(t.build_index().equal_scan(&probe), eq);
    }

    #[test]
    fn trace_row_is_in_positive_range() {
        let ds = Dataset::from_literals(&[
            "trc ml", "5 ml", "0 ml", "-3 ml", "2 s", "pinf ml", "nav ml", "nav", "0.001 l",
        ]);
        let q = RangeQuery {
            low: Some((PackedKey::of(&"0 ml".parse().unwrap()).unwrap(), false)),
            high: Some((PackedKey::of(&"pinf ml".parse().unwrap()).unwrap(), false)),
        };
        let p = PackedTable::insert(&ds, reg()).unwrap();
        let d = DecomposedTable::insert(&ds, reg()).unwrap();
        assert_eq!(p.seq_scan(&q), vec![0, 1, 8]);
        assert_eq!(d.seq_scan(&q), vec![0, 1, 8]);
        assert_eq!(p.build_index().range_scan(&q), vec![0, 8, 1]);
        assert_eq!(d.build_index().range_scan(&q), vec![0, 8, 1]);
    }

    #[test]
    fn plain_decimal_parser() {
        assert_eq!(parse_plain_decimal("-123.4567"), Some((-1234567, -4)));
        assert_eq!(parse_plain_decimal("42"), Some((42, 0)));
        assert_eq!(parse_plain_decimal("1e3"), None);
        assert_eq!(parse_plain_decimal("-"), None);
        assert_eq!(parse_plain_decimal("1.2.3"), None);
    }

    const UNITS: &[&str] = &[
        "m", "cm", "km", "[in_i]", "[ft_i]", "ml", "l", "s", "h", "g", "[lb_av]", "mol",
    ];

    fn arb_pq() -> impl Strategy<Value = Pq> {
        let value = (-10_000_000i64..10_000_000, 0i32..6, 0..UNITS.len())
            .prop_map(|(n, e, u)| Pq::new(Rational::from(n) * Rational::pow10(-e), reg().parse(UNITS[u]).unwrap()));
        let null = (0usize..15, 0..UNITS.len())
            .prop_map(|(f, u)| Pq::null_with_unit(NullFlavor::ALL[f], reg().parse(UNITS[u]).unwrap()));
        prop_oneof![4 => value, 1 => null]
    }

    proptest! {
        #[test]
        fn key_order_matches_pq_order(a in arb_pq(), b in arb_pq()) {
            prop_assert_eq!(key_order(&a, &b).unwrap(), a.order(&b, Discipline::EqualOps));
        }
    }
}
