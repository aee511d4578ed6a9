//! UCUM unit expressions and their canonical form.
//!
//! A unit string such as `kg/m2` or `mm[Hg]` is parsed into a flat list of
//! terms (prefix, atom, exponent). Canonicalization expands every atom down
//! to the seven base units and multiplies the definition factors exactly, so
//! any expression becomes `factor × m^a.g^b.s^c.rad^d.K^e.C^f.cd^g`.
//!
//! The atom catalogue is data: see `data/ucum.tsv` for the file format.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numeric::Rational;

/// Base unit symbols in dimension-vector order.
pub const BASE_UNITS: [&str; 7] = ["m", "g", "s", "rad", "K", "C", "cd"];
const DIM_CODES: [char; 7] = ['L', 'M', 'T', 'A', 'C', 'Q', 'F'];

pub type Dims = [i32; 7];

/// `factor × base-units^dims`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Canonical {
    pub factor: Rational,
    pub dims: Dims,
}

impl Canonical {
    pub fn unity() -> Canonical {
        Canonical {
            factor: Rational::one(),
            dims: [0; 7],
        }
    }

    pub fn mul(&self, other: &Canonical) -> Canonical {
        let mut dims = self.dims;
        for (d, o) in dims.iter_mut().zip(other.dims) {
            *d += o;
        }
        Canonical {
            factor: &self.factor * &other.factor,
            dims,
        }
    }

    pub fn pow(&self, exp: i32) -> Canonical {
        Canonical {
            factor: self.factor.pow(exp).expect("canonical factors are positive"),
            dims: self.dims.map(|d| d * exp),
        }
    }

    /// The dimension vector as a unit expression, e.g. `m-1.g.s-2`.
    pub fn base_expression(&self) -> String {
        dims_expression(&self.dims)
    }
}

pub fn dims_expression(dims: &Dims) -> String {
    let parts: Vec<String> = BASE_UNITS
        .iter()
        .zip(dims)
        .filter(|(_, e)| **e != 0)
        .map(|(u, e)| if *e == 1 { u.to_string() } else { format!("{u}{e}") })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(".")
    }
}

impl fmt::Display for Canonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            self.factor.to_decimal_string(crate::numeric::DEFAULT_FRAC_DIGITS),
            self.base_expression()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnitTerm {
    pub atom: String,
    pub prefix: Option<String>,
    pub exponent: i32,
}

impl fmt::Display for UnitTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.prefix {
            f.write_str(p)?;
        }
        f.write_str(&self.atom)?;
        if self.exponent != 1 {
            write!(f, "{}", self.exponent)?;
        }
        Ok(())
    }
}

/// A parsed unit. Equality and hashing look at the terms only; the canonical
/// form is computed once at parse time.
#[derive(Debug, Clone)]
pub struct UnitExpr {
    source: String,
    terms: Vec<UnitTerm>,
    canonical: Canonical,
}

impl UnitExpr {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn terms(&self) -> &[UnitTerm] {
        &self.terms
    }

    pub fn canonical(&self) -> &Canonical {
        &self.canonical
    }

    pub fn dims(&self) -> &Dims {
        &self.canonical.dims
    }

    pub fn is_unity(&self) -> bool {
        self.terms.is_empty()
    }

    /// Units compare when their canonical dimension vectors coincide.
    pub fn compares(&self, other: &UnitExpr) -> bool {
        self.canonical.dims == other.canonical.dims
    }
}

impl PartialEq for UnitExpr {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for UnitExpr {}

impl std::hash::Hash for UnitExpr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl fmt::Display for UnitExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.exponent < 0 {
                f.write_str("/")?;
                let flipped = UnitTerm {
                    exponent: -t.exponent,
                    ..t.clone()
                };
                write!(f, "{flipped}")?;
            } else {
                if i > 0 {
                    f.write_str(".")?;
                }
                write!(f, "{t}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum AtomKind {
    Base(usize),
    Derived { value: Rational, unit: String },
    Special,
}

#[derive(Debug, Clone)]
struct AtomDef {
    metric: bool,
    kind: AtomKind,
    line: usize,
}

/// Immutable catalogue of prefixes and atoms with precomputed canonical forms.
#[derive(Debug, Clone)]
pub struct UnitRegistry {
    prefixes: HashMap<String, Rational>,
    /// Prefix symbols, longest first.
    prefix_order: Vec<String>,
    atoms: HashMap<String, AtomDef>,
    canonical: HashMap<String, Canonical>,
}

const STANDARD: &str = include_str!("../data/ucum.tsv");

impl UnitRegistry {
    /// The registry shipped with the crate.
    pub fn standard() -> &'static UnitRegistry {
        static REG: OnceLock<UnitRegistry> = OnceLock::new();
        REG.get_or_init(|| UnitRegistry::from_tsv(STANDARD).expect("shipped unit registry is valid"))
    }

    pub fn load(path: &Path) -> Result<UnitRegistry> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        UnitRegistry::from_tsv(&text)
    }

    pub fn from_tsv(text: &str) -> Result<UnitRegistry> {
        let mut reg = UnitRegistry {
            prefixes: HashMap::new(),
            prefix_order: Vec::new(),
            atoms: HashMap::new(),
            canonical: HashMap::new(),
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            let bad = |reason: &str| Error::RegistryFormat {
                line,
                reason: reason.to_string(),
            };
            if fields[0] == "@prefix" {
                if fields.len() != 3 {
                    return Err(bad("prefix line needs 3 fields"));
                }
                let v: Rational = fields[2].parse().map_err(|_| bad("bad prefix value"))?;
                if reg.prefixes.insert(fields[1].to_string(), v).is_some() {
                    return Err(bad("duplicate prefix"));
                }
                continue;
            }
            if fields.len() < 3 {
                return Err(bad("atom line needs at least 3 fields"));
            }
            let atom = fields[0];
            if atom.is_empty() || atom.contains(['.', '/', '(', ')', ' ']) {
                return Err(bad("invalid atom symbol"));
            }
            let metric = match fields[1] {
                "y" => true,
                "n" => false,
                _ => return Err(bad("metric flag must be y or n")),
            };
            let kind = if let Some(dim) = fields[2].strip_prefix("=base:") {
                let d = dim.chars().next().and_then(|c| DIM_CODES.iter().position(|x| *x == c));
                match d {
                    Some(i) if dim.len() == 1 => AtomKind::Base(i),
                    _ => return Err(bad("unknown base dimension")),
                }
            } else if fields[2] == "=special" {
                AtomKind::Special
            } else {
                if fields.len() != 4 {
                    return Err(bad("derived atom needs value and unit"));
                }
                let value: Rational = fields[2].parse().map_err(|_| bad("bad definition value"))?;
                if !value.is_positive() {
                    return Err(bad("definition value must be positive"));
                }
                AtomKind::Derived {
                    value,
                    unit: fields[3].to_string(),
                }
            };
            if reg
                .atoms
                .insert(atom.to_string(), AtomDef { metric, kind, line })
                .is_some()
            {
                return Err(bad("duplicate atom"));
            }
        }
        let mut order: Vec<String> = reg.prefixes.keys().cloned().collect();
        order.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        reg.prefix_order = order;

        let mut names: Vec<String> = reg.atoms.keys().cloned().collect();
        names.sort();
        let mut visiting = HashSet::new();
        for name in names {
            reg.resolve_atom(&name, &mut visiting)?;
        }
        Ok(reg)
    }

    fn resolve_atom(&mut self, name: &str, visiting: &mut HashSet<String>) -> Result<Option<Canonical>> {
        if let Some(c) = self.canonical.get(name) {
            return Ok(Some(c.clone()));
        }
        let def = self
            .atoms
            .get(name)
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))?
            .clone();
        let canonical = match def.kind {
            AtomKind::Special => return Ok(None),
            AtomKind::Base(i) => {
                let mut dims = [0; 7];
                dims[i] = 1;
                Canonical {
                    factor: Rational::one(),
                    dims,
                }
            }
            AtomKind::Derived { value, unit } => {
                if !visiting.insert(name.to_string()) {
                    return Err(Error::RegistryCycle(name.to_string()));
                }
                let terms = self.parse_terms(&unit).map_err(|e| match e {
                    Error::RegistryCycle(_) => e,
                    other => Error::RegistryFormat {
                        line: def.line,
                        reason: format!("definition of '{name}': {other}"),
                    },
                })?;
                let mut acc = Canonical {
                    factor: value,
                    dims: [0; 7],
                };
                for t in &terms {
                    let base = match self.resolve_atom(&t.atom, visiting)? {
                        Some(c) => c,
                        None => return Err(Error::UnsupportedUnit(t.atom.clone())),
                    };
                    acc = acc.mul(&self.term_canonical(t, &base));
                }
                visiting.remove(name);
                acc
            }
        };
        self.canonical.insert(name.to_string(), canonical.clone());
        Ok(Some(canonical))
    }

    fn term_canonical(&self, term: &UnitTerm, atom: &Canonical) -> Canonical {
        let mut c = atom.clone();
        if let Some(p) = &term.prefix {
            c.factor = &c.factor * &self.prefixes[p];
        }
        c.pow(term.exponent)
    }

    pub fn has_atom(&self, atom: &str) -> bool {
        self.atoms.contains_key(atom)
    }

    pub fn atom_names(&self) -> impl Iterator<Item = &str> {
        self.atoms.keys().map(String::as_str)
    }

    /// Atoms with a ratio-scale definition (everything except special units).
    pub fn ratio_atoms(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.canonical.keys().map(String::as_str).collect();
        v.sort();
        v
    }

    pub fn prefix_value(&self, prefix: &str) -> Option<&Rational> {
        self.prefixes.get(prefix)
    }

    /// Parses and canonicalizes a unit string.
    pub fn parse(&self, s: &str) -> Result<UnitExpr> {
        let terms = self.parse_terms(s)?;
        let canonical = self.canonicalize(&terms)?;
        Ok(UnitExpr {
            source: s.trim().to_string(),
            terms,
            canonical,
        })
    }

    pub fn canonicalize(&self, terms: &[UnitTerm]) -> Result<Canonical> {
        let mut acc = Canonical::unity();
        for t in terms {
            let atom = match self.canonical.get(&t.atom) {
                Some(c) => c,
                None if self.atoms.contains_key(&t.atom) => return Err(Error::UnsupportedUnit(t.atom.clone())),
                None => return Err(Error::UnknownAtom(t.atom.clone())),
            };
            acc = acc.mul(&self.term_canonical(t, atom));
        }
        Ok(acc)
    }

    pub fn compares(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.parse(a)?.compares(&self.parse(b)?))
    }

    fn parse_terms(&self, s: &str) -> Result<Vec<UnitTerm>> {
        let src = s.trim();
        if src.is_empty() {
            return Err(Error::syntax(s, "empty unit"));
        }
        if src.contains(['{', '}']) {
            return Err(Error::UnsupportedUnit(src.to_string()));
        }
        let mut p = TermParser { src, pos: 0, reg: self };
        let terms = p.term()?;
        if p.pos != src.len() {
            return Err(Error::syntax(src, format!("unexpected '{}'", &src[p.pos..])));
        }
        Ok(terms)
    }

    /// Splits a component symbol such as `mm`, `kPa` or `m[Hg]` into an
    /// optional prefix and an atom. Whole-atom matches win over prefixed
    /// readings, so `Pa` is pascal and `cd` is candela.
    fn resolve_symbol(&self, sym: &str) -> Result<(Option<String>, String)> {
        if self.atoms.contains_key(sym) {
            return Ok((None, sym.to_string()));
        }
        let mut prefixed_non_metric = None;
        for p in &self.prefix_order {
            if let Some(rest) = sym.strip_prefix(p.as_str()) {
                if let Some(def) = self.atoms.get(rest) {
                    if def.metric {
                        return Ok((Some(p.clone()), rest.to_string()));
                    }
                    prefixed_non_metric.get_or_insert((p.clone(), rest.to_string()));
                }
            }
        }
        match prefixed_non_metric {
            Some((prefix, atom)) => Err(Error::UnknownPrefix { prefix, atom }),
            None => Err(Error::UnknownAtom(sym.to_string())),
        }
    }
}

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
    reg: &'a UnitRegistry,
}

impl TermParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    /// term := ['/'] component (('.' | '/') component)*
    fn term(&mut self) -> Result<Vec<UnitTerm>> {
        let mut out = Vec::new();
        let mut sign = 1;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            sign = -1;
        }
        loop {
            let comp = self.component()?;
            out.extend(comp.into_iter().map(|mut t| {
                t.exponent *= sign;
                t
            }));
            match self.peek() {
                Some(b'.') => sign = 1,
                Some(b'/') => sign = -1,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(out)
    }

    fn component(&mut self) -> Result<Vec<UnitTerm>> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let inner = self.term()?;
            if self.peek() != Some(b')') {
                return Err(Error::syntax(self.src, "missing ')'"));
            }
            self.pos += 1;
            return Ok(inner);
        }
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut depth = 0usize;
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b'[' => depth += 1,
                b']' => {
                    if depth == 0 {
                        return Err(Error::syntax(self.src, "unbalanced ']'"));
                    }
                    depth -= 1;
                }
                b'.' | b'/' | b'(' | b')' if depth == 0 => break,
                b' ' | b'\t' if depth == 0 => return Err(Error::syntax(self.src, "whitespace inside unit")),
                _ => {}
            }
            self.pos += 1;
        }
        if depth != 0 {
            return Err(Error::syntax(self.src, "unbalanced '['"));
        }
        let text = &self.src[start..self.pos];
        if text.is_empty() {
            return Err(Error::syntax(self.src, "empty component"));
        }
        if text == "1" {
            return Ok(Vec::new());
        }
        let (sym, exponent) = split_exponent(text).map_err(|r| Error::syntax(self.src, r))?;
        let (prefix, atom) = self.reg.resolve_symbol(sym)?;
        Ok(vec![UnitTerm { atom, prefix, exponent }])
    }
}

/// `m2` → (`m`, 2); `s-1` → (`s`, -1); `[in_i]` → (`[in_i]`, 1).
fn split_exponent(text: &str) -> std::result::Result<(&str, i32), String> {
    let b = text.as_bytes();
    let mut i = b.len();
    while i > 0 && b[i - 1].is_ascii_digit() {
        i -= 1;
    }
    let digits_start = i;
    if i > 0 && (b[i - 1] == b'+' || b[i - 1] == b'-') {
        if digits_start == b.len() {
            return Err(format!("sign without exponent digits in '{text}'"));
        }
        i -= 1;
    }
    if digits_start == b.len() || i == 0 {
        // no exponent, or the whole component is digits (not an atom)
        if text.ends_with(['+', '-']) {
            return Err(format!("sign without exponent digits in '{text}'"));
        }
        return Ok((text, 1));
    }
    let exp: i32 = text[i..].parse().map_err(|_| format!("bad exponent in '{text}'"))?;
    Ok((&text[..i], exp))
}
