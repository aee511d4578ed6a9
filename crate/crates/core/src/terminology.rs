//! Code systems, value sets, concept domains and coded values (CV).
//!
//! A full CV literal is `code:csOID[@version][:vsOID[@version]][|originaltext]`.
//! Under a concept domain only `code[|originaltext]` is written; the parsed
//! value still carries every field, so it keeps its meaning outside the
//! context it was entered in.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::identity::is_oid;
use crate::logic::{Bl, Bn};
use crate::nullflavor::NullFlavor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub code: String,
    pub display_name: String,
    pub parents: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CodeSystem {
    pub oid: String,
    pub name: String,
    pub version: String,
    concepts: BTreeMap<String, Concept>,
    /// Reflexive-transitive ancestors of every code.
    ancestors: HashMap<String, BTreeSet<String>>,
}

impl CodeSystem {
    pub fn concept(&self, code: &str) -> Option<&Concept> {
        self.concepts.get(code)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// `a` is `b` or a specialization of it.
    pub fn subsumed_by(&self, a: &str, b: &str) -> Option<bool> {
        self.concepts.get(b)?;
        Some(self.ancestors.get(a)?.contains(b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    pub oid: String,
    pub name: String,
    pub version: String,
    pub code_system: String,
    /// `None` admits every code of the code system.
    pub members: Option<BTreeSet<String>>,
}

impl ValueSet {
    pub fn admits(&self, system: &CodeSystem, code: &str) -> bool {
        system.concept(code).is_some() && self.members.as_ref().is_none_or(|m| m.contains(code))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainBinding {
    pub name: String,
    pub code_system: String,
    pub value_set: String,
}

#[derive(Debug, Clone, Default)]
pub struct ConceptRegistry {
    systems: BTreeMap<String, CodeSystem>,
    value_sets: BTreeMap<String, ValueSet>,
    domains: BTreeMap<String, DomainBinding>,
}

const STANDARD_TERMINOLOGY: &str = include_str!("../data/terminology.tsv");

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(str::to_string)
        .collect()
}

impl ConceptRegistry {
    /// The shipped toy registry (ActStatus, ActMood and a synthetic
    /// clinical-finding hierarchy).
    pub fn standard() -> &'static ConceptRegistry {
        static REG: OnceLock<ConceptRegistry> = OnceLock::new();
        REG.get_or_init(|| ConceptRegistry::from_text(STANDARD_TERMINOLOGY).expect("shipped terminology is valid"))
    }

    pub fn load(path: &Path) -> Result<ConceptRegistry> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        ConceptRegistry::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<ConceptRegistry> {
        let mut reg = ConceptRegistry::default();
        let mut section = "";
        let mut codes: Vec<(usize, String, Concept)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fmt_err = |reason: String| Error::TerminologyFormat { line: line_no, reason };
            if let Some(name) = line.trim().strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name {
                    "codesystems" | "codes" | "valuesets" | "domains" => name,
                    _ => return Err(fmt_err(format!("unknown section [{name}]"))),
                };
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let want = |lo: usize, hi: usize| {
                if fields.len() < lo || fields.len() > hi || fields[..lo].iter().any(|f| f.is_empty()) {
                    Err(fmt_err(format!("expected {lo} fields in [{section}]")))
                } else {
                    Ok(())
                }
            };
            match section {
                "codesystems" => {
                    want(3, 3)?;
                    if !is_oid(fields[0]) {
                        return Err(fmt_err(format!("bad OID '{}'", fields[0])));
                    }
                    let cs = CodeSystem {
                        oid: fields[0].into(),
                        name: fields[1].into(),
                        version: fields[2].into(),
                        concepts: BTreeMap::new(),
                        ancestors: HashMap::new(),
                    };
                    if reg.systems.insert(cs.oid.clone(), cs).is_some() {
                        return Err(fmt_err(format!("duplicate code system {}", fields[0])));
                    }
                }
                "codes" => {
                    want(3, 4)?;
                    let code = fields[1];
                    if code.contains([':', '@', '|', ',']) || code.contains(char::is_whitespace) {
                        return Err(fmt_err(format!("code '{code}' contains a reserved character")));
                    }
                    let parents = fields.get(3).map(|p| split_list(p)).unwrap_or_default();
                    codes.push((
                        line_no,
                        fields[0].to_string(),
                        Concept {
                            code: code.into(),
                            display_name: fields[2].into(),
                            parents,
                        },
                    ));
                }
                "valuesets" => {
                    want(5, 5)?;
                    if !is_oid(fields[0]) {
                        return Err(fmt_err(format!("bad OID '{}'", fields[0])));
                    }
                    let members = match fields[4] {
                        "*" => None,
                        list => Some(split_list(list).into_iter().collect()),
                    };
                    let vs = ValueSet {
                        oid: fields[0].into(),
                        name: fields[1].into(),
                        version: fields[2].into(),
                        code_system: fields[3].into(),
                        members,
                    };
                    reg.value_sets.insert(vs.oid.clone(), vs);
                }
                "domains" => {
                    want(3, 3)?;
                    let d = DomainBinding {
                        name: fields[0].into(),
                        code_system: fields[1].into(),
                        value_set: fields[2].into(),
                    };
                    reg.domains.insert(d.name.clone(), d);
                }
                _ => return Err(fmt_err("data before the first section".into())),
            }
        }
        for (line, system, concept) in codes {
            let cs = reg.systems.get_mut(&system).ok_or_else(|| Error::DanglingReference {
                kind: "code system",
                name: system.clone(),
            })?;
            if cs.concepts.contains_key(&concept.code) {
                return Err(Error::TerminologyFormat {
                    line,
                    reason: format!("duplicate code {}", concept.code),
                });
            }
            cs.concepts.insert(concept.code.clone(), concept);
        }
        for cs in reg.systems.values_mut() {
            cs.ancestors = ancestor_closure(cs)?;
        }
        for vs in reg.value_sets.values() {
            let cs = reg
                .systems
                .get(&vs.code_system)
                .ok_or_else(|| Error::DanglingReference {
                    kind: "code system",
                    name: vs.code_system.clone(),
                })?;
            for m in vs.members.iter().flatten() {
                if cs.concept(m).is_none() {
                    return Err(Error::DanglingReference {
                        kind: "code",
                        name: format!("{m} in value set {}", vs.name),
                    });
                }
            }
        }
        for d in reg.domains.values() {
            if !reg.systems.contains_key(&d.code_system) {
                return Err(Error::DanglingReference {
                    kind: "code system",
                    name: d.code_system.clone(),
                });
            }
            match reg.value_sets.get(&d.value_set) {
                Some(vs) if vs.code_system == d.code_system => {}
                Some(_) => {
                    return Err(Error::DanglingReference {
                        kind: "value set",
                        name: format!("{} does not draw from {}", d.value_set, d.code_system),
                    })
                }
                None => {
                    return Err(Error::DanglingReference {
                        kind: "value set",
                        name: d.value_set.clone(),
                    })
                }
            }
        }
        Ok(reg)
    }

    pub fn code_system(&self, oid: &str) -> Option<&CodeSystem> {
        self.systems.get(oid)
    }

    pub fn code_systems(&self) -> impl Iterator<Item = &CodeSystem> {
        self.systems.values()
    }

    pub fn value_set(&self, oid: &str) -> Option<&ValueSet> {
        self.value_sets.get(oid)
    }

    pub fn domain(&self, name: &str) -> Result<&DomainBinding> {
        self.domains
            .get(name)
            .ok_or_else(|| Error::UnknownDomain(name.to_string()))
    }

    pub fn domains(&self) -> impl Iterator<Item = &DomainBinding> {
        self.domains.values()
    }
}

/// Ancestor sets by depth-first search; a parent edge back onto the current
/// path is a cycle.
fn ancestor_closure(cs: &CodeSystem) -> Result<HashMap<String, BTreeSet<String>>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(
        cs: &CodeSystem,
        code: &str,
        marks: &mut HashMap<String, Mark>,
        out: &mut HashMap<String, BTreeSet<String>>,
    ) -> Result<()> {
        match marks.get(code) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => {
                return Err(Error::TerminologyCycle {
                    system: cs.name.clone(),
                    code: code.to_string(),
                })
            }
            None => {}
        }
        marks.insert(code.to_string(), Mark::Active);
        let concept = &cs.concepts[code];
        let mut set = BTreeSet::from([code.to_string()]);
        for p in &concept.parents {
            if !cs.concepts.contains_key(p) {
                return Err(Error::DanglingReference {
                    kind: "parent code",
                    name: format!("{p} (parent of {code} in {})", cs.name),
                });
            }
            visit(cs, p, marks, out)?;
            set.extend(out[p].iter().cloned());
        }
        marks.insert(code.to_string(), Mark::Done);
        out.insert(code.to_string(), set);
        Ok(())
    }
    let mut marks = HashMap::new();
    let mut out = HashMap::new();
    for code in cs.concepts.keys() {
        visit(cs, code, &mut marks, &mut out)?;
    }
    Ok(out)
}

/// Accessor names, in the order a CV record is listed.
pub const CV_FIELDS: [&str; 9] = [
    "code",
    "codesystem",
    "codesystemname",
    "codesystemversion",
    "valueset",
    "valuesetname",
    "valuesetversion",
    "originaltext",
    "displayname",
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Cv {
    flavor: Option<NullFlavor>,
    code: Option<String>,
    code_system: Option<String>,
    code_system_version: Option<String>,
    value_set: Option<String>,
    value_set_version: Option<String>,
    original_text: Option<String>,
}

fn split_version(s: &str) -> (&str, Option<&str>) {
    match s.split_once('@') {
        Some((a, v)) => (a, Some(v)),
        None => (s, None),
    }
}

impl Cv {
    pub fn null(nf: NullFlavor) -> Cv {
        Cv {
            flavor: Some(nf),
            ..Cv::default()
        }
    }

    /// Syntax-only parse of a full literal.
    pub fn parse_full(s: &str) -> Result<Cv> {
        let t = s.trim_start();
        let (main, text) = match t.split_once('|') {
            Some((m, o)) => (m.trim_end(), Some(o.to_string())),
            None => (t.trim_end(), None),
        };
        if let Ok(nf) = NullFlavor::parse(main) {
            return Ok(Cv {
                original_text: text,
                ..Cv::null(nf)
            });
        }
        let bad = |reason: &str| Error::parse("CV", s, reason);
        let parts: Vec<&str> = main.split(':').collect();
        if !(2..=3).contains(&parts.len()) {
            return Err(bad("expected code:codesystem[@version][:valueset[@version]]"));
        }
        let code = parts[0];
        if code.is_empty() || code.contains('@') || code.contains(char::is_whitespace) {
            return Err(bad("bad code"));
        }
        let (cs, cs_ver) = split_version(parts[1]);
        if !is_oid(cs) {
            return Err(bad("code system must be an OID"));
        }
        let (vs, vs_ver) = match parts.get(2) {
            Some(p) => {
                let (vs, v) = split_version(p);
                if !is_oid(vs) {
                    return Err(bad("value set must be an OID"));
                }
                (Some(vs), v)
            }
            None => (None, None),
        };
        if [cs_ver, vs_ver]
            .iter()
            .flatten()
            .any(|v| v.is_empty() || v.contains('@'))
        {
            return Err(bad("bad version"));
        }
        Ok(Cv {
            flavor: None,
            code: Some(code.into()),
            code_system: Some(cs.into()),
            code_system_version: cs_ver.map(str::to_string),
            value_set: vs.map(str::to_string),
            value_set_version: vs_ver.map(str::to_string),
            original_text: text,
        })
    }

    /// Parses a full literal (no domain) or a short `code[|originaltext]`
    /// literal under a concept domain, checking the code against the registry.
    pub fn parse(s: &str, domain: Option<&str>, reg: &ConceptRegistry) -> Result<Cv> {
        let Some(domain) = domain else {
            let cv = Cv::parse_full(s)?;
            if let (Some(code), Some(oid)) = (&cv.code, &cv.code_system) {
                let cs = reg
                    .code_system(oid)
                    .ok_or_else(|| Error::UnknownCodeSystem(oid.clone()))?;
                if cs.concept(code).is_none() {
                    return Err(Error::InvalidCode {
                        code: code.clone(),
                        system: cs.name.clone(),
                    });
                }
                if let Some(vs) = cv.value_set.as_deref().and_then(|v| reg.value_set(v)) {
                    if !vs.admits(cs, code) {
                        return Err(Error::InvalidCode {
                            code: code.clone(),
                            system: cs.name.clone(),
                        });
                    }
                }
            }
            return Ok(cv);
        };
        let binding = reg.domain(domain)?;
        let cs = reg.code_system(&binding.code_system).expect("validated at load");
        let vs = reg.value_set(&binding.value_set).expect("validated at load");
        let t = s.trim();
        let (code, text) = match t.split_once('|') {
            Some((c, o)) => (c.trim(), Some(o.to_string())),
            None => (t, None),
        };
        if let Ok(nf) = NullFlavor::parse(code) {
            return Ok(Cv {
                original_text: text,
                ..Cv::null(nf)
            });
        }
        if !vs.admits(cs, code) {
            return Err(Error::InvalidCode {
                code: code.to_string(),
                system: cs.name.clone(),
            });
        }
        Ok(Cv {
            flavor: None,
            code: Some(code.to_string()),
            code_system: Some(cs.oid.clone()),
            code_system_version: Some(cs.version.clone()),
            value_set: Some(vs.oid.clone()),
            value_set_version: Some(vs.version.clone()),
            original_text: text,
        })
    }

    pub fn flavor(&self) -> Option<NullFlavor> {
        self.flavor
    }

    pub fn is_null(&self) -> bool {
        self.flavor.is_some()
    }

    pub fn code(&self) -> Option<&str> {
        self.code.as_deref()
    }

    pub fn code_system(&self) -> Option<&str> {
        self.code_system.as_deref()
    }

    pub fn code_system_version(&self) -> Option<&str> {
        self.code_system_version.as_deref()
    }

    pub fn value_set(&self) -> Option<&str> {
        self.value_set.as_deref()
    }

    pub fn value_set_version(&self) -> Option<&str> {
        self.value_set_version.as_deref()
    }

    pub fn original_text(&self) -> Option<&str> {
        self.original_text.as_deref()
    }

    fn system<'r>(&self, reg: &'r ConceptRegistry) -> Result<&'r CodeSystem> {
        let oid = self
            .code_system
            .as_deref()
            .ok_or_else(|| Error::NullOperand(self.to_string()))?;
        reg.code_system(oid)
            .ok_or_else(|| Error::UnknownCodeSystem(oid.to_string()))
    }

    pub fn code_system_name(&self, reg: &ConceptRegistry) -> Result<String> {
        Ok(self.system(reg)?.name.clone())
    }

    pub fn value_set_name(&self, reg: &ConceptRegistry) -> Option<String> {
        reg.value_set(self.value_set.as_deref()?).map(|v| v.name.clone())
    }

    pub fn display_name(&self, reg: &ConceptRegistry) -> Result<String> {
        let cs = self.system(reg)?;
        let code = self.code.as_deref().unwrap_or_default();
        cs.concept(code)
            .map(|c| c.display_name.clone())
            .ok_or_else(|| Error::UnknownCode {
                code: code.to_string(),
                system: cs.name.clone(),
            })
    }

    /// Looks up one of [`CV_FIELDS`] by name.
    pub fn accessor(&self, field: &str, reg: &ConceptRegistry) -> Result<Option<String>> {
        if let Some(nf) = self.flavor {
            if field != "originaltext" {
                return Err(Error::NullOperand(nf.to_string()));
            }
        }
        let own = |v: &Option<String>| Ok(v.clone());
        match field {
            "code" => own(&self.code),
            "codesystem" => own(&self.code_system),
            "codesystemname" => self.code_system_name(reg).map(Some),
            "codesystemversion" => own(&self.code_system_version),
            "valueset" => own(&self.value_set),
            "valuesetname" => Ok(self.value_set_name(reg)),
            "valuesetversion" => own(&self.value_set_version),
            "originaltext" => own(&self.original_text),
            "displayname" => self.display_name(reg).map(Some),
            other => Err(Error::parse("CV field", other, "unknown accessor")),
        }
    }

    /// `self` is a specialization of (or the same concept as) `other`.
    pub fn implies(&self, other: &Cv, reg: &ConceptRegistry) -> Result<Bn> {
        for c in [self, other] {
            if let Some(nf) = c.flavor {
                return Err(Error::NullOperand(nf.to_string()));
            }
        }
        if self.code_system != other.code_system {
            return Err(Error::DifferentCodeSystem(
                self.code_system.clone().unwrap_or_default(),
                other.code_system.clone().unwrap_or_default(),
            ));
        }
        let cs = self.system(reg)?;
        for c in [self, other] {
            let code = c.code.as_deref().unwrap_or_default();
            if cs.concept(code).is_none() {
                return Err(Error::UnknownCode {
                    code: code.to_string(),
                    system: cs.name.clone(),
                });
            }
        }
        let (a, b) = (self.code.as_deref().unwrap(), other.code.as_deref().unwrap());
        Ok(Bn(cs.subsumed_by(a, b).expect("both codes checked")))
    }

    /// Same concept: code and code system.
    pub fn equal(&self, other: &Cv) -> Bl {
        match Bl::propagate(self.flavor, other.flavor) {
            Some(b) => b,
            None => Bl::from(self.code == other.code && self.code_system == other.code_system),
        }
    }

    pub fn identical(&self, other: &Cv) -> Bl {
        match Bl::propagate(self.flavor, other.flavor) {
            Some(b) => b,
            None => Bl::from(self == other),
        }
    }
}

impl fmt::Display for Cv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor {
            Some(nf) => write!(f, "{nf}")?,
            None => {
                write!(
                    f,
                    "{}:{}",
                    self.code.as_deref().unwrap_or_default(),
                    self.code_system.as_deref().unwrap_or_default()
                )?;
                if let Some(v) = &self.code_system_version {
                    write!(f, "@{v}")?;
                }
                if let Some(vs) = &self.value_set {
                    write!(f, ":{vs}")?;
                    if let Some(v) = &self.value_set_version {
                        write!(f, "@{v}")?;
                    }
                }
            }
        }
        if let Some(t) = &self.original_text {
            write!(f, "|{t}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Cv {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Cv::parse(s, None, ConceptRegistry::standard())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reg() -> &'static ConceptRegistry {
        ConceptRegistry::standard()
    }

    #[test]
    fn domain_literal_fills_every_field() {
        let c = Cv::parse("active|Ongoing treatment", Some("ActStatus"), reg()).unwrap();
        let got: Vec<Option<String>> = CV_FIELDS[..8].iter().map(|f| c.accessor(f, reg()).unwrap()).collect();
        let want = [
            "active",
            "2.16.840.1.113883.5.14",
            "ActStatus",
            "2009-08-30",
            "2.16.840.1.113883.1.11.15933",
            "ActStatus",
            "2009-08-30",
            "Ongoing treatment",
        ];
        assert_eq!(got, want.map(|s| Some(s.to_string())));
        assert_eq!(
            Cv::parse("completed", Some("ActStatus"), reg()).unwrap().to_string(),
            "completed:2.16.840.1.113883.5.14@2009-08-30:2.16.840.1.113883.1.11.15933@2009-08-30"
        );
    }

    #[test]
    fn errors() {
        let e = Cv::parse("x", Some("ActStatus"), reg()).unwrap_err();
        assert_eq!(e.to_string(), "invalid code 'x' for codeSystem ActStatus");
        assert!(matches!(
            Cv::parse("x", Some("Nope"), reg()),
            Err(Error::UnknownDomain(_))
        ));
        assert!(matches!(Cv::parse_full("EVN"), Err(Error::Parse { .. })));
        assert!(matches!(Cv::parse_full("EVN:abc"), Err(Error::Parse { .. })));
        assert!(matches!(Cv::parse_full("EVN:1.2@"), Err(Error::Parse { .. })));
        let unregistered = Cv::parse_full("zzz:2.16.840.1.113883.5.14").unwrap();
        assert!(matches!(
            unregistered.display_name(reg()),
            Err(Error::UnknownCode { .. })
        ));
        assert!(matches!(
            "zzz:2.16.840.1.113883.5.14".parse::<Cv>(),
            Err(Error::InvalidCode { .. })
        ));
        assert!(matches!("EVN:1.2.3".parse::<Cv>(), Err(Error::UnknownCodeSystem(_))));
    }

    #[test]
    fn full_literals() {
        let c: Cv = "EVN:2.16.840.1.113883.5.1001".parse().unwrap();
        assert_eq!(c.code(), Some("EVN"));
        assert_eq!(c.code_system(), Some("2.16.840.1.113883.5.1001"));
        assert_eq!(c.display_name(reg()).unwrap(), "event");
        assert_eq!(c.code_system_version(), None);
        assert_eq!(c.to_string(), "EVN:2.16.840.1.113883.5.1001");
        let n = Cv::parse("nav|not at hand", Some("ActStatus"), reg()).unwrap();
        assert_eq!(n.flavor(), Some(NullFlavor::Nav));
        assert_eq!(n.to_string(), "nav|not at hand");
        assert_eq!(Cv::parse_full("nav|not at hand").unwrap(), n);
    }

    #[test]
    fn subsumption() {
        let d = |code: &str| Cv::parse(code, Some("ActStatus"), reg()).unwrap();
        assert!(d("active").implies(&d("normal"), reg()).unwrap().0);
        assert!(!d("normal").implies(&d("active"), reg()).unwrap().0);
        assert!(d("active").implies(&d("active"), reg()).unwrap().0);
        assert!(!d("obsolete").implies(&d("normal"), reg()).unwrap().0);
        let evn: Cv = "EVN:2.16.840.1.113883.5.1001".parse().unwrap();
        assert!(matches!(
            d("active").implies(&evn, reg()),
            Err(Error::DifferentCodeSystem(..))
        ));
        assert_eq!(
            d("active").equal(&"active:2.16.840.1.113883.5.14".parse().unwrap()),
            Bl::TRUE
        );
        assert_eq!(
            d("active").identical(&"active:2.16.840.1.113883.5.14".parse().unwrap()),
            Bl::FALSE
        );
    }

    #[test]
    fn shipped_registry_shape() {
        let toy = reg().code_system("2.999.1").unwrap();
        assert_eq!(toy.len(), 200);
        assert!(toy.concepts().any(|c| c.parents.len() > 1));
        let root = Cv::parse("F0000", Some("ClinicalFinding"), reg()).unwrap();
        assert_eq!(root.display_name(reg()).unwrap(), "Clinical finding");
        for c in toy.concepts() {
            assert!(toy.subsumed_by(&c.code, "F0000").unwrap());
        }
    }

    #[test]
    fn load_errors() {
        let head = "[codesystems]\n1.2\tT\tv1\n[codes]\n";
        let dangling = format!("{head}1.2\ta\tA\tb\n");
        assert!(matches!(
            ConceptRegistry::from_text(&dangling),
            Err(Error::DanglingReference { .. })
        ));
        let cycle = format!("{head}1.2\ta\tA\tb\n1.2\tb\tB\ta\n");
        assert!(matches!(
            ConceptRegistry::from_text(&cycle),
            Err(Error::TerminologyCycle { .. })
        ));
        let selfloop = format!("{head}1.2\ta\tA\ta\n");
        assert!(matches!(
            ConceptRegistry::from_text(&selfloop),
            Err(Error::TerminologyCycle { .. })
        ));
        let short = format!("{head}1.2\ta\n");
        assert!(matches!(
            ConceptRegistry::from_text(&short),
            Err(Error::TerminologyFormat { line: 4, .. })
        ));
        let no_cs = "[codes]\n9.9\ta\tA\t\n";
        assert!(matches!(
            ConceptRegistry::from_text(no_cs),
            Err(Error::DanglingReference { .. })
        ));
        let bad_vs = format!("{head}1.2\ta\tA\t\n[valuesets]\n1.3\tV\tv\t1.2\ta,z\n");
        assert!(matches!(
            ConceptRegistry::from_text(&bad_vs),
            Err(Error::DanglingReference { .. })
        ));
        assert!(matches!(
            ConceptRegistry::from_text("[nope]\n"),
            Err(Error::TerminologyFormat { line: 1, .. })
        ));
        let ok = format!("{head}1.2\ta\tA\t\n1.2\tb\tB\ta\n[valuesets]\n1.3\tV\tv\t1.2\tb\n[domains]\nD\t1.2\t1.3\n");
        let r = ConceptRegistry::from_text(&ok).unwrap();
        assert!(Cv::parse("b", Some("D"), &r).is_ok());
        assert!(matches!(Cv::parse("a", Some("D"), &r), Err(Error::InvalidCode { .. })));
    }

    pub(crate) fn arb_cv() -> impl Strategy<Value = Cv> {
        let oid = prop::collection::vec(0u32..1000, 1..6)
            .prop_map(|arcs| format!("2.{}", arcs.iter().map(u32::to_string).collect::<Vec<_>>().join(".")));
        let ver = prop::option::of("[0-9A-Za-z.-]{1,10}");
        (
            "[A-Za-z0-9_.-]{1,12}",
            oid.clone(),
            ver.clone(),
            prop::option::of((oid, ver)),
            prop::option::of("[ -{}~]{0,20}"),
        )
            .prop_map(|(code, cs, csv, vs, text)| Cv {
                flavor: None,
                code: Some(code),
                code_system: Some(cs),
                code_system_version: csv,
                value_set_version: vs.as_ref().and_then(|v| v.1.clone()),
                value_set: vs.map(|v| v.0),
                original_text: text,
            })
            .prop_filter("nullflavor tokens are not codes", |c| {
                NullFlavor::parse(c.code.as_deref().unwrap()).is_err()
            })
    }

    proptest! {
        #[test]
        fn full_literal_roundtrip(c in arb_cv()) {
            let back = Cv::parse_full(&c.to_string()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
