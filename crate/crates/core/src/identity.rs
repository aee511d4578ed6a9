//! Instance identifiers (II) and the non-null flavor IN.
//!
//! Literal form: `root[:extension]`, split at the first colon. The root is a
//! dotted-decimal OID or a UUID; UUIDs are printed in lowercase.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::logic::Bl;
use crate::nullflavor::NullFlavor;

/// Digits and dots, no empty arcs, no leading zeros, first arc 0 to 2.
pub fn is_oid(s: &str) -> bool {
    let arcs: Vec<&str> = s.split('.').collect();
    arcs.iter()
        .all(|a| !a.is_empty() && a.bytes().all(|b| b.is_ascii_digit()) && (a.len() == 1 || !a.starts_with('0')))
        && matches!(arcs[0], "0" | "1" | "2")
}

pub fn is_uuid(s: &str) -> bool {
    let groups: Vec<&str> = s.split('-').collect();
    groups.len() == 5
        && groups
            .iter()
            .zip([8, 4, 4, 4, 12])
            .all(|(g, n)| g.len() == n && g.bytes().all(|b| b.is_ascii_hexdigit()))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ii {
    Value { root: String, extension: Option<String> },
    Null(NullFlavor),
}

impl Ii {
    pub fn new(root: &str, extension: Option<&str>) -> Result<Ii> {
        let root = if is_oid(root) {
            root.to_string()
        } else if is_uuid(root) {
            root.to_ascii_lowercase()
        } else {
            return Err(Error::InvalidRoot(root.to_string()));
        };
        Ok(Ii::Value {
            root,
            extension: extension.map(str::to_string),
        })
    }

    pub fn parse(s: &str) -> Result<Ii> {
        let t = s.trim();
        if let Ok(nf) = NullFlavor::parse(t) {
            return Ok(Ii::Null(nf));
        }
        match t.split_once(':') {
            Some((root, ext)) => Ii::new(root, Some(ext)),
            None => Ii::new(t, None),
        }
    }

    pub fn root(&self) -> Option<&str> {
        match self {
            Ii::Value { root, .. } => Some(root),
            Ii::Null(_) => None,
        }
    }

    pub fn extension(&self) -> Option<&str> {
        match self {
            Ii::Value { extension, .. } => extension.as_deref(),
            Ii::Null(_) => None,
        }
    }

    pub fn flavor(&self) -> Option<NullFlavor> {
        match self {
            Ii::Value { .. } => None,
            Ii::Null(nf) => Some(*nf),
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Ii::Null(_))
    }

    pub fn equal(&self, other: &Ii) -> Bl {
        match Bl::propagate(self.flavor(), other.flavor()) {
            Some(b) => b,
            None => Bl::from(self == other),
        }
    }
}

impl fmt::Display for Ii {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ii::Value {
                root,
                extension: Some(e),
            } => write!(f, "{root}:{e}"),
            Ii::Value { root, extension: None } => f.write_str(root),
            Ii::Null(nf) => write!(f, "{nf}"),
        }
    }
}

impl FromStr for Ii {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ii::parse(s)
    }
}

/// An identifier that can never carry a nullflavor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct In(Ii);

impl In {
    pub fn parse(s: &str) -> Result<In> {
        In::try_from(Ii::parse(s)?)
    }

    pub fn as_ii(&self) -> &Ii {
        &self.0
    }

    pub fn into_ii(self) -> Ii {
        self.0
    }

    pub fn root(&self) -> &str {
        self.0.root().expect("IN is never null")
    }

    pub fn extension(&self) -> Option<&str> {
        self.0.extension()
    }
}

impl TryFrom<Ii> for In {
    type Error = Error;

    fn try_from(ii: Ii) -> Result<In> {
        match ii {
            Ii::Null(nf) => Err(Error::NullNotAllowed(nf.to_string())),
            v => Ok(In(v)),
        }
    }
}

impl From<In> for Ii {
    fn from(v: In) -> Ii {
        v.0
    }
}

impl fmt::Display for In {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for In {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        In::parse(s)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let ii: Ii = "2.16.840.1.113883.5.14:active".parse().unwrap();
        assert_eq!(ii.root(), Some("2.16.840.1.113883.5.14"));
        assert_eq!(ii.extension(), Some("active"));
        assert_eq!(Ii::parse("2.16.840").unwrap().extension(), None);
        assert_eq!(Ii::parse("1.2:a:b").unwrap().extension(), Some("a:b"));
        assert!(matches!(Ii::parse("9.9:x"), Err(Error::InvalidRoot(_))));
        assert!(matches!(Ii::parse("1..2"), Err(Error::InvalidRoot(_))));
        assert!(matches!(Ii::parse("1.02"), Err(Error::InvalidRoot(_))));
        assert!(matches!(Ii::parse(""), Err(Error::InvalidRoot(_))));
        assert!(matches!(In::parse("unk"), Err(Error::NullNotAllowed(_))));
        let u = Ii::parse("1B4E28BA-2FA1-11D2-883F-0016D3CCA427:7").unwrap();
        assert_eq!(u.to_string(), "1b4e28ba-2fa1-11d2-883f-0016d3cca427:7");
        assert_eq!(
            u.equal(&Ii::parse("1b4e28ba-2fa1-11d2-883f-0016d3cca427:7").unwrap()),
            Bl::TRUE
        );
        assert!(Ii::parse("1b4e28ba-2fa1-11d2-883f-0016d3cca42").is_err());
    }

    #[test]
    fn equality() {
        let a = Ii::parse("1.2.3:x").unwrap();
        assert_eq!(a.equal(&a), Bl::TRUE);
        assert_eq!(a.equal(&Ii::parse("1.2.3:y").unwrap()), Bl::FALSE);
        assert_eq!(a.equal(&Ii::parse("1.2.3").unwrap()), Bl::FALSE);
        assert_eq!(Ii::Null(NullFlavor::Unk).equal(&a), "unk".parse().unwrap());
        assert_eq!(
            Ii::Null(NullFlavor::Nav).equal(&Ii::Null(NullFlavor::Nask)),
            "unk".parse().unwrap()
        );
    }

    #[test]
    fn in_rejects_every_nullflavor() {
        for nf in NullFlavor::ALL {
            assert!(matches!(In::parse(nf.symbol()), Err(Error::NullNotAllowed(_))));
            assert!(In::try_from(Ii::Null(nf)).is_err());
        }
    }

    pub(crate) fn arb_ii() -> impl Strategy<Value = Ii> {
        let oid = (0u32..3, prop::collection::vec(0u32..100_000, 0..8)).prop_map(|(first, rest)| {
            std::iter::once(first.to_string())
                .chain(rest.iter().map(u32::to_string))
                .collect::<Vec<_>>()
                .join(".")
        });
        let uuid = "[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}";
        let ext = prop::option::of("[A-Za-z0-9.:_-]{0,12}");
        (prop_oneof![oid, uuid.prop_map(String::from)], ext)
            .prop_map(|(root, ext)| Ii::new(&root, ext.as_deref()).unwrap())
    }

    proptest! {
        #[test]
        fn roundtrip(ii in arb_ii()) {
            let back: Ii = ii.to_string().parse().unwrap();
            prop_assert_eq!(&back, &ii);
            prop_assert!(back.equal(&ii).is_true());
        }
    }
}
