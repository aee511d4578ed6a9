//! The fifteen HL7 nullflavors and their specialization tree.
//!
//! Every flavor except `ni` has exactly one parent; `ni` is the root. The
//! least common ancestor of two flavors is the result of combining two
//! different exceptional values (for example in the boolean connectives).

use std::fmt;
use std::str::FromStr;

use crate::anyvalue::TypeTag;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NullFlavor {
    Ni,
    Inv,
    Oth,
    Ninf,
    Pinf,
    Unc,
    Der,
    Unk,
    Asku,
    Nav,
    Qs,
    Nask,
    Trc,
    Msk,
    Na,
}

impl NullFlavor {
    /// All members in table order (a pre-order walk of the tree).
    pub const ALL: [NullFlavor; 15] = [
        NullFlavor::Ni,
        NullFlavor::Inv,
        NullFlavor::Oth,
        NullFlavor::Ninf,
        NullFlavor::Pinf,
        NullFlavor::Unc,
        NullFlavor::Der,
        NullFlavor::Unk,
        NullFlavor::Asku,
        NullFlavor::Nav,
        NullFlavor::Qs,
        NullFlavor::Nask,
        NullFlavor::Trc,
        NullFlavor::Msk,
        NullFlavor::Na,
    ];

    /// Flavors that may not appear on BL.
    pub const NOT_ON_BOOLEAN: [NullFlavor; 6] = [
        NullFlavor::Ninf,
        NullFlavor::Pinf,
        NullFlavor::Unc,
        NullFlavor::Der,
        NullFlavor::Qs,
        NullFlavor::Trc,
    ];

    pub fn parent(self) -> Option<NullFlavor> {
        use NullFlavor::*;
        match self {
            Ni => None,
            Inv | Unk | Msk | Na => Some(Ni),
            Oth | Unc | Der => Some(Inv),
            Ninf | Pinf => Some(Oth),
            Asku | Qs | Nask | Trc => Some(Unk),
            Nav => Some(Asku),
        }
    }

    /// Level code from the table: 1 for `ni`, 2 for its children, and so on.
    pub fn level(self) -> u8 {
        match self.parent() {
            None => 1,
            Some(p) => p.level() + 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        use NullFlavor::*;
        match self {
            Ni => "ni",
            Inv => "inv",
            Oth => "oth",
            Ninf => "ninf",
            Pinf => "pinf",
            Unc => "unc",
            Der => "der",
            Unk => "unk",
            Asku => "asku",
            Nav => "nav",
            Qs => "qs",
            Nask => "nask",
            Trc => "trc",
            Msk => "msk",
            Na => "na",
        }
    }

    pub fn meaning(self) -> &'static str {
        use NullFlavor::*;
        match self {
            Ni => "no information",
            Inv => "invalid",
            Oth => "other",
            Ninf => "negative infinity",
            Pinf => "positive infinity",
            Unc => "unencoded",
            Der => "derived",
            Unk => "unknown",
            Asku => "asked but unknown",
            Nav => "temporarily unavailable",
            Qs => "sufficient quantity",
            Nask => "not asked",
            Trc => "trace",
            Msk => "masked",
            Na => "not applicable",
        }
    }

    /// Four-bit code used in packed encodings; 0 is reserved for "not null".
    pub fn nibble(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_nibble(n: u8) -> Option<NullFlavor> {
        match n {
            1..=15 => Some(Self::ALL[n as usize - 1]),
            _ => None,
        }
    }

    /// Parses a bare token (`nav`, `NAV`) or the qualified form `NullFlavor.NAV`.
    pub fn parse(token: &str) -> Result<NullFlavor> {
        let t = token.trim();
        let bare = match t.get(..11) {
            Some(p) if p.eq_ignore_ascii_case("nullflavor.") => &t[11..],
            _ => t,
        };
        Self::ALL
            .iter()
            .copied()
            .find(|nf| nf.symbol().eq_ignore_ascii_case(bare))
            .ok_or_else(|| Error::UnknownNullFlavor(token.to_string()))
    }

    /// Ancestors from `self` (inclusive) up to `ni`.
    pub fn ancestors(self) -> impl Iterator<Item = NullFlavor> {
        std::iter::successors(Some(self), |nf| nf.parent())
    }

    /// True when `other` is `self` or one of its ancestors.
    pub fn is_subsumed_by(self, other: NullFlavor) -> bool {
        self.ancestors().any(|a| a == other)
    }

    /// Deepest common (reflexive) ancestor.
    pub fn lca(self, other: NullFlavor) -> NullFlavor {
        let (mut a, mut b) = (self, other);
        while a.level() > b.level() {
            a = a.parent().expect("non-root has a parent");
        }
        while b.level() > a.level() {
            b = b.parent().expect("non-root has a parent");
        }
        while a != b {
            a = a.parent().expect("levels aligned above root");
            b = b.parent().expect("levels aligned above root");
        }
        a
    }

    pub fn allowed_on(self, tag: TypeTag) -> bool {
        match tag {
            TypeTag::Bn | TypeTag::In => false,
            TypeTag::Bl => !Self::NOT_ON_BOOLEAN.contains(&self),
            _ => true,
        }
    }

    /// Closest ancestor (inclusive) that is allowed on `tag`; `ni` is allowed on
    /// every nullable type.
    pub fn restrict_to(self, tag: TypeTag) -> NullFlavor {
        self.ancestors().find(|nf| nf.allowed_on(tag)).unwrap_or(NullFlavor::Ni)
    }
}

impl fmt::Display for NullFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for NullFlavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NullFlavor::parse(s)
    }
}
