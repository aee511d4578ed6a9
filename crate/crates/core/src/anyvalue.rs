//! The ANY container: one value of any implemented type, tagged with its
//! place in the type hierarchy.
//!
//! ```text
//! ANY ─┬─ BL ── BN
//!      ├─ QTY ─┬─ REAL
//!      │       ├─ PQ
//!      │       └─ TS
//!      ├─ IVL<TS>, IVL<PQ>
//!      ├─ CD ── CV
//!      └─ II ── IN
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::identity::{Ii, In};
use crate::interval::{IvlPq, IvlTs};
use crate::logic::{Bl, Bn};
use crate::nullflavor::NullFlavor;
use crate::numeric::Real;
use crate::quantity::Pq;
use crate::terminology::{ConceptRegistry, Cv};
use crate::time::Ts;
use crate::ucum::UnitRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeTag {
    Any,
    Bl,
    Bn,
    Qty,
    Real,
    Pq,
    Ts,
    IvlTs,
    IvlPq,
    Cd,
    Cv,
    Ii,
    In,
}

impl TypeTag {
    pub const ALL: [TypeTag; 13] = [
        TypeTag::Any,
        TypeTag::Bl,
        TypeTag::Bn,
        TypeTag::Qty,
        TypeTag::Real,
        TypeTag::Pq,
        TypeTag::Ts,
        TypeTag::IvlTs,
        TypeTag::IvlPq,
        TypeTag::Cd,
        TypeTag::Cv,
        TypeTag::Ii,
        TypeTag::In,
    ];

    pub fn parent(self) -> Option<TypeTag> {
        use TypeTag::*;
        match self {
            Any => None,
            Bn => Some(Bl),
            Real | Pq | Ts => Some(Qty),
            Cv => Some(Cd),
            In => Some(Ii),
            Bl | Qty | IvlTs | IvlPq | Cd | Ii => Some(Any),
        }
    }

    pub fn name(self) -> &'static str {
        use TypeTag::*;
        match self {
            Any => "ANY",
            Bl => "BL",
            Bn => "BN",
            Qty => "QTY",
            Real => "REAL",
            Pq => "PQ",
            Ts => "TS",
            IvlTs => "IVL<TS>",
            IvlPq => "IVL<PQ>",
            Cd => "CD",
            Cv => "CV",
            Ii => "II",
            In => "IN",
        }
    }

    /// Types with no values of their own.
    pub fn is_abstract(self) -> bool {
        matches!(self, TypeTag::Any | TypeTag::Qty | TypeTag::Cd)
    }

    pub fn is_subtype_of(self, other: TypeTag) -> bool {
        std::iter::successors(Some(self), |t| t.parent()).any(|t| t == other)
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TypeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        TypeTag::ALL
            .into_iter()
            .find(|t| t.name().replace(['<', '>'], "") == norm)
            .ok_or_else(|| Error::parse("type", s, "unknown type name"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyValue {
    /// A bare nullflavor with no subtype.
    Null(NullFlavor),
    Bl(Bl),
    Bn(Bn),
    Real(Real),
    Pq(Pq),
    Ts(Ts),
    IvlTs(IvlTs),
    IvlPq(IvlPq),
    Cv(Cv),
    Ii(Ii),
    In(In),
}

impl AnyValue {
    pub fn tag(&self) -> TypeTag {
        match self {
            AnyValue::Null(_) => TypeTag::Any,
            AnyValue::Bl(_) => TypeTag::Bl,
            AnyValue::Bn(_) => TypeTag::Bn,
            AnyValue::Real(_) => TypeTag::Real,
            AnyValue::Pq(_) => TypeTag::Pq,
            AnyValue::Ts(_) => TypeTag::Ts,
            AnyValue::IvlTs(_) => TypeTag::IvlTs,
            AnyValue::IvlPq(_) => TypeTag::IvlPq,
            AnyValue::Cv(_) => TypeTag::Cv,
            AnyValue::Ii(_) => TypeTag::Ii,
            AnyValue::In(_) => TypeTag::In,
        }
    }

    /// Parses a literal of a concrete type. `domain` applies to CV only.
    pub fn parse(
        tag: TypeTag,
        literal: &str,
        units: &UnitRegistry,
        terms: &ConceptRegistry,
        domain: Option<&str>,
    ) -> Result<AnyValue> {
        Ok(match tag {
            TypeTag::Any => AnyValue::Null(NullFlavor::parse(literal)?),
            TypeTag::Bl => AnyValue::Bl(Bl::parse(literal)?),
            TypeTag::Bn => AnyValue::Bn(literal.parse()?),
            TypeTag::Real => AnyValue::Real(Real::parse(literal)?),
            TypeTag::Pq => AnyValue::Pq(Pq::parse(literal, units)?),
            TypeTag::Ts => AnyValue::Ts(Ts::parse(literal)?),
            TypeTag::IvlTs => AnyValue::IvlTs(IvlTs::parse(literal, units)?),
            TypeTag::IvlPq => AnyValue::IvlPq(IvlPq::parse(literal, units)?),
            TypeTag::Cv | TypeTag::Cd => AnyValue::Cv(Cv::parse(literal, domain, terms)?),
            TypeTag::Ii => AnyValue::Ii(Ii::parse(literal)?),
            TypeTag::In => AnyValue::In(In::parse(literal)?),
            TypeTag::Qty => return Err(Error::parse("QTY", literal, "abstract type has no literal")),
        })
    }

    pub fn flavor(&self) -> Option<NullFlavor> {
        match self {
            AnyValue::Null(nf) => Some(*nf),
            AnyValue::Bl(b) => b.flavor(),
            AnyValue::Bn(_) | AnyValue::In(_) | AnyValue::IvlTs(_) | AnyValue::IvlPq(_) => None,
            AnyValue::Real(r) => match r {
                Real::Null(nf) => Some(*nf),
                _ => None,
            },
            AnyValue::Pq(p) => p.flavor(),
            AnyValue::Ts(t) => t.flavor(),
            AnyValue::Cv(c) => c.flavor(),
            AnyValue::Ii(i) => i.flavor(),
        }
    }

    /// View the value as `target`: the tag itself or an ancestor always
    /// works; narrowing to BN or IN works for non-null values, and a bare
    /// nullflavor can become any concrete type that admits it.
    pub fn downcast(&self, target: TypeTag) -> Result<AnyValue> {
        let tag = self.tag();
        let fail = || Error::Cast {
            from: tag.name(),
            to: target.name(),
        };
        if tag == target || (target.is_abstract() && tag.is_subtype_of(target)) {
            return Ok(self.clone());
        }
        Ok(match (self, target) {
            (AnyValue::Bn(b), TypeTag::Bl) => AnyValue::Bl(Bl::from(*b)),
            (AnyValue::In(i), TypeTag::Ii) => AnyValue::Ii(i.as_ii().clone()),
            (AnyValue::Bl(b), TypeTag::Bn) => AnyValue::Bn(Bn::try_from(*b).map_err(|_| fail())?),
            (AnyValue::Ii(i), TypeTag::In) => AnyValue::In(In::try_from(i.clone()).map_err(|_| fail())?),
            (AnyValue::Null(nf), t) if nf.allowed_on(t) => match t {
                TypeTag::Bl => AnyValue::Bl(Bl::null(*nf)?),
                TypeTag::Real => AnyValue::Real(Real::Null(*nf)),
                TypeTag::Pq => AnyValue::Pq(Pq::null(*nf)),
                TypeTag::Ts => AnyValue::Ts(Ts::Null(*nf)),
                TypeTag::Cv | TypeTag::Cd => AnyValue::Cv(Cv::null(*nf)),
                TypeTag::Ii => AnyValue::Ii(Ii::Null(*nf)),
                _ => return Err(fail()),
            },
            _ => return Err(fail()),
        })
    }

    /// Back to ANY: the payload is unchanged.
    pub fn upcast(self) -> AnyValue {
        self
    }
}

impl fmt::Display for AnyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyValue::Null(nf) => write!(f, "{nf}"),
            AnyValue::Bl(v) => write!(f, "{v}"),
            AnyValue::Bn(v) => write!(f, "{v}"),
            AnyValue::Real(v) => write!(f, "{v}"),
            AnyValue::Pq(v) => write!(f, "{v}"),
            AnyValue::Ts(v) => write!(f, "{v}"),
            AnyValue::IvlTs(v) => write!(f, "{v}"),
            AnyValue::IvlPq(v) => write!(f, "{v}"),
            AnyValue::Cv(v) => write!(f, "{v}"),
            AnyValue::Ii(v) => write!(f, "{v}"),
            AnyValue::In(v) => write!(f, "{v}"),
        }
    }
}

macro_rules! payload {
    ($variant:ident, $ty:ty) => {
        impl From<$ty> for AnyValue {
            fn from(v: $ty) -> AnyValue {
                AnyValue::$variant(v)
            }
        }

        impl TryFrom<AnyValue> for $ty {
            type Error = Error;

            fn try_from(a: AnyValue) -> Result<$ty> {
                match a.downcast(TypeTag::$variant)? {
                    AnyValue::$variant(v) => Ok(v),
                    _ => unreachable!("downcast returns the target variant"),
                }
            }
        }
    };
}

payload!(Bl, Bl);
payload!(Bn, Bn);
payload!(Real, Real);
payload!(Pq, Pq);
payload!(Ts, Ts);
payload!(IvlTs, IvlTs);
payload!(IvlPq, IvlPq);
payload!(Cv, Cv);
payload!(Ii, Ii);
payload!(In, In);

impl From<NullFlavor> for AnyValue {
    fn from(nf: NullFlavor) -> AnyValue {
        AnyValue::Null(nf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hierarchy() {
        assert_eq!(TypeTag::Bn.parent(), Some(TypeTag::Bl));
        assert!(TypeTag::Pq.is_subtype_of(TypeTag::Qty));
        assert!(TypeTag::In.is_subtype_of(TypeTag::Any));
        assert!(!TypeTag::Pq.is_subtype_of(TypeTag::Bl));
        for t in TypeTag::ALL {
            assert!(t.is_subtype_of(TypeTag::Any));
            assert_eq!(t.name().parse::<TypeTag>().unwrap(), t);
        }
        assert_eq!("ivl-ts".parse::<TypeTag>().unwrap(), TypeTag::IvlTs);
    }

    #[test]
    fn casts() {
        let a = AnyValue::from("10 ml".parse::<Pq>().unwrap());
        assert_eq!(a.to_string(), "10 ml");
        assert_eq!(Pq::try_from(a.clone()).unwrap().to_string(), "10 ml");
        assert_eq!(a.downcast(TypeTag::Qty).unwrap(), a);
        assert!(matches!(
            a.downcast(TypeTag::Bl),
            Err(Error::Cast { from: "PQ", to: "BL" })
        ));
        let bn = AnyValue::Bn(Bn(true));
        assert_eq!(bn.downcast(TypeTag::Bl).unwrap(), AnyValue::Bl(Bl::TRUE));
        assert_eq!(
            AnyValue::Bl(Bl::FALSE).downcast(TypeTag::Bn).unwrap(),
            AnyValue::Bn(Bn(false))
        );
        let unk = AnyValue::Bl("unk".parse().unwrap());
        assert!(matches!(unk.downcast(TypeTag::Bn), Err(Error::Cast { .. })));
        let nav = AnyValue::Null(NullFlavor::Nav);
        assert_eq!(
            nav.downcast(TypeTag::Pq).unwrap(),
            AnyValue::Pq(Pq::null(NullFlavor::Nav))
        );
        assert!(AnyValue::Null(NullFlavor::Trc).downcast(TypeTag::Bl).is_err());
        assert!(AnyValue::Null(NullFlavor::Unk).downcast(TypeTag::In).is_err());
        let ii = AnyValue::Ii(Ii::parse("1.2.3:x").unwrap());
        assert_eq!(ii.downcast(TypeTag::In).unwrap().downcast(TypeTag::Ii).unwrap(), ii);
        assert!(AnyValue::Ii(Ii::Null(NullFlavor::Unk)).downcast(TypeTag::In).is_err());
    }

    #[test]
    fn parse_by_tag() {
        let units = UnitRegistry::standard();
        let terms = ConceptRegistry::standard();
        let v = AnyValue::parse(TypeTag::Cv, "active", units, terms, Some("ActStatus")).unwrap();
        assert_eq!(v.tag(), TypeTag::Cv);
        let v = AnyValue::parse(TypeTag::IvlPq, "-8m--2m", units, terms, None).unwrap();
        assert_eq!(v.to_string(), "[-8 m;-2 m]");
        assert!(AnyValue::parse(TypeTag::Qty, "1", units, terms, None).is_err());
    }

    fn arb_any() -> impl Strategy<Value = AnyValue> {
        let units = ["m", "ml", "s", "kg/m2", "mm[Hg]", "1"];
        prop_oneof![
            (0usize..15).prop_map(|i| AnyValue::Null(NullFlavor::ALL[i])),
            any::<bool>().prop_map(|b| AnyValue::Bl(Bl::from(b))),
            any::<bool>().prop_map(|b| AnyValue::Bn(Bn(b))),
            (-1_000_000i64..1_000_000).prop_map(|n| AnyValue::Real(Real::new(n.into()))),
            (-1_000_000i64..1_000_000, 0..units.len()).prop_map(move |(n, u)| {
                AnyValue::Pq(Pq::parse(&format!("{n} {}", units[u]), UnitRegistry::standard()).unwrap())
            }),
            crate::time::tests::arb_ts().prop_map(AnyValue::Ts),
            crate::identity::tests::arb_ii().prop_map(AnyValue::Ii),
        ]
    }

    proptest! {
        #[test]
        fn upcast_downcast_identity(v in arb_any()) {
            let tag = v.tag();
            let any = v.clone().upcast();
            prop_assert_eq!(any.downcast(tag).unwrap(), v.clone());
            prop_assert_eq!(any.downcast(TypeTag::Any).unwrap(), v.clone());
            if let Some(parent) = tag.parent() {
                let up = any.downcast(parent).unwrap();
                prop_assert_eq!(up.to_string(), v.to_string());
            }
        }
    }
}
