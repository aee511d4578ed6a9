//! HL7 v3 data types: nullflavors, three-valued-plus logic, exact numerics,
//! UCUM quantities, timestamps, intervals, coded values and identifiers.

pub mod anyvalue;
pub mod bench;
pub mod error;
pub mod identity;
pub mod interval;
pub mod logic;
pub mod nullflavor;
pub mod numeric;
pub mod quantity;
pub mod terminology;
pub mod time;
pub mod ucum;

pub use anyvalue::{AnyValue, TypeTag};
pub use error::{Error, Result};
pub use identity::{Ii, In};
pub use interval::{Ivl, IvlPq, IvlTs};
pub use logic::{Bl, Bn, LogicMode};
pub use nullflavor::NullFlavor;
pub use numeric::{Rational, Real};
pub use quantity::Pq;
pub use terminology::{ConceptRegistry, Cv};
pub use time::Ts;
pub use ucum::{UnitExpr, UnitRegistry};
