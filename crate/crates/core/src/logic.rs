//! BL and BN values and the eleven-valued connectives.
//!
//! Truth values dominate the way they do in Kleene logic (`false` for
//! conjunction, `true` for disjunction). Two different nullflavors combine to
//! their least common ancestor. [`LogicMode::Altered`] changes only the cells
//! involving `na`, which cannot be refined to either truth value.

use std::fmt;
use std::str::FromStr;

use crate::anyvalue::TypeTag;
use crate::error::{Error, Result};
use crate::nullflavor::NullFlavor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LogicMode {
    #[default]
    Hl7,
    Altered,
}

impl FromStr for LogicMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hl7" => Ok(LogicMode::Hl7),
            "altered" => Ok(LogicMode::Altered),
            _ => Err(Error::parse("logic mode", s, "expected hl7 or altered")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    And,
    Or,
    Xor,
    Implies,
}

impl FromStr for BinaryOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "and" => Ok(BinaryOp::And),
            "or" => Ok(BinaryOp::Or),
            "xor" => Ok(BinaryOp::Xor),
            "implies" => Ok(BinaryOp::Implies),
            _ => Err(Error::parse("logic operator", s, "expected and, or, xor or implies")),
        }
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinaryOp::And => "AND",
            BinaryOp::Or => "OR",
            BinaryOp::Xor => "XOR",
            BinaryOp::Implies => "IMPLIES",
        })
    }
}

/// Boolean with nullflavors. Holds either a truth value or one of the nine
/// flavors allowed on BL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bl(Result<bool, NullFlavor>);

impl Bl {
    pub const TRUE: Bl = Bl(Ok(true));
    pub const FALSE: Bl = Bl(Ok(false));

    pub fn null(nf: NullFlavor) -> Result<Bl> {
        if nf.allowed_on(TypeTag::Bl) {
            Ok(Bl(Err(nf)))
        } else {
            Err(Error::FlavorNotAllowed {
                flavor: nf.to_string(),
                type_name: "BL",
            })
        }
    }

    /// Like [`Bl::null`] but maps a disallowed flavor to its nearest allowed
    /// ancestor (`trc` becomes `unk`, `ninf` becomes `oth`).
    pub fn null_lossy(nf: NullFlavor) -> Bl {
        Bl(Err(nf.restrict_to(TypeTag::Bl)))
    }

    pub fn truth(self) -> Option<bool> {
        self.0.ok()
    }

    pub fn flavor(self) -> Option<NullFlavor> {
        self.0.err()
    }

    pub fn state(self) -> Result<bool, NullFlavor> {
        self.0
    }

    pub fn is_true(self) -> bool {
        self.0 == Ok(true)
    }

    pub fn is_null(self) -> bool {
        self.0.is_err()
    }

    pub fn not(self) -> Bl {
        Bl(self.0.map(|b| !b))
    }

    pub fn and(self, other: Bl, mode: LogicMode) -> Bl {
        use NullFlavor::Na;
        if mode == LogicMode::Altered && (self.flavor() == Some(Na) || other.flavor() == Some(Na)) {
            return Bl::FALSE;
        }
        match (self.0, other.0) {
            (Ok(false), _) | (_, Ok(false)) => Bl::FALSE,
            (Ok(true), v) | (v, Ok(true)) => Bl(v),
            (Err(a), Err(b)) => Bl(Err(a.lca(b))),
        }
    }

    pub fn or(self, other: Bl, mode: LogicMode) -> Bl {
        use NullFlavor::Na;
        if mode == LogicMode::Altered {
            match (self.flavor(), other.flavor()) {
                (Some(Na), Some(Na)) => return Bl::FALSE,
                (Some(Na), _) => return other,
                (_, Some(Na)) => return self,
                _ => {}
            }
        }
        match (self.0, other.0) {
            (Ok(true), _) | (_, Ok(true)) => Bl::TRUE,
            (Ok(false), v) | (v, Ok(false)) => Bl(v),
            (Err(a), Err(b)) => Bl(Err(a.lca(b))),
        }
    }

    pub fn xor(self, other: Bl, mode: LogicMode) -> Bl {
        self.or(other, mode).and(self.and(other, mode).not(), mode)
    }

    pub fn implies(self, other: Bl, mode: LogicMode) -> Bl {
        self.not().or(other, mode)
    }

    pub fn binary(self, op: BinaryOp, other: Bl, mode: LogicMode) -> Bl {
        match op {
            BinaryOp::And => self.and(other, mode),
            BinaryOp::Or => self.or(other, mode),
            BinaryOp::Xor => self.xor(other, mode),
            BinaryOp::Implies => self.implies(other, mode),
        }
    }

    /// `equal` property: true only when both are truth values and the same.
    pub fn equal(self, other: Bl) -> Bl {
        match (self.0, other.0) {
            (Ok(a), Ok(b)) => Bl::from(a == b),
            (Err(a), Err(b)) => Bl(Err(a.lca(b))),
            (Err(a), _) | (_, Err(a)) => Bl(Err(a)),
        }
    }

    pub fn parse(s: &str) -> Result<Bl> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("true") {
            Ok(Bl::TRUE)
        } else if t.eq_ignore_ascii_case("false") {
            Ok(Bl::FALSE)
        } else {
            let nf = NullFlavor::parse(t).map_err(|_| Error::parse("BL", s, "expected true, false or a nullflavor"))?;
            Bl::null(nf)
        }
    }

    /// Combines two nullable operands: when either is null, the result is the
    /// lca of the flavors present; otherwise `None`.
    pub(crate) fn propagate(a: Option<NullFlavor>, b: Option<NullFlavor>) -> Option<Bl> {
        match (a, b) {
            (None, None) => None,
            (Some(x), Some(y)) => Some(Bl::null_lossy(x.lca(y))),
            (Some(x), None) | (None, Some(x)) => Some(Bl::null_lossy(x)),
        }
    }
}

impl From<bool> for Bl {
    fn from(b: bool) -> Bl {
        Bl(Ok(b))
    }
}

impl From<Bn> for Bl {
    fn from(b: Bn) -> Bl {
        Bl(Ok(b.0))
    }
}

impl fmt::Display for Bl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Ok(true) => f.write_str("true"),
            Ok(false) => f.write_str("false"),
            Err(nf) => write!(f, "{nf}"),
        }
    }
}

impl FromStr for Bl {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Bl::parse(s)
    }
}

/// Non-null boolean flavor of BL.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bn(pub bool);

impl TryFrom<Bl> for Bn {
    type Error = Error;

    fn try_from(b: Bl) -> Result<Bn> {
        match b.0 {
            Ok(v) => Ok(Bn(v)),
            Err(nf) => Err(Error::NullNotAllowed(nf.to_string())),
        }
    }
}

impl fmt::Display for Bn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Bn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Bn::try_from(Bl::parse(s)?)
    }
}

/// Row and column order of the printed truth tables.
pub fn table_axis() -> [Bl; 11] {
    use NullFlavor::*;
    [
        Bl(Err(Asku)),
        Bl::FALSE,
        Bl(Err(Inv)),
        Bl(Err(Msk)),
        Bl(Err(Na)),
        Bl(Err(Nask)),
        Bl(Err(Nav)),
        Bl(Err(Ni)),
        Bl(Err(Oth)),
        Bl::TRUE,
        Bl(Err(Unk)),
    ]
}

/// Every BL value: the two truth values plus the nine allowed flavors.
pub fn all_values() -> [Bl; 11] {
    table_axis()
}

pub type TruthTable = [[Bl; 11]; 11];

pub fn truth_table(op: BinaryOp, mode: LogicMode) -> TruthTable {
    let axis = table_axis();
    let mut grid = [[Bl::TRUE; 11]; 11];
    for (i, x) in axis.iter().enumerate() {
        for (j, y) in axis.iter().enumerate() {
            grid[i][j] = x.binary(op, *y, mode);
        }
    }
    grid
}

/// Tab-separated rendering with a header row and a label column.
pub fn format_table(op: BinaryOp, grid: &TruthTable) -> String {
    let axis = table_axis();
    let mut out = op.to_string();
    for y in &axis {
        out.push('\t');
        out.push_str(&y.to_string());
    }
    out.push('\n');
    for (x, row) in axis.iter().zip(grid) {
        out.push_str(&x.to_string());
        for cell in row {
            out.push('\t');
            out.push_str(&cell.to_string());
        }
        out.push('\n');
    }
    out
}
