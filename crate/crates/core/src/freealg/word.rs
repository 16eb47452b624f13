use std::fmt;

use serde::{Serialize, Serializer};
use smallvec::SmallVec;

const KIND_SHIFT: u32 = 28;
const INDEX_MASK: u32 = (1 << KIND_SHIFT) - 1;

/// The four families of indeterminates, in their fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    X = 0,
    Y = 1,
    T = 2,
    Z = 3,
}

/// A noncommuting indeterminate. Ordered by kind (`X < Y < T < Z`) and then
/// by index; `z` carries no index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    fn new(kind: VarKind, index: u32) -> Var {
        assert!(index <= INDEX_MASK, "variable index {index} too large");
        Var(((kind as u32) << KIND_SHIFT) | index)
    }

    pub fn x(i: u32) -> Var {
        Var::new(VarKind::X, i)
    }

    pub fn y(i: u32) -> Var {
        Var::new(VarKind::Y, i)
    }

    pub fn t(i: u32) -> Var {
        Var::new(VarKind::T, i)
    }

    pub fn z() -> Var {
        Var::new(VarKind::Z, 0)
    }

    pub fn of_kind(kind: VarKind, index: u32) -> Var {
        match kind {
            VarKind::Z => Var::z(),
            _ => Var::new(kind, index),
        }
    }

    pub fn kind(self) -> VarKind {
        match self.0 >> KIND_SHIFT {
            0 => VarKind::X,
            1 => VarKind::Y,
            2 => VarKind::T,
            _ => VarKind::Z,
        }
    }

    pub fn index(self) -> u32 {
        self.0 & INDEX_MASK
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            VarKind::X => write!(f, "x{}", self.index()),
            VarKind::Y => write!(f, "y{}", self.index()),
            VarKind::T => write!(f, "t{}", self.index()),
            VarKind::Z => write!(f, "z"),
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A word in the free monoid; the empty word is the unit.
///
/// Words compare lexicographically letter by letter (a proper prefix sorts
/// first), using the fixed order on [`Var`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(SmallVec<[Var; 12]>);

impl Word {
    pub fn empty() -> Word {
        Word(SmallVec::new())
    }

    pub fn letter(v: Var) -> Word {
        let mut w = Word::empty();
        w.0.push(v);
        w
    }

    pub fn from_vars(vars: impl IntoIterator<Item = Var>) -> Word {
        Word(vars.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Var] {
        &self.0
    }

    pub fn push(&mut self, v: Var) {
        self.0.push(v);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    pub fn count(&self, v: Var) -> usize {
        self.0.iter().filter(|&&l| l == v).count()
    }
}

impl FromIterator<Var> for Word {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        Word::from_vars(iter)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_order_is_kind_then_index() {
        let mut vs = vec![Var::z(), Var::t(1), Var::x(10), Var::y(0), Var::x(2)];
        vs.sort();
        assert_eq!(vs, vec![Var::x(2), Var::x(10), Var::y(0), Var::t(1), Var::z()]);
        assert_eq!(Var::of_kind(VarKind::Z, 9), Var::z());
    }

    #[test]
    fn concatenation_has_unit() {
        let a = Word::from_vars([Var::x(1), Var::y(1)]);
        let e = Word::empty();
        assert_eq!(a.concat(&e), a);
        assert_eq!(e.concat(&a), a);
        assert_eq!(e.to_string(), "1");
        assert_eq!(a.to_string(), "x1*y1");
    }
}
