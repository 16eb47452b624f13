//! The free unital associative algebra over typed indeterminates.

mod capelli;
mod poly;
mod text;
mod word;

pub use capelli::{
    alternation_report, capelli, capelli_in, capelli_words, double_capelli,
    double_capelli_bridges, is_alternating, specialize_to_unit, AlternationReport,
};
pub use poly::{word_multidegree, Multidegree, Poly, Substitution};
pub use text::parse_poly;
pub use word::{Var, VarKind, Word};
