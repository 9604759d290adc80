//! Exact polynomial and ideal arithmetic over Q.

pub mod exponent;
pub mod groebner;
pub mod ideal;
pub mod parse;
pub mod poly;

pub use exponent::{ExponentVector, MonomialOrder};
pub use groebner::{groebner_basis, normal_form};
pub use ideal::Ideal;
pub use poly::{format_rational, parse_rational, rat, rat2, Chart, Coeff, Polynomial};

/// A point with one rational coordinate per chart coordinate.
pub type RationalPoint = Vec<Coeff>;

pub fn origin(n: usize) -> RationalPoint {
    vec![rat(0); n]
}

pub fn format_point(p: &[Coeff]) -> String {
    let parts: Vec<String> = p.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}
