//! Differential polynomials in jet variables, total derivatives, Euler
//! operators and ħ-series.

mod derivations;
mod json;
mod monomial;
mod parse;
mod poly;
mod series;

pub use derivations::{binomial, inv_factorial, leibniz_dx_n, radial_primitive};
pub use json::{parse_rational, rational_from_json, rational_to_json};
pub use monomial::{Jet, Monomial};
pub use parse::parse_poly;
pub use poly::{Degree, JetPoly};
pub use series::HbarSeries;
