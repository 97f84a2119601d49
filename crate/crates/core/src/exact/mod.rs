pub mod interval;
pub mod matrix;
pub mod poly;
pub mod quad;
pub mod rational;
pub mod roots;
pub mod smith;
pub mod spectral;

pub use interval::IntervalReal;
pub use matrix::QMatrix;
pub use poly::{char_poly, Poly};
pub use rational::Rational;
pub use smith::{smith_valuations, ValuationVector};
pub use spectral::{log_eigen_moduli, log_singular_values, Precision};
