pub mod algebra;
pub mod rules;
pub mod series;
pub mod trees;
pub mod verify;

use num_complex::Complex;
use num_rational::BigRational;

/// Gaussian rational: exact `re + im*i`.
pub type Scalar = Complex<BigRational>;
pub type Poly = algebra::Polynomial<Scalar>;
pub type Rf = algebra::RationalFunction<Scalar>;
pub type Series = series::PowerSeries<Rf>;
