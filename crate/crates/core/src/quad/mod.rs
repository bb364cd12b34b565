//! Numerical kernels: adaptive and double-exponential quadrature, contour
//! derivatives, Laplace inversion and cumulative-integral interpolants.

mod contour;
mod de;
mod gauss_kronrod;
mod interp;
mod laplace;

pub use contour::{cauchy_derivative, taylor_partial_sum, ContourSettings, TaylorSum};
pub use de::{DeRule, DeSum, QuadValue};
pub use gauss_kronrod::{integrate_finite, integrate_semi_infinite, QuadratureSettings};
pub use interp::{cumulative_interpolant, CumulativeInterpolant};
pub use laplace::{inverse_laplace, inverse_laplace_euler, EulerSettings, LaplaceSettings};
