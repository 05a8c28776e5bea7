//! The limit law `G^(m)`: support, Stieltjes transform, density, CDF and
//! moments by quadrature.

pub mod law;
pub mod quadrature;
pub mod roots;

pub use law::{mp_density_closed_form, support_edge, DensityGrid, LimitLaw, TabulatedCdf};
