//! Linear-algebra, special-function and randomness substrate shared by the
//! depth, dispersion and subspace modules.

pub mod eigen;
pub mod frame;
pub mod qmc;
pub mod rng;
pub mod special;

pub use eigen::jacobi_eigen;
pub use frame::{complement_frame, orthonormalize, random_frame, Frame};
pub use qmc::ShiftedHalton;
pub use rng::RngStream;
pub use special::{chi_square_sf, std_normal_cdf, std_normal_pdf};
