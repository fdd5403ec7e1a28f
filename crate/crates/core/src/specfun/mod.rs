//! Special functions used by the SER analysis: `I_0`, Marcum `Q_1`, Lauricella
//! `F_D`, and the adaptive quadrature underneath them.

mod bessel;
mod lauricella;
mod marcum;
mod quadrature;

pub use bessel::{bessel_i0, bessel_i0_scaled};
pub use lauricella::{lauricella_fd, LauricellaArgs};
pub use marcum::marcum_q1;
pub use quadrature::{integrate_finite, integrate_plain, Integral, QuadratureSpec};
