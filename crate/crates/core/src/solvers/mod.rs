//! Decision procedures and area oracles.

pub mod affine;
pub mod area;
pub mod britton;
pub mod certificate;

pub use affine::{AffinePair, KAdic};
pub use area::{area_bfs, area_star_bounded, prove, AreaCaps, AreaResult, AreaSearch, AreaStarReport};
pub use britton::{britton_solve, solve_b_infinity, solve_bm, BrittonOutcome, BrittonState};
pub use certificate::{hat_certificate, wn_certificate, AreaCertificate, CertificateStep};
