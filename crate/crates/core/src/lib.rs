//! Desk-scale model of cavity optomagnonics in a ferromagnetic
//! whispering-gallery sphere.
//!
//! Light circulating in the sphere Brillouin-scatters off the uniform
//! (Kittel) magnon mode, hopping between the TE and TM mode families and
//! picking up a `±ω_m` frequency shift. Which shift is allowed depends on the
//! orbit direction and the input polarization, and the TE/TM birefringence
//! decides how strongly each channel is enhanced. This crate covers:
//!
//! - [`resonator`]: free spectral range, TE/TM split, mode ladders, Lorentzian
//!   densities of states;
//! - [`magnonics`]: material constants, the Kittel mode, the coupling `g`;
//! - [`scattering`]: selection rules, steady-state sideband fluxes,
//!   nonreciprocity, conversion efficiency and its design improvements;
//! - [`spectra`]: laser sweeps of the scattering strength and their
//!   cross-correlation;
//! - [`instrument`]: photon fluxes, heterodyne sideband placement, SNR.
//!
//! Stored rates are in Hz; see [`units`] for where the 2π goes.
//!
//! ```
//! use omsim_core::magnonics::{coupling_g_theory, MagnetMaterial, SampleGeometry};
//! use omsim_core::units::ordinary;
//!
//! let sphere = SampleGeometry::sphere(750e-6)?;
//! let g = coupling_g_theory(&MagnetMaterial::yig(), &sphere);
//! assert!((ordinary(g) - 5.4).abs() < 0.1);
//! # Ok::<(), omsim_core::Error>(())
//! ```

pub mod error;
pub mod instrument;
pub mod magnonics;
pub mod resonator;
pub mod scattering;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};

// The guide's code blocks are compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/resonator.md")]
    mod resonator {}
    #[doc = include_str!("../../../book/src/coupling.md")]
    mod coupling {}
    #[doc = include_str!("../../../book/src/scattering.md")]
    mod scattering {}
    #[doc = include_str!("../../../book/src/efficiency.md")]
    mod efficiency {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    mod measurement {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
