//! Classical Green's-function machinery for lossy magnetodielectric scatterers in
//! vacuum, and numerical checks of the identities the noise-field quantization
//! relies on.

pub mod numerics;
pub mod dispersion;
pub mod report;
pub mod green;
pub mod modes;
pub mod identities;

#[cfg(test)]
mod test_support;
