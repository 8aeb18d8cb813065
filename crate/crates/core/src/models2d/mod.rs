//! Spectra of the two-dimensional magnetic Neumann operator on model
//! domains: the cylinder (exact, by separation of variables) and the disk.

pub mod cylinder;
pub mod disk;
pub mod polar;
pub mod spectrum;

pub use cylinder::{cylinder_energy_exact, cylinder_energy_with_grid, CylinderCertificate, CylinderEnergy, CylinderSpec};
pub use disk::{disk_spectrum, DiskCertificate, DiskSpec, DiskSpectrum};
pub use polar::{landau_gauge, polar_eigenvalues, polar_matrix, symmetric_gauge, PolarGrid};
pub use spectrum::{counting_function, integrated_counting, riesz_mean, SpectrumResult};
