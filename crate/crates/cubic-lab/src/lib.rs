//! A desk-scale laboratory for the family of cubic Dirichlet characters
//! parametrized by the Eisenstein integers, and for the analytic machinery
//! built on top of it.
//!
//! The crate is organized as a stack:
//!
//! * [`eisenstein`] — exact arithmetic in Z[ω]: norms, primary associates,
//!   factorization, Möbius, the cubic residue symbol, and enumeration of the
//!   admissible moduli that index the character family.
//! * [`characters`] — cubic Dirichlet characters: the Eisenstein
//!   parametrization, an independent brute-force construction from the
//!   multiplicative group, Gauss sums, and products of characters.
//! * [`kernels`] — smooth cutoff kernels and their Mellin-side companions:
//!   the test-function transform `k`, the cutoffs `F1`/`F2`, the archimedean
//!   ratio `G`, the compactly supported weight `W`, and its transform.
//! * [`providers`] — coefficient systems for the L-functions under study
//!   (Riemann zeta, the discriminant cusp form, its symmetric square).
//! * [`lfunctions`] — L-value evaluation: a Hurwitz-zeta oracle for degree
//!   one, an approximate-functional-equation engine for any degree, smoothed
//!   sums for Hecke L-functions over Z[ω], and local-factor bookkeeping.
//! * [`sieve`] — randomized stress tests of the cubic large-sieve inequality
//!   in direct and dual form, plus a second-moment scan.
//! * [`moments`] — the first-moment experiment: direct family averages, the
//!   predicted main term from the residue chain, residual ladders, and a
//!   nonvanishing census.
//! * [`cli`] — configuration, run manifests, report formats, and the
//!   subcommand implementations behind the `cubic-lab` binary.
//!
//! Heavy loops (family sweeps, sieve trials, moment averages) run on a rayon
//! pool when the default `parallel` feature is enabled and fall back to
//! sequential iteration without it; results are bitwise identical either way
//! because every reduction collects per-item results in a fixed order.

pub mod characters;
pub mod cli;
pub mod eisenstein;
pub mod kernels;
pub mod lfunctions;
pub mod moments;
pub mod numerics;
pub(crate) mod par;
pub mod providers;
pub mod sieve;

pub use num_complex::Complex64;
