//! Sampling and reconstruction of bandlimited signals on graphs.
//!
//! Signals live on the vertices of a finite, connected, simple graph. A
//! signal is bandlimited to `omega` when it is spanned by eigenvectors of the
//! normalized Laplacian with eigenvalue at most `omega` (the Paley-Wiener
//! space `PW_omega`). The crate provides
//!
//! - graph construction and standard families ([`graph`], [`generate`]),
//! - the Laplacian, its spectrum and band projections ([`spectral`]),
//! - Poincaré constants of vertex subsets ([`lambda`]),
//! - frame bounds, dual frames and reconstruction from samples ([`frames`]),
//! - greedy set search ([`search`]) and a verification suite ([`verify`]).
//!
//! ```
//! use pwgs::{generate, spectral, frames, graph::VertexSet};
//!
//! let g = generate::path(3).unwrap();
//! let spec = spectral::compute_spectrum(&g).unwrap();
//! let omega = spectral::Bandwidth::new(1.0).unwrap();
//! let w = VertexSet::new(3, [0, 1]).unwrap();
//! let report = frames::frame_bounds(&spec, omega, &w).unwrap();
//! assert!((report.lower_bound - 0.25).abs() < 1e-12);
//! ```

mod dense;
pub mod error;
pub mod frames;
pub mod generate;
pub mod graph;
pub mod io;
pub mod lambda;
pub mod search;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet, build_graph};
pub use spectral::{Bandwidth, Signal, Spectrum, compute_spectrum};
