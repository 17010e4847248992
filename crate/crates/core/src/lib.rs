//! First homology of simplicial 2-complexes from spanning-tree cycle bases
//! and harmonic 1-forms.
//!
//! The pipeline builds a spanning tree, turns each non-tree edge into a
//! fundamental cycle, integrates a random harmonic (a vector in the kernel
//! of the first combinatorial Laplacian) over every cycle, discards the
//! cycles with zero integral as contractible, keeps one cycle per distinct
//! label, and finally reduces that set with a handful of further harmonics
//! to a homology generating set.
//!
//! [`cyclebasis`] runs the pipeline in one address space; [`netsim`] runs
//! the same computation as message-passing node programs on a deterministic
//! event simulator and accounts every packet. [`oracle`] decides every
//! question again in exact rational arithmetic.

pub mod complex;
pub mod cyclebasis;
pub mod geomgraph;
pub mod harmonic;
pub mod netsim;
pub mod oracle;
pub mod rng;
pub mod sparse;

pub use complex::{SimplicialComplex2, SparseChain};
