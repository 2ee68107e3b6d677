//! Benchmarks for the arithmetic kernels live in `benches/`.

pub use siegel_core;
