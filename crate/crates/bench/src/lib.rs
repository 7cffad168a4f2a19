//! Benchmarks for the engine kernels. Run with `cargo bench -p jdsp-bench`.
