//! Criterion benchmarks for the dense kernels; run with `cargo bench -p wamcyl-bench`.
