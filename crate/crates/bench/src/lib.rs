//! Benchmarks live in `benches/`; run them with `cargo bench -p closurelab-bench`.
