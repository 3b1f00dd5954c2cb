//! Criterion benchmarks for the propagator live in `benches/`; run them with
//! `cargo bench -p sauter-bench`.
