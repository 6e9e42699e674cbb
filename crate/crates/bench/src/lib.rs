//! Criterion benchmarks for csrg; see benches/kernels.rs.
