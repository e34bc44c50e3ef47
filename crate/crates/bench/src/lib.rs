//! Benchmark-only crate; see benches/learning.rs.
