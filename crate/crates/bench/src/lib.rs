//! Criterion benchmarks for `recurlab`; run with `cargo bench -p recurlab-bench`.
