//! Criterion benchmarks; run with `cargo bench -p radialkit-bench`.
