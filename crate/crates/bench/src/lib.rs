//! Criterion benchmarks for `jetgeo-core`; see `benches/`.
