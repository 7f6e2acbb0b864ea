//! Criterion benchmarks for the session loop and the audio path; see `benches/`.
