//! Holds the `acceptance` test target (`tests/acceptance.rs`). Kept in its own
//! package so that it runs after every other suite in `cargo test --workspace`.
