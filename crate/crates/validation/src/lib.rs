//! Holds the acceptance suite (`tests/acceptance.rs`); run it with
//! `cargo test -p oblique-validation --test acceptance`.
