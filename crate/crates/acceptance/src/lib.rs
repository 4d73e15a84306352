//! Acceptance checks live in `tests/acceptance`; this crate has no library code.
