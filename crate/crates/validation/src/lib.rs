//! Holds the `acceptance` test target, which prints one PASS/FAIL line per
//! criterion. Kept in its own package so that cargo runs it after the
//! `biwave-core` suites. Run it alone with `cargo test -p biwave-validation`.
