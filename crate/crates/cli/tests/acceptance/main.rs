//! Acceptance gate for the planning stack. One test per criterion; each
//! prints a single summary line (visible with `--nocapture`) and pins its
//! tolerances in the asserts.

mod determinism;
mod directional;
mod estimator;
mod exactness;
mod grid;
mod planning;
mod preparation;
mod support;
