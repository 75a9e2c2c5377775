//! Shared fixtures for the criterion benchmarks.

use tubecut_core::body::{BodySpec, NormalForm};
use tubecut_core::certify::{GridSpec, domain_grid};
use tubecut_core::classify::DomainLabel;

pub fn body325() -> BodySpec {
    BodySpec::new(3, 2, 0.5).expect("valid reference body")
}

pub fn body525() -> BodySpec {
    BodySpec::new(5, 2, 0.5).expect("valid reference body")
}

pub fn generic_plane() -> NormalForm {
    NormalForm::new(0.9, 0.3).expect("finite")
}

/// A small separating-domain grid for fit benchmarks.
pub fn fit_grid(spec: &BodySpec) -> Vec<(f64, f64)> {
    domain_grid(
        spec,
        DomainLabel::Separating3,
        &GridSpec {
            a_lo: 0.0,
            a_hi: 1.4,
            na: 12,
            nc: 10,
            margin_frac: 0.06,
        },
    )
}
