//! Fixtures shared by the criterion benches.

use thinvisc_core::{FluidParams, GapProfile};

/// Moderately elastic fluid inside the Reynolds range.
pub fn fluid() -> FluidParams {
    FluidParams::new(1.0, 0.2, 0.8, 1.0).expect("valid fixture")
}

pub fn profiles() -> Vec<(&'static str, GapProfile)> {
    vec![
        (
            "slider",
            GapProfile::linear_slider(1.0, 1.0, 2.0).expect("valid fixture"),
        ),
        (
            "cosine",
            GapProfile::cosine_bump(1.0, 1.0, 0.5).expect("valid fixture"),
        ),
    ]
}
