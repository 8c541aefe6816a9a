//! Reference parameter sets.
//!
//! The nondimensional rates are the rounded values obtained from the
//! tabulated physical constants, with `x0 = 5`, `y0 = 50`.

use serde::{Deserialize, Serialize};

use crate::model::{DimensionalParams, ModelParams, State};
use crate::scalar::{lit, Scalar};

/// Named parameter presets, addressable from configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// Strong tumor noise (`sigma1 = 0.2`, `sigma2 = 2`): tumor extinction.
    #[serde(rename = "example-5.1")]
    StrongTumorNoise,
    /// Weak tumor noise and weak immune response (`sigma2 = 0.25`,
    /// `rho = 0.613`, `sigma1 = 0.2`): permanence.
    #[serde(rename = "example-5.2")]
    WeakTumorNoise,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::StrongTumorNoise, Preset::WeakTumorNoise];

    pub fn name(self) -> &'static str {
        match self {
            Preset::StrongTumorNoise => "example-5.1",
            Preset::WeakTumorNoise => "example-5.2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn params<T: Scalar>(self) -> ModelParams<T> {
        match self {
            Preset::StrongTumorNoise => strong_tumor_noise(),
            Preset::WeakTumorNoise => weak_tumor_noise(),
        }
    }

    pub fn initial_state<T: Scalar>(self) -> State<T> {
        initial_state()
    }
}

/// Physical constants of the reference tumor-immune parametrization.
pub fn tabulated_dimensional<T: Scalar>() -> DimensionalParams<T> {
    DimensionalParams {
        a: lit(0.18),
        b: lit(2.0e-9),
        s: lit(1.3e4),
        d: lit(0.0412),
        g: lit(2.019e7),
        q: lit(0.1245),
        r1: lit(2.422e-10),
        r2: lit(1.101e-7),
        e0: lit(1e6),
        t0: lit(1e6),
    }
}

/// Rounded nondimensional rates, noise off.
pub fn reference_rates<T: Scalar>() -> ModelParams<T> {
    ModelParams {
        sigma: lit(0.1181),
        rho: lit(1.131),
        eta: lit(20.19),
        mu: lit(0.00311),
        delta: lit(0.3743),
        alpha: lit(1.636),
        beta: lit(3.272e-3),
        sigma1: T::zero(),
        sigma2: T::zero(),
    }
}

pub fn strong_tumor_noise<T: Scalar>() -> ModelParams<T> {
    reference_rates().with_noise(lit(0.2), lit(2.0))
}

pub fn weak_tumor_noise<T: Scalar>() -> ModelParams<T> {
    ModelParams {
        rho: lit(0.613),
        ..reference_rates().with_noise(lit(0.2), lit(0.25))
    }
}

pub fn initial_state<T: Scalar>() -> State<T> {
    State {
        x: lit(5.0),
        y: lit(50.0),
    }
}
