use serde::Serialize;
use tumor_immune_core::{regime_classify, ModelParams, Preset, RegimeReport};

use crate::config::Resolved;

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub preset: Option<Preset>,
    pub params: ModelParams<f64>,
    pub report: RegimeReport<f64>,
}

pub fn run(r: &Resolved) -> Classification {
    Classification {
        preset: r.preset,
        params: r.params,
        report: regime_classify(&r.params),
    }
}
