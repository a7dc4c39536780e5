//! Per-edge weights and the finite-error correction of the cut bound.
//!
//! All logarithms are base 2; weights are in ebits (or secret bits) per
//! channel use. Lossy-channel formulas are per optical mode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{ChannelSpec, EdgeSpec};

/// Which per-edge weight a cut is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// Two-way assisted quantum capacity (achievable side).
    QCap,
    /// Upper bound on the channel's squashed entanglement (converse side).
    EsqUpper,
}

/// Error parameter of an ε-close protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonBudget {
    epsilon: f64,
}

/// Smallest ε for which the corrected bound carries no information.
pub const VACUOUS_THRESHOLD: f64 = 1.0 / 256.0;

impl EpsilonBudget {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::Domain(format!(
                "epsilon must be finite and >= 0 (got {epsilon})"
            )));
        }
        Ok(EpsilonBudget { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// True iff `16·sqrt(ε) >= 1`.
    pub fn is_vacuous(&self) -> bool {
        self.epsilon >= VACUOUS_THRESHOLD
    }
}

/// An upper bound after the ε correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrectedBound {
    Finite(f64),
    /// The correction's prefactor is non-positive; no constraint.
    Vacuous,
}

impl CorrectedBound {
    pub fn is_vacuous(&self) -> bool {
        matches!(self, CorrectedBound::Vacuous)
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            CorrectedBound::Finite(v) => Some(v),
            CorrectedBound::Vacuous => None,
        }
    }
}

/// `h(x) = -x log2 x - (1-x) log2 (1-x)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy needs x in [0,1] (got {x})")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta must be in [0, 1) (got {eta})")));
    }
    Ok(())
}

/// Two-way assisted capacity of a pure-loss channel, `log2(1/(1-eta))`.
pub fn lossy_q_cap(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    // -log1p(-eta) keeps precision for small eta
    Ok(-(-eta).ln_1p() / std::f64::consts::LN_2)
}

/// Squashed-entanglement upper bound of a pure-loss channel,
/// `log2((1+eta)/(1-eta))`.
pub fn lossy_esq_upper(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok((eta.ln_1p() - (-eta).ln_1p()) / std::f64::consts::LN_2)
}

/// Weight of one use of `edge`'s channel.
pub fn channel_weight(channel: &ChannelSpec, kind: WeightKind) -> f64 {
    match (*channel, kind) {
        (ChannelSpec::LossyOptical { eta }, WeightKind::QCap) => {
            lossy_q_cap(eta).expect("eta validated by Network")
        }
        (ChannelSpec::LossyOptical { eta }, WeightKind::EsqUpper) => {
            lossy_esq_upper(eta).expect("eta validated by Network")
        }
        (ChannelSpec::Custom { q_cap, .. }, WeightKind::QCap) => q_cap,
        (ChannelSpec::Custom { esq_upper, .. }, WeightKind::EsqUpper) => esq_upper,
    }
}

pub fn edge_weight(edge: &EdgeSpec, kind: WeightKind) -> f64 {
    channel_weight(&edge.channel, kind)
}

/// Applies the finite-ε correction to a cut value:
/// `(cut + 4 h(2 sqrt ε)) / (1 - 16 sqrt ε)`, or [`CorrectedBound::Vacuous`]
/// when `ε >= 1/256`.
pub fn epsilon_corrected_upper(cut_value: f64, epsilon: f64) -> Result<CorrectedBound> {
    if !cut_value.is_finite() || cut_value < 0.0 {
        return Err(Error::Domain(format!(
            "cut value must be finite and >= 0 (got {cut_value})"
        )));
    }
    let budget = EpsilonBudget::new(epsilon)?;
    if budget.is_vacuous() {
        return Ok(CorrectedBound::Vacuous);
    }
    let s = epsilon.sqrt();
    // 1 - 16 s written as (1 - 256 ε)/(1 + 16 s): stays positive right below
    // the threshold where 16 s rounds to 1.
    let denom = (1.0 - 256.0 * epsilon) / (1.0 + 16.0 * s);
    let additive = 4.0 * binary_entropy(2.0 * s)?;
    Ok(CorrectedBound::Finite((cut_value + additive) / denom))
}
