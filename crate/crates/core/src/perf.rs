//! Closed-form latency model comparing the 302-style negotiation patterns.
//!
//! Pattern 2.1 costs three request/response pairs (original resource,
//! distinct TimeGate, memento); Pattern 1.1 costs two (self-negotiating
//! original, memento). Queuing and processing delay are taken as zero, so a
//! round trip is transmission delay plus propagation delay.

use thiserror::Error;

/// Signal speed in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ModelError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("Pattern 1.1 timegate time {timegate_p11} s does not exceed a + b = {sum} s; no finite crossover bandwidth")]
    NoCrossover { timegate_p11: f64, sum: f64 },
}

/// Inputs to the model, all in seconds unless noted.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PerfParams {
    /// `a`: generating the original-resource response (Pattern 2.1 step 1).
    pub original_gen: f64,
    /// `b`: generating the distinct TimeGate's 302 (Pattern 2.1 step 2).
    pub timegate_gen: f64,
    /// `B`: generating the self-negotiating 302 (Pattern 1.1 step 1).
    pub self_timegate_gen: f64,
    /// `M`: generating the memento response.
    pub memento_gen: f64,
    pub rtt_original: f64,
    pub rtt_timegate: f64,
    pub rtt_self_timegate: f64,
    pub rtt_memento: f64,
}

impl PerfParams {
    /// Every RTT set to the same value.
    pub fn with_uniform_rtt(mut self, rtt: f64) -> Self {
        self.rtt_original = rtt;
        self.rtt_timegate = rtt;
        self.rtt_self_timegate = rtt;
        self.rtt_memento = rtt;
        self
    }
}

/// `a + RTT_a + b + RTT_b + M + RTT_M`.
pub fn duration_pattern21(p: &PerfParams) -> f64 {
    p.original_gen + p.rtt_original + p.timegate_gen + p.rtt_timegate + p.memento_gen + p.rtt_memento
}

/// `B + RTT_B + M + RTT_M`.
pub fn duration_pattern11(p: &PerfParams) -> f64 {
    p.self_timegate_gen + p.rtt_self_timegate + p.memento_gen + p.rtt_memento
}

/// Pattern 1.1 beats 2.1 iff `B < a + b + RTT_a`.
///
/// The memento terms cancel and the two TimeGate round trips are taken as
/// equal, so only the extra original-resource round trip remains.
pub fn pattern11_wins(p: &PerfParams) -> bool {
    p.self_timegate_gen < p.original_gen + p.timegate_gen + p.rtt_original
}

/// Pattern 1.1 outcome when `RTT_a` is pure transmission delay of
/// `payload_bits` at `bandwidth_bps`.
pub fn pattern11_wins_at_bandwidth(
    payload_bits: f64,
    bandwidth_bps: f64,
    original_gen: f64,
    timegate_gen: f64,
    self_timegate_gen: f64,
) -> Result<bool, ModelError> {
    let d_t = transmission_delay(payload_bits, bandwidth_bps)?;
    Ok(pattern11_wins(&PerfParams {
        original_gen,
        timegate_gen,
        self_timegate_gen,
        rtt_original: d_t,
        ..PerfParams::default()
    }))
}

/// `RTT = d_t + d_p`.
pub fn rtt(transmission: f64, propagation: f64) -> f64 {
    transmission + propagation
}

/// `d_t = N / R`.
pub fn transmission_delay(bits: f64, bandwidth_bps: f64) -> Result<f64, ModelError> {
    if bandwidth_bps <= 0.0 {
        return Err(ModelError::NonPositive("bandwidth"));
    }
    Ok(bits / bandwidth_bps)
}

/// `d_p = d / s_p`.
pub fn propagation_delay(distance_m: f64, speed_mps: f64) -> Result<f64, ModelError> {
    if speed_mps <= 0.0 {
        return Err(ModelError::NonPositive("propagation speed"));
    }
    Ok(distance_m / speed_mps)
}

/// `d = d_p * s_p`.
pub fn propagation_distance(delay_s: f64, speed_mps: f64) -> f64 {
    delay_s * speed_mps
}

/// Bandwidth below which Pattern 1.1 wins: `R = N / (B - a - b)`.
pub fn crossover_bandwidth(
    payload_bits: f64,
    original_gen: f64,
    timegate_gen: f64,
    self_timegate_gen: f64,
) -> Result<f64, ModelError> {
    let sum = original_gen + timegate_gen;
    let margin = self_timegate_gen - sum;
    if margin <= 0.0 {
        return Err(ModelError::NoCrossover { timegate_p11: self_timegate_gen, sum });
    }
    Ok(payload_bits / margin)
}

/// With equal TimeGate costs (`B = b`) the inequality reduces to
/// `0 < d_t + a`: Pattern 1.1 wins whenever anything at all is spent on the
/// extra original-resource exchange.
pub fn equal_processing_limit(original_gen: f64) -> impl Fn(f64) -> bool {
    move |transmission: f64| 0.0 < transmission + original_gen
}
