//! Tabulates the latency model for one set of inputs.

use memento_core::perf::{
    crossover_bandwidth, duration_pattern11, duration_pattern21, pattern11_wins, propagation_distance, rtt,
    transmission_delay, ModelError, PerfParams, SPEED_OF_LIGHT,
};

/// Defaults are the worked example: a 740-byte request/response pair over a
/// 28.8 kbps modem, measured mean processing times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelInputs {
    pub original_gen: f64,
    pub timegate_gen: f64,
    pub self_timegate_gen: f64,
    pub memento_gen: f64,
    pub payload_bits: f64,
    pub bandwidth_bps: f64,
    pub propagation_delay: f64,
}

impl Default for ModelInputs {
    fn default() -> Self {
        ModelInputs {
            original_gen: 0.1,
            timegate_gen: 0.6,
            self_timegate_gen: 1.24,
            memento_gen: 0.0,
            payload_bits: 11_840.0,
            bandwidth_bps: 28_800.0,
            propagation_delay: 0.13,
        }
    }
}

/// `(quantity, value)` rows. The crossover row reads `none` when Pattern 1.1
/// cannot win at any bandwidth.
pub fn model_rows(m: &ModelInputs) -> Result<Vec<(&'static str, String)>, ModelError> {
    let d_t = transmission_delay(m.payload_bits, m.bandwidth_bps)?;
    let round_trip = rtt(d_t, m.propagation_delay);
    let params = PerfParams {
        original_gen: m.original_gen,
        timegate_gen: m.timegate_gen,
        self_timegate_gen: m.self_timegate_gen,
        memento_gen: m.memento_gen,
        ..PerfParams::default()
    }
    .with_uniform_rtt(round_trip);
    let crossover = match crossover_bandwidth(m.payload_bits, m.original_gen, m.timegate_gen, m.self_timegate_gen) {
        Ok(r) => format!("{r:.2}"),
        Err(ModelError::NoCrossover { .. }) => "none".to_string(),
        Err(e) => return Err(e),
    };
    let transmission_only = PerfParams { rtt_original: d_t, ..params };
    Ok(vec![
        ("transmission_delay_s", format!("{d_t:.4}")),
        ("rtt_s", format!("{round_trip:.4}")),
        ("duration_pattern21_s", format!("{:.4}", duration_pattern21(&params))),
        ("duration_pattern11_s", format!("{:.4}", duration_pattern11(&params))),
        ("pattern11_wins", pattern11_wins(&params).to_string()),
        ("pattern11_wins_transmission_only", pattern11_wins(&transmission_only).to_string()),
        ("crossover_bandwidth_bps", crossover),
        ("propagation_distance_m", format!("{:.2}", propagation_distance(m.propagation_delay, SPEED_OF_LIGHT))),
    ])
}

pub fn render_table(rows: &[(&str, String)], csv: bool) -> String {
    let mut out = String::new();
    if csv {
        out.push_str("quantity,value\n");
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        if csv {
            out.push_str(&format!("{k},{v}\n"));
        } else {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
    }
    out
}
