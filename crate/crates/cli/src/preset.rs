//! Canned experiment bundles covering the standard report figures.

use crate::config::{
    ExperimentConfig, ExperimentKind, HopConfig, SchemeConfig, SweepConfig, SweepVariable,
};

pub const PRESET_NAMES: &[&str] = &["fig1", "fig2", "fig3", "fig4", "fig5"];

fn hops(orders_gains: &[(u32, f64)]) -> Vec<HopConfig> {
    orders_gains
        .iter()
        .map(|&(cascade_order, channel_gain)| HopConfig {
            cascade_order,
            channel_gain,
        })
        .collect()
}

fn base(
    experiment: ExperimentKind,
    label: &str,
    hops: Vec<HopConfig>,
    diversity: u32,
    scheme: SchemeConfig,
    sweep: SweepConfig,
) -> ExperimentConfig {
    ExperimentConfig {
        experiment,
        label: Some(label.to_string()),
        hops,
        diversity,
        scheme,
        trials: 1_000_000,
        seed: 42,
        threshold_db: 0.0,
        avg_snr_db: 0.0,
        with_mc: true,
        sweep,
    }
}

/// The experiment bundle behind a preset name, or `None` if unknown.
pub fn preset(name: &str) -> Option<Vec<ExperimentConfig>> {
    match name {
        // amplitude densities for 2-branch MRC over deepening cascades,
        // unit per-stage variance (gain 2^n)
        "fig1" => Some(
            [3u32, 4, 5]
                .iter()
                .map(|&n| {
                    let lambda = 2f64.powi(n as i32);
                    let stop = 3.0 * (2.0 * lambda).sqrt();
                    base(
                        ExperimentKind::Pdf,
                        &format!("amplitude_n{n}"),
                        hops(&[(n, lambda)]),
                        2,
                        SchemeConfig::Regenerative,
                        SweepConfig {
                            variable: SweepVariable::Amplitude,
                            start: 0.0,
                            stop,
                            points: 50,
                        },
                    )
                })
                .collect(),
        ),
        // outage vs SNR: a 4-hop amplifying chain and a 6-hop decoding chain
        "fig2" => Some(vec![
            base(
                ExperimentKind::Outage,
                "outage_amplify_4hop",
                hops(&[(4, 1.0); 4]),
                2,
                SchemeConfig::Nonregenerative,
                snr_sweep(),
            ),
            base(
                ExperimentKind::Outage,
                "outage_decode_6hop",
                hops(&[(3, 1.0); 6]),
                3,
                SchemeConfig::Regenerative,
                snr_sweep(),
            ),
        ]),
        // outage vs SNR for both schemes across cascade orders, 3 hops, L=2
        "fig3" => Some(
            [2u32, 3, 4]
                .iter()
                .flat_map(|&n| {
                    [
                        (SchemeConfig::Nonregenerative, "amplify"),
                        (SchemeConfig::Regenerative, "decode"),
                    ]
                    .into_iter()
                    .map(move |(scheme, tag)| {
                        base(
                            ExperimentKind::Outage,
                            &format!("outage_{tag}_n{n}"),
                            hops(&[(n, 1.0); 3]),
                            2,
                            scheme,
                            snr_sweep(),
                        )
                    })
                })
                .collect(),
        ),
        // amount of fading vs cascade order across hop counts and diversity
        "fig4" => Some(
            [(1usize, 1u32), (1, 3), (3, 1), (3, 3)]
                .iter()
                .map(|&(num_hops, l)| {
                    let mut cfg = base(
                        ExperimentKind::Af,
                        &format!("af_{num_hops}hop_l{l}"),
                        hops(&vec![(1, 1.0); num_hops]),
                        l,
                        SchemeConfig::Nonregenerative,
                        SweepConfig {
                            variable: SweepVariable::CascadeOrder,
                            start: 1.0,
                            stop: 8.0,
                            points: 8,
                        },
                    );
                    cfg.avg_snr_db = 10.0;
                    cfg
                })
                .collect(),
        ),
        // optimized vs equal power split on an unbalanced 3-hop chain
        "fig5" => Some(
            [1u32, 3]
                .iter()
                .map(|&l| {
                    let mut cfg = base(
                        ExperimentKind::Pa,
                        &format!("pa_l{l}"),
                        hops(&[(3, 1.0), (3, 1.0), (2, 10.0)]),
                        l,
                        SchemeConfig::Regenerative,
                        SweepConfig {
                            variable: SweepVariable::TotalPowerDb,
                            start: 0.0,
                            stop: 30.0,
                            points: 16,
                        },
                    );
                    // outage under the optimum falls fast with power; the
                    // simulated overlay is opt-in to keep the preset quick
                    cfg.with_mc = false;
                    cfg
                })
                .collect(),
        ),
        _ => None,
    }
}

fn snr_sweep() -> SweepConfig {
    SweepConfig {
        variable: SweepVariable::SnrDb,
        start: 0.0,
        stop: 30.0,
        points: 16,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn every_preset_config_validates() {
        for &name in PRESET_NAMES {
            for cfg in preset(name).unwrap() {
                cfg.validate()
                    .unwrap_or_else(|e| panic!("{name}/{}: {e}", cfg.stem()));
            }
        }
        assert!(preset("fig6").is_none());
    }

    #[test]
    fn preset_labels_are_unique() {
        let mut seen = HashSet::new();
        for &name in PRESET_NAMES {
            for cfg in preset(name).unwrap() {
                assert!(seen.insert(cfg.stem()), "duplicate label {}", cfg.stem());
            }
        }
    }

    #[test]
    fn fig1_uses_unit_stage_variance() {
        for cfg in preset("fig1").unwrap() {
            let h = cfg.hops[0];
            assert_eq!(h.channel_gain, 2f64.powi(h.cascade_order as i32));
        }
    }
}
