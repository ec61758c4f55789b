//! Named configurations. `fig1`..`fig5` reproduce the figure parameter sets;
//! the remaining names run each experiment at its defaults.

use crate::config::{Experiment, ExperimentConfig, ExperimentKind};

/// Preset names with a one-line description.
pub const PRESETS: [(&str, &str); 13] = [
    (
        "fig1",
        "double well with flea b=0.65, c=0.2, d=-0.1 (perturbed potential)",
    ),
    (
        "fig2",
        "flea-perturbed double-well ground states at hbar = 0.5, 0.1, 0.05, 0.01",
    ),
    ("fig3", "7x7 Gaussian lattice potential over the supercell"),
    (
        "fig4",
        "7x7 Gaussian lattice with delta=0.1 grid-point fleas (perturbed potential)",
    ),
    (
        "fig5",
        "flea-perturbed lattice ground states at hbar = 0.1, 0.025",
    ),
    (
        "doublewell",
        "unperturbed double well and its classical-limit trace",
    ),
    ("gap", "tunnel splitting over eight hbar in [0.05, 0.3]"),
    ("anderson", "symmetry-breaking pair at hbar = 0.05"),
    (
        "mexican",
        "Mexican-hat towers N = 0..3 and the radial-flea solve",
    ),
    ("metal", "flea-perturbed 2D lattice at hbar = 0.1, 0.025"),
    (
        "cw",
        "Curie-Weiss scan at J=1, B=0.5 with and without the odd spin flea",
    ),
    (
        "ising",
        "Ising order-of-limits table N = 4..12, epsilon = 1e-1..1e-6",
    ),
    (
        "harmonic",
        "harmonic oscillator oracle at hbar = 0.1, omega = 1",
    ),
];

/// The config of a named preset.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let experiment = match name {
        "fig1" | "fig2" => Experiment::defaults(ExperimentKind::DoublewellFlea),
        "fig3" | "fig4" | "fig5" | "metal" => Experiment::defaults(ExperimentKind::Metal2dFlea),
        "doublewell" => Experiment::DoublewellFlea(crate::config::DoublewellParams {
            flea: None,
            ..Default::default()
        }),
        "gap" => Experiment::defaults(ExperimentKind::GapScaling),
        "anderson" => Experiment::defaults(ExperimentKind::AndersonPair),
        "mexican" => Experiment::defaults(ExperimentKind::MexicanTower),
        "cw" => Experiment::defaults(ExperimentKind::CwScan),
        "ising" => Experiment::defaults(ExperimentKind::IsingLimits),
        "harmonic" => Experiment::defaults(ExperimentKind::HarmonicOracle),
        _ => return None,
    };
    let mut cfg = ExperimentConfig::new(experiment);
    cfg.output_dir = cfg.output_dir.join(name);
    Some(cfg)
}
