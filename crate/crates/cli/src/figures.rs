//! CSV emission of the figure data sets: phase-precision curves of the
//! entangled coherent state and the NOON state over photon number and
//! transmission, and the crossover-region boundaries.

use std::fmt;
use std::path::Path;

use anyhow::Context;
use ecs_qfi::closed_forms::{
    ecs_lossless_qfi, ecs_lossy_qfi, ecs_lossy_qfi_approx, noon_qfi_continuous,
};
use ecs_qfi::crossover::{crossover_roots, fitted_boundaries, CrossoverMode};
use ecs_qfi::model::ecs_from_mean_photons;
use ecs_qfi::LossChannel;

use crate::format;

/// Density of the logarithmic photon-number grids.
const POINTS_PER_DECADE: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// δφ_min against photon number for T ∈ {1, 0.9, 0.8}.
    Fig1a,
    /// δφ_min against transmission for n̄ ∈ {4, 20}.
    Fig1b,
    /// log-log δφ_min comparison at T = 0.9.
    Fig2a,
    /// log-log δφ_min comparison at T = 0.99.
    Fig2b,
    /// Crossover-region boundaries and fit curves over T.
    Fig3,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3 => "fig3",
        }
    }

    pub fn default_output(&self) -> String {
        format!("{}.csv", self.name())
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| format!("unknown figure id '{s}' (expected fig1a/fig1b/fig2a/fig2b/fig3)"))
    }
}

fn channel(t: f64) -> LossChannel {
    LossChannel::from_transmission(t).expect("figure transmissions are in range")
}

/// Geometric grid from `min` to `max` at [`POINTS_PER_DECADE`]; endpoints
/// are produced exactly.
fn log_grid(min: f64, max: f64) -> Vec<f64> {
    let decades = (max / min).log10();
    let steps = (POINTS_PER_DECADE * decades).ceil() as usize;
    (0..=steps)
        .map(|i| min * 10f64.powf(decades * i as f64 / steps as f64))
        .collect()
}

fn noon_delta_phi(n: f64, ch: LossChannel) -> f64 {
    1.0 / noon_qfi_continuous(n, ch).sqrt()
}

fn ecs_exact_delta_phi(n_bar: f64, ch: LossChannel) -> f64 {
    let spec = ecs_from_mean_photons(n_bar).expect("grid photon numbers are non-negative");
    ecs_lossy_qfi(&spec, ch).delta_phi_min()
}

fn header(figure: FigureId, parameters: &[String]) -> String {
    let mut out = String::new();
    out.push_str(&format::comment(&format!(
        "tool = ecs-qfi {}",
        env!("CARGO_PKG_VERSION")
    )));
    out.push_str(&format::comment(&format!("figure = {figure}")));
    for line in parameters {
        out.push_str(&format::comment(line));
    }
    out
}

fn fig1a_csv() -> String {
    let transmissions = [1.0, 0.9, 0.8];
    let mut out = header(
        FigureId::Fig1a,
        &[
            "delta-phi_min against photon number (NOON: N, ECS: nbar)".into(),
            "grid: geometric from 1 to 50, 200 points per decade".into(),
            format!("transmissions: {transmissions:?}"),
        ],
    );
    let mut columns = vec!["n".to_string()];
    for t in transmissions {
        columns.push(format!("dphi_noon_t{t}"));
        columns.push(format!("dphi_ecs_t{t}"));
    }
    out.push_str(&format::row(&columns));
    for n in log_grid(1.0, 50.0) {
        let mut fields = vec![format::float(n)];
        for t in transmissions {
            fields.push(format::float(noon_delta_phi(n, channel(t))));
            fields.push(format::float(ecs_exact_delta_phi(n, channel(t))));
        }
        out.push_str(&format::row(&fields));
    }
    out
}

fn fig1b_csv() -> String {
    let photon_numbers = [4.0, 20.0];
    let mut out = header(
        FigureId::Fig1b,
        &[
            "delta-phi_min against transmission".into(),
            "grid: linear T from 0.5 to 1.0, step 0.0025".into(),
            format!("photon numbers: {photon_numbers:?}"),
        ],
    );
    let mut columns = vec!["t".to_string()];
    for n in photon_numbers {
        columns.push(format!("dphi_noon_n{n}"));
        columns.push(format!("dphi_ecs_n{n}"));
    }
    out.push_str(&format::row(&columns));
    for i in 0..=200u32 {
        let t = 0.5 + f64::from(i) * 0.0025;
        let mut fields = vec![format::float(t)];
        for n in photon_numbers {
            fields.push(format::float(noon_delta_phi(n, channel(t))));
            fields.push(format::float(ecs_exact_delta_phi(n, channel(t))));
        }
        out.push_str(&format::row(&fields));
    }
    out
}

fn fig2_csv(figure: FigureId, t: f64, max_n: f64) -> String {
    let mut out = header(
        figure,
        &[
            format!("log-log delta-phi_min comparison at transmission = {t}"),
            format!("grid: geometric nbar from 1 to {max_n}, 200 points per decade"),
            "classical limit: 1/sqrt(2*T*nbar)".into(),
        ],
    );
    out.push_str(&format::row(&[
        "nbar".into(),
        "dphi_classical_limit".into(),
        "dphi_noon".into(),
        "dphi_ecs_exact".into(),
        "dphi_ecs_approx".into(),
        "dphi_ecs_lossless".into(),
    ]));
    let ch = channel(t);
    for n_bar in log_grid(1.0, max_n) {
        let spec = ecs_from_mean_photons(n_bar).expect("grid photon numbers are non-negative");
        out.push_str(&format::row(&[
            format::float(n_bar),
            format::float(1.0 / (2.0 * t * n_bar).sqrt()),
            format::float(noon_delta_phi(n_bar, ch)),
            format::float(ecs_lossy_qfi(&spec, ch).delta_phi_min()),
            format::float(ecs_lossy_qfi_approx(n_bar, ch).delta_phi_min()),
            format::float(1.0 / ecs_lossless_qfi(&spec).sqrt()),
        ]));
    }
    out
}

fn fig3_csv() -> String {
    let mut out = header(
        FigureId::Fig3,
        &[
            "crossover-region boundaries over transmission".into(),
            "grid: linear T from 0.850 to 0.999, step 0.001".into(),
            "roots solved from the large-n approximation; empty fields = no crossover".into(),
            "a single tangent root is written into both root columns".into(),
        ],
    );
    out.push_str(&format::row(&[
        "t".into(),
        "root_lower".into(),
        "root_upper".into(),
        "fit_lower".into(),
        "fit_upper".into(),
    ]));
    for i in 0..=149u32 {
        let t = f64::from(850 + i) / 1000.0;
        let result = crossover_roots(t, CrossoverMode::LargeNApproximation, 1e4)
            .expect("grid transmissions are inside (0, 1)");
        let (lower, upper) = match result.roots[..] {
            [] => (String::new(), String::new()),
            [single] => (format::float(single), format::float(single)),
            [lower, upper, ..] => (format::float(lower), format::float(upper)),
        };
        let (fit_upper, fit_lower) = fitted_boundaries(t);
        out.push_str(&format::row(&[
            format::float(t),
            lower,
            upper,
            format::float(fit_lower),
            format::float(fit_upper),
        ]));
    }
    out
}

/// Renders a figure's full CSV content.
pub fn figure_csv(figure: FigureId) -> String {
    match figure {
        FigureId::Fig1a => fig1a_csv(),
        FigureId::Fig1b => fig1b_csv(),
        FigureId::Fig2a => fig2_csv(FigureId::Fig2a, 0.9, 100.0),
        FigureId::Fig2b => fig2_csv(FigureId::Fig2b, 0.99, 1000.0),
        FigureId::Fig3 => fig3_csv(),
    }
}

/// Renders and writes a figure CSV.
pub fn write_figure(figure: FigureId, output: &Path) -> anyhow::Result<()> {
    let csv = figure_csv(figure);
    std::fs::write(output, csv)
        .with_context(|| format!("writing {figure} data to {}", output.display()))
}
