//! Figure-data regression checks: byte-identical reruns and the qualitative
//! shape of the precision curves.

use std::process::Command;

use ecs_qfi_cli::figures::{figure_csv, FigureId};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ecs-qfi"))
}

/// Parsed numeric table of a figure CSV: comment lines dropped, header kept.
fn parse(csv: &str) -> (Vec<String>, Vec<Vec<Option<f64>>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|field| {
                    if field.is_empty() {
                        None
                    } else {
                        Some(field.parse::<f64>().expect("numeric field"))
                    }
                })
                .collect()
        })
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<Option<f64>>], name: &str) -> Vec<Option<f64>> {
    let index = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("column {name} missing from {header:?}"));
    rows.iter().map(|row| row[index]).collect()
}

#[test]
fn figure_output_is_deterministic() {
    for figure in FigureId::ALL {
        assert_eq!(
            figure_csv(figure),
            figure_csv(figure),
            "{figure} renders differently across calls"
        );
    }

    // and through the binary, byte for byte
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for path in [&first, &second] {
        let status = binary()
            .args(["figure", "fig2a", "--out"])
            .arg(path)
            .status()
            .expect("binary runs");
        assert!(status.success());
    }
    let first_bytes = std::fs::read(&first).unwrap();
    assert!(!first_bytes.is_empty());
    assert_eq!(first_bytes, std::fs::read(&second).unwrap());
    println!("PASS figure CSVs are byte-identical across runs");
}

#[test]
fn moderate_loss_precision_curves_have_the_expected_shape() {
    let (header, rows) = parse(&figure_csv(FigureId::Fig2a));
    let nbar: Vec<f64> = column(&header, &rows, "nbar").into_iter().flatten().collect();
    let ecs: Vec<f64> = column(&header, &rows, "dphi_ecs_exact")
        .into_iter()
        .flatten()
        .collect();
    let noon: Vec<f64> = column(&header, &rows, "dphi_noon")
        .into_iter()
        .flatten()
        .collect();
    assert_eq!(nbar.len(), ecs.len());

    // the ECS precision improves monotonically with photon number
    for pair in ecs.windows(2) {
        assert!(pair[1] < pair[0], "ECS δφ_min not decreasing: {pair:?}");
    }

    // the NOON precision dips once, then degrades
    let mut noon_sign_flips = Vec::new();
    for i in 1..noon.len() - 1 {
        let before = noon[i] - noon[i - 1];
        let after = noon[i + 1] - noon[i];
        if before.signum() != after.signum() {
            noon_sign_flips.push(nbar[i]);
        }
    }
    assert_eq!(
        noon_sign_flips.len(),
        1,
        "NOON curve should flip slope exactly once, got {noon_sign_flips:?}"
    );

    // the two curves cross exactly twice, bracketing 6.4 and 23.5
    let mut crossings = Vec::new();
    for i in 1..noon.len() {
        let before = noon[i - 1] - ecs[i - 1];
        let after = noon[i] - ecs[i];
        if before.signum() != after.signum() {
            crossings.push((nbar[i - 1], nbar[i]));
        }
    }
    assert_eq!(crossings.len(), 2, "crossings: {crossings:?}");
    assert!(crossings[0].0 < 6.4 && 6.4 < crossings[0].1 + 0.2);
    assert!(crossings[1].0 - 0.5 < 23.5 && 23.5 < crossings[1].1 + 0.5);
    println!("PASS fig2a shape: crossings at {crossings:?}");
}

#[test]
fn lossless_ecs_always_beats_the_noon_state() {
    let (header, rows) = parse(&figure_csv(FigureId::Fig1a));
    let noon = column(&header, &rows, "dphi_noon_t1");
    let ecs = column(&header, &rows, "dphi_ecs_t1");
    for (noon, ecs) in noon.iter().zip(&ecs) {
        assert!(ecs.unwrap() < noon.unwrap());
    }
    println!("PASS fig1a: lossless ECS below the NOON curve everywhere");
}

#[test]
fn crossover_region_closes_at_the_critical_transmission() {
    let (header, rows) = parse(&figure_csv(FigureId::Fig3));
    let t = column(&header, &rows, "t");
    let lower = column(&header, &rows, "root_lower");
    let upper = column(&header, &rows, "root_upper");

    let at = |target: f64| -> usize {
        t.iter()
            .position(|&v| (v.unwrap() - target).abs() < 1e-9)
            .unwrap_or_else(|| panic!("row {target} missing"))
    };
    // below the merge the root columns are empty, above it populated
    assert!(lower[at(0.850)].is_none() && upper[at(0.850)].is_none());
    assert!(lower[at(0.854)].is_none() && upper[at(0.854)].is_none());
    let low = lower[at(0.860)].expect("root pair above the merge");
    let high = upper[at(0.860)].expect("root pair above the merge");
    assert!(low < high);
    // fit columns are always present
    assert!(column(&header, &rows, "fit_lower").iter().all(Option::is_some));
    assert!(column(&header, &rows, "fit_upper").iter().all(Option::is_some));
    println!("PASS fig3: root pair vanishes below the critical transmission");
}
