//! The four scenarios.

use std::f64::consts::FRAC_PI_2;

use anyhow::{anyhow, bail, Context, Result};
use majorasim_core::braid::word_action;
use majorasim_core::builder::{check_step_continuity, step_hamiltonian, CONTINUITY_TOL};
use majorasim_core::dj::{gaussian_register, PARITY_SIGNATURES};
use majorasim_core::evolution::{
    apply_exact_braid, evolve, ground_state, wire_pair, wire_parity, EvolveOptions, Observable,
    ParityChoice,
};
use majorasim_core::fock::{
    dj_braid_sequence, dj_register, run_deutsch_jozsa, total_parity_operator, OracleId,
    QUBIT_STATES,
};
use majorasim_core::spectral::{site_weights, spectrum_with_tol, zero_modes, DEFAULT_ZERO_TOL};
use majorasim_core::{
    build_network, compile_word, BraidWord, CovarianceState, Direction, Edge, ErrorModel,
    LocalizedMode, MajoranaMode, NetworkGeometry, ProtocolStep, Ramp,
};
use nalgebra::DMatrix;
use serde_json::json;

use crate::config::{DjMode, End, ModeSelector, ObservableSpec, RunConfig, ScenarioKind};
use crate::report::{
    num, opt_num, Check, CheckKind, Endpoint, Outcome, Summary, Table, WordSummary,
};

pub const PURITY_LIMIT: f64 = 1e-6;
pub const PARITY_DRIFT_LIMIT: f64 = 1e-6;
pub const ANTISYMMETRY_LIMIT: f64 = 1e-10;
pub const DJ_TOL: f64 = 1e-10;

pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    match config.scenario {
        ScenarioKind::Braid | ScenarioKind::BraidWord => run_braid_word(config),
        ScenarioKind::DeutschJozsa => run_dj(config),
        ScenarioKind::Spectrum => run_spectrum(config),
    }
}

fn select<'a>(modes: &'a [LocalizedMode], sel: &ModeSelector) -> Result<&'a MajoranaMode> {
    let edge = match sel.end {
        End::L => Edge::Left,
        End::R => Edge::Right,
    };
    modes
        .iter()
        .find(|m| m.wire + 1 == sel.wire && m.edge == edge)
        .map(|m| &m.mode)
        .ok_or_else(|| anyhow!("no zero mode at {sel}"))
}

fn left_modes(modes: &[LocalizedMode], wires: usize) -> Result<Vec<MajoranaMode>> {
    (0..wires)
        .map(|w| {
            wire_pair(modes, w)
                .map(|(l, _)| l.mode.clone())
                .ok_or_else(|| anyhow!("wire {} has no isolated zero modes", w + 1))
        })
        .collect()
}

/// Covariance after conjugating by every generator of `word` exactly.
fn exact_braids(
    s0: &CovarianceState,
    word: &BraidWord,
    left: &[MajoranaMode],
) -> Result<CovarianceState> {
    let mut s = s0.clone();
    for g in word.generators() {
        let (u, l) = (&left[g.index - 1], &left[g.index]);
        s = if g.inverse {
            apply_exact_braid(&s, u, l)?
        } else {
            apply_exact_braid(&s, l, u)?
        };
    }
    Ok(s)
}

/// Orthogonal map carrying each left mode to its signed image under the
/// symbolic action of `word`.
fn symbolic_rotation(word: &BraidWord, left: &[MajoranaMode]) -> Result<DMatrix<f64>> {
    let perm = word_action(word, left.len())?;
    let n = left[0].dim();
    let mut r = DMatrix::identity(n, n);
    for (a, mode) in left.iter().enumerate() {
        let (b, s) = perm.apply(a);
        let va = mode.vector();
        r -= va * va.transpose();
        r += left[b].vector() * va.transpose() * (s as f64);
    }
    Ok(r)
}

fn run_braid_word(config: &RunConfig) -> Result<Outcome> {
    let params = config.wire_params()?;
    let wires = config.wire_count()?;
    let word = config.braid_word()?;
    let specs = config.observable_specs()?;
    let g = NetworkGeometry::new(wires, params.length)?;
    let h0 = build_network(&params, &g)?;
    let choice = match &config.initial_parity {
        Some(p) => ParityChoice(p.clone()),
        None => ParityChoice::all_even(wires),
    };
    let s0 = ground_state(&h0, &g, &choice, DEFAULT_ZERO_TOL)?;
    let modes = zero_modes(&h0, &g, DEFAULT_ZERO_TOL)?;
    let left = left_modes(&modes, wires)
        .context("zero modes must be isolated on every wire; use longer or topological wires")?;
    let observables = specs
        .iter()
        .map(|s| {
            Ok(Observable {
                name: s.column(),
                a: select(&modes, &s.a)?.clone(),
                b: select(&modes, &s.b)?.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let error = ErrorModel::new(config.alpha)?;
    let ramp = Ramp::new(config.ramp, config.step_duration)?;
    let schedule = compile_word(&word, &ramp, &params, &error, &g)?;
    let (_, junction) = schedule.max_junction_deviation()?;
    let opts = EvolveOptions {
        dt: config.dt,
        sample_stride: config.sample_stride,
        ..Default::default()
    };
    log::info!(
        "evolving {} generators over {} segments on {} wires of {} sites",
        word.len(),
        schedule.len(),
        wires,
        params.length
    );
    let traj = evolve(&s0, &schedule, &observables, &opts)?;

    let mut header: Vec<String> = ["time", "segment_index", "step_label", "phi"]
        .map(String::from)
        .to_vec();
    header.extend(specs.iter().map(ObservableSpec::column));
    header.extend(["gap", "purity_residual", "total_parity"].map(String::from));
    let mut table = Table::new("trajectory.csv", header);
    for s in &traj.samples {
        let mut row = vec![
            num(s.time),
            s.segment.to_string(),
            s.step_label.to_string(),
            opt_num(s.phi),
        ];
        row.extend(s.observables.iter().map(|&v| num(v)));
        row.extend([opt_num(s.gap), num(s.purity_residual), num(s.total_parity)]);
        table.rows.push(row);
    }

    let predicted = s0.rotated(&symbolic_rotation(&word, &left)?);
    let exact = exact_braids(&s0, &word, &left)?;
    let fin = &traj.final_state;
    let mut summary = Summary::new(config);
    summary.word = Some(WordSummary {
        time_order: word.to_string(),
        operator_order: word.operator_order(),
    });
    let mut worst = 0.0f64;
    for ob in &observables {
        let value = fin.correlation(&ob.a, &ob.b)?;
        let want = predicted.correlation(&ob.a, &ob.b)?;
        let error = (value - want).abs();
        worst = worst.max(error);
        summary.endpoints.push(Endpoint {
            name: ob.name.clone(),
            initial: s0.correlation(&ob.a, &ob.b)?,
            value,
            predicted: want,
            error,
        });
    }
    let tol = config.endpoint_tolerance;
    let covariance_dev = fin.max_deviation(&exact);
    summary.checks = vec![
        Check::at_most(
            "purity_residual",
            CheckKind::Consistency,
            traj.max_purity_residual(),
            PURITY_LIMIT,
        ),
        Check::at_most(
            "total_parity_drift",
            CheckKind::Consistency,
            traj.max_parity_drift(),
            PARITY_DRIFT_LIMIT,
        ),
        Check::at_most(
            "antisymmetry",
            CheckKind::Consistency,
            traj.max_antisymmetry(),
            ANTISYMMETRY_LIMIT,
        ),
        Check::at_most(
            "continuity",
            CheckKind::Consistency,
            junction,
            CONTINUITY_TOL,
        ),
        Check::at_most("endpoint_error", CheckKind::Prediction, worst, tol),
        Check::at_most(
            "covariance_deviation",
            CheckKind::Prediction,
            covariance_dev,
            tol,
        ),
    ];
    let parities = |s: &CovarianceState| -> Result<Vec<f64>> {
        (0..wires).map(|w| Ok(wire_parity(s, &g, w)?)).collect()
    };
    summary.details = json!({
        "wires": wires,
        "steps": traj.steps,
        "reorthonormalizations": traj.reorthonormalizations,
        "min_gap": traj.min_gap(),
        "initial_wire_parities": parities(&s0)?,
        "final_wire_parities": parities(fin)?,
        "symbolic_action": word_action(&word, wires)?.to_string(),
    });
    Ok(Outcome {
        summary: summary.finish(),
        tables: vec![table],
    })
}

fn oracle_of(config: &RunConfig) -> Result<OracleId> {
    config
        .oracle
        .ok_or_else(|| anyhow!("deutsch-jozsa needs an oracle"))
}

fn braid_label((i, j): (usize, usize)) -> String {
    format!("U{i}{j}")
}

fn run_dj(config: &RunConfig) -> Result<Outcome> {
    let oracle = oracle_of(config)?;
    let sequence = dj_braid_sequence(oracle);
    let fock = run_deutsch_jozsa(oracle)?;
    let fock_signs: Vec<i8> = fock
        .wire_parities
        .iter()
        .map(|&p| p.round() as i8)
        .collect();
    let mut summary = Summary::new(config);
    let expected = oracle.expected_outcome();
    let constant = oracle.is_constant();
    match config.mode.unwrap_or(DjMode::Fock) {
        DjMode::Fock => {
            let reg = dj_register()?;
            let basis = reg.basis()?;
            let parity = total_parity_operator(reg.modes())?;
            let mut header = vec!["step".to_string(), "braid".to_string()];
            header.extend(QUBIT_STATES.iter().map(|s| format!("p{s}")));
            header.extend((1..=3).map(|w| format!("parity_w{w}")));
            header.push("total_parity".into());
            let mut table = Table::new("register.csv", header);
            let mut state = basis[0].clone();
            let mut parity_drift = 0.0f64;
            let mut leakage = 0.0f64;
            for (k, label) in std::iter::once("start".to_string())
                .chain(sequence.iter().map(|&p| braid_label(p)))
                .enumerate()
            {
                if k > 0 {
                    let (i, j) = sequence[k - 1];
                    state = state.evolved(&reg.braid(i, j)?);
                }
                let probs: Vec<f64> = basis.iter().map(|b| b.inner(&state).norm_sqr()).collect();
                leakage = leakage.max((1.0 - probs.iter().sum::<f64>()).abs());
                let total = state.expectation(&parity).re;
                parity_drift = parity_drift.max((total + 1.0).abs());
                let mut row = vec![k.to_string(), label];
                row.extend(probs.iter().map(|&p| num(p)));
                for w in 0..3 {
                    row.push(num(state.expectation(&reg.wire_parity_operator(w)?).re));
                }
                row.push(num(total));
                table.rows.push(row);
            }
            let want = if constant { 1.0 } else { 0.0 };
            let p00_error = (fock.p00() - want).abs();
            summary.endpoints.push(Endpoint {
                name: "p00".into(),
                initial: 1.0,
                value: fock.p00(),
                predicted: want,
                error: p00_error,
            });
            let phase = fock.amplitudes[expected];
            summary.checks = vec![
                Check::at_most("leakage", CheckKind::Consistency, leakage, DJ_TOL),
                Check::at_most(
                    "total_parity_drift",
                    CheckKind::Consistency,
                    parity_drift,
                    DJ_TOL,
                ),
                Check::at_most("p00_error", CheckKind::Prediction, p00_error, DJ_TOL),
                Check::at_most(
                    "outcome_error",
                    CheckKind::Prediction,
                    (1.0 - fock.probabilities[expected]).abs(),
                    DJ_TOL,
                ),
            ];
            summary.details = json!({
                "mode": "fock",
                "verdict": if fock.says_constant() { "constant" } else { "balanced" },
                "expected_verdict": if constant { "constant" } else { "balanced" },
                "outcome": QUBIT_STATES[fock.measured()],
                "expected_outcome": QUBIT_STATES[expected],
                "outcome_amplitude": [phase.re, phase.im],
                "probabilities": fock.probabilities,
                "wire_parities": fock.wire_parities,
                "braids": sequence.iter().map(|&p| braid_label(p)).collect::<Vec<_>>(),
            });
            Ok(Outcome {
                summary: summary.finish(),
                tables: vec![table],
            })
        }
        DjMode::Gaussian => {
            let (g, gammas, s0) = gaussian_register()?;
            let mut header = vec!["step".to_string(), "braid".to_string()];
            header.extend((1..=3).map(|w| format!("parity_w{w}")));
            header.extend(["purity_residual", "total_parity"].map(String::from));
            let mut table = Table::new("register.csv", header);
            let mut state = s0.clone();
            let mut purity = 0.0f64;
            let mut parity_drift = 0.0f64;
            let mut antisym = 0.0f64;
            let mut parities = [0.0; 3];
            for (k, label) in std::iter::once("start".to_string())
                .chain(sequence.iter().map(|&p| braid_label(p)))
                .enumerate()
            {
                if k > 0 {
                    let (i, j) = sequence[k - 1];
                    state = apply_exact_braid(&state, &gammas[i - 1], &gammas[j - 1])?;
                }
                purity = purity.max(state.purity_residual());
                antisym = antisym.max(state.antisymmetry_residual());
                parity_drift = parity_drift.max((state.total_parity() - s0.total_parity()).abs());
                let mut row = vec![k.to_string(), label];
                for (w, p) in parities.iter_mut().enumerate() {
                    *p = wire_parity(&state, &g, w)?;
                    row.push(num(*p));
                }
                row.extend([num(state.purity_residual()), num(state.total_parity())]);
                table.rows.push(row);
            }
            let signs: Vec<i8> = parities
                .iter()
                .map(|&p| {
                    if p > 0.5 {
                        1
                    } else if p < -0.5 {
                        -1
                    } else {
                        0
                    }
                })
                .collect();
            let decoded = PARITY_SIGNATURES.iter().position(|s| s[..] == signs[..]);
            let mismatch = parities
                .iter()
                .zip(&fock_signs)
                .map(|(p, &s)| (p - s as f64).abs())
                .fold(0.0, f64::max);
            let says_constant = decoded.map(|d| d == 0);
            summary.checks = vec![
                Check::at_most(
                    "purity_residual",
                    CheckKind::Consistency,
                    purity,
                    PURITY_LIMIT,
                ),
                Check::at_most(
                    "total_parity_drift",
                    CheckKind::Consistency,
                    parity_drift,
                    PARITY_DRIFT_LIMIT,
                ),
                Check::at_most(
                    "antisymmetry",
                    CheckKind::Consistency,
                    antisym,
                    ANTISYMMETRY_LIMIT,
                ),
                Check::at_most(
                    "parity_signature_vs_fock",
                    CheckKind::Prediction,
                    mismatch,
                    DJ_TOL,
                ),
            ];
            for (w, (&p, &s)) in parities.iter().zip(&fock_signs).enumerate() {
                summary.endpoints.push(Endpoint {
                    name: format!("parity_w{}", w + 1),
                    initial: wire_parity(&s0, &g, w)?,
                    value: p,
                    predicted: s as f64,
                    error: (p - s as f64).abs(),
                });
            }
            summary.details = json!({
                "mode": "gaussian",
                "verdict": says_constant.map(|c| if c { "constant" } else { "balanced" }),
                "expected_verdict": if constant { "constant" } else { "balanced" },
                "outcome": decoded.map(|d| QUBIT_STATES[d]),
                "expected_outcome": QUBIT_STATES[expected],
                "wire_parities": parities,
                "braids": sequence.iter().map(|&p| braid_label(p)).collect::<Vec<_>>(),
            });
            Ok(Outcome {
                summary: summary.finish(),
                tables: vec![table],
            })
        }
    }
}

fn run_spectrum(config: &RunConfig) -> Result<Outcome> {
    let params = config.wire_params()?;
    let wires = config.wire_count()?;
    let g = NetworkGeometry::new(wires, params.length)?;
    let error = ErrorModel::new(config.alpha)?;
    let direction = config.direction.unwrap_or(Direction::Forward);
    let n = g.dim() / 2;
    let mut header = vec![
        "step_label".to_string(),
        "phi".to_string(),
        "gap".to_string(),
        "zero_count".to_string(),
    ];
    header.extend((0..n).map(|k| format!("eps_{k}")));
    let mut table = Table::new("spectrum.csv", header);
    let mut min_gaps = Vec::new();
    for step in ProtocolStep::ALL {
        let mut min_gap = f64::INFINITY;
        for i in 0..config.phi_points {
            let phi = FRAC_PI_2 * i as f64 / (config.phi_points - 1) as f64;
            let h = step_hamiltonian(step, phi, &params, direction, &error, &g, 0)?;
            let spec = spectrum_with_tol(&h, DEFAULT_ZERO_TOL)?;
            if let Some(gap) = spec.gap {
                min_gap = min_gap.min(gap);
            }
            let mut row = vec![
                step.label().to_string(),
                num(phi),
                opt_num(spec.gap),
                spec.zero_count.to_string(),
            ];
            row.extend(spec.energies.iter().map(|&e| num(e)));
            table.rows.push(row);
        }
        min_gaps.push((step.label(), min_gap));
    }

    let h0 = build_network(&params, &g)?;
    let modes = zero_modes(&h0, &g, DEFAULT_ZERO_TOL)?;
    let mut profiles = Table::new(
        "zero_modes.csv",
        ["wire", "edge", "site", "weight"]
            .map(String::from)
            .to_vec(),
    );
    let mut end_weights = Vec::new();
    for m in &modes {
        let weights = site_weights(&m.mode);
        let range = g.wire_range(m.wire);
        let sites: Vec<f64> = weights[range.start / 2..range.end / 2].to_vec();
        let edge = match m.edge {
            Edge::Left => "L",
            Edge::Right => "R",
        };
        let end = match m.edge {
            Edge::Left => sites[0],
            Edge::Right => sites[sites.len() - 1],
        };
        end_weights.push(json!({"mode": format!("{edge}{}", m.wire + 1), "end_site_weight": end}));
        for (site, w) in sites.iter().enumerate() {
            profiles.rows.push(vec![
                (m.wire + 1).to_string(),
                edge.to_string(),
                (site + 1).to_string(),
                num(*w),
            ]);
        }
    }
    let continuity = check_step_continuity(&params, &error, wires)?;
    let overall = min_gaps.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    if !overall.is_finite() {
        bail!("no gapped point found along the protocol");
    }
    let mut summary = Summary::new(config);
    summary.checks = vec![
        Check::at_most(
            "continuity",
            CheckKind::Consistency,
            continuity.max_deviation(),
            CONTINUITY_TOL,
        ),
        Check::at_least("min_gap", CheckKind::Prediction, overall, 1e-6),
        Check::at_least(
            "zero_mode_count",
            CheckKind::Prediction,
            modes.len() as f64,
            2.0 * wires as f64,
        ),
    ];
    summary.details = json!({
        "wires": wires,
        "min_gap_per_step": min_gaps.iter().map(|(s, g)| json!({"step": s, "min_gap": g})).collect::<Vec<_>>(),
        "zero_modes": end_weights,
    });
    Ok(Outcome {
        summary: summary.finish(),
        tables: vec![table, profiles],
    })
}
