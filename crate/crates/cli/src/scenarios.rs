use std::f64::consts::PI;

use entdiss::evolution::{
    propagate_expm, steady_state, steady_state_on_support, unitary_evolve, TimeGrid, Trajectory,
};
use entdiss::feedback::{
    concurrence_sweep_detuned, steady_state_closed_form, wm_full_generator, wm_subspace_generator,
    FeedbackParams,
};
use entdiss::generators::{
    assemble_liouvillian, build_hamiltonian, pure_dephasing_from_amplitudes, HamiltonianParams,
    LindbladAmplitudes,
};
use entdiss::quantum::{
    bloch_from_density, concurrence_2x2_embedded, purity, restrict_23, vectorize, BlochVector,
    DensityMatrix, LiouvilleVector, PureState, SUBSPACE_23,
};

use crate::config::{Scenario, ScenarioConfig};
use crate::csv::{format_number, Csv};
use crate::CliError;

/// Tolerance for validating every emitted state.
const STATE_TOL: f64 = 1e-8;

const GAMMA_CONVENTION: &str =
    "gamma is the coefficient of sqrt(gamma) Z; without feedback the 01/10 coherence decays at 2*gamma";

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let csv = match cfg.scenario {
        Scenario::Fig1 => fig1(cfg)?,
        Scenario::Fig2 => fig2(cfg)?,
        Scenario::FigNogo => fig_nogo(cfg)?,
        Scenario::Fig4 => fig4(cfg)?,
        Scenario::Evolve => evolve(cfg)?,
        Scenario::Steady => steady(cfg)?,
        Scenario::Sweep => sweep(cfg)?,
    };
    Ok(csv.into_string())
}

fn grid(cfg: &ScenarioConfig, t_max: f64, steps: usize) -> Result<TimeGrid, CliError> {
    Ok(TimeGrid::from_steps(
        cfg.t_max.unwrap_or(t_max),
        cfg.steps.unwrap_or(steps),
    )?)
}

fn hamiltonian(cfg: &ScenarioConfig, y: f64) -> HamiltonianParams {
    HamiltonianParams::new(cfg.a, cfg.b, cfg.c.unwrap_or(y / 2.0))
}

fn describe(h: &HamiltonianParams) -> String {
    format!(
        "H = a Z1 + b Z2 + c (XX + YY + ZZ), a = {}, b = {}, c = {}",
        format_number(h.a),
        format_number(h.b),
        format_number(h.c)
    )
}

fn describe_feedback(p: &FeedbackParams) -> String {
    format!(
        "m = {}, f = {}, mu = {}, gamma = {}, y = {}",
        format_number(p.m),
        format_number(p.f),
        format_number(p.mu),
        format_number(p.gamma),
        format_number(p.y)
    )
}

fn bell() -> LiouvilleVector {
    vectorize(&DensityMatrix::from_pure(&PureState::bell()))
}

fn checked(traj: &Trajectory<DensityMatrix>) -> Result<(), CliError> {
    for rho in &traj.states {
        rho.validate_with(STATE_TOL)?;
    }
    Ok(())
}

fn subspace_bloch(rho: &DensityMatrix) -> Result<BlochVector, CliError> {
    Ok(bloch_from_density(&restrict_23(rho)?)?)
}

fn series<'a>(traj: &'a Trajectory<DensityMatrix>, name: &str) -> &'a [f64] {
    traj.observable(name)
        .expect("two-qubit observables are always present")
}

fn fig1(cfg: &ScenarioConfig) -> Result<Csv, CliError> {
    let h = hamiltonian(cfg, cfg.y.unwrap_or(1.0));
    let traj = unitary_evolve(
        &build_hamiltonian(&h),
        &PureState::basis(4, 1),
        &grid(cfg, PI, 200)?,
        cfg.sign,
    )?;
    for n in traj.observable("norm").expect("always recorded") {
        if (n - 1.0).abs() > STATE_TOL {
            return Err(entdiss::Error::InvalidState(format!("state norm drifted to {n}")).into());
        }
    }
    let sign = if cfg.sign.as_f64() > 0.0 { "+" } else { "-" };
    let mut csv = Csv::new(
        &[
            describe(&h),
            format!("initial state |01>, propagator exp({sign}i t H)"),
        ],
        &["t", "concurrence"],
    );
    let c = traj.observable("concurrence").expect("two-qubit run");
    for (t, c) in traj.times.iter().zip(c) {
        csv.row(&[*t, *c]);
    }
    Ok(csv)
}

fn fig2(cfg: &ScenarioConfig) -> Result<Csv, CliError> {
    let g = cfg.gamma.sqrt();
    let (_, dephasing) =
        pure_dephasing_from_amplitudes(&LindbladAmplitudes::from_real(&[0.0, g, g, 0.0]));
    let h = hamiltonian(cfg, cfg.y.unwrap_or(0.0));
    let l = assemble_liouvillian(&build_hamiltonian(&h), &[dephasing])?;
    let traj = propagate_expm(&l, &bell(), &grid(cfg, 5.0, 100)?)?;
    checked(&traj)?;
    let mut csv = Csv::new(
        &[
            format!(
                "Gamma_23 = gamma = {} from Lindblad operators sqrt(gamma) |01><01| and sqrt(gamma) |10><10|",
                format_number(cfg.gamma)
            ),
            describe(&h),
            "initial state (|01> + |10>)/sqrt(2)".into(),
        ],
        &["t", "concurrence"],
    );
    for (t, c) in traj.times.iter().zip(series(&traj, "concurrence")) {
        csv.row(&[*t, *c]);
    }
    Ok(csv)
}

fn fig_nogo(cfg: &ScenarioConfig) -> Result<Csv, CliError> {
    let ys = cfg.y.map_or_else(|| vec![0.5, 1.0, 5.0], |y| vec![y]);
    let grid = grid(cfg, 20.0, 200)?;
    let mut csv = Csv::new(
        &[
            GAMMA_CONVENTION.into(),
            format!(
                "m = {}, f = {}, mu = {}, gamma = {}",
                format_number(cfg.m),
                format_number(cfg.f),
                format_number(cfg.mu),
                format_number(cfg.gamma)
            ),
            "initial state (|01> + |10>)/sqrt(2)".into(),
        ],
        &["y", "t", "concurrence", "bloch_norm"],
    );
    for y in ys {
        let p = FeedbackParams::new(cfg.m, cfg.f, cfg.mu, cfg.gamma, y)?;
        let traj = propagate_expm(&wm_full_generator(&p), &bell(), &grid)?;
        checked(&traj)?;
        for ((t, c), rho) in traj
            .times
            .iter()
            .zip(series(&traj, "concurrence"))
            .zip(&traj.states)
        {
            csv.row(&[y, *t, *c, subspace_bloch(rho)?.norm()]);
        }
    }
    Ok(csv)
}

fn require_zero_y(cfg: &ScenarioConfig) -> Result<(), CliError> {
    match cfg.y {
        Some(y) if y != 0.0 => Err(CliError::Config(format!(
            "{} uses the closed form, which needs y = 0 (got {y}); use sweep instead",
            cfg.scenario
        ))),
        _ => Ok(()),
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo * ratio.powf(k as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

fn fig4(cfg: &ScenarioConfig) -> Result<Csv, CliError> {
    require_zero_y(cfg)?;
    const LOWER: f64 = 0.1;
    if cfg.m_max <= LOWER || cfg.f_max <= LOWER {
        return Err(CliError::Config(format!(
            "m_max and f_max must exceed the grid origin {LOWER}"
        )));
    }
    if cfg.gamma <= 0.0 {
        return Err(CliError::Config("fig4 needs gamma > 0".into()));
    }
    let n = cfg.points.unwrap_or(81);
    let sweep = concurrence_sweep_detuned(
        &log_grid(LOWER, cfg.m_max, n),
        &log_grid(LOWER, cfg.f_max, n),
        cfg.gamma,
        cfg.mu,
    )?;
    let mut csv = Csv::new(
        &[
            GAMMA_CONVENTION.into(),
            format!(
                "gamma = {}, mu = {}, y = 0",
                format_number(cfg.gamma),
                format_number(cfg.mu)
            ),
        ],
        &["m", "f", "C_ss", "log10_one_minus_C"],
    );
    for (m, f, c, _) in sweep.cells() {
        csv.row(&[m, f, c, (1.0 - c).log10()]);
    }
    Ok(csv)
}

fn feedback_params(cfg: &ScenarioConfig) -> Result<FeedbackParams, CliError> {
    Ok(FeedbackParams::new(
        cfg.m,
        cfg.f,
        cfg.mu,
        cfg.gamma,
        cfg.y.unwrap_or(0.0),
    )?)
}

fn evolve(cfg: &ScenarioConfig) -> Result<Csv, CliError> {
    let p = feedback_params(cfg)?;
    let traj = propagate_expm(&wm_full_generator(&p), &bell(), &grid(cfg, 10.0, 200)?)?;
    checked(&traj)?;
    let mut csv = Csv::new(
        &[
            GAMMA_CONVENTION.into(),
            describe_feedback(&p),
            "initial state (|01> + |10>)/sqrt(2); s is the Bloch vector on the 01/10 subspace"
                .into(),
        ],
        &["t", "concurrence", "purity", "sx", "sy", "sz"],
    );
    let (c, pur) = (series(&traj, "concurrence"), series(&traj, "purity"));
    for (k, rho) in traj.states.iter().enumerate() {
        let s = subspace_bloch(rho)?;
        csv.row(&[traj.times[k], c[k], pur[k], s.x(), s.y(), s.z()]);
    }
    Ok(csv)
}

fn steady_row(csv: &mut Csv, method: &str, rho2: &DensityMatrix) -> Result<(), CliError> {
    rho2.validate_with(STATE_TOL)?;
    let s = bloch_from_density(rho2)?;
    csv.labelled_row(
        Some(method),
        &[
            concurrence_2x2_embedded(rho2)?,
            purity(rho2),
            s.x(),
            s.y(),
            s.z(),
        ],
    );
    Ok(())
}

fn steady(cfg: &ScenarioConfig) -> Result<Csv, CliError> {
    let p = feedback_params(cfg)?;
    let mut csv = Csv::new(
        &[GAMMA_CONVENTION.into(), describe_feedback(&p)],
        &["method", "concurrence", "purity", "sx", "sy", "sz"],
    );
    if p.y == 0.0 {
        steady_row(&mut csv, "closed_form", &steady_state_closed_form(&p)?.rho)?;
    }
    steady_row(
        &mut csv,
        "subspace",
        &steady_state(&wm_subspace_generator(&p))?,
    )?;
    let full = steady_state_on_support(&wm_full_generator(&p), &SUBSPACE_23)?;
    steady_row(&mut csv, "full", &restrict_23(&full)?)?;
    Ok(csv)
}

fn sweep(cfg: &ScenarioConfig) -> Result<Csv, CliError> {
    let n = cfg.points.unwrap_or(21);
    let axis = |max: f64| -> Vec<f64> { (1..=n).map(|k| max * k as f64 / n as f64).collect() };
    let (ms, fs) = (axis(cfg.m_max), axis(cfg.f_max));
    let y = cfg.y.unwrap_or(0.0);
    let mut csv = Csv::new(
        &[
            GAMMA_CONVENTION.into(),
            format!(
                "gamma = {}, mu = {}, y = {}; numerical steady state on the 01/10 subspace",
                format_number(cfg.gamma),
                format_number(cfg.mu),
                format_number(y)
            ),
        ],
        &["m", "f", "C_ss", "P_ss"],
    );
    for &m in &ms {
        for &f in &fs {
            let rho = steady_state(&wm_subspace_generator(&FeedbackParams::new(
                m, f, cfg.mu, cfg.gamma, y,
            )?))?;
            rho.validate_with(STATE_TOL)?;
            csv.row(&[m, f, concurrence_2x2_embedded(&rho)?, purity(&rho)]);
        }
    }
    Ok(csv)
}
