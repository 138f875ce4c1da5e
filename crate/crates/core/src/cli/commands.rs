//! The five subcommands. Each returns a [`Table`] in deterministic grid
//! order; grid points are evaluated in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bath::BathParams;
use crate::cli::output::{format_g17, Cell, Table};
use crate::cli::spec::Settings;
use crate::cli::{CliError, Outcome};
use crate::discrete_bath::DiscreteBath;
use crate::fluctuations::{equilibrium_moments, gamma_for_ground_energy, gamma_for_occupation};
use crate::gaussian_state::{GaussianState, MAX_BLOCK_N, TRUNCATION_WARNING};
use crate::landauer::{landauer_sweep, DEFAULT_DELTA};
use crate::numerics::QuadratureSpec;
use crate::oscillator::{entropy_kernel, free_energy_kernel};
use crate::thermo::{entropy_comparison, free_energy};

/// Log-uniform sampling box for `state-bounds`, in units of omega0.
pub const BOUNDS_GAMMA: (f64, f64) = (0.01, 3.0);
pub const BOUNDS_CUTOFF: (f64, f64) = (2.0, 200.0);
pub const BOUNDS_TEMPERATURE: (f64, f64) = (1e-3, 10.0);

struct Oscillator {
    m: f64,
    omega0: f64,
}

impl Oscillator {
    fn load(s: &Settings) -> Result<Self, CliError> {
        Ok(Oscillator { m: single(s, "mass", 1.0)?, omega0: single(s, "omega0", 1.0)? })
    }

    fn params(&self, gamma: f64, cutoff: f64) -> Result<BathParams, CliError> {
        BathParams::new(self.m, self.omega0, gamma, cutoff).map_err(|e| CliError::from_model("", e))
    }

    fn header(&self, t: &mut Table) {
        t.meta("hbar", 1);
        t.meta("k", 1);
        t.meta("m", format_g17(self.m));
        t.meta("omega0", format_g17(self.omega0));
    }
}

fn single(s: &Settings, key: &str, default: f64) -> Result<f64, CliError> {
    let v = s.list(key, &default.to_string())?;
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::parameter(format!("{key}: expected a single value"))),
    }
}

fn single_temperature(s: &Settings, default: &str) -> Result<f64, CliError> {
    match s.temperatures(default)?.as_slice() {
        [t] => Ok(*t),
        _ => Err(CliError::parameter("temp: expected a single temperature")),
    }
}

fn point(p: &BathParams, t: f64) -> String {
    format!("gamma = {}, cutoff = {}, T = {}", p.gamma, p.cutoff, t)
}

pub fn entropy_sweep(s: &Settings, quad: &QuadratureSpec) -> Result<Outcome, CliError> {
    let osc = Oscillator::load(s)?;
    let cutoffs = s.list("cutoff", "10")?;
    let temps = s.temperatures("0.001:2:50")?;
    let mut table = Table::new("entropy-sweep", &["gamma", "cutoff", "T", "S_thermo", "S_vN", "s_omega0", "I_sb"]);
    osc.header(&mut table);
    let mut baths = Vec::new();
    if let Some(target) = s.optional_number("tune-energy")? {
        table.meta("tune-energy", format_g17(target));
        for c in &cutoffs {
            let template = osc.params(0.0, *c)?;
            let g = gamma_for_ground_energy(target, &template, quad)
                .map_err(|e| CliError::from_model(&format!("tuning gamma at cutoff = {c}"), e))?;
            baths.push(osc.params(g, *c)?);
        }
    } else {
        for g in s.list("gamma", "1")? {
            for c in &cutoffs {
                baths.push(osc.params(g, *c)?);
            }
        }
    }
    let grid: Vec<(BathParams, f64)> = baths.iter().flat_map(|p| temps.iter().map(move |t| (*p, *t))).collect();
    let results: Vec<_> = grid
        .par_iter()
        .map(|(p, t)| entropy_comparison(*t, p, quad).map_err(|e| CliError::from_model(&point(p, *t), e)))
        .collect();
    for ((p, t), r) in grid.iter().zip(results) {
        let c = r?;
        table.push(vec![
            p.gamma.into(),
            p.cutoff.into(),
            (*t).into(),
            c.s_thermo.into(),
            c.s_von_neumann.into(),
            entropy_kernel(p.omega0, *t).into(),
            c.mutual_information.into(),
        ]);
    }
    Ok(Outcome::ok(table))
}

pub fn density_matrix(s: &Settings, quad: &QuadratureSpec) -> Result<Outcome, CliError> {
    let osc = Oscillator::load(s)?;
    let kind = s.raw("state").map(str::trim).unwrap_or("qbm");
    let diagonal = s.flag("diagonal")?;
    let columns: &[&str] = if diagonal {
        &["n", "rho_nn", "rho_nn_legendre", "p_n", "thermal_same_n", "squeezed_same_n"]
    } else {
        &["n", "m", "rho_nm", "rho_nn_closed"]
    };
    let mut table = Table::new("density-matrix", columns);
    osc.header(&mut table);
    table.meta("state", kind);
    let model = |e| CliError::from_model("", e);
    let state = match kind {
        "qbm" => {
            let cutoff = single(s, "cutoff", 10.0)?;
            let t = single_temperature(s, "0.001")?;
            let gamma = match s.optional_number("tune-occupation")? {
                Some(target) => {
                    table.meta("tune-occupation", format_g17(target));
                    gamma_for_occupation(target, t, &osc.params(0.0, cutoff)?, quad)
                        .map_err(|e| CliError::from_model("tuning gamma", e))?
                }
                None => single(s, "gamma", 1.0)?,
            };
            let p = osc.params(gamma, cutoff)?;
            table.meta("gamma", format_g17(gamma));
            table.meta("cutoff", format_g17(cutoff));
            table.meta("T", format_g17(t));
            GaussianState::from_bath(t, &p, quad).map_err(|e| CliError::from_model(&point(&p, t), e))?
        }
        "thermal" | "squeezed" => {
            let n_bar = single(s, "n-bar", 1.0)?;
            table.meta("n-bar", format_g17(n_bar));
            let p = osc.params(0.0, 10.0 * osc.omega0)?;
            if kind == "thermal" {
                GaussianState::thermal_state(n_bar, &p).map_err(model)?
            } else {
                GaussianState::squeezed_vacuum(n_bar, &p).map_err(model)?
            }
        }
        other => return Err(CliError::parameter(format!("state: `{other}` is not one of qbm, thermal, squeezed"))),
    };
    let n_max = match s.optional_count("n-max")? {
        Some(n) => n,
        None => state.auto_n_max().map_err(model)?,
    };
    table.meta("n-max", n_max);
    let mut warnings = Vec::new();
    let diag = state.number_basis_diagonals(n_max).map_err(model)?;
    if diagonal {
        let eigen = state.eigenvalues(n_max).map_err(model)?;
        let b = osc.params(0.0, 10.0 * osc.omega0)?;
        let n_mean = state.mean_occupation();
        let thermal =
            GaussianState::thermal_state(n_mean, &b).and_then(|g| g.number_basis_diagonals(n_max)).map_err(model)?;
        let squeezed =
            GaussianState::squeezed_vacuum(n_mean, &b).and_then(|g| g.number_basis_diagonals(n_max)).map_err(model)?;
        for n in 0..=n_max {
            let legendre =
                if n <= 400 { Cell::Num(state.number_basis_diagonal_legendre(n).map_err(model)?) } else { Cell::Empty };
            table.push(vec![
                n.into(),
                diag[n].into(),
                legendre,
                eigen.p_n[n].into(),
                thermal[n].into(),
                squeezed[n].into(),
            ]);
        }
        let deficit = 1.0 - diag.iter().sum::<f64>();
        if deficit > TRUNCATION_WARNING {
            warnings.push(format!("populations truncated at n_max = {n_max}: trace deficit {deficit:.3e}"));
        }
        table.summary.push(("trace".into(), (1.0 - deficit).into()));
    } else {
        if n_max > MAX_BLOCK_N {
            return Err(CliError::parameter(format!(
                "n-max {n_max} exceeds {MAX_BLOCK_N} for the full block; use --diagonal"
            )));
        }
        let block = state.number_basis_block(n_max).map_err(model)?;
        for (n, rho_nn) in diag.iter().enumerate().take(n_max + 1) {
            for m in 0..=n_max {
                let closed = if n == m { Cell::Num(*rho_nn) } else { Cell::Empty };
                table.push(vec![n.into(), m.into(), block.get(n, m).into(), closed]);
            }
        }
        if block.trace_deficit > TRUNCATION_WARNING {
            let hint = block.suggested_n_max.map(|n| format!("; suggested n-max = {n}")).unwrap_or_default();
            warnings.push(format!(
                "density matrix truncated at n_max = {n_max}: trace deficit {:.3e}{hint}",
                block.trace_deficit
            ));
        }
        table.summary.push(("trace".into(), block.trace().into()));
        table.summary.push(("purity_sum".into(), block.purity_sum().into()));
    }
    table.summary.push(("purity".into(), state.purity().into()));
    table.summary.push(("mean_n".into(), state.mean_occupation().into()));
    table.summary.push(("var_n".into(), state.occupation_variance().into()));
    table.summary.push(("S_vN".into(), state.von_neumann_entropy().into()));
    Ok(Outcome { table, warnings, deferred: None })
}

fn log_uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    let u: f64 = rng.gen();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

pub fn state_bounds(s: &Settings, quad: &QuadratureSpec) -> Result<Outcome, CliError> {
    let osc = Oscillator::load(s)?;
    let samples = s.count("samples", 1000)?;
    if samples == 0 {
        return Err(CliError::parameter("samples: need at least one sample"));
    }
    let seed = match s.raw("seed") {
        None => 42,
        Some(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::parameter(format!("seed: `{v}` is not an unsigned integer")))?,
    };
    let mut table = Table::new(
        "state-bounds",
        &["gamma", "cutoff", "T", "q2", "p2", "dq2_norm", "dp2_norm", "mu", "n_mean", "n_var"],
    );
    osc.header(&mut table);
    table.meta("samples", samples);
    table.meta("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let g = log_uniform(&mut rng, BOUNDS_GAMMA) * osc.omega0;
        let c = log_uniform(&mut rng, BOUNDS_CUTOFF) * osc.omega0;
        let t = log_uniform(&mut rng, BOUNDS_TEMPERATURE) * osc.omega0;
        draws.push((osc.params(g, c)?, t));
    }
    let results: Vec<_> = draws
        .par_iter()
        .map(|(p, t)| equilibrium_moments(*t, p, quad).map_err(|e| CliError::from_model(&point(p, *t), e)))
        .collect();
    let mut violations = Vec::new();
    let b2 = osc.m * osc.omega0;
    for ((p, t), r) in draws.iter().zip(results) {
        let m = r?;
        let x = 2.0 * b2 * m.q2;
        let y = 2.0 * m.p2 / b2;
        let mu = 0.5 / (m.q2 * m.p2).sqrt();
        let n = 0.25 * (x + y) - 0.5;
        let var = (x * x + y * y - 2.0) / 8.0;
        let ok = mu <= 1.0 + 1e-12
            && m.q2 * m.p2 >= 0.25 - 1e-12
            && var >= n * (n + 1.0) - 1e-6
            && var <= 2.0 * n * (n + 1.0) + 1e-6;
        if !ok {
            violations.push(format!("{} (mu = {mu}, <n> = {n}, var = {var})", point(p, *t)));
        }
        table.push(vec![
            p.gamma.into(),
            p.cutoff.into(),
            (*t).into(),
            m.q2.into(),
            m.p2.into(),
            x.into(),
            y.into(),
            mu.into(),
            n.into(),
            var.into(),
        ]);
    }
    table.summary.push(("violations".into(), violations.len().into()));
    let deferred = (!violations.is_empty()).then(|| {
        CliError::constraint(format!("{} state(s) violate the bounds, first: {}", violations.len(), violations[0]))
    });
    Ok(Outcome { table, warnings: Vec::new(), deferred })
}

pub fn landauer(s: &Settings, quad: &QuadratureSpec) -> Result<Outcome, CliError> {
    let osc = Oscillator::load(s)?;
    let gammas = s.list("gamma", "0.1,0.5")?;
    let cutoffs = s.list("cutoff", "10")?;
    let temps = s.temperatures("0.01:1:100")?;
    let delta = s.number("delta", DEFAULT_DELTA)?;
    let mut table = Table::new("landauer", &["gamma", "cutoff", "T", "ratio", "kTln2", "ratio_over_bound"]);
    osc.header(&mut table);
    table.meta("delta", format_g17(delta));
    let mut warnings = Vec::new();
    let mut failed = 0;
    for g in &gammas {
        for c in &cutoffs {
            let p = osc.params(*g, *c)?;
            let sweep = landauer_sweep(&temps, &p, delta, quad).map_err(|e| CliError::from_model("", e))?;
            for (t, r) in temps.iter().zip(sweep) {
                match r {
                    Ok(pt) => table.push(vec![
                        p.gamma.into(),
                        p.cutoff.into(),
                        (*t).into(),
                        pt.ratio.into(),
                        pt.bound.into(),
                        pt.ratio_over_bound.into(),
                    ]),
                    Err(e) => {
                        failed += 1;
                        warnings.push(format!("{}: {e}", point(&p, *t)));
                    }
                }
            }
        }
    }
    let deferred = (failed > 0).then(|| CliError::numerical(format!("{failed} grid point(s) failed")));
    Ok(Outcome { table, warnings, deferred })
}

struct Check {
    name: &'static str,
    value: f64,
    reference: f64,
    tolerance: f64,
}

impl Check {
    fn rel_error(&self) -> f64 {
        (self.value - self.reference).abs() / self.reference.abs().max(f64::MIN_POSITIVE)
    }

    fn passed(&self) -> bool {
        self.rel_error() <= self.tolerance
    }
}

pub fn oracle(s: &Settings, quad: &QuadratureSpec) -> Result<Outcome, CliError> {
    let osc = Oscillator::load(s)?;
    let n = s.count("bath-size", 4000)?;
    let gamma = single(s, "gamma", 1.0)?;
    let cutoff = single(s, "cutoff", 10.0)?;
    let t = single_temperature(s, "1")?;
    let p = osc.params(gamma, cutoff)?;
    let at = point(&p, t);
    let model = |e| CliError::from_model(&at, e);
    let bath = DiscreteBath::build(n, &p).map_err(model)?;
    let modes = bath.normal_modes().map_err(model)?;
    let mut table = Table::new("oracle", &["check", "discrete", "reference", "rel_error", "tolerance", "pass"]);
    osc.header(&mut table);
    table.meta("gamma", format_g17(gamma));
    table.meta("cutoff", format_g17(cutoff));
    table.meta("T", format_g17(t));
    table.meta("bath-size", n);
    let mut checks = vec![
        Check { name: "mode_count", value: modes.len() as f64, reference: (n + 1) as f64, tolerance: 0.0 },
        Check {
            name: "trace_identity",
            value: modes.frequencies.iter().map(|w| w * w).sum(),
            reference: bath.omegas.iter().map(|w| w * w).sum::<f64>()
                + p.omega0 * p.omega0
                + 2.0 * bath.counter_term() / p.m,
            tolerance: 1e-10,
        },
    ];
    if n == 1 {
        let exact = bath.two_oscillator_frequencies().map_err(model)?;
        let dense = bath.normal_modes_dense().map_err(model)?;
        for (k, name) in [(0, "mode_0"), (1, "mode_1")] {
            checks.push(Check { name, value: modes.frequencies[k], reference: exact[k], tolerance: 1e-12 });
        }
        for (k, name) in [(0, "mode_0_dense"), (1, "mode_1_dense")] {
            checks.push(Check { name, value: dense.frequencies[k], reference: exact[k], tolerance: 1e-12 });
        }
    } else {
        let exact = bath.exact_moments(t).map_err(model)?;
        let cont = equilibrium_moments(t, &p, quad).map_err(model)?;
        checks.push(Check { name: "q2", value: exact.q2, reference: cont.q2, tolerance: 5e-3 });
        checks.push(Check { name: "p2", value: exact.p2, reference: cont.p2, tolerance: 5e-3 });
        if t > 0.0 {
            let f = bath.exact_total_free_energy(t).map_err(model)?;
            checks.push(Check {
                name: "F_tot_minus_F_b",
                value: f.difference,
                reference: free_energy(t, &p, quad).map_err(model)?,
                tolerance: 1e-2,
            });
        }
    }
    if gamma == 0.0 && t > 0.0 {
        let f = bath.exact_total_free_energy(t).map_err(model)?;
        checks.push(Check {
            name: "uncoupled_free_energy",
            value: f.difference,
            reference: free_energy_kernel(p.omega0, t),
            tolerance: 1e-12,
        });
    }
    let mut failed = Vec::new();
    for c in &checks {
        let pass = c.passed();
        if !pass {
            failed.push(c.name);
        }
        table.push(vec![
            c.name.into(),
            c.value.into(),
            c.reference.into(),
            c.rel_error().into(),
            c.tolerance.into(),
            if pass { "pass" } else { "FAIL" }.into(),
        ]);
    }
    let deferred =
        (!failed.is_empty()).then(|| CliError::constraint(format!("oracle comparison failed: {}", failed.join(", "))));
    Ok(Outcome { table, warnings: Vec::new(), deferred })
}
