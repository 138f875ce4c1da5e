//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test --release --test acceptance`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qbm_core::cli;
use qbm_core::discrete_bath::DiscreteBath;
use qbm_core::fluctuations::{
    equilibrium_moments, gamma_for_ground_energy, gamma_for_occupation, matsubara_position_variance, mean_energy,
    mean_occupation, position_variance, recommended_matsubara_terms,
};
use qbm_core::landauer::{landauer_ratio, DEFAULT_DELTA};
use qbm_core::numerics::hermite_wavefunctions;
use qbm_core::thermo::{
    entropy, entropy_comparison, free_energy, free_energy_integral, quasi_static_variation, VariedParameter,
};
use qbm_core::{BathParams, GaussianState, QuadratureSpec};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn params(gamma: f64, cutoff: f64) -> Result<BathParams, String> {
    BathParams::natural(gamma, cutoff).map_err(|e| e.to_string())
}

macro_rules! ok {
    ($e:expr) => {
        $e.map_err(|e| e.to_string())?
    };
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn ground_energy_gamma() -> Result<f64, String> {
    Ok(ok!(gamma_for_ground_energy(1.0, &params(1.0, 10.0)?, &q())))
}

fn c1_ground_energy() -> Check {
    let start = Instant::now();
    let g = ground_energy_gamma()?;
    let took = start.elapsed();
    ensure((2.3..=2.6).contains(&g), || format!("gamma = {g}"))?;
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("gamma = {g:.6}"))
}

fn c2_entropy_ordering() -> Check {
    let p = params(ground_energy_gamma()?, 10.0)?;
    let n = 50;
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let t = 1e-3 + (2.0 - 1e-3) * i as f64 / (n - 1) as f64;
        let c = ok!(entropy_comparison(t, &p, &q()));
        ensure(c.s_von_neumann >= c.s_thermo, || format!("T = {t}: S_vN = {} < S = {}", c.s_von_neumann, c.s_thermo))?;
        worst = worst.min(c.mutual_information);
    }
    let low = ok!(entropy_comparison(1e-3, &p, &q()));
    ensure(low.s_von_neumann > 0.1 && low.s_thermo < 0.01, || {
        format!("T = 1e-3: S_vN = {}, S = {}", low.s_von_neumann, low.s_thermo)
    })?;
    Ok(format!("min I_sb = {worst:.3e}; T = 1e-3: S_vN = {:.4}, S = {:.2e}", low.s_von_neumann, low.s_thermo))
}

fn c3_third_law() -> Check {
    let p = params(1.0, 10.0)?;
    let mut ratios = Vec::new();
    for t in [1e-3, 2e-3, 4e-3] {
        let r = ok!(entropy(2.0 * t, &p, &q())) / ok!(entropy(t, &p, &q()));
        ensure((1.9..=2.1).contains(&r), || format!("T = {t}: ratio {r}"))?;
        ratios.push(format!("{r:.4}"));
    }
    Ok(format!("S(2T)/S(T) = {}", ratios.join(", ")))
}

fn c4_occupation_targets() -> Check {
    let template = params(1.0, 100.0)?;
    let g = ok!(gamma_for_occupation(1.0, 1e-3, &template, &q()));
    ensure((1.8..=2.2).contains(&g), || format!("tuned gamma = {g}"))?;
    let p = params(0.93, 100.0)?;
    let n = mean_occupation(&ok!(equilibrium_moments(0.0, &p, &q())), &p);
    ensure((n - 0.5).abs() <= 0.02, || format!("<n> = {n}"))?;
    Ok(format!("gamma(<n>=1) = {g:.6}, <n>(0.93) = {n:.5}"))
}

fn c5_route_equivalence() -> Check {
    let mut worst = [0.0f64; 3];
    for t in [0.1, 1.0, 5.0] {
        for g in [0.1, 1.0, 3.0] {
            for c in [2.0, 10.0, 50.0] {
                let p = params(g, c)?;
                let fa = ok!(free_energy(t, &p, &q()));
                let fb = ok!(free_energy_integral(t, &p, &q()));
                let e_f = (fa - fb).abs() / fa.abs().max(1.0);
                let h = 1e-4 * t;
                let fd = -(ok!(free_energy(t + h, &p, &q())) - ok!(free_energy(t - h, &p, &q()))) / (2.0 * h);
                let e_s = rel(fd, ok!(entropy(t, &p, &q())));
                let qa = ok!(position_variance(t, &p, &q()));
                let qb = ok!(matsubara_position_variance(t, &p, recommended_matsubara_terms(t, &p)));
                let e_q = rel(qb, qa);
                let at = format!("(T, gamma, cutoff) = ({t}, {g}, {c})");
                ensure(e_f <= 1e-6, || format!("{at}: F routes differ by {e_f:e}"))?;
                ensure(e_s <= 1e-5, || format!("{at}: S vs -dF/dT differ by {e_s:e}"))?;
                ensure(e_q <= 1e-6, || format!("{at}: q2 routes differ by {e_q:e}"))?;
                for (w, e) in worst.iter_mut().zip([e_f, e_s, e_q]) {
                    *w = w.max(e);
                }
            }
        }
    }
    Ok(format!("max rel: F {:.1e}, S {:.1e}, q2 {:.1e}", worst[0], worst[1], worst[2]))
}

fn c6_oracle_closure() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    for (g, c, t) in [(1.0, 10.0, 1.0), (2.43, 10.0, 0.5)] {
        let p = params(g, c)?;
        let bath = ok!(DiscreteBath::build(4000, &p));
        let exact = ok!(bath.exact_moments(t));
        let cont = ok!(equilibrium_moments(t, &p, &q()));
        let f = ok!(bath.exact_total_free_energy(t));
        let f_cont = ok!(free_energy(t, &p, &q()));
        let (eq, ep, ef) = (rel(exact.q2, cont.q2), rel(exact.p2, cont.p2), rel(f.difference, f_cont));
        let at = format!("(gamma, cutoff, T) = ({g}, {c}, {t})");
        ensure(eq <= 5e-3 && ep <= 5e-3, || format!("{at}: q2 {eq:e}, p2 {ep:e}"))?;
        ensure(ef <= 1e-2, || format!("{at}: F {ef:e}"))?;
        notes.push(format!("{at}: q2 {eq:.1e} p2 {ep:.1e} F {ef:.1e}"));
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(120), || format!("took {took:?}"))?;
    Ok(notes.join("; "))
}

/// `rho_nn` for `n <= n_max` by a trapezoid sum over the `(q, q')` box of
/// half-width `8 max(sqrt<q^2>, 1/b)`.
fn brute_force_diagonals(s: &GaussianState, b2: f64, n_max: usize) -> Vec<f64> {
    let b = b2.sqrt();
    let half = 8.0 * s.q2().sqrt().max(1.0 / b);
    let points = 801;
    let h = 2.0 * half / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|i| -half + i as f64 * h).collect();
    let psi: Vec<Vec<f64>> = grid.iter().map(|q| hermite_wavefunctions(n_max, b * q)).collect();
    let mut out = vec![0.0; n_max + 1];
    for (i, qi) in grid.iter().enumerate() {
        for (j, qj) in grid.iter().enumerate() {
            let k = s.kernel(*qi, *qj);
            for (n, o) in out.iter_mut().enumerate() {
                *o += psi[i][n] * k * psi[j][n];
            }
        }
    }
    out.iter().map(|v| v * b * h * h).collect()
}

fn c7_density_sum_rules() -> Check {
    let tuned = ok!(gamma_for_occupation(1.0, 1e-3, &params(1.0, 100.0)?, &q()));
    let states = [("occupation-1", tuned, 1e-3), ("half-occupation", 0.93, 0.0)];
    let mut notes = Vec::new();
    for (name, g, t) in states {
        let p = params(g, 100.0)?;
        let s = ok!(GaussianState::from_bath(t, &p, &q()));
        let n_max = ok!(s.auto_n_max());
        let block = ok!(s.number_basis_block(n_max));
        let trace = block.trace();
        let dpur = (block.purity_sum() - s.purity()).abs();
        ensure(trace >= 1.0 - 1e-8, || format!("{name}: trace {trace}"))?;
        ensure(dpur <= 1e-4, || format!("{name}: purity sum off by {dpur:e}"))?;
        let closed = ok!(s.number_basis_diagonals(10));
        let brute = brute_force_diagonals(&s, p.m * p.omega0, 10);
        let mut worst = 0.0f64;
        for n in 0..=10 {
            let e = (closed[n] - brute[n]).abs();
            ensure(e <= 1e-8, || format!("{name}: rho_{n}{n} closed {} vs quadrature {}", closed[n], brute[n]))?;
            ensure((closed[n] - block.get(n, n)).abs() <= 1e-8, || format!("{name}: block rho_{n}{n}"))?;
            worst = worst.max(e);
        }
        notes
            .push(format!("{name}: n_max {n_max}, 1-trace {:.1e}, |sum-mu| {dpur:.1e}, quad {worst:.1e}", 1.0 - trace));
    }
    Ok(notes.join("; "))
}

fn c8_bounds_sweep() -> Check {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(["qbm", "state-bounds", "--samples", "1000", "--seed", "42"], &mut out, &mut err);
    ensure(code == 0, || format!("exit {code}: {}", String::from_utf8_lossy(&err)))?;
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().ok_or("no header")?.split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).ok_or(format!("missing column {name}"));
    let (iq, ip, imu, imean, ivar) = (col("q2")?, col("p2")?, col("mu")?, col("n_mean")?, col("n_var")?);
    let mut count = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect();
        let (q2, p2, mu, n, var) = (v[iq], v[ip], v[imu], v[imean], v[ivar]);
        let band = n * (n + 1.0);
        let fine = mu <= 1.0 && q2 * p2 >= 0.25 && var >= band - 1e-6 && var <= 2.0 * band + 1e-6;
        ensure(fine, || format!("row {count} violates a bound: {line}"))?;
        count += 1;
    }
    ensure(count == 1000, || format!("{count} rows"))?;
    Ok(format!("{count} states within bounds"))
}

fn c9_heat_bookkeeping() -> Check {
    let p = params(1.0, 10.0)?;
    let r = ok!(quasi_static_variation(1.0, &p, VariedParameter::Omega0, 1e-4, &q()));
    let e1 = rel(r.d_free_energy, r.work_system);
    let e3 = rel(r.heat_system + r.d_interaction_energy, r.heat);
    ensure(e1 <= 1e-5, || format!("dF vs dW_s: {e1:e}"))?;
    ensure(e3 <= 1e-5, || format!("T dS vs dQ_s + dU_int: {e3:e}"))?;
    let cold = ok!(quasi_static_variation(1e-4, &p, VariedParameter::Omega0, 1e-4, &q()));
    let e2 = rel(cold.heat_system, -cold.d_interaction_energy);
    ensure(e2 <= 1e-2, || format!("T = 1e-4: dQ_s vs -dU_int {e2:e}"))?;
    Ok(format!("dF/dW_s {e1:.1e}, T=1e-4 {e2:.1e}, TdS {e3:.1e}"))
}

fn c10_landauer() -> Check {
    let ratio = |t: f64, g: f64, c: f64| -> Result<f64, String> {
        let p = params(g, c)?;
        Ok(ok!(landauer_ratio(t, &p, DEFAULT_DELTA, &q())).ratio)
    };
    let mut worst_below = 0.0f64;
    for g in [0.1, 0.5] {
        for i in 1..=10 {
            let t = 0.01 * i as f64;
            let r = ratio(t, g, 10.0)? / (t * std::f64::consts::LN_2);
            ensure(r < 1.0, || format!("gamma = {g}, T = {t}: ratio/bound {r}"))?;
            worst_below = worst_below.max(r);
        }
    }
    let weak = ratio(1.0, 1e-5, 10.0)? / std::f64::consts::LN_2;
    ensure((weak - 1.0).abs() <= 1e-3, || format!("weak coupling ratio/bound {weak}"))?;
    let onset: Vec<f64> = [0.01, 0.015, 0.02, 0.025, 0.03]
        .iter()
        .map(|t| ratio(*t, 0.5, 100.0).map(|r| r / (t * t)))
        .collect::<Result<_, _>>()?;
    let max = onset.iter().cloned().fold(f64::MIN, f64::max);
    let min = onset.iter().cloned().fold(f64::MAX, f64::min);
    ensure(max / min <= 1.2, || format!("ratio/T^2 spread {onset:?}"))?;
    Ok(format!("max ratio/bound for T <= 0.1: {worst_below:.3}; weak {weak:.6}; onset spread {:.3}", max / min))
}

fn c11_second_law() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let g: f64 = rng.gen_range(0.01..3.0);
        let c: f64 = rng.gen_range(2.0..200.0);
        let p = params(g, c)?;
        let f0 = ok!(free_energy(0.0, &p, &q()));
        let h0 = ok!(mean_energy(0.0, &p, &q()));
        ensure(f0 >= h0, || format!("(gamma, cutoff) = ({g}, {c}): F(0) = {f0} < <H> = {h0}"))?;
        worst = worst.min(f0 - h0);
    }
    Ok(format!("min F(0) - <H>_0 = {worst:.3e}"))
}

fn main() {
    let checks: [Criterion; 11] = [
        ("ground-state energetics", c1_ground_energy),
        ("entropy ordering", c2_entropy_ordering),
        ("third law linearity", c3_third_law),
        ("occupation targets", c4_occupation_targets),
        ("route equivalence", c5_route_equivalence),
        ("oracle closure", c6_oracle_closure),
        ("density-matrix sum rules", c7_density_sum_rules),
        ("bounds sweep", c8_bounds_sweep),
        ("heat bookkeeping", c9_heat_bookkeeping),
        ("landauer", c10_landauer),
        ("second-law consistency", c11_second_law),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2} s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
