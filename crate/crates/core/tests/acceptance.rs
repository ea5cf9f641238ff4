//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::hermitian_eigenvalues;
use cqed_vacua::asymptotics::{
    analytic_splitting_n2, beta_bounds, beta_exponent, chain_quadratic_form, minimize_pseudospin_config,
    subspace_overlap, vacuum_pair,
};
use cqed_vacua::basis::Sector;
use cqed_vacua::circuit::coupling_estimate;
use cqed_vacua::cli::fit_beta;
use cqed_vacua::disorder::{
    ensemble_splitting, fluctuations, protection_check, sample_realization, vacuum_cutoffs,
    DisorderEnsembleSpec, Engine, DEFAULT_DIMENSION_BUDGET,
};
use cqed_vacua::eigen::{EigenOptions, HermitianOperator};
use cqed_vacua::fluxonium::{solve_levels, two_level_reduction, FluxoniumSpec};
use cqed_vacua::hopfield::{
    critical_coupling, dense_eigenvalues, determinant, numeric_determinant, HopfieldBlock,
};
use cqed_vacua::manybody::{
    choose_cutoffs, ground_splitting, lowest_spectrum, sector_ground_states, Hamiltonian, ManyBodySpec,
    SpectrumSector, DEFAULT_REFINE_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn within(budget: Duration, elapsed: Duration) -> bool {
    elapsed <= budget
}

/// Mode count used for chain checks: one mode for two atoms, all modes otherwise.
fn chain_modes(n: usize) -> usize {
    if n == 2 { 1 } else { n }
}

fn c1_critical_coupling() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let unstable = |w: f64, f: f64, o: f64| {
        dense_eigenvalues(&HopfieldBlock::new(w, f, o).unwrap())
            .unwrap()
            .iter()
            .any(|v| v.im.abs() > v.re.abs())
    };
    let (mut worst_boundary, mut worst_det) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (w, f): (f64, f64) = (rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0));
        let (mut lo, mut hi) = (0.0, (w * f).sqrt());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if unstable(w, f, mid) { hi = mid } else { lo = mid }
        }
        let omega_c = critical_coupling(w, f).unwrap();
        worst_boundary = worst_boundary.max((0.5 * (lo + hi) - omega_c).abs());
        let b = HopfieldBlock::new(w, f, rng.gen_range(0.0..2.0) * omega_c).unwrap();
        let (closed, numeric) = (determinant(&b), numeric_determinant(&b));
        worst_det = worst_det.max((closed - numeric).abs() / closed.abs().max((w * f).powi(2)));
    }
    let t = start.elapsed();
    verdict(
        worst_boundary < 1e-8 && worst_det < 1e-9 && within(Duration::from_secs(1), t),
        format!("max |Omega_bisect - Omega_c| = {worst_boundary:.2e}, max det rel err = {worst_det:.2e}, {t:.2?}"),
    )
}

fn c2_fluxonium() -> Verdict {
    let start = Instant::now();
    let inset = solve_levels(&FluxoniumSpec::new(1.0, 1.0 / 3.0, 1.0 / 20.0), 4).unwrap();
    let red = two_level_reduction(&inset).unwrap();
    let phi_err = (inset.phi01 - PI).abs() / PI;
    let (ec, el) = (1.0 / 3.0, 1.0 / 20.0);
    let osc = solve_levels(&FluxoniumSpec::new(0.0, ec, el), 3).unwrap();
    let w = (8.0 * ec * el).sqrt();
    let zpf = (2.0 * ec / el).powf(0.25);
    let (ew, ez) = ((osc.omega_f - w).abs() / w, (osc.phi01 - zpf).abs() / zpf);
    let t = start.elapsed();
    verdict(
        phi_err < 0.1 && !red.weakly_anharmonic && ew < 1e-6 && ez < 1e-6 && within(Duration::from_secs(5), t),
        format!(
            "phi01 = {:.4} ({:.1}% from pi), anharmonicity {:.2}; oscillator rel err omega {ew:.1e}, phi01 {ez:.1e}, {t:.2?}",
            inset.phi01,
            100.0 * phi_err,
            red.anharmonicity
        ),
    )
}

fn c3_coupling_estimate() -> Verdict {
    let v = coupling_estimate(1.0, 1, 1.0, 0.25).unwrap();
    verdict((5.6..=5.8).contains(&v), format!("coupling_estimate(1, 1, 1, 0.25) = {v:.4}"))
}

fn c4_dense_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = EigenOptions { dense_threshold: 0, ..EigenOptions::default() };
    let (mut worst_iter, mut worst_union, mut specs) = (0.0f64, 0.0f64, Vec::new());
    while specs.len() < 6 {
        let n = rng.gen_range(2..=5);
        let nm = rng.gen_range(1..=n);
        let cutoffs: Vec<usize> = (0..nm).map(|_| rng.gen_range(1..=8)).collect();
        let dim = (1usize << n) * cutoffs.iter().map(|c| c + 1).product::<usize>();
        let range = if specs.len() % 2 == 0 { 256..=1024 } else { 1025..=2048 };
        if !range.contains(&dim) {
            continue;
        }
        let omega_f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let g = rng.gen_range(0.2..1.5);
        let spec = ManyBodySpec::chain_disordered(n, nm, g, &omega_f, 1.0, &cutoffs).unwrap();
        let mut union = Vec::new();
        for sector in [Sector::Even, Sector::Odd] {
            let dense = hermitian_eigenvalues(&Hamiltonian::new(&spec, Some(sector)).unwrap().to_dense());
            let which = if sector == Sector::Even { SpectrumSector::Even } else { SpectrumSector::Odd };
            let iter = lowest_spectrum(&spec, which, 6, &opts).unwrap().eigenvalues;
            for (a, b) in iter.iter().zip(&dense) {
                worst_iter = worst_iter.max((a - b).abs());
            }
            union.extend(dense);
        }
        union.sort_by(f64::total_cmp);
        let full = hermitian_eigenvalues(&Hamiltonian::new(&spec, None).unwrap().to_dense());
        for (a, b) in union.iter().zip(&full) {
            worst_union = worst_union.max((a - b).abs());
        }
        specs.push(format!("N{n}/Nm{nm}/d{dim}"));
    }
    let t = start.elapsed();
    verdict(
        worst_iter < 1e-9 && worst_union < 1e-9 && within(Duration::from_secs(60), t),
        format!(
            "{} specs [{}]: iterative vs dense {worst_iter:.1e}, sector union vs full {worst_union:.1e}, {t:.2?}",
            specs.len(),
            specs.join(" ")
        ),
    )
}

fn sweep_record(n: usize, nm: usize, g: f64, even_floor: usize) -> cqed_vacua::manybody::SplittingRecord {
    let cutoffs = choose_cutoffs(n, nm, g, 4.0, even_floor).unwrap();
    let spec = ManyBodySpec::chain(n, nm, g, 1.0, 1.0, &cutoffs).unwrap();
    ground_splitting(&spec, &EigenOptions::default(), DEFAULT_REFINE_TOL).unwrap()
}

fn c5_two_atom_splitting() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for g in [0.8, 1.0, 1.2, 1.5] {
        let rec = sweep_record(2, 1, g, 4);
        let formula = analytic_splitting_n2(1.0, 1.0, g).unwrap();
        let ratio = rec.delta / formula;
        ok &= (ratio - 1.0).abs() <= 0.1 && rec.converged;
        parts.push(format!("g={g}: {ratio:.3}"));
    }
    let t = start.elapsed();
    verdict(
        ok && within(Duration::from_secs(120), t),
        format!("delta/formula {}, {t:.2?}", parts.join(", ")),
    )
}

fn c6_beta_scaling() -> Verdict {
    let start = Instant::now();
    let mut ok = beta_exponent(2, 2).unwrap() == 8.0;
    let mut parts = vec![format!("beta_exponent(2,2) = {}", beta_exponent(2, 2).unwrap())];
    let windows: [(usize, Vec<f64>, usize); 2] = [
        (2, vec![1.2, 1.35, 1.5, 1.65, 1.8], 4),
        (3, vec![0.9, 1.0, 1.1, 1.2, 1.3, 1.4], 10),
    ];
    for (n, grid, even_floor) in windows {
        let nm = chain_modes(n);
        let records: Vec<_> = grid.iter().map(|&g| sweep_record(n, nm, g, even_floor)).collect();
        let (lo, hi) = beta_bounds(n);
        match fit_beta(&records) {
            Ok(fit) => {
                ok &= fit.beta > lo && fit.beta < hi;
                parts.push(format!(
                    "N={n}: beta = {:.3} in ({lo:.1}, {hi:.1}), {} pts, {} excluded",
                    fit.beta, fit.points, fit.excluded
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("N={n}: {e}"));
            }
        }
    }
    let t = start.elapsed();
    verdict(ok && within(Duration::from_secs(900), t), format!("{}, {t:.2?}", parts.join("; ")))
}

fn c7_vacuum_overlap() -> Verdict {
    let start = Instant::now();
    let opts = EigenOptions::default();
    let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let mut fids: Vec<(f64, f64, usize)> = Vec::new();
    for &g in &grid {
        let cutoffs = choose_cutoffs(5, 3, g, 4.0, 4).unwrap();
        let spec = ManyBodySpec::chain(5, 3, g, 1.0, 1.0, &cutoffs).unwrap();
        let Ok(ground) = sector_ground_states(&spec, &opts) else { continue };
        let even = ground.even.embed(&spec.basis(Some(Sector::Even)).unwrap()).unwrap();
        let odd = ground.odd.embed(&spec.basis(Some(Sector::Odd)).unwrap()).unwrap();
        let (plus, minus) = vacuum_pair(&spec).unwrap();
        let ov = subspace_overlap([&even, &odd], [&plus, &minus]).unwrap();
        fids.push((g, ov.fidelity, spec.basis(None).unwrap().dim()));
    }
    let t = start.elapsed();
    let Some(&(g_top, f_top, dim)) = fids.last() else {
        return verdict(false, "no converged sweep point");
    };
    let top_half: Vec<f64> = fids.iter().filter(|(g, _, _)| *g > 0.5).map(|x| x.1).collect();
    let monotone = top_half.windows(2).all(|w| w[1] >= w[0]);
    let series: Vec<String> = fids.iter().map(|(g, f, _)| format!("{g:.1}:{f:.4}")).collect();
    verdict(
        f_top >= 0.98 && monotone && fids.len() == grid.len() && within(Duration::from_secs(1800), t),
        format!(
            "fidelity {f_top:.5} at g={g_top} (dim {dim}); monotone top half: {monotone}; [{}], {t:.2?}",
            series.join(" ")
        ),
    )
}

fn c8_ferromagnetic_minimizer() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    for n in 2..=8 {
        let min = minimize_pseudospin_config(&chain_quadratic_form(n, chain_modes(n)).unwrap()).unwrap();
        ok &= min.minimizers.len() == 2
            && min.minimizers.iter().all(|c| c.is_uniform())
            && min.minimizers[0] == min.minimizers[1].flipped();
    }
    let t = start.elapsed();
    verdict(
        ok && within(Duration::from_secs(1), t),
        format!("N = 2..8: two uniform global minimizers each: {ok}, {t:.2?}"),
    )
}

fn c9_protection() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 2..=4 {
        let nm = chain_modes(n);
        let probe = ManyBodySpec::chain(n, nm, 1.5, 1.0, 1.0, &vec![1; nm]).unwrap();
        let spec = probe.with_cutoffs(&vacuum_cutoffs(&probe));
        let omega = sample_realization(1.0, 0.5, n, 0x9a55 + n as u64);
        let deltas = fluctuations(&omega, 1.0);
        for m in 1..n {
            let r = protection_check(&spec, &deltas, m).unwrap();
            let cross = r.elements[0][1].norm().max(r.elements[1][0].norm());
            let diag = r.elements[0][0].norm().max(r.elements[1][1].norm());
            let split = (r.elements[0][0] - r.elements[1][1]).norm();
            let pass = r.max_abs_element() < 1e-12;
            ok &= pass;
            parts.push(format!(
                "N={n} m={m}: max {:.1e} (cross {cross:.1e}, diag {diag:.1e}, diag difference {split:.1e})",
                r.max_abs_element()
            ));
        }
        let r = protection_check(&spec, &deltas, n).unwrap();
        let spin = r.spin_factors[0][1];
        ok &= spin.abs() > 1e-12;
        parts.push(format!(
            "N={n} m={n}: cross spin factor {spin:.3e}, factorized {:.3e}, full-space {:.1e}",
            r.cross_element_factorized(),
            r.elements[0][1].norm()
        ));
    }
    let t = start.elapsed();
    verdict(ok && within(Duration::from_secs(120), t), format!("{}; {t:.2?}", parts.join("; ")))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn c10_disorder() -> Verdict {
    let start = Instant::now();
    let opts = EigenOptions::default();
    let amplitude = 0.5;
    let base = ManyBodySpec::chain(2, 1, 1.0, 1.0, 1.0, &[1]).unwrap();
    let analytic = DisorderEnsembleSpec { base, omega_f: 1.0, amplitude, realizations: 10_000, seed: 2024 };
    let stats = ensemble_splitting(&analytic, Engine::Analytic, &opts, DEFAULT_DIMENSION_BUDGET).unwrap();
    let expected = (2.0 + amplitude * amplitude).sqrt() * amplitude;
    let spread = stats.relative_spread();
    let spread_ok = ((spread - expected) / expected).abs() <= 0.05;

    let grid = [1.0, 1.2, 1.4, 1.6];
    let (mut mean_logs, mut clean_logs) = (Vec::new(), Vec::new());
    for &g in &grid {
        let cutoffs = choose_cutoffs(2, 1, g, 4.0, 4).unwrap();
        let base = ManyBodySpec::chain(2, 1, g, 1.0, 1.0, &cutoffs).unwrap();
        clean_logs.push(sector_ground_states(&base, &opts).unwrap().record.delta.ln());
        let spec = DisorderEnsembleSpec { base, omega_f: 1.0, amplitude, realizations: 100, seed: 2024 };
        mean_logs.push(ensemble_splitting(&spec, Engine::Exact, &opts, DEFAULT_DIMENSION_BUDGET).unwrap().mean_delta.ln());
    }
    let g2: Vec<f64> = grid.iter().map(|g| g * g).collect();
    let (s_mean, s_clean) = (slope(&g2, &mean_logs), slope(&g2, &clean_logs));
    let slope_ok = ((s_mean - s_clean) / s_clean).abs() <= 0.05;
    let t = start.elapsed();
    verdict(
        spread_ok && slope_ok && within(Duration::from_secs(600), t),
        format!(
            "sigma/<delta> = {spread:.4} vs {expected:.4}; slope of log<delta> {s_mean:.3} vs clean {s_clean:.3}, {t:.2?}"
        ),
    )
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect()
}

fn c11_determinism() -> Verdict {
    let start = Instant::now();
    let runs: [&[&str]; 8] = [
        &["derive", "--set", "phi01=3.0"],
        &["fluxonium", "--set", "wavefunctions=true"],
        &["polariton"],
        &["spectrum", "--set", "n_atoms=3", "--set", "n_modes=3", "--set", "g=0.6"],
        &["splitting-sweep", "--set", "g_values=[1.2,1.4,1.6,1.8]"],
        &["overlap", "--set", "n_atoms=3", "--set", "n_modes=3", "--set", "g_values=[0.6,0.8]"],
        &["disorder", "--set", "realizations=20"],
        &["fit-beta"],
    ];
    let work = tempfile::tempdir().unwrap();
    let sweep = work.path().join("sweep.csv");
    let mut snaps = Vec::new();
    for round in 0..2 {
        let dir = work.path().join(format!("run{round}"));
        for args in runs {
            let mut args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            args.extend(["--seed".into(), "77".into()]);
            if args[0] == "fit-beta" {
                args.extend(["--set".into(), format!("input={:?}", sweep.display().to_string())]);
            }
            let out = Command::new(env!("CARGO_BIN_EXE_cqed-vacua"))
                .args(&args)
                .env("CQED_VACUA_OUT", &dir)
                .output()
                .unwrap();
            if !out.status.success() {
                return verdict(false, format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
            }
            if args[0] == "splitting-sweep" && round == 0 {
                let produced = String::from_utf8_lossy(&out.stdout).lines().find(|l| l.ends_with(".csv")).unwrap().to_string();
                fs::copy(produced, &sweep).unwrap();
            }
        }
        snaps.push(snapshot(&dir));
    }
    let t = start.elapsed();
    let identical = snaps[0] == snaps[1];
    verdict(identical, format!("{} artifacts over 8 commands identical across two runs: {identical}, {t:.2?}", snaps[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("critical coupling", c1_critical_coupling),
        ("fluxonium", c2_fluxonium),
        ("coupling estimate", c3_coupling_estimate),
        ("dense-oracle equivalence", c4_dense_oracle),
        ("two-atom splitting", c5_two_atom_splitting),
        ("beta scaling", c6_beta_scaling),
        ("vacuum overlap", c7_vacuum_overlap),
        ("ferromagnetic minimizer", c8_ferromagnetic_minimizer),
        ("protection", c9_protection),
        ("disorder statistics", c10_disorder),
        ("determinism", c11_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let label = format!("{:>2} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == (i + 1).to_string()) {
            continue;
        }
        let v = check();
        failed += usize::from(!v.pass);
        println!("{} criterion {label}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
