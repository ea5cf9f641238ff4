//! Configuration-driven runner behind the `cqed-vacua` binary.
//!
//! A run is described by one flat TOML document. Command-line flags and
//! `--set key=value` pairs override file keys. Each run writes its tables as
//! CSV, a JSON summary and a manifest echoing the resolved configuration; all
//! file names carry the first 12 hex digits of the configuration hash.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::asymptotics::{
    beta_bounds, beta_exponent, ferromagnetic_energy, subspace_overlap, vacuum_pair,
};
use crate::basis::Sector;
use crate::circuit::{derive_constants, mode_frequency, vacuum_rabi, RawCircuit};
use crate::disorder::{ensemble_splitting, DisorderEnsembleSpec, Engine};
use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::fluxonium::{solve_levels, two_level_reduction, FluxoniumSpec};
use crate::hopfield::{branch_sweep, critical_coupling, HopfieldBlock};
use crate::manybody::{
    choose_cutoffs, ground_splitting, lowest_spectrum, sector_ground_states, ManyBodySpec,
    SpectrumSector, SplittingRecord, SPLITTING_FLOOR,
};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CQED_VACUA_OUT";
pub const DEFAULT_OUTPUT_DIR: &str = "cqed-out";
pub const DEFAULT_SEED: u64 = 1;

pub const COMMANDS: [&str; 8] = [
    "derive",
    "fluxonium",
    "polariton",
    "spectrum",
    "splitting-sweep",
    "overlap",
    "disorder",
    "fit-beta",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub output_dir: Option<String>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,

    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub l_r: Option<f64>,
    pub c_r: Option<f64>,
    pub a: Option<f64>,
    pub e_j: Option<f64>,
    pub e_cj: Option<f64>,
    pub phi01: Option<f64>,

    pub e_lj: Option<f64>,
    pub grid_points: Option<usize>,
    pub grid_half_width: Option<f64>,
    pub levels: Option<usize>,
    pub wavefunctions: Option<bool>,

    pub omega_k: Option<f64>,
    pub rabi_min: Option<f64>,
    pub rabi_max: Option<f64>,
    pub rabi_steps: Option<usize>,

    pub n_atoms: Option<usize>,
    pub n_modes: Option<usize>,
    pub omega_f: Option<f64>,
    pub omega_1: Option<f64>,
    pub g: Option<f64>,
    pub g_values: Option<Vec<f64>>,
    pub g_min: Option<f64>,
    pub g_max: Option<f64>,
    pub g_steps: Option<usize>,
    pub cutoffs: Option<Vec<usize>>,
    pub safety: Option<f64>,
    pub even_floor: Option<usize>,
    pub refine_tol: Option<f64>,
    pub tol: Option<f64>,
    pub max_basis: Option<usize>,
    pub dense_threshold: Option<usize>,
    pub sector: Option<String>,
    pub count: Option<usize>,

    pub amplitude: Option<f64>,
    pub realizations: Option<usize>,
    pub engine: Option<String>,
    pub dimension_budget: Option<usize>,

    pub input: Option<String>,
}

fn parse_table(text: &str, origin: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| Error::Config(format!("{origin}: {e}")))
}

/// Reads the optional config file and applies `key=value` overrides in order.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut table = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            toml::from_str::<RunConfig>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            parse_table(&text, &p.display().to_string())?
        }
        None => toml::Table::new(),
    };
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {item:?} is not key=value")))?;
        let key = key.trim();
        let fragment = format!("{key} = {}", value.trim());
        let parsed = parse_table(&fragment, &format!("override {key}"))
            .or_else(|_| parse_table(&format!("{key} = {:?}", value.trim()), &format!("override {key}")))?;
        toml::Value::Table(parsed.clone())
            .try_into::<RunConfig>()
            .map_err(|e| Error::Config(format!("override {key}: {e}")))?;
        table.extend(parsed);
    }
    let origin = path.map_or_else(|| "overrides".to_string(), |p| p.display().to_string());
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(format!("{origin}: {e}")))
}

impl RunConfig {
    /// Parses a TOML document; errors carry the offending key and line.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var(OUTPUT_DIR_ENV).ok())
            .unwrap_or_else(|| DEFAULT_OUTPUT_DIR.to_string())
            .into()
    }

    fn eigen_options(&self) -> EigenOptions {
        let d = EigenOptions::default();
        EigenOptions {
            tol: self.tol.unwrap_or(d.tol),
            max_basis: self.max_basis.unwrap_or(d.max_basis),
            dense_threshold: self.dense_threshold.unwrap_or(d.dense_threshold),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            ..d
        }
    }

    /// Fills every key the command reads with its default.
    pub fn resolved(&self, command: &str) -> Result<Self> {
        if !COMMANDS.contains(&command) {
            return Err(Error::Config(format!("unknown command {command:?}")));
        }
        if let Some(c) = &self.command {
            if c != command {
                return Err(Error::Config(format!(
                    "config is for command {c:?} but {command:?} was requested"
                )));
            }
        }
        let mut r = self.clone();
        r.command = Some(command.to_string());
        r.seed.get_or_insert(DEFAULT_SEED);
        macro_rules! default {
            ($($field:ident = $value:expr),* $(,)?) => {
                $( if r.$field.is_none() { r.$field = Some($value); } )*
            };
        }
        match command {
            "derive" => {
                default!(l1 = 2e-9, l2 = 2e-9, l_r = 2e-6, c_r = 1.6e-10, a = 1e-3, n_atoms = 5);
            }
            "fluxonium" => {
                default!(
                    e_j = 1.0,
                    e_cj = 1.0 / 3.0,
                    e_lj = 0.05,
                    grid_points = 801,
                    grid_half_width = 6.0 * PI,
                    levels = 4,
                    wavefunctions = false,
                );
            }
            "polariton" => {
                default!(omega_k = 1.0, omega_f = 1.0, rabi_min = 0.0, rabi_max = 1.0, rabi_steps = 101);
            }
            "spectrum" => {
                default!(
                    n_atoms = 5,
                    n_modes = 3,
                    g = 0.5,
                    omega_f = 1.0,
                    omega_1 = 1.0,
                    safety = 4.0,
                    even_floor = 4,
                    sector = "full".to_string(),
                    count = 10,
                );
                r.fill_eigen_defaults();
            }
            "splitting-sweep" | "overlap" => {
                let (n, nm) = if command == "overlap" { (5, 3) } else { (2, 1) };
                default!(
                    n_atoms = n,
                    n_modes = nm,
                    omega_f = 1.0,
                    omega_1 = 1.0,
                    safety = 4.0,
                    even_floor = 4,
                );
                if r.g_values.is_none() {
                    if command == "overlap" {
                        default!(g_min = 0.4, g_max = 1.0, g_steps = 4);
                    } else {
                        default!(g_min = 0.8, g_max = 1.8, g_steps = 6);
                    }
                }
                if command == "splitting-sweep" {
                    default!(refine_tol = crate::manybody::DEFAULT_REFINE_TOL);
                }
                r.fill_eigen_defaults();
            }
            "disorder" => {
                default!(
                    n_atoms = 2,
                    n_modes = 1,
                    g = 1.0,
                    omega_f = 1.0,
                    omega_1 = 1.0,
                    amplitude = 0.5,
                    realizations = 100,
                    engine = "exact".to_string(),
                    dimension_budget = crate::disorder::DEFAULT_DIMENSION_BUDGET,
                    safety = 4.0,
                    even_floor = 4,
                );
                r.fill_eigen_defaults();
            }
            "fit-beta" => {
                if r.input.is_none() {
                    return Err(Error::Config("fit-beta needs `input` (a splitting-sweep CSV)".into()));
                }
            }
            _ => unreachable!(),
        }
        Ok(r)
    }

    fn fill_eigen_defaults(&mut self) {
        let d = EigenOptions::default();
        self.tol.get_or_insert(d.tol);
        self.max_basis.get_or_insert(d.max_basis);
        self.dense_threshold.get_or_insert(d.dense_threshold);
    }

    /// SHA-256 of the canonical JSON form, ignoring where and how wide the run executes.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        c.jobs = None;
        let canonical = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn g_grid(&self) -> Result<Vec<f64>> {
        if let Some(v) = &self.g_values {
            return Ok(v.clone());
        }
        let (lo, hi, steps) = (req(self.g_min, "g_min")?, req(self.g_max, "g_max")?, req(self.g_steps, "g_steps")?);
        Ok(linspace(lo, hi, steps))
    }
}

fn req<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
}

pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub n_atoms: usize,
    pub n_modes: usize,
    pub beta: f64,
    pub intercept: f64,
    pub g2_min: f64,
    pub g2_max: f64,
    pub residual_rms: f64,
    pub points: usize,
    /// Records dropped as unconverged or below the numerical floor.
    pub excluded: usize,
}

/// Least-squares line through (g², ln(δ/ω_F)); β = −slope.
pub fn fit_beta(records: &[SplittingRecord]) -> Result<BetaFit> {
    let usable: Vec<&SplittingRecord> = records
        .iter()
        .filter(|r| r.converged && !r.below_floor && r.delta > 0.0)
        .collect();
    let excluded = records.len() - usable.len();
    let first = usable
        .first()
        .ok_or_else(|| Error::InsufficientData("no converged records above the floor".into()))?;
    if usable
        .iter()
        .any(|r| r.n_atoms != first.n_atoms || r.n_modes != first.n_modes)
    {
        return Err(Error::Inconsistent("records mix different N or N_m".into()));
    }
    let mut gs: Vec<f64> = usable.iter().map(|r| r.g).collect();
    gs.sort_by(f64::total_cmp);
    gs.dedup();
    if gs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 distinct g values, got {}",
            gs.len()
        )));
    }
    let g2_min = gs[0] * gs[0];
    let g2_max = gs[gs.len() - 1] * gs[gs.len() - 1];
    if !(g2_max >= 2.0 * g2_min) {
        return Err(Error::InsufficientData(format!(
            "g² range [{g2_min}, {g2_max}] spans less than a factor 2"
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|r| r.g * r.g).collect();
    let ys: Vec<f64> = usable.iter().map(|r| r.delta_over_omega_f().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(BetaFit {
        n_atoms: first.n_atoms,
        n_modes: first.n_modes,
        beta: -slope,
        intercept,
        g2_min,
        g2_max,
        residual_rms: rms,
        points: usable.len(),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub failures: usize,
    pub config_hash: String,
}

impl RunOutcome {
    pub fn success(&self) -> bool {
        self.failures == 0
    }
}

struct Artifacts {
    dir: PathBuf,
    stem: String,
    files: Vec<PathBuf>,
    warnings: Vec<String>,
    failures: usize,
}

impl Artifacts {
    fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    fn csv(&mut self, suffix: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let path = self.path(suffix);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, suffix: &str, value: &serde_json::Value) -> Result<()> {
        let path = self.path(suffix);
        fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
        self.files.push(path);
        Ok(())
    }

    fn warn(&mut self, msg: String) {
        self.warnings.push(msg);
    }
}

fn f(x: f64) -> String {
    x.to_string()
}

/// Executes `command` with the configuration, writing artifacts into its output directory.
pub fn run(command: &str, config: &RunConfig) -> Result<RunOutcome> {
    let cfg = config.resolved(command)?;
    let hash = cfg.hash();
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir)?;
    let mut art = Artifacts {
        dir,
        stem: format!("{command}-{}", &hash[..12]),
        files: Vec::new(),
        warnings: Vec::new(),
        failures: 0,
    };
    let jobs = cfg.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build a {jobs}-thread pool: {e}")))?;
    pool.install(|| dispatch(command, &cfg, &mut art))?;
    let manifest = json!({
        "command": command,
        "config_sha256": hash,
        "config": cfg,
        "files": art.files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "warnings": art.warnings,
        "failures": art.failures,
        "version": env!("CARGO_PKG_VERSION"),
    });
    art.json(".manifest.json", &manifest)?;
    Ok(RunOutcome {
        files: art.files,
        warnings: art.warnings,
        failures: art.failures,
        config_hash: hash,
    })
}

fn dispatch(command: &str, cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    match command {
        "derive" => run_derive(cfg, art),
        "fluxonium" => run_fluxonium(cfg, art),
        "polariton" => run_polariton(cfg, art),
        "spectrum" => run_spectrum(cfg, art),
        "splitting-sweep" => run_sweep(cfg, art),
        "overlap" => run_overlap(cfg, art),
        "disorder" => run_disorder(cfg, art),
        "fit-beta" => run_fit(cfg, art),
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    }
}

fn run_derive(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let raw = RawCircuit {
        l1: req(cfg.l1, "l1")?,
        l2: req(cfg.l2, "l2")?,
        l_r: req(cfg.l_r, "l_r")?,
        c_r: req(cfg.c_r, "c_r")?,
        a: req(cfg.a, "a")?,
        n_atoms: req(cfg.n_atoms, "n_atoms")?,
        e_j: cfg.e_j.unwrap_or(0.0),
        e_cj: cfg.e_cj.unwrap_or(0.0),
    };
    let c = derive_constants(&raw)?;
    art.json(".json", &serde_json::to_value(c)?)?;
    if let Some(phi01) = cfg.phi01 {
        let mut rows = Vec::new();
        for k in 1..=raw.n_atoms {
            rows.push(vec![
                k.to_string(),
                f(mode_frequency(k, &c, &raw)?),
                f(vacuum_rabi(k, &c, &raw, phi01)?),
            ]);
        }
        art.csv("-modes.csv", &strings(&["k", "omega_k", "Omega_k"]), &rows)?;
    }
    Ok(())
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn run_fluxonium(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let spec = FluxoniumSpec::new(req(cfg.e_j, "e_j")?, req(cfg.e_cj, "e_cj")?, req(cfg.e_lj, "e_lj")?)
        .with_grid(req(cfg.grid_half_width, "grid_half_width")?, req(cfg.grid_points, "grid_points")?);
    let levels = solve_levels(&spec, req(cfg.levels, "levels")?.max(3))?;
    let red = two_level_reduction(&levels)?;
    if red.weakly_anharmonic {
        art.warn(format!(
            "anharmonicity {:.3} below threshold; two-level reduction is questionable",
            red.anharmonicity
        ));
    }
    art.json(
        ".json",
        &json!({
            "energies": levels.energies,
            "omega_F": levels.omega_f,
            "phi01": levels.phi01,
            "phi00": levels.phi00,
            "anharmonicity": red.anharmonicity,
            "weakly_anharmonic": red.weakly_anharmonic,
            "grid_shift": levels.grid_shift,
        }),
    )?;
    if cfg.wavefunctions == Some(true) {
        let rows: Vec<Vec<String>> = levels
            .grid
            .iter()
            .enumerate()
            .map(|(i, &phi)| {
                vec![f(phi), f(levels.wavefunctions[0][i]), f(levels.wavefunctions[1][i])]
            })
            .collect();
        art.csv("-wavefunctions.csv", &strings(&["phi", "psi0", "psi1"]), &rows)?;
    }
    Ok(())
}

fn run_polariton(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let block = HopfieldBlock::new(req(cfg.omega_k, "omega_k")?, req(cfg.omega_f, "omega_f")?, 0.0)?;
    let grid = linspace(
        req(cfg.rabi_min, "rabi_min")?,
        req(cfg.rabi_max, "rabi_max")?,
        req(cfg.rabi_steps, "rabi_steps")?,
    );
    if grid.is_empty() {
        art.warn("empty Omega grid".into());
    }
    let rows: Vec<Vec<String>> = branch_sweep(&block, &grid)?
        .iter()
        .map(|r| vec![f(r.rabi), f(r.lower), f(r.upper), r.stable.to_string(), f(r.determinant)])
        .collect();
    art.csv(".csv", &strings(&["Omega", "lower", "upper", "stable", "determinant"]), &rows)?;
    art.json(
        ".json",
        &json!({
            "omega_k": block.omega_k,
            "omega_F": block.omega_f,
            "critical_coupling": critical_coupling(block.omega_k, block.omega_f)?,
            "rows": rows.len(),
        }),
    )
}

fn chain_spec(cfg: &RunConfig, g: f64) -> Result<ManyBodySpec> {
    let (n, nm) = (req(cfg.n_atoms, "n_atoms")?, req(cfg.n_modes, "n_modes")?);
    let cutoffs = match &cfg.cutoffs {
        Some(c) => c.clone(),
        None => choose_cutoffs(n, nm, g, req(cfg.safety, "safety")?, req(cfg.even_floor, "even_floor")?)?,
    };
    ManyBodySpec::chain(n, nm, g, req(cfg.omega_f, "omega_f")?, req(cfg.omega_1, "omega_1")?, &cutoffs)
}

fn cutoff_header(n_modes: usize) -> Vec<String> {
    (1..=n_modes).map(|k| format!("n_max_{k}")).collect()
}

fn run_spectrum(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let g = req(cfg.g, "g")?;
    let spec = chain_spec(cfg, g)?;
    let which = SpectrumSector::from_str(cfg.sector.as_deref().unwrap_or("full"))?;
    let res = lowest_spectrum(&spec, which, req(cfg.count, "count")?, &cfg.eigen_options())?;
    let rows: Vec<Vec<String>> = (0..res.eigenvalues.len())
        .map(|i| {
            vec![
                i.to_string(),
                f(res.eigenvalues[i]),
                res.sectors[i].label().to_string(),
                f(res.residuals[i]),
            ]
        })
        .collect();
    art.csv(".csv", &strings(&["index", "energy", "sector", "residual"]), &rows)?;
    art.json(
        ".json",
        &json!({
            "N": spec.n_atoms,
            "N_m": spec.n_modes(),
            "g": g,
            "cutoffs": spec.cutoffs,
            "eigenvalues": res.eigenvalues,
            "sectors": res.sectors,
        }),
    )
}

/// Fixed sweep schema: N, N_m, g, n_max_1..n_max_Nm, E_even, E_odd, delta, delta_over_omegaF, converged.
pub fn sweep_header(n_modes: usize) -> Vec<String> {
    let mut h = strings(&["N", "N_m", "g"]);
    h.extend(cutoff_header(n_modes));
    h.extend(strings(&["E_even", "E_odd", "delta", "delta_over_omegaF", "converged"]));
    h
}

pub fn sweep_row(r: &SplittingRecord) -> Vec<String> {
    let mut row = vec![r.n_atoms.to_string(), r.n_modes.to_string(), f(r.g)];
    row.extend(r.cutoffs.iter().map(|c| c.to_string()));
    row.extend([
        f(r.e_even),
        f(r.e_odd),
        f(r.delta),
        f(r.delta_over_omega_f()),
        r.converged.to_string(),
    ]);
    row
}

/// Reads records back from a sweep CSV.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SplittingRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let n_modes = header.iter().filter(|h| h.starts_with("n_max_")).count();
    if header != sweep_header(n_modes) {
        return Err(Error::Config(format!(
            "{}: not a splitting-sweep CSV (header {header:?})",
            path.display()
        )));
    }
    let bad = |what: &str| Error::Config(format!("{}: bad {what}", path.display()));
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let num = |i: usize| -> Result<f64> { row[i].parse::<f64>().map_err(|_| bad(&header[i])) };
        let delta = num(3 + n_modes + 2)?;
        let ratio = num(3 + n_modes + 3)?;
        out.push(SplittingRecord {
            n_atoms: row[0].parse().map_err(|_| bad("N"))?,
            n_modes: row[1].parse().map_err(|_| bad("N_m"))?,
            g: num(2)?,
            cutoffs: (0..n_modes)
                .map(|k| row[3 + k].parse().map_err(|_| bad("cutoff")))
                .collect::<Result<_>>()?,
            omega_f_mean: if ratio != 0.0 { delta / ratio } else { 1.0 },
            e_even: num(3 + n_modes)?,
            e_odd: num(3 + n_modes + 1)?,
            delta,
            converged: row[3 + n_modes + 4].parse().map_err(|_| bad("converged"))?,
            below_floor: ratio < SPLITTING_FLOOR,
        });
    }
    Ok(out)
}

fn run_sweep(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    use rayon::prelude::*;
    let grid = cfg.g_grid()?;
    if grid.is_empty() {
        art.warn("empty g grid; writing an empty table".into());
    }
    let opts = cfg.eigen_options();
    let tol = req(cfg.refine_tol, "refine_tol")?;
    let results: Vec<(f64, Result<SplittingRecord>)> = grid
        .par_iter()
        .map(|&g| (g, chain_spec(cfg, g).and_then(|s| ground_splitting(&s, &opts, tol))))
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut unconverged = 0;
    for (g, r) in results {
        match r {
            Ok(rec) => {
                unconverged += usize::from(!rec.converged);
                rows.push(sweep_row(&rec));
            }
            Err(e) => errors.push(json!({"g": g, "error": e.to_string()})),
        }
    }
    if unconverged > 0 {
        art.warn(format!("{unconverged} sweep point(s) not converged under cutoff refinement"));
    }
    art.failures += errors.len();
    let nm = req(cfg.n_modes, "n_modes")?;
    art.csv(".csv", &sweep_header(nm), &rows)?;
    art.json(
        ".json",
        &json!({"points": rows.len(), "unconverged": unconverged, "errors": errors}),
    )
}

fn run_overlap(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let grid = cfg.g_grid()?;
    if grid.is_empty() {
        art.warn("empty g grid; writing an empty table".into());
    }
    let opts = cfg.eigen_options();
    let nm = req(cfg.n_modes, "n_modes")?;
    let mut header = vec!["g".to_string()];
    header.extend(cutoff_header(nm));
    header.extend(strings(&["fidelity", "cosine_1", "cosine_2", "E_even", "E_odd", "E_G"]));
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &g in &grid {
        let result = (|| -> Result<Vec<String>> {
            let spec = chain_spec(cfg, g)?;
            let ground = sector_ground_states(&spec, &opts)?;
            let even = ground.even.embed(&spec.basis(Some(Sector::Even))?)?;
            let odd = ground.odd.embed(&spec.basis(Some(Sector::Odd))?)?;
            let (plus, minus) = vacuum_pair(&spec)?;
            let ov = subspace_overlap([&even, &odd], [&plus, &minus])?;
            let mut row = vec![f(g)];
            row.extend(spec.cutoffs.iter().map(|c| c.to_string()));
            row.extend([
                f(ov.fidelity),
                f(ov.cosines[0]),
                f(ov.cosines[1]),
                f(ground.record.e_even),
                f(ground.record.e_odd),
                f(ferromagnetic_energy(&spec)),
            ]);
            Ok(row)
        })();
        match result {
            Ok(row) => rows.push(row),
            Err(e) => errors.push(json!({"g": g, "error": e.to_string()})),
        }
    }
    art.failures += errors.len();
    art.csv(".csv", &header, &rows)?;
    art.json(".json", &json!({"points": rows.len(), "errors": errors}))
}

fn run_disorder(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let g = req(cfg.g, "g")?;
    let base = chain_spec(cfg, g)?;
    let n = base.n_atoms;
    let spec = DisorderEnsembleSpec {
        base,
        omega_f: req(cfg.omega_f, "omega_f")?,
        amplitude: req(cfg.amplitude, "amplitude")?,
        realizations: req(cfg.realizations, "realizations")?,
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
    };
    let mut engine = Engine::from_str(cfg.engine.as_deref().unwrap_or("exact"))?;
    let budget = req(cfg.dimension_budget, "dimension_budget")?;
    if engine == Engine::Exact && spec.base.basis(None)?.full_dim() > budget {
        art.warn(format!("dimension exceeds budget {budget}; using the analytic engine"));
        engine = Engine::Analytic;
    }
    let stats = ensemble_splitting(&spec, engine, &cfg.eigen_options(), budget)?;
    art.failures += stats.failures;
    let mut header = strings(&["realization", "seed"]);
    header.extend((1..=n).map(|j| format!("omega_F_{j}")));
    header.push("delta".into());
    let rows: Vec<Vec<String>> = stats
        .records
        .iter()
        .map(|r| {
            let mut row = vec![r.realization.to_string(), r.seed.to_string()];
            row.extend(r.omega_f.iter().map(|&w| f(w)));
            row.push(r.delta.map_or_else(String::new, f));
            row
        })
        .collect();
    art.csv(".csv", &header, &rows)?;
    art.json(
        ".json",
        &json!({
            "mean": stats.mean_delta,
            "std": stats.std_delta,
            "engine": engine.label(),
            "g": g,
            "N": n,
            "N_m": spec.base.n_modes(),
            "amplitude": spec.amplitude,
            "realizations": spec.realizations,
            "seed": spec.seed,
            "failures": stats.failures,
        }),
    )
}

fn run_fit(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let records = read_sweep_csv(Path::new(&req(cfg.input.clone(), "input")?))?;
    let mut groups: Vec<((usize, usize), Vec<SplittingRecord>)> = Vec::new();
    for r in records {
        let key = (r.n_atoms, r.n_modes);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups.sort_by_key(|(k, _)| *k);
    let header = strings(&[
        "N", "N_m", "beta", "intercept", "g2_min", "g2_max", "residual_rms", "points",
        "excluded", "beta_theory", "bound_lower", "bound_upper",
    ]);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for ((n, nm), recs) in &groups {
        match fit_beta(recs) {
            Ok(fit) => {
                if fit.excluded > 0 {
                    art.warn(format!("N={n}: {} record(s) excluded from the fit", fit.excluded));
                }
                let (lo, hi) = beta_bounds(*n);
                let theory = beta_exponent(*n, *nm).ok();
                rows.push(vec![
                    n.to_string(),
                    nm.to_string(),
                    f(fit.beta),
                    f(fit.intercept),
                    f(fit.g2_min),
                    f(fit.g2_max),
                    f(fit.residual_rms),
                    fit.points.to_string(),
                    fit.excluded.to_string(),
                    theory.map_or_else(String::new, f),
                    f(lo),
                    f(hi),
                ]);
                fits.push(fit);
            }
            Err(e) => {
                art.failures += 1;
                art.warn(format!("N={n}: {e}"));
            }
        }
    }
    art.csv(".csv", &header, &rows)?;
    art.json(".json", &json!({"fits": fits}))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(beta: f64) -> Vec<SplittingRecord> {
        [0.8, 1.0, 1.2, 1.4, 1.6]
            .iter()
            .map(|&g: &f64| SplittingRecord {
                n_atoms: 2,
                n_modes: 1,
                g,
                cutoffs: vec![10],
                omega_f_mean: 1.0,
                e_even: 0.0,
                e_odd: 0.0,
                delta: (-beta * g * g).exp(),
                converged: true,
                below_floor: false,
            })
            .collect()
    }

    #[test]
    fn fit_recovers_synthetic_exponent() {
        let fit = fit_beta(&synthetic(8.0)).unwrap();
        assert!((fit.beta - 8.0).abs() < 1e-6);
        assert!(fit.intercept.abs() < 1e-9);
        assert_eq!(fit.points, 5);
    }

    #[test]
    fn fit_rejects_thin_data() {
        let mut r = synthetic(8.0);
        r.truncate(3);
        assert!(fit_beta(&r).is_err());
        let mut r = synthetic(8.0);
        r[0].converged = false;
        r[1].below_floor = true;
        assert!(fit_beta(&r).is_err());
        let narrow: Vec<SplittingRecord> = synthetic(8.0)
            .into_iter()
            .map(|mut x| {
                x.g = 1.0 + x.g / 100.0;
                x
            })
            .collect();
        assert!(fit_beta(&narrow).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = RunConfig::from_toml("seed = 3\nbogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("line 2"), "{err}");
    }

    #[test]
    fn overrides_and_hash() {
        let c = load_config(None, &["g = 0.7".into(), "sector = odd".into()]).unwrap();
        assert_eq!(c.g, Some(0.7));
        assert_eq!(c.sector.as_deref(), Some("odd"));
        let a = c.resolved("spectrum").unwrap();
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        b.jobs = Some(3);
        assert_eq!(a.hash(), b.hash());
        b.g = Some(0.8);
        assert_ne!(a.hash(), b.hash());
        assert!(load_config(None, &["novalue".into()]).is_err());
        assert!(c.resolved("nonsense").is_err());
    }

    #[test]
    fn linspace_edges() {
        assert!(linspace(0.0, 1.0, 0).is_empty());
        assert_eq!(linspace(0.5, 1.0, 1), vec![0.5]);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
