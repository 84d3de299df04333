use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use dualent_core::experiment::SETTING_PAIR_LABELS;
use dualent_core::identicity::{decoherence_sweep, smax_vs_overlap_for};
use dualent_core::{
    chsh, degraded_dual_state, dualism_magnitude_check, optimize_chsh, route_pbs, run_experiment,
    temperature_threshold, ChshSettings, DualPairState, ExperimentConfig,
    OverlapParameter, Statistics, TemperatureQuery, TransitionParams, VariablePair,
};
use num_complex::Complex64;
use serde_json::json;

use crate::output::{num, Format, Report, RunManifest, Table};
use crate::{config, parse};
use crate::{ChshArgs, Cli, Command, DecohereArgs, DualArgs, SettingArgs, SimulateArgs, StateChoice};
use crate::{SweepArgs, TemperatureArgs, DEFAULT_SEED};

const DEFAULT_AMPLITUDE: &str = "0.7071067811865476";
const DEFAULT_PAIRS: u64 = 1_000_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(PathBuf, io::Error),
    Domain(dualent_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(..) | CliError::Domain(dualent_core::Error::Config(_)) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<dualent_core::Error> for CliError {
    fn from(e: dualent_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<String> for CliError {
    fn from(msg: String) -> Self {
        CliError::Usage(msg)
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Worker cap from `DUALENT_WORKERS`; `None` when unset.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var("DUALENT_WORKERS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("DUALENT_WORKERS: {e}"))),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("DUALENT_WORKERS must be a positive integer, got `{raw}`"))),
        },
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let out = Out { dir: cli.out_dir.as_deref(), format: cli.format };
    match &cli.command {
        Command::Dual(args) => dual(args, seed, out),
        Command::Chsh(args) => chsh_cmd(args, seed, out),
        Command::Simulate(args) => simulate(args, cli.seed, out),
        Command::IdenticitySweep(args) => identicity_sweep(args, seed, out),
        Command::Decohere(args) => decohere(args, seed, out),
        Command::Temperature(args) => temperature(args, seed, out),
    }
}

#[derive(Clone, Copy)]
struct Out<'a> {
    dir: Option<&'a Path>,
    format: Format,
}

impl Out<'_> {
    fn write(&self, report: &Report, csv_name: Option<&str>, json_name: Option<&str>) -> Result<()> {
        if let Some(dir) = self.dir {
            report
                .write(dir, self.format, csv_name, json_name)
                .map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        }
        Ok(())
    }

    /// Sweeps go to stdout when no directory is given.
    fn emit(&self, report: &Report) -> Result<()> {
        match self.dir {
            Some(_) => self.write(report, None, None),
            None if self.format == Format::Json => {
                print!("{}", report.json());
                Ok(())
            }
            None => {
                print!("{}", report.csv());
                Ok(())
            }
        }
    }
}

fn statistics(s: &str) -> Result<Statistics> {
    s.parse::<Statistics>()
        .map_err(|_| CliError::Usage(format!("`{s}` is not a statistics (expected boson or fermion)")))
}

/// Fixed-width decimal with negative zero suppressed.
fn fixed4(x: f64) -> String {
    let r = (x * 1e4).round() / 1e4;
    format!("{:.4}", if r == 0.0 { 0.0 } else { r })
}

fn amplitude4(z: Complex64) -> String {
    let im = fixed4(z.im);
    if im == "0.0000" {
        fixed4(z.re)
    } else if im.starts_with('-') {
        format!("{}{}i", fixed4(z.re), im)
    } else {
        format!("{}+{}i", fixed4(z.re), im)
    }
}

fn ket(state: &DualPairState) -> String {
    let (l, e) = (state.label_var(), state.entangled_var());
    format!(
        "({})|{}>_{} |{}>_{} + ({})|{}>_{} |{}>_{}",
        amplitude4(state.alpha()),
        e.eigenlabel(0),
        l.eigenlabel(0),
        e.eigenlabel(1),
        l.eigenlabel(1),
        amplitude4(state.beta()),
        e.eigenlabel(1),
        l.eigenlabel(0),
        e.eigenlabel(0),
        l.eigenlabel(1),
    )
}

fn dual(args: &DualArgs, seed: u64, out: Out) -> Result<()> {
    let alpha = parse::complex(&args.alpha)?;
    let beta = parse::complex(&args.beta)?;
    let stat = statistics(&args.stat)?;
    let label_var = parse::variable(&args.label_var)?;
    let entangled_var = parse::variable(&args.entangled_var)?;
    let state = DualPairState::new(alpha, beta, label_var, entangled_var, stat)?;
    let report = dualism_magnitude_check(&state);

    println!("statistics:   {stat}");
    println!("original:     {}", ket(&report.original));
    println!("dual:         {}", ket(&report.dual));
    println!(
        "dual amplitudes: ({}, {})",
        amplitude4(report.dual.alpha()),
        amplitude4(report.dual.beta())
    );
    println!("concurrence:  original {}, dual {}", fixed4(report.concurrence_original), fixed4(report.concurrence_dual));
    println!("factorizable: {}", report.factorizable);

    let manifest = RunManifest::new("dual", seed)
        .param("alpha", &args.alpha)
        .param("beta", &args.beta)
        .param("stat", &args.stat)
        .param("label-var", &args.label_var)
        .param("entangled-var", &args.entangled_var);
    let mut table = Table::new(vec![
        "representation",
        "labelVar",
        "entangledVar",
        "alphaRe",
        "alphaIm",
        "betaRe",
        "betaIm",
        "concurrence",
        "factorizable",
    ]);
    for (name, s, c) in [
        ("original", &report.original, report.concurrence_original),
        ("dual", &report.dual, report.concurrence_dual),
    ] {
        table.push(vec![
            name.to_string(),
            s.label_var().name().to_string(),
            s.entangled_var().name().to_string(),
            num(s.alpha().re),
            num(s.alpha().im),
            num(s.beta().re),
            num(s.beta().im),
            num(c),
            report.factorizable.to_string(),
        ]);
    }
    let payload = serde_json::to_value(&report).expect("report serializes");
    out.write(&Report { stem: "dual", manifest, table, payload }, None, None)
}

/// All four settings, or none.
fn explicit_settings(s: &SettingArgs) -> Result<Option<ChshSettings>> {
    match (&s.a, &s.a_prime, &s.b, &s.b_prime) {
        (None, None, None, None) => Ok(None),
        (Some(a), Some(ap), Some(b), Some(bp)) => Ok(Some(ChshSettings {
            a: parse::setting(a)?,
            a_prime: parse::setting(ap)?,
            b: parse::setting(b)?,
            b_prime: parse::setting(bp)?,
        })),
        _ => Err(CliError::Usage("give all of --a, --a-prime, --b, --b-prime or none".into())),
    }
}

fn settings_row(s: &ChshSettings) -> Vec<String> {
    [s.a, s.a_prime, s.b, s.b_prime]
        .iter()
        .flat_map(|m| [num(m.theta()), num(m.phi())])
        .collect()
}

fn chsh_cmd(args: &ChshArgs, seed: u64, out: Out) -> Result<()> {
    let stat = statistics(&args.stat)?;
    let mut manifest = RunManifest::new("chsh", seed)
        .param("state", format!("{:?}", args.state).to_lowercase())
        .param("stat", &args.stat)
        .param("overlap", num(args.overlap));
    let (alpha, beta) = match args.state {
        StateChoice::Maximal => {
            if args.alpha.is_some() || args.beta.is_some() {
                return Err(CliError::Usage("--alpha/--beta need --state custom".into()));
            }
            (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
        }
        StateChoice::Product => {
            if args.alpha.is_some() || args.beta.is_some() {
                return Err(CliError::Usage("--alpha/--beta need --state custom".into()));
            }
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        }
        StateChoice::Custom => {
            let (Some(a), Some(b)) = (&args.alpha, &args.beta) else {
                return Err(CliError::Usage("--state custom needs --alpha and --beta".into()));
            };
            manifest = manifest.param("alpha", a).param("beta", b);
            (parse::complex(a)?, parse::complex(b)?)
        }
    };
    let explicit = explicit_settings(&args.settings)?;
    if explicit.is_some() && args.optimize {
        return Err(CliError::Usage("--optimize conflicts with explicit settings".into()));
    }

    let state = DualPairState::new(alpha, beta, VariablePair::momentum(), VariablePair::polarization(), stat)?;
    let rho = degraded_dual_state(&state, OverlapParameter::new(args.overlap)?)?;
    let (s, settings, optimized) = match explicit {
        Some(settings) => {
            for (key, m) in [
                ("a", settings.a),
                ("a-prime", settings.a_prime),
                ("b", settings.b),
                ("b-prime", settings.b_prime),
            ] {
                manifest = manifest.param(key, parse::format_setting(&m));
            }
            (chsh(&rho, &settings), settings, false)
        }
        None => {
            let opt = optimize_chsh(&rho);
            (opt.s_max, opt.settings, true)
        }
    };

    println!("S = {s:.6}{}", if optimized { " (optimized)" } else { "" });
    for (name, m) in [("a", settings.a), ("a'", settings.a_prime), ("b", settings.b), ("b'", settings.b_prime)] {
        println!("  {name:<2} theta = {:.6}, phi = {:.6}", m.theta(), m.phi());
    }

    let mut table = Table::new(vec![
        "s",
        "aTheta",
        "aPhi",
        "aPrimeTheta",
        "aPrimePhi",
        "bTheta",
        "bPhi",
        "bPrimeTheta",
        "bPrimePhi",
    ]);
    let mut row = vec![num(s)];
    row.extend(settings_row(&settings));
    table.push(row);
    let payload = json!({ "s": s, "optimized": optimized, "settings": settings });
    out.write(&Report { stem: "chsh", manifest, table, payload }, None, None)
}

/// Flag value, else config-file value, else default.
struct Resolved<'a> {
    file: BTreeMap<String, String>,
    flags: BTreeMap<&'a str, Option<&'a String>>,
}

impl Resolved<'_> {
    fn get(&self, key: &str) -> Option<String> {
        match self.flags.get(key).copied().flatten() {
            Some(v) => Some(v.clone()),
            None => self.file.get(key).cloned(),
        }
    }
}

fn simulate(args: &SimulateArgs, seed_flag: Option<u64>, out: Out) -> Result<()> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.clone(), e))?;
            config::parse(&text, &config::SIMULATE_KEYS).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => BTreeMap::new(),
    };
    let flags = BTreeMap::from([
        ("alpha", args.alpha.as_ref()),
        ("beta", args.beta.as_ref()),
        ("stat", args.stat.as_ref()),
        ("pairs", args.pairs.as_ref()),
        ("overlap", args.overlap.as_ref()),
        ("efficiency", args.efficiency.as_ref()),
        ("a", args.settings.a.as_ref()),
        ("a-prime", args.settings.a_prime.as_ref()),
        ("b", args.settings.b.as_ref()),
        ("b-prime", args.settings.b_prime.as_ref()),
    ]);
    let r = Resolved { file, flags };

    let seed = match (seed_flag, r.file.get("seed")) {
        (Some(s), _) => s,
        (None, Some(raw)) => raw
            .parse()
            .map_err(|_| CliError::Usage(format!("seed `{raw}` is not an unsigned integer")))?,
        (None, None) => DEFAULT_SEED,
    };
    let alpha_raw = r.get("alpha").unwrap_or_else(|| DEFAULT_AMPLITUDE.into());
    let beta_raw = r.get("beta").unwrap_or_else(|| DEFAULT_AMPLITUDE.into());
    let stat_raw = r.get("stat").unwrap_or_else(|| "boson".into());
    let pairs_raw = r.get("pairs").unwrap_or_else(|| DEFAULT_PAIRS.to_string());
    let overlap_raw = r.get("overlap").unwrap_or_else(|| "1".into());
    let efficiency_raw = r.get("efficiency").unwrap_or_else(|| "1".into());

    let real = |key: &str, raw: &str| -> Result<f64> {
        raw.parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{key} `{raw}` is not a number")))
    };
    let pairs: u64 = pairs_raw
        .parse()
        .map_err(|_| CliError::Usage(format!("pairs `{pairs_raw}` is not an unsigned integer")))?;
    let state = DualPairState::new(
        parse::complex(&alpha_raw)?,
        parse::complex(&beta_raw)?,
        VariablePair::momentum(),
        VariablePair::polarization(),
        statistics(&stat_raw)?,
    )?;
    let explicit = explicit_settings(&SettingArgs {
        a: r.get("a"),
        a_prime: r.get("a-prime"),
        b: r.get("b"),
        b_prime: r.get("b-prime"),
    })?;
    let settings = match explicit {
        Some(s) => s,
        None => optimize_chsh(&route_pbs(&state)?).settings,
    };
    let config = ExperimentConfig {
        state,
        settings,
        pairs_per_setting_pair: pairs,
        seed,
        overlap_v: real("overlap", &overlap_raw)?,
        detector_efficiency: real("efficiency", &efficiency_raw)?,
    };
    config.validate()?;
    let result = run_experiment(&config)?;

    let manifest = RunManifest::new("simulate", seed)
        .param("alpha", &alpha_raw)
        .param("beta", &beta_raw)
        .param("stat", &stat_raw)
        .param("pairs", &pairs_raw)
        .param("overlap", &overlap_raw)
        .param("efficiency", &efficiency_raw)
        .param("a", parse::format_setting(&settings.a))
        .param("a-prime", parse::format_setting(&settings.a_prime))
        .param("b", parse::format_setting(&settings.b))
        .param("b-prime", parse::format_setting(&settings.b_prime));
    let mut table = Table::new(vec!["settingPair", "nPP", "nPM", "nMP", "nMM", "eHat", "stdErr"]);
    for (k, entry) in result.counts_per_setting_pair.iter().enumerate() {
        let c = entry.counts;
        table.push(vec![
            SETTING_PAIR_LABELS[k].to_string(),
            c.n_pp.to_string(),
            c.n_pm.to_string(),
            c.n_mp.to_string(),
            c.n_mm.to_string(),
            num(result.e_hat[k]),
            num(result.e_std_err[k]),
        ]);
    }
    let payload = json!({ "config": config, "result": result });
    let dir = out.dir.unwrap_or(Path::new("."));
    Out { dir: Some(dir), format: out.format }.write(
        &Report { stem: "result", manifest, table, payload },
        Some("counts.csv"),
        Some("result.json"),
    )?;

    println!("sHat = {:.6} ± {:.6}", result.s_hat, result.s_std_err);
    Ok(())
}

fn identicity_sweep(args: &SweepArgs, seed: u64, out: Out) -> Result<()> {
    let grid = parse::grid(&args.v)?
        .into_iter()
        .map(OverlapParameter::new)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let curve = smax_vs_overlap_for(&DualPairState::photon_pair(), &grid)?;
    let manifest = RunManifest::new("identicity-sweep", seed).param("v", &args.v);
    let mut table = Table::new(vec!["v", "sMax"]);
    for &(v, s) in &curve {
        table.push(vec![num(v), num(s)]);
    }
    let payload = json!({
        "points": curve.iter().map(|&(v, s)| json!({ "v": v, "sMax": s })).collect::<Vec<_>>()
    });
    out.emit(&Report { stem: "identicity_sweep", manifest, table, payload })
}

fn decohere(args: &DecohereArgs, seed: u64, out: Out) -> Result<()> {
    let d1 = parse::grid(&args.d1)?;
    let d2 = parse::grid(&args.d2)?;
    let rates = TransitionParams::new(args.gamma_id, args.gamma_path, 0.0, 0.0, args.speed)?;
    let points = decoherence_sweep(&rates, &d1, &d2, &DualPairState::photon_pair())?;
    let manifest = RunManifest::new("decohere", seed)
        .param("gamma-id", num(args.gamma_id))
        .param("gamma-path", num(args.gamma_path))
        .param("d1", &args.d1)
        .param("d2", &args.d2)
        .param("speed", num(args.speed));
    let mut table = Table::new(vec!["d1", "d2", "sMax"]);
    for p in &points {
        table.push(vec![num(p.d1), num(p.d2), num(p.s_max)]);
    }
    let payload = json!({ "points": points });
    out.emit(&Report { stem: "decohere", manifest, table, payload })
}

fn temperature(args: &TemperatureArgs, seed: u64, out: Out) -> Result<()> {
    let query = TemperatureQuery::new(args.mass_number, args.dx)?;
    let kelvin = temperature_threshold(&query);
    let manifest = RunManifest::new("temperature", seed)
        .param("mass-number", num(args.mass_number))
        .param("dx", num(args.dx));
    let mut table = Table::new(vec!["massNumber", "deltaX", "thresholdK"]);
    table.push(vec![num(args.mass_number), num(args.dx), num(kelvin)]);
    let payload = json!({ "query": query, "thresholdK": kelvin });
    out.emit(&Report { stem: "temperature", manifest, table, payload })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_amplitudes() {
        assert_eq!(amplitude4(Complex64::new(0.6, -0.0)), "0.6000");
        assert_eq!(amplitude4(Complex64::new(-0.8, 1e-17)), "-0.8000");
        assert_eq!(amplitude4(Complex64::new(0.0, -0.8)), "0.0000-0.8000i");
        assert_eq!(fixed4(-1e-9), "0.0000");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
        assert_eq!(CliError::Domain(dualent_core::Error::Config(String::new())).exit_code(), 2);
        assert_eq!(CliError::Domain(dualent_core::Error::ZeroState).exit_code(), 3);
    }
}
