//! Command-line front end. All numeric output is deterministic: structured
//! text is bit-identical for identical arguments and CSV fields carry 17
//! significant digits.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::duality::{check_n_preserved, dual_potential};
use crate::error::{Error, Result};
use crate::phase_shift::compute_phase_shift;
use crate::potentials::{NIndex, Potential};
use crate::radial_solver::{integrate, RadialProblem};
use crate::tortoise::{remainder_potential, TortoiseMap};
use crate::validation;

/// Exit codes: 0 success, 2 parse error, 3 domain error, 4 I/O error.
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Parser)]
#[command(
    name = "torsc",
    version,
    about = "Tortoise-coordinate tools for long-range radial potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

/// A potential literal is a JSON list of terms, `[{"c": 2.0, "p": -1.0}]`
/// meaning 2/r, or a builtin `inv_log:<strength>` / `log:<strength>`.
#[derive(Subcommand)]
enum Command {
    /// Classify a potential: regime and truncation index N.
    Classify { potential: String },
    /// Tabulate the tortoise map r -> r* over a radial grid (CSV).
    Tortoise {
        potential: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Integrate the radial equation and tabulate (r, u, du) over a grid (CSV).
    Solve {
        potential: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Extract the scattering phase shift delta_l at one k or over a k-sweep.
    PhaseShift {
        potential: String,
        /// Single wavenumber; ignored when --k-sweep is given.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Sweep wavenumbers: START STOP COUNT (linear spacing).
        #[arg(long, num_args = 3, value_names = ["START", "STOP", "COUNT"])]
        k_sweep: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        l: u32,
        /// Matching radius for the asymptotic fit.
        #[arg(long, default_value_t = 100.0)]
        rmatch: f64,
    },
    /// Report the Newton dual of a vanishing power-law potential.
    Dual {
        potential: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
    /// Run the oracle suite; exits 0 iff every check passes.
    Validate,
}

#[derive(Args)]
struct GridArgs {
    /// Radial grid: START STOP COUNT.
    #[arg(long, num_args = 3, value_names = ["START", "STOP", "COUNT"], default_values = ["1", "100", "100"])]
    grid: Vec<String>,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    spacing: Spacing,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Spacing {
    Linear,
    Geometric,
}

impl Spacing {
    fn name(self) -> &'static str {
        match self {
            Spacing::Linear => "linear",
            Spacing::Geometric => "geometric",
        }
    }
}

/// 17 significant digits, the canonical numeric field format.
fn num(x: f64) -> String {
    format!("{:.16e}", x)
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
}

fn parse_count(s: &str, what: &str) -> Result<usize> {
    let n: usize = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} `{s}`")))?;
    if n == 0 {
        return Err(Error::Parse(format!("{what} must be >= 1")));
    }
    Ok(n)
}

impl GridArgs {
    fn points(&self) -> Result<(f64, f64, usize, Vec<f64>)> {
        let start = parse_f64(&self.grid[0], "grid start")?;
        let stop = parse_f64(&self.grid[1], "grid stop")?;
        let count = parse_count(&self.grid[2], "grid count")?;
        if !(start > 0.0 && stop >= start) {
            return Err(Error::Parse(format!(
                "grid must satisfy 0 < start <= stop, got {start} {stop}"
            )));
        }
        if count > 1 && stop == start {
            return Err(Error::Parse(
                "grid with count > 1 needs start < stop".into(),
            ));
        }
        let pts = (0..count)
            .map(|i| {
                if count == 1 {
                    start
                } else {
                    let t = i as f64 / (count - 1) as f64;
                    match self.spacing {
                        Spacing::Linear => start + t * (stop - start),
                        Spacing::Geometric => start * (stop / start).powf(t),
                    }
                }
            })
            .collect();
        Ok((start, stop, count, pts))
    }
}

fn regime_name(class: &crate::potentials::PotentialClass) -> &'static str {
    match class.regime {
        crate::potentials::Regime::Vanishing => "Vanishing",
        crate::potentials::Regime::Constant => "Constant",
        crate::potentials::Regime::Rising => "Rising",
    }
}

fn n_index_field(n: NIndex) -> String {
    match n {
        NIndex::Finite(n) => n.to_string(),
        NIndex::Marginal => "marginal".into(),
    }
}

fn run_classify(potential: &str) -> Result<String> {
    let pot = Potential::parse(potential)?;
    let class = pot.classify();
    let mut out = String::new();
    writeln!(out, "schema: 1").unwrap();
    writeln!(out, "command: classify").unwrap();
    writeln!(out, "potential: {}", pot.to_literal()).unwrap();
    writeln!(out, "regime: {}", regime_name(&class)).unwrap();
    writeln!(out, "n_index: {}", n_index_field(class.n_index)).unwrap();
    match class.leading {
        Some(t) => {
            writeln!(out, "leading_c: {}", num(t.coefficient)).unwrap();
            writeln!(out, "leading_p: {}", num(t.exponent)).unwrap();
        }
        None => writeln!(out, "leading: none").unwrap(),
    }
    Ok(out)
}

fn run_tortoise(potential: &str, k: f64, grid: &GridArgs) -> Result<String> {
    let pot = Potential::parse(potential)?;
    let (start, stop, count, pts) = grid.points()?;
    let map = TortoiseMap::build(&pot, k)?;
    let class = pot.classify();
    let mut out = String::new();
    writeln!(out, "# schema: 1").unwrap();
    writeln!(out, "# command: tortoise").unwrap();
    writeln!(out, "# potential: {}", pot.to_literal()).unwrap();
    writeln!(out, "# k: {}", num(k)).unwrap();
    writeln!(
        out,
        "# grid: {start} {stop} {count} {}",
        grid.spacing.name()
    )
    .unwrap();
    writeln!(out, "# validity_floor: {}", num(map.validity_floor)).unwrap();
    writeln!(out, "r,r_star,dr_star_dr,remainder_potential").unwrap();
    for &r in &pts {
        let rstar = map.eval(r)?;
        let drstar = map.derivative(r)?;
        // the short-range remainder needs a power sum with finite N
        let rem = match (pot.as_power_sum(), class.n_index) {
            (Some(spec), NIndex::Finite(n)) => remainder_potential(spec, k, n, r)?,
            _ => f64::NAN,
        };
        writeln!(
            out,
            "{},{},{},{}",
            num(r),
            num(rstar),
            num(drstar),
            num(rem)
        )
        .unwrap();
    }
    Ok(out)
}

fn run_solve(potential: &str, k: f64, l: u32, grid: &GridArgs) -> Result<String> {
    let pot = Potential::parse(potential)?;
    let (start, stop, count, pts) = grid.points()?;
    let problem = RadialProblem::new(pot.clone(), k, l, stop).with_checkpoints(&pts);
    let solution = integrate(&problem)?;
    let mut out = String::new();
    writeln!(out, "# schema: 1").unwrap();
    writeln!(out, "# command: solve").unwrap();
    writeln!(out, "# potential: {}", pot.to_literal()).unwrap();
    writeln!(out, "# k: {}", num(k)).unwrap();
    writeln!(out, "# l: {l}").unwrap();
    writeln!(
        out,
        "# grid: {start} {stop} {count} {}",
        grid.spacing.name()
    )
    .unwrap();
    writeln!(
        out,
        "# normalization: regular solution with u(r0) = r0^(l+1) near r0 = {}",
        num(problem.r_start)
    )
    .unwrap();
    writeln!(out, "r,u,du").unwrap();
    for &r in &pts {
        let (u, du) = solution.sample(r).ok_or(Error::OutOfDomain {
            r,
            floor: problem.r_start,
        })?;
        writeln!(out, "{},{},{}", num(r), num(u), num(du)).unwrap();
    }
    Ok(out)
}

fn run_phase_shift(
    potential: &str,
    k: f64,
    k_sweep: Option<&[String]>,
    l: u32,
    rmatch: f64,
) -> Result<String> {
    let pot = Potential::parse(potential)?;
    let ks: Vec<f64> = match k_sweep {
        Some(triple) => {
            let start = parse_f64(&triple[0], "k-sweep start")?;
            let stop = parse_f64(&triple[1], "k-sweep stop")?;
            let count = parse_count(&triple[2], "k-sweep count")?;
            if !(start > 0.0 && stop >= start) {
                return Err(Error::Parse(format!(
                    "k-sweep must satisfy 0 < start <= stop, got {start} {stop}"
                )));
            }
            (0..count)
                .map(|i| {
                    if count == 1 {
                        start
                    } else {
                        start + (stop - start) * i as f64 / (count - 1) as f64
                    }
                })
                .collect()
        }
        None => vec![k],
    };
    // fan out over k, then emit in (k, l) order
    let results: Vec<Result<_>> = ks
        .par_iter()
        .map(|&k| compute_phase_shift(&pot, k, l, rmatch))
        .collect();
    let mut out = String::new();
    writeln!(out, "schema: 1").unwrap();
    writeln!(out, "command: phase-shift").unwrap();
    writeln!(out, "potential: {}", pot.to_literal()).unwrap();
    writeln!(out, "l: {l}").unwrap();
    writeln!(out, "rmatch: {}", num(rmatch)).unwrap();
    for (k, res) in ks.iter().zip(results) {
        let res = res?;
        writeln!(out, "record:").unwrap();
        writeln!(out, "  k: {}", num(*k)).unwrap();
        writeln!(out, "  l: {l}").unwrap();
        writeln!(out, "  delta: {}", num(res.delta)).unwrap();
        writeln!(out, "  amplitude: {}", num(res.amplitude)).unwrap();
        writeln!(out, "  residual: {}", num(res.residual)).unwrap();
        writeln!(out, "  drift: {}", num(res.drift)).unwrap();
        writeln!(out, "  branch: {}", res.branch).unwrap();
    }
    Ok(out)
}

fn run_dual(potential: &str, k: f64) -> Result<String> {
    let pot = Potential::parse(potential)?;
    let spec = pot
        .as_power_sum()
        .ok_or_else(|| Error::InvalidPotential("dual needs a power-sum potential".into()))?;
    let map = dual_potential(spec, k)?;
    let (n0, n1, same) = check_n_preserved(spec, k)?;
    let mut out = String::new();
    writeln!(out, "schema: 1").unwrap();
    writeln!(out, "command: dual").unwrap();
    writeln!(out, "potential: {}", pot.to_literal()).unwrap();
    writeln!(out, "k: {}", num(k)).unwrap();
    writeln!(out, "a: {}", num(map.a)).unwrap();
    writeln!(out, "big_a: {}", num(map.big_a)).unwrap();
    writeln!(
        out,
        "dual_potential: {}",
        Potential::PowerSum(map.dual.clone()).to_literal()
    )
    .unwrap();
    writeln!(out, "kappa: {}", num(map.kappa)).unwrap();
    writeln!(
        out,
        "kappa_sq_sign: {}",
        if map.kappa_sq_sign >= 0.0 { "+" } else { "-" }
    )
    .unwrap();
    writeln!(out, "n_original: {n0}").unwrap();
    writeln!(out, "n_dual: {n1}").unwrap();
    writeln!(out, "n_preserved: {}", if same { "yes" } else { "no" }).unwrap();
    Ok(out)
}

fn run_validate() -> (String, bool) {
    let checks = validation::run_all();
    let mut out = String::new();
    writeln!(out, "schema: 1").unwrap();
    writeln!(out, "command: validate").unwrap();
    let mut all = true;
    for c in &checks {
        all &= c.passed;
        writeln!(
            out,
            "{} {} error={} tolerance={}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            num(c.error),
            num(c.tolerance)
        )
        .unwrap();
    }
    writeln!(out, "result: {}", if all { "pass" } else { "FAIL" }).unwrap();
    (out, all)
}

fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidPotential(_) => EXIT_PARSE,
        _ => EXIT_DOMAIN,
    }
}

fn emit(output: Option<&PathBuf>, content: &str) -> i32 {
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, content) {
                eprintln!("error: Io: {e}");
                return EXIT_IO;
            }
            0
        }
        None => {
            use std::io::Write;
            if std::io::stdout().write_all(content.as_bytes()).is_err() {
                return EXIT_IO;
            }
            0
        }
    }
}

/// Parse arguments, dispatch, and return the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify { potential } => run_classify(potential),
        Command::Tortoise { potential, k, grid } => run_tortoise(potential, *k, grid),
        Command::Solve {
            potential,
            k,
            l,
            grid,
        } => run_solve(potential, *k, *l, grid),
        Command::PhaseShift {
            potential,
            k,
            k_sweep,
            l,
            rmatch,
        } => run_phase_shift(potential, *k, k_sweep.as_deref(), *l, *rmatch),
        Command::Dual { potential, k } => run_dual(potential, *k),
        Command::Validate => {
            let (content, all_passed) = run_validate();
            let code = emit(cli.output.as_ref(), &content);
            return if code != 0 {
                code
            } else if all_passed {
                0
            } else {
                1
            };
        }
    };
    match result {
        Ok(content) => emit(cli.output.as_ref(), &content),
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}
