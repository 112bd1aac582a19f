mod spec;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use buhmann::certify::{self, Verdict};
use buhmann::interp::{self, PointSet};
use buhmann::smoothness::{self, Order};
use buhmann::spectral::{Backend, SpectralDensity};
use buhmann::{reproduce, DiffParams, Exec, RadialKernel};
use clap::{Parser, Subcommand, ValueEnum};

use spec::{Grid, KernelSpec};

const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser)]
#[command(
    name = "buhmann",
    version,
    about = "Compactly supported radial kernels: values, spectra, positive-definiteness and smoothness"
)]
#[command(
    after_help = "Kernel specs: buhmann:delta=,mu=,nu=,alpha=  h:mu=,nu=  wendland:mu=,k=  askey:mu=  diff:mu=,nu=,eps=,b1=,b2=\n\
Set BUHMANN_TOL to override the default relative tolerance (1e-12)."
)]
struct Cli {
    /// Run grid work on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Quad,
    Closed,
    Auto,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Quad => Backend::Quadrature,
            BackendArg::Closed => Backend::ClosedForm1F2,
            BackendArg::Auto => Backend::Auto,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Kernel values on a grid as CSV `x,value`.
    Eval {
        spec: KernelSpec,
        /// min:max:n [default: 0:support:256]
        #[arg(long)]
        grid: Option<Grid>,
        /// Divide by the value at the origin.
        #[arg(long)]
        normalize: bool,
    },
    /// Hankel transform in R^m as CSV `t,density`.
    Spectrum {
        spec: KernelSpec,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// min:max:n [default: 0:40:256]
        #[arg(long)]
        grid: Option<Grid>,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
        /// Emit quadrature and closed form side by side with their relative deviation.
        #[arg(long)]
        check_cross: bool,
    },
    /// Positive definiteness of the difference kernel for all b2 > b1 > 0
    /// (exit 0 certified, 1 refuted, 2 undecided).
    Certify {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Fixed ratio b2/b1 > 1 instead of all ratios.
        #[arg(long)]
        a: Option<f64>,
        /// Escalate an undecided rule verdict to numeric checks.
        #[arg(long)]
        numeric: bool,
        /// Also check Gram matrices on this many random points (needs --b1, --b2).
        #[arg(long)]
        gram: Option<usize>,
        #[arg(long, default_value_t = 0.75)]
        b1: f64,
        #[arg(long, default_value_t = 1.0)]
        b2: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Differentiability order of the difference kernel at the origin.
    Smoothness {
        /// A `diff:` kernel spec; alternatively give --mu, --nu, --eps.
        spec: Option<KernelSpec>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0.75)]
        b1: f64,
        #[arg(long, default_value_t = 1.0)]
        b2: f64,
        /// Also estimate the order by finite differences.
        #[arg(long)]
        estimate: bool,
        #[arg(long, default_value_t = smoothness::DEFAULT_MAX_ORDER)]
        max_order: u32,
    },
    /// Wendland functions and the smoothness gained by the difference operator, as CSV.
    Table1,
    /// Normalized Wendland and difference curves for k = 0, 1, 2 as CSV.
    Figure1 {
        /// Dimension entering mu = (d+1)/2 + k + 3.
        #[arg(long, default_value_t = 1)]
        d: u32,
        /// Write PREFIX_k0.csv, PREFIX_k1.csv, PREFIX_k2.csv instead of standard output.
        #[arg(long)]
        out_prefix: Option<PathBuf>,
    },
    /// Kernel interpolation of CSV data `x1,...,xm,value`; prints weights or predictions.
    Interp {
        points: PathBuf,
        spec: KernelSpec,
        /// CSV `x1,...,xm` of query points.
        #[arg(long)]
        predict: Option<PathBuf>,
        /// Skip the positive-definiteness rule check for difference kernels.
        #[arg(long)]
        force: bool,
    },
    /// Quick internal consistency checks.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_out() -> csv::Writer<io::Stdout> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(io::stdout())
}

fn csv_file(path: &Path) -> Result<csv::Writer<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(f))
}

fn cmd_eval(spec: &KernelSpec, grid: Option<Grid>, normalize: bool, exec: Exec) -> Result<()> {
    let k = spec.kernel()?;
    let grid = grid.unwrap_or(Grid {
        min: 0.0,
        max: k.support(),
        n: 256,
    });
    let xs = grid.points();
    let mut vals = k.eval_grid(&xs, exec)?;
    if normalize {
        let v0 = k.eval(0.0)?;
        if v0 == 0.0 {
            bail!("cannot normalize: kernel vanishes at the origin");
        }
        vals.iter_mut().for_each(|v| *v /= v0);
    }
    let mut w = csv_out();
    w.write_record(["x", "value"])?;
    for (x, v) in xs.iter().zip(vals) {
        w.write_record([fmt_f(*x), fmt_f(v)])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_spectrum(
    spec: &KernelSpec,
    m: u32,
    grid: Option<Grid>,
    backend: Backend,
    cross: bool,
    exec: Exec,
) -> Result<()> {
    let k = spec.kernel()?;
    let ts = grid
        .unwrap_or(Grid {
            min: 0.0,
            max: 40.0,
            n: 256,
        })
        .points();
    let mut w = csv_out();
    if cross {
        let q = SpectralDensity::new(k.clone(), m, Backend::Quadrature)?.eval_grid(&ts, exec)?;
        let c = SpectralDensity::new(k, m, Backend::ClosedForm1F2)?.eval_grid(&ts, exec)?;
        w.write_record(["t", "quadrature", "closed_form", "rel_deviation"])?;
        let mut worst: f64 = 0.0;
        for ((t, a), b) in ts.iter().zip(&q).zip(&c) {
            let scale = a.value.abs().max(b.value.abs());
            let dev = if scale > 0.0 {
                (a.value - b.value).abs() / scale
            } else {
                0.0
            };
            worst = worst.max(dev);
            w.write_record([fmt_f(*t), fmt_f(a.value), fmt_f(b.value), fmt_f(dev)])?;
        }
        w.flush()?;
        eprintln!("max relative deviation: {worst:.3e}");
        return Ok(());
    }
    let vals = SpectralDensity::new(k, m, backend)?.eval_grid(&ts, exec)?;
    w.write_record(["t", "density"])?;
    for (t, v) in ts.iter().zip(&vals) {
        w.write_record([fmt_f(*t), fmt_f(v.value)])?;
    }
    w.flush()?;
    if let Some((t, v)) = ts
        .iter()
        .zip(&vals)
        .find(|(_, v)| v.value < -10.0 * v.error - 1e-14 * vals[0].value.abs())
    {
        eprintln!(
            "negative density: t={t:.9e}, value={:.6e} (error {:.1e}); not positive definite in R^{m}",
            v.value, v.error
        );
    }
    if vals.iter().any(|v| v.fell_back) {
        eprintln!("note: closed form lost precision at some t; quadrature was used there");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_certify(
    mu: f64,
    nu: f64,
    eps: f64,
    m: u32,
    a: Option<f64>,
    numeric: bool,
    gram: Option<usize>,
    b1: f64,
    b2: f64,
    seed: u64,
) -> Result<Verdict> {
    let cert = match a {
        Some(a) => certify::certify_fixed_scale(m, mu, nu, eps, a)?,
        None if numeric => certify::certify_escalating(m, mu, nu, eps)?,
        None => certify::certify_sufficient(m, mu, nu, eps)?,
    };
    println!("{cert}");
    if let Some(n) = gram {
        let d = DiffParams::new(mu, nu, eps, b1, b2)?;
        let g = certify::psd_matrix_check(&d, m, n, seed)?;
        println!("gram check (b1={b1}, b2={b2}):\n{g}");
    }
    Ok(cert.verdict)
}

#[allow(clippy::too_many_arguments)]
fn cmd_smoothness(
    spec: Option<KernelSpec>,
    mu: Option<f64>,
    nu: Option<f64>,
    eps: Option<f64>,
    b1: f64,
    b2: f64,
    estimate: bool,
    max_order: u32,
) -> Result<()> {
    let d = match (spec, mu, nu, eps) {
        (Some(KernelSpec::Diff(d)), None, None, None) => d,
        (Some(s), None, None, None) => bail!("smoothness needs a diff: kernel spec, got {s}"),
        (None, Some(mu), Some(nu), Some(eps)) => DiffParams::new(mu, nu, eps, b1, b2)?,
        _ => bail!("give either a diff: spec or all of --mu, --nu, --eps"),
    };
    println!("kernel: {}", KernelSpec::Diff(d));
    let predicted = smoothness::predict_order(d.mu, d.nu, d.eps);
    match &predicted {
        Ok(o) => {
            println!("predicted: {o}");
            if *o == Order::Infinite {
                println!(
                    "near the origin: even polynomial of degree <= {}",
                    d.mu + 2.0 * d.nu - 2.0
                );
            }
        }
        Err(e) if estimate => println!("predicted: out of scope ({e})"),
        Err(e) => bail!("{e}"),
    }
    if estimate {
        let r = smoothness::smoothness_report(&d, max_order)?;
        println!(
            "estimated: {} (q = {}, orders checked up to {max_order})",
            r.estimated, r.q
        );
        if let Ok(p) = predicted {
            println!("agree: {}", p.agrees_with_estimate(r.estimated, max_order));
        }
    }
    Ok(())
}

fn cmd_table1() -> Result<()> {
    let mut w = csv_out();
    w.write_record(["k", "psi", "D_before", "D_after"])?;
    for r in reproduce::table1()? {
        w.write_record([
            r.k.to_string(),
            r.wendland.to_string(),
            r.before.to_string(),
            r.after.to_string(),
        ])?;
    }
    w.flush()?;
    eprintln!("note: {}", reproduce::TABLE1_NOTE);
    Ok(())
}

const FIGURE_HEADER: [&str; 4] = ["x", "wendland_beta1", "wendland_beta0.75", "difference"];

fn cmd_figure1(d: u32, out_prefix: Option<PathBuf>, exec: Exec) -> Result<()> {
    let panels = reproduce::figure1(d, exec)?;
    match out_prefix {
        Some(prefix) => {
            for p in &panels {
                let path = PathBuf::from(format!("{}_k{}.csv", prefix.display(), p.k));
                let mut w = csv_file(&path)?;
                w.write_record(FIGURE_HEADER)?;
                for i in 0..p.x.len() {
                    w.write_record([
                        fmt_f(p.x[i]),
                        fmt_f(p.wendland_unit[i]),
                        fmt_f(p.wendland_short[i]),
                        fmt_f(p.difference[i]),
                    ])?;
                }
                w.flush()?;
                eprintln!("wrote {} (mu = {})", path.display(), p.mu);
            }
        }
        None => {
            let mut w = csv_out();
            let mut header = vec!["k"];
            header.extend(FIGURE_HEADER);
            w.write_record(header)?;
            for p in &panels {
                for i in 0..p.x.len() {
                    w.write_record([
                        p.k.to_string(),
                        fmt_f(p.x[i]),
                        fmt_f(p.wendland_unit[i]),
                        fmt_f(p.wendland_short[i]),
                        fmt_f(p.difference[i]),
                    ])?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn read_points(path: &Path) -> Result<(PointSet, Option<Vec<f64>>)> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    PointSet::from_csv(f).with_context(|| format!("reading {}", path.display()))
}

fn cmd_interp(points: &Path, spec: &KernelSpec, predict: Option<PathBuf>, force: bool, exec: Exec) -> Result<()> {
    let (ps, values) = read_points(points)?;
    let values = values.context("point file needs a value column")?;
    if let (KernelSpec::Diff(d), false) = (spec, force) {
        let c = certify::certify_sufficient(ps.dim() as u32, d.mu, d.nu, d.eps)?;
        if c.verdict == Verdict::Refuted {
            bail!(
                "{spec} is not positive definite in R^{} ({}); pass --force to try anyway",
                ps.dim(),
                c.rule
            );
        }
    }
    let k = spec.kernel()?;
    let g = interp::build_gram(&ps, &k, exec)?;
    let report = interp::condition_report(&ps, std::slice::from_ref(&k), exec)?[0];
    eprintln!(
        "points: {}, lambda_min: {:.6e}, lambda_max: {:.6e}, condition: {:.6e}, bandwidth: {} ({:?} order), fill: {:.4}",
        ps.len(),
        report.lambda_min,
        report.lambda_max,
        report.condition,
        report.bandwidth,
        g.ordering,
        report.fill
    );
    let weights = interp::solve_interpolate(&g, &values)?;
    let coord_names: Vec<String> = (1..=ps.dim()).map(|i| format!("x{i}")).collect();
    let mut w = csv_out();
    match predict {
        Some(path) => {
            let (qs, _) = read_points(&path)?;
            if qs.dim() != ps.dim() {
                bail!("query points have dimension {}, data has {}", qs.dim(), ps.dim());
            }
            let preds = interp::predict(&ps, &k, &weights, qs.points(), exec)?;
            let mut header = coord_names;
            header.push("prediction".into());
            w.write_record(&header)?;
            for (q, v) in qs.points().iter().zip(preds) {
                let mut row: Vec<String> = q.iter().map(|c| fmt_f(*c)).collect();
                row.push(fmt_f(v));
                w.write_record(&row)?;
            }
        }
        None => {
            let mut header = coord_names;
            header.extend(["value".into(), "weight".into()]);
            w.write_record(&header)?;
            for ((p, v), wt) in ps.points().iter().zip(&values).zip(&weights) {
                let mut row: Vec<String> = p.iter().map(|c| fmt_f(*c)).collect();
                row.push(fmt_f(*v));
                row.push(fmt_f(*wt));
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn check(name: &str, ok: bool, detail: String) -> bool {
    println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn cmd_selftest(seed: u64) -> Result<bool> {
    let mut ok = true;

    let v = RadialKernel::h(2.0, 1.0)?.eval(0.5)?;
    ok &= check("h(2,1) at 0.5", v == 0.125, format!("{v}"));

    let a = RadialKernel::wendland(3.0, 1)?.eval(0.3)?;
    let b = buhmann::operators::montee(&RadialKernel::askey(3.0)?, 0.3)?;
    ok &= check(
        "wendland = montee of askey",
        rel(a, b) < 1e-10,
        format!("rel {:.1e}", rel(a, b)),
    );

    let k = RadialKernel::h(3.0, 1.0)?;
    let q = SpectralDensity::new(k.clone(), 2, Backend::Quadrature)?
        .eval(5.0)?
        .value;
    let c = SpectralDensity::new(k, 2, Backend::ClosedForm1F2)?.eval(5.0)?.value;
    ok &= check(
        "closed form vs quadrature spectrum",
        rel(q, c) < 1e-8,
        format!("rel {:.1e}", rel(q, c)),
    );

    let verdicts = [
        certify::certify_sufficient(1, 4.0, 1.0, 1.0)?.verdict,
        certify::certify_sufficient(1, 10.0, 1.0, 0.5)?.verdict,
        certify::certify_sufficient(2, 4.4, 1.0, 1.0)?.verdict,
    ];
    ok &= check(
        "certification rules",
        verdicts == [Verdict::Certified, Verdict::Refuted, Verdict::Refuted],
        format!("{verdicts:?}"),
    );

    let after: Vec<String> = reproduce::table1()?.iter().map(|r| r.after.to_string()).collect();
    ok &= check("smoothness after difference", after == ["2", "4", "6"], after.join(","));

    let d = DiffParams::new(4.0, 1.0, 1.0, 0.75, 1.0)?;
    let g = certify::psd_matrix_check(&d, 1, 60, seed)?;
    ok &= check(
        "gram matrix of certified kernel",
        g.verdict == Verdict::Certified,
        format!("{g:?}").replace('\n', " "),
    );

    Ok(ok)
}

fn check_tolerance_env() -> Result<()> {
    if let Ok(raw) = std::env::var(buhmann::tolerance::ENV_VAR) {
        let ok = raw.trim().parse::<f64>().is_ok_and(|r| r > 0.0 && r < 1.0);
        if !ok {
            bail!(
                "{} must be a relative tolerance in (0, 1), got {raw:?}",
                buhmann::tolerance::ENV_VAR
            );
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    check_tolerance_env()?;
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    match cli.command {
        Command::Eval { spec, grid, normalize } => cmd_eval(&spec, grid, normalize, exec)?,
        Command::Spectrum {
            spec,
            m,
            grid,
            backend,
            check_cross,
        } => cmd_spectrum(&spec, m, grid, backend.into(), check_cross, exec)?,
        Command::Certify {
            mu,
            nu,
            eps,
            m,
            a,
            numeric,
            gram,
            b1,
            b2,
            seed,
        } => {
            return Ok(match cmd_certify(mu, nu, eps, m, a, numeric, gram, b1, b2, seed)? {
                Verdict::Certified => ExitCode::from(0),
                Verdict::Refuted => ExitCode::from(1),
                Verdict::Undecided => ExitCode::from(2),
            })
        }
        Command::Smoothness {
            spec,
            mu,
            nu,
            eps,
            b1,
            b2,
            estimate,
            max_order,
        } => cmd_smoothness(spec, mu, nu, eps, b1, b2, estimate, max_order)?,
        Command::Table1 => cmd_table1()?,
        Command::Figure1 { d, out_prefix } => cmd_figure1(d, out_prefix, exec)?,
        Command::Interp {
            points,
            spec,
            predict,
            force,
        } => cmd_interp(&points, &spec, predict, force, exec)?,
        Command::Selftest { seed } => {
            if !cmd_selftest(seed)? {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let certify = matches!(cli.command, Command::Certify { .. });
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io::stderr(), "error: {e:#}");
            // Certification reserves 1 and 2 for verdicts.
            ExitCode::from(if certify { 3 } else { 1 })
        }
    }
}
