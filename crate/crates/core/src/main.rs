//! Command-line front end: single-point evaluations, figure-style sweeps,
//! OOK comparison, Monte Carlo runs, and oracle validation. CSV goes to
//! standard output, diagnostics to standard error, so the output composes
//! with external plotters.

use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use dns_helstrom::discrimination::{
    helstrom_closed_form, helstrom_general, helstrom_pure, DiscriminationProblem,
};
use dns_helstrom::error::Error;
use dns_helstrom::fock::choose_dim;
use dns_helstrom::oracle::{
    oracle_commutators, oracle_mean_photons, oracle_noisy_dns, oracle_photon_added_trace,
};
use dns_helstrom::receiver::{kennedy_error, optimal_threshold, simulate};
use dns_helstrom::specfun::log_factorial;
use dns_helstrom::states::{mean_photons, noisy_dns, DnsParams};

#[derive(Parser)]
#[command(name = "dns-helstrom", version, about = "Discrimination of noisy displaced number states")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Error probabilities for one discrimination problem, every applicable method
    Helstrom(PointArgs),
    /// Kennedy receiver error at the analytic (or a forced) threshold
    Kennedy {
        #[command(flatten)]
        point: PointArgs,
        /// Override the counting threshold (default: analytic optimum)
        #[arg(long)]
        n_th: Option<i64>,
    },
    /// Monte Carlo run of the Kennedy receiver
    Simulate {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        n_th: Option<i64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Figure-style parameter sweeps (CSV table)
    Sweep {
        /// Figure id: 1 noiseless MDEP, 2 noisy MDEP, 3 gap sweep, 4 OOK
        #[arg(long)]
        fig: u8,
        #[arg(long, default_value_t = 0.5)]
        p0: f64,
        #[arg(long)]
        workers: Option<usize>,
        /// Emit wall-clock timings (breaks byte-stability across runs)
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
    /// DNS-OOK vs coherent-OOK at equal average energy
    Ook {
        #[arg(long, default_value_t = 1)]
        h_min: u32,
        #[arg(long, default_value_t = 8)]
        h_max: u32,
        #[arg(long = "nt", value_delimiter = ',', default_values_t = [0.1, 0.2, 0.5])]
        nts: Vec<f64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value_t = false)]
        timing: bool,
    },
    /// Oracle-vs-closed-form validation grid
    Verify {
        /// Grid preset: default, quick, or empty
        #[arg(long, default_value = "default")]
        grid: String,
        /// Replace every check tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args, Clone)]
struct PointArgs {
    /// Displacement of hypothesis 1, as re or re,im
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    mu: Complex64,
    /// Displacement of hypothesis 0, as re or re,im
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    xi: Complex64,
    /// Photon-addition count of hypothesis 1
    #[arg(long, default_value_t = 0)]
    k: u32,
    /// Photon-addition count of hypothesis 0
    #[arg(long, default_value_t = 0)]
    h: u32,
    /// Mean thermal photon number (both hypotheses)
    #[arg(long, default_value_t = 0.0)]
    nt: f64,
    /// Prior of hypothesis 0; p1 = 1 - p0
    #[arg(long, default_value_t = 0.5)]
    p0: f64,
    /// Truncation dimension override
    #[arg(long)]
    dim: Option<usize>,
    /// Truncation tail tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.splitn(2, ',');
    let re: f64 = parts
        .next()
        .unwrap()
        .trim()
        .parse()
        .map_err(|e| format!("bad real part: {e}"))?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|e| format!("bad imaginary part: {e}"))?,
        None => 0.0,
    };
    Ok(Complex64::new(re, im))
}

struct AppError {
    code: u8,
    msg: String,
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Integrity(_)
            | Error::NotHermitian { .. }
            | Error::NegativeDiagonal { .. }
            | Error::Truncated { .. } => 3,
            _ => 2,
        };
        AppError { code, msg: e.to_string() }
    }
}

/// 17 significant digits, fixed scientific notation.
fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_default()
}

#[derive(Default)]
struct Row {
    xi: Complex64,
    h: u32,
    nt0: f64,
    mu: Complex64,
    k: u32,
    nt1: f64,
    p0: f64,
    dim: usize,
    pe_pure: Option<f64>,
    pe_general: Option<f64>,
    pe_closed: Option<f64>,
    pe_kennedy: Option<f64>,
    pe_mc: Option<f64>,
    n_th: Option<i64>,
    wall_ms: Option<u128>,
}

const ROW_HEADER: &str =
    "xi_re,xi_im,h,nt0,mu_re,mu_im,k,nt1,p0,dim,pe_pure,pe_general,pe_closed,pe_kennedy,pe_mc,n_th,wall_ms";

impl Row {
    fn emit(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.xi.re,
            self.xi.im,
            self.h,
            self.nt0,
            self.mu.re,
            self.mu.im,
            self.k,
            self.nt1,
            self.p0,
            self.dim,
            opt(self.pe_pure),
            opt(self.pe_general),
            opt(self.pe_closed),
            opt(self.pe_kennedy),
            opt(self.pe_mc),
            self.n_th.map(|n| n.to_string()).unwrap_or_default(),
            self.wall_ms.map(|w| w.to_string()).unwrap_or_default(),
        )
    }
}

struct RowSpec {
    point: PointArgs,
    n_th_override: Option<i64>,
    mc: Option<(u64, u64)>,
    timing: bool,
}

/// One fully cross-checked result row. Every method applicable to the
/// point is computed, and the methods must agree pairwise or the row is
/// rejected with an integrity error.
fn compute_row(spec: &RowSpec) -> Result<Row, AppError> {
    let start = Instant::now();
    let a = &spec.point;
    let state0 = DnsParams::new(a.xi, a.h, a.nt).map_err(AppError::from)?;
    let state1 = DnsParams::new(a.mu, a.k, a.nt).map_err(AppError::from)?;
    let problem = DiscriminationProblem::new(state0, state1, a.p0).map_err(AppError::from)?;
    let dim = match a.dim {
        Some(d) => d,
        None => choose_dim(
            &[problem.state0().clone(), problem.state1().clone()],
            a.tol,
        )
        .map_err(AppError::from)?,
    };
    let mut row = Row {
        xi: problem.state0().mu,
        h: problem.state0().k,
        nt0: problem.state0().nt,
        mu: problem.state1().mu,
        k: problem.state1().k,
        nt1: problem.state1().nt,
        p0: problem.p0(),
        dim,
        ..Row::default()
    };
    row.pe_general = Some(helstrom_general(&problem, dim).map_err(AppError::from)?);
    if problem.is_noiseless() {
        row.pe_pure = Some(helstrom_pure(&problem).map_err(AppError::from)?);
    }
    if problem.equal_displacement() && problem.shared_nt() {
        row.pe_closed = Some(helstrom_closed_form(&problem).map_err(AppError::from)?);
        let n_th = match spec.n_th_override {
            Some(n) => n,
            None => optimal_threshold(&problem, dim - 1).map_err(AppError::from)?,
        };
        row.n_th = Some(n_th);
        row.pe_kennedy = Some(kennedy_error(&problem, n_th, dim).map_err(AppError::from)?);
        if let Some((trials, seed)) = spec.mc {
            row.pe_mc = Some(simulate(&problem, n_th, trials, seed).map_err(AppError::from)?);
        }
    }
    cross_check(&row)?;
    if spec.timing {
        row.wall_ms = Some(start.elapsed().as_millis());
    }
    Ok(row)
}

fn cross_check(row: &Row) -> Result<(), AppError> {
    let general = row.pe_general.expect("general is always computed");
    let fail = |name: &str, value: f64| -> Result<(), AppError> {
        Err(AppError {
            code: 3,
            msg: format!(
                "cross-method disagreement: {name} = {value} vs general = {general} \
                 (xi={},{} h={} mu={},{} k={} nt={} p0={})",
                row.xi.re, row.xi.im, row.h, row.mu.re, row.mu.im, row.k, row.nt1, row.p0
            ),
        })
    };
    if let Some(pure) = row.pe_pure {
        if (pure - general).abs() > 1e-9 {
            return fail("pure", pure);
        }
    }
    if let Some(closed) = row.pe_closed {
        if (closed - general).abs() > 1e-9 {
            return fail("closed", closed);
        }
    }
    Ok(())
}

fn preamble(out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "# dns-helstrom {}", env!("CARGO_PKG_VERSION"))?;
    let args: Vec<String> = std::env::args().skip(1).collect();
    writeln!(out, "# args: {}", args.join(" "))
}

fn emit_rows(specs: Vec<RowSpec>, workers: Option<usize>) -> Result<(), AppError> {
    let rows: Vec<Result<Row, AppError>> = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| AppError { code: 2, msg: e.to_string() })?
            .install(|| specs.par_iter().map(compute_row).collect()),
        None => specs.par_iter().map(compute_row).collect(),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    preamble(&mut out).ok();
    writeln!(out, "{ROW_HEADER}").ok();
    for row in rows {
        writeln!(out, "{}", row?.emit()).ok();
    }
    Ok(())
}

fn point_spec(point: PointArgs) -> RowSpec {
    RowSpec { point, n_th_override: None, mc: None, timing: false }
}

fn sweep_specs(fig: u8, p0: f64, timing: bool) -> Result<Vec<RowSpec>, AppError> {
    let pairs: [(u32, u32); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 3)];
    let deltas: Vec<f64> = (0..=80).map(|i| i as f64 * 0.05).collect();
    let mut specs = Vec::new();
    match fig {
        1 | 2 => {
            let nt = if fig == 1 { 0.0 } else { 0.2 };
            for (k, h) in pairs {
                for &d in &deltas {
                    specs.push(RowSpec {
                        point: PointArgs {
                            mu: Complex64::new(d, 0.0),
                            xi: Complex64::ZERO,
                            k,
                            h,
                            nt,
                            p0,
                            dim: None,
                            tol: 1e-10,
                        },
                        n_th_override: None,
                        mc: None,
                        timing,
                    });
                }
            }
        }
        3 => {
            for k in 0..=2u32 {
                for gap in 0..=6u32 {
                    specs.push(RowSpec {
                        point: PointArgs {
                            mu: Complex64::new(1.0, 0.0),
                            xi: Complex64::new(1.0, 0.0),
                            k,
                            h: k + gap,
                            nt: 0.2,
                            p0,
                            dim: None,
                            tol: 1e-10,
                        },
                        n_th_override: None,
                        mc: None,
                        timing,
                    });
                }
            }
        }
        _ => {
            return Err(AppError {
                code: 2,
                msg: format!("unknown figure id {fig}; use 1, 2, 3 or 4 (4 = ook)"),
            })
        }
    }
    Ok(specs)
}

struct OokPoint {
    h: u32,
    nt: f64,
    timing: bool,
}

struct OokRow {
    h: u32,
    nt: f64,
    alpha: f64,
    pe_dns_closed: f64,
    pe_dns_general: f64,
    pe_coherent: f64,
    wall_ms: Option<u128>,
}

const OOK_HEADER: &str = "h,nt,alpha,pe_dns_closed,pe_dns_general,pe_coherent,wall_ms";

/// One OOK comparison point: ρ(0,h) vs ρ(0,0) against a coherent pair with
/// |α|² = h(n_t+1), which equalizes the prior-averaged mean photon number
/// at p₀ = p₁ = ½.
fn compute_ook(point: &OokPoint) -> Result<OokRow, AppError> {
    let start = Instant::now();
    let nt = point.nt;
    let alpha = (point.h as f64 * (nt + 1.0)).sqrt();
    let dns = DiscriminationProblem::new(
        DnsParams::new(Complex64::ZERO, point.h, nt).map_err(AppError::from)?,
        DnsParams::new(Complex64::ZERO, 0, nt).map_err(AppError::from)?,
        0.5,
    )
    .map_err(AppError::from)?;
    let coherent = DiscriminationProblem::new(
        DnsParams::new(Complex64::new(alpha, 0.0), 0, nt).map_err(AppError::from)?,
        DnsParams::new(Complex64::ZERO, 0, nt).map_err(AppError::from)?,
        0.5,
    )
    .map_err(AppError::from)?;
    let dim_dns = choose_dim(&[dns.state0().clone(), dns.state1().clone()], 1e-10)
        .map_err(AppError::from)?;
    let dim_coh = choose_dim(
        &[coherent.state0().clone(), coherent.state1().clone()],
        1e-10,
    )
    .map_err(AppError::from)?;
    let pe_dns_closed = helstrom_closed_form(&dns).map_err(AppError::from)?;
    let pe_dns_general = helstrom_general(&dns, dim_dns).map_err(AppError::from)?;
    let pe_coherent = helstrom_general(&coherent, dim_coh).map_err(AppError::from)?;
    if (pe_dns_closed - pe_dns_general).abs() > 1e-9 {
        return Err(AppError {
            code: 3,
            msg: format!(
                "cross-method disagreement at h={} nt={}: closed {pe_dns_closed} vs general {pe_dns_general}",
                point.h, nt
            ),
        });
    }
    Ok(OokRow {
        h: point.h,
        nt,
        alpha,
        pe_dns_closed,
        pe_dns_general,
        pe_coherent,
        wall_ms: point.timing.then(|| start.elapsed().as_millis()),
    })
}

fn run_ook(
    h_min: u32,
    h_max: u32,
    nts: &[f64],
    workers: Option<usize>,
    timing: bool,
) -> Result<(), AppError> {
    if h_min < 1 || h_min > h_max {
        return Err(AppError { code: 2, msg: format!("bad h range [{h_min}, {h_max}]") });
    }
    let points: Vec<OokPoint> = nts
        .iter()
        .flat_map(|&nt| (h_min..=h_max).map(move |h| OokPoint { h, nt, timing }))
        .collect();
    let rows: Vec<Result<OokRow, AppError>> = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| AppError { code: 2, msg: e.to_string() })?
            .install(|| points.par_iter().map(compute_ook).collect()),
        None => points.par_iter().map(compute_ook).collect(),
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    preamble(&mut out).ok();
    writeln!(
        out,
        "# energy matching: |alpha|^2 = h*(nt+1) equalizes the prior-averaged mean photon number at p0 = p1 = 1/2"
    )
    .ok();
    writeln!(out, "{OOK_HEADER}").ok();
    for row in rows {
        let r = row?;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.h,
            r.nt,
            sig17(r.alpha),
            sig17(r.pe_dns_closed),
            sig17(r.pe_dns_general),
            sig17(r.pe_coherent),
            r.wall_ms.map(|w| w.to_string()).unwrap_or_default(),
        )
        .ok();
    }
    Ok(())
}

struct Check {
    name: &'static str,
    tol: f64,
    worst: f64,
    at: String,
}

fn verify_checks(grid: &str) -> Result<Vec<Check>, AppError> {
    let (ks, mus, nts, pairs): (Vec<u32>, Vec<Complex64>, Vec<f64>, Vec<(u32, u32)>) = match grid {
        "default" => (
            vec![0, 1, 2, 4],
            vec![
                Complex64::ZERO,
                Complex64::new(1.0, 0.5),
                Complex64::new(2.0, 0.0),
            ],
            vec![0.1, 0.3, 1.0],
            vec![(0, 1), (0, 2), (1, 3), (2, 2)],
        ),
        "quick" => (
            vec![0, 2],
            vec![Complex64::new(1.0, 0.5)],
            vec![0.3],
            vec![(0, 2)],
        ),
        "empty" => return Ok(Vec::new()),
        other => {
            return Err(AppError {
                code: 2,
                msg: format!("unknown grid preset '{other}'; use default, quick or empty"),
            })
        }
    };

    let mut fock_rep = Check { name: "fock-representation", tol: 1e-10, worst: 0.0, at: String::new() };
    let mut mean_ph = Check { name: "mean-photons", tol: 1e-7, worst: 0.0, at: String::new() };
    for &k in &ks {
        for &mu in &mus {
            for &nt in &nts {
                let p = DnsParams::new(mu, k, nt).map_err(AppError::from)?;
                let dim = choose_dim(&[p.clone()], 1e-10).map_err(AppError::from)?;
                let oracle = oracle_noisy_dns(&p, dim).map_err(AppError::from)?;
                let closed = noisy_dns(&p, dim).map_err(AppError::from)?;
                let mut dev = 0.0f64;
                for i in 0..dim {
                    for j in 0..dim {
                        dev = dev.max((oracle.matrix()[(i, j)] - closed.matrix()[(i, j)]).norm());
                    }
                }
                let at = format!("mu={},{} k={k} nt={nt}", mu.re, mu.im);
                if dev > fock_rep.worst {
                    fock_rep.worst = dev;
                    fock_rep.at = at.clone();
                }
                let mdev = (oracle_mean_photons(&oracle) - mean_photons(&p)).abs();
                if mdev > mean_ph.worst {
                    mean_ph.worst = mdev;
                    mean_ph.at = at;
                }
            }
        }
    }

    let mut norm = Check { name: "normalization", tol: 1e-8, worst: 0.0, at: String::new() };
    for &k in &ks {
        for &nt in &nts {
            let tr = oracle_photon_added_trace(k, nt, 128).map_err(AppError::from)?;
            let expected = log_factorial(k as u64).exp() * (nt + 1.0).powi(k as i32);
            let dev = (tr / expected - 1.0).abs();
            if dev > norm.worst {
                norm.worst = dev;
                norm.at = format!("k={k} nt={nt}");
            }
        }
    }

    let mut cross = Check { name: "closed-vs-general", tol: 1e-10, worst: 0.0, at: String::new() };
    for &(k, h) in &pairs {
        for &nt in &nts {
            for mu in [Complex64::ZERO, Complex64::new(1.0, 0.0)] {
                for p0 in [0.5, 0.3] {
                    let problem = DiscriminationProblem::new(
                        DnsParams::new(mu, h, nt).map_err(AppError::from)?,
                        DnsParams::new(mu, k, nt).map_err(AppError::from)?,
                        p0,
                    )
                    .map_err(AppError::from)?;
                    let dim = choose_dim(
                        &[problem.state0().clone(), problem.state1().clone()],
                        1e-10,
                    )
                    .map_err(AppError::from)?;
                    let general = helstrom_general(&problem, dim).map_err(AppError::from)?;
                    let closed = helstrom_closed_form(&problem).map_err(AppError::from)?;
                    let dev = (general - closed).abs();
                    if dev > cross.worst {
                        cross.worst = dev;
                        cross.at = format!("mu={},{} k={k} h={h} nt={nt} p0={p0}", mu.re, mu.im);
                    }
                }
            }
        }
    }

    let comm_dev = oracle_commutators(64).map_err(AppError::from)?;
    let comm = Check { name: "commutators", tol: 1e-8, worst: comm_dev, at: "dim=64".into() };

    Ok(vec![fock_rep, norm, mean_ph, cross, comm])
}

fn run_verify(grid: &str, tol_override: Option<f64>) -> Result<(), AppError> {
    let mut checks = verify_checks(grid)?;
    if let Some(t) = tol_override {
        for c in &mut checks {
            c.tol = t;
        }
    }
    if checks.is_empty() {
        println!("warning: 0 checks performed (empty grid)");
        return Ok(());
    }
    let mut passed = 0usize;
    for c in &checks {
        let ok = c.worst < c.tol;
        println!(
            "{} {} worst={:.3e} tol={:.3e} at {}",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tol,
            c.at
        );
        if ok {
            passed += 1;
        }
    }
    println!("{} checks, {} passed", checks.len(), passed);
    if passed < checks.len() {
        return Err(AppError { code: 1, msg: "verification failed".into() });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.cmd {
        Cmd::Helstrom(point) => emit_rows(vec![point_spec(point)], None),
        Cmd::Kennedy { point, n_th } => emit_rows(
            vec![RowSpec { point, n_th_override: n_th, mc: None, timing: false }],
            None,
        ),
        Cmd::Simulate { point, n_th, trials, seed } => emit_rows(
            vec![RowSpec {
                point,
                n_th_override: n_th,
                mc: Some((trials, seed)),
                timing: false,
            }],
            None,
        ),
        Cmd::Sweep { fig, p0, workers, timing } => {
            if fig == 4 {
                run_ook(1, 8, &[0.1, 0.2, 0.5], workers, timing)
            } else {
                emit_rows(sweep_specs(fig, p0, timing)?, workers)
            }
        }
        Cmd::Ook { h_min, h_max, nts, workers, timing } => {
            run_ook(h_min, h_max, &nts, workers, timing)
        }
        Cmd::Verify { grid, tol } => run_verify(&grid, tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dns-helstrom: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
