use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mft::diagnostics::rate_harness;
use mft::engine::{RunRecord, StopReason};
use mft::grp::Jump;
use mft::io::{self, DiagnosticsReport, Frame, OutputSection, RunConfig};
use mft::scenarios::{self, cycle, Scenario};
use mft::{MftError, Result, State, System};

#[derive(Parser)]
#[command(name = "mft", version, about = "Modified front tracking for the p-system and Lagrangian gas dynamics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a scenario or config file to its end time and write all artifacts.
    Run(RunArgs),
    /// Solve one Riemann problem and print the middle state and waves.
    Riemann(RiemannArgs),
    /// Cycle closure analysis: critical strength, scaling, β exponent.
    Cycle(CycleArgs),
    /// ε sweep of the sup-in-time residual with a log-log fit.
    Rate(RateArgs),
    /// Run and write only the front plot.
    Plot(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Nothing here draws random numbers; with this flag the run is repeated
    /// and the two event logs are compared.
    #[arg(long)]
    seed_free: bool,
    #[arg(long, value_enum)]
    frame: Option<Frame>,
}

#[derive(Args)]
struct RiemannArgs {
    /// `p,u` or `p,u,s`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    left: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    right: Option<Vec<f64>>,
    /// Take the Riemann data of a registry scenario instead.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, default_value_t = false)]
    euler: bool,
    #[arg(long, default_value_t = 1.4)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
}

#[derive(Args)]
struct CycleArgs {
    #[arg(long, default_value_t = 1.4)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long, default_value_t = 1.0)]
    z0: f64,
    /// Report the cycle at this strength instead of the bifurcation scan.
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long, default_value = "sod_like")]
    scenario: String,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    epsilons: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &MftError) -> u8 {
    match e {
        MftError::Config(_) | MftError::Io(_) => 2,
        MftError::Vacuum(_) => 3,
        MftError::EventBudgetExceeded(_) => 4,
        _ => 5,
    }
}

fn load(args: &RunArgs) -> Result<(Scenario, OutputSection)> {
    let (mut s, mut out) = match (&args.config, &args.scenario) {
        (Some(path), name) => {
            let mut rc = RunConfig::load(path)?;
            if let Some(name) = name {
                rc.scenario = io::config::ScenarioSection { name: Some(name.clone()), ..Default::default() };
            }
            let base = path.parent().unwrap_or(Path::new("."));
            (rc.resolve(base)?, rc.output)
        }
        (None, Some(name)) => (scenarios::scenario(name, args.epsilon.unwrap_or(0.05))?, OutputSection::default()),
        (None, None) => return Err(MftError::Config("give --config or --scenario".into())),
    };
    if let Some(e) = args.epsilon {
        s.config.epsilon = e;
    }
    if let Some(t) = args.t_end {
        s.config.t_end = t;
    }
    if let Some(d) = &args.out {
        out.dir = d.clone();
    }
    if let Some(f) = args.frame {
        out.frame = f;
    }
    s.config.validate()?;
    Ok((s, out))
}

fn simulate(s: &Scenario, seed_free: bool) -> Result<RunRecord> {
    let rec = s.run()?;
    if seed_free {
        let again = s.run()?;
        if again.events != rec.events || again.final_sequence != rec.final_sequence {
            return Err(MftError::Invariant("two identical runs differ".into()));
        }
    }
    Ok(rec)
}

fn stop_status(rec: &RunRecord) -> Result<()> {
    match &rec.stop {
        StopReason::EndTime => Ok(()),
        StopReason::Budget => Err(MftError::EventBudgetExceeded(rec.config.max_events)),
        StopReason::Failed(e) => Err(e.clone()),
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let (s, out) = load(args)?;
    let rec = simulate(&s, args.seed_free)?;
    let a = io::write_run(&s, &rec, &out)?;
    println!("{}: {} events, t = {}, stop = {}", s.name, rec.event_count(), rec.t_final, rec.stop.label());
    println!("wrote {}", a.events.parent().unwrap_or(Path::new(".")).display());
    stop_status(&rec)
}

fn cmd_plot(args: &RunArgs) -> Result<()> {
    let (s, out) = load(args)?;
    let rec = simulate(&s, args.seed_free)?;
    std::fs::create_dir_all(&out.dir)?;
    let path = out.dir.join("frontplot.svg");
    std::fs::write(&path, io::front_plot(&rec, &s.name))?;
    println!("wrote {} ({} segments)", path.display(), rec.segments.len());
    stop_status(&rec)
}

fn state_arg(v: &[f64]) -> Result<State> {
    let w = match v {
        [p, u] => State::new(*p, *u),
        [p, u, s] => State::with_entropy(*p, *u, *s),
        _ => return Err(MftError::Config("a state is p,u or p,u,s".into())),
    };
    w.check().map_err(|e| MftError::Config(e.to_string()))?;
    Ok(w)
}

fn cmd_riemann(args: &RiemannArgs) -> Result<()> {
    let (sys, l, r) = match (&args.scenario, &args.left, &args.right) {
        (Some(name), _, _) => {
            let s = scenarios::scenario(name, 0.05)?;
            let (l, r) = (s.data.leftmost(), s.data.rightmost());
            (s.system(), l, r)
        }
        (None, Some(l), Some(r)) => {
            let sys = if args.euler { System::euler(args.gamma) } else { System::psystem(args.gamma, args.k) };
            (sys, state_arg(l)?, state_arg(r)?)
        }
        _ => return Err(MftError::Config("give --scenario or both --left and --right".into())),
    };
    let sol = sys.solve_grp(l, r, &[0.0; 3])?;
    let m = sol.middle();
    println!("p_mid = {:.17e}", m.p);
    println!("u_mid = {:.17e}", m.u);
    println!("family kind strength speed lambda_left lambda_right");
    for k in 0..sys.n() {
        let (wl, wr) = (sol.states[k], sol.states[k + 1]);
        match sol.kinds[k] {
            None => println!("{k} none 0 - - -"),
            Some(kind) => {
                let j = Jump::new(&sys, k, kind, wl, wr);
                println!(
                    "{k} {} {:.17e} {:.17e} {:.17e} {:.17e}",
                    kind.label(),
                    j.strength,
                    j.speed,
                    sys.lambda(k, &wl),
                    sys.lambda(k, &wr)
                );
            }
        }
    }
    Ok(())
}

fn cmd_cycle(args: &CycleArgs) -> Result<()> {
    if let Some(zeta) = args.zeta {
        let c = cycle::build_cycle(args.z0, zeta, args.gamma, args.k)?;
        println!("z5 - z0 = {:.12e} ({})", c.z5_minus_z0, if c.closed { "closed" } else { "open" });
        println!("beta = {:.12e}", c.beta);
        if let Some(m) = cycle::mach_proxy(&c) {
            println!("shock |sigma|/c = {m:.6}");
        }
        return write_json(args.out.as_deref(), "cycle.json", &to_json(&c)?);
    }
    let cs = cycle::critical_strength(args.z0, args.gamma, args.k)?;
    let cs2 = cycle::critical_strength(2.0 * args.z0, args.gamma, args.k)?;
    let zetas: Vec<f64> = (0..7).map(|i| args.z0 * 1e-6 * 10f64.powf(0.5 * i as f64)).collect();
    let slope = cycle::beta_exponent(args.z0, args.gamma, args.k, &zetas)?;
    let c = cycle::build_cycle(args.z0, scenarios::CYCLE_MARGIN * cs.zeta_star, args.gamma, args.k)?;
    println!("zeta_* = {:.12e} (zeta_*/z0 = {:.6})", cs.zeta_star, cs.zeta_star / args.z0);
    if cs.sign_changes.len() > 1 {
        println!("warning: {} sign changes of z5 - z0 in the scan", cs.sign_changes.len());
    }
    println!("zeta_*(2 z0) / zeta_*(z0) = {:.12}", cs2.zeta_star / cs.zeta_star);
    println!("beta exponent = {slope:.6}");
    if let Some(m) = cycle::mach_proxy(&c) {
        println!("shock |sigma|/c at {} zeta_* = {m:.6}", scenarios::CYCLE_MARGIN);
    }
    let summary = serde_json::json!({
        "zeta_star": cs.zeta_star,
        "sign_changes": cs.sign_changes,
        "scaling_ratio": cs2.zeta_star / cs.zeta_star,
        "beta_exponent": slope,
        "mach_proxy": cycle::mach_proxy(&c),
        "cycle_at_zeta_star": c,
    });
    write_json(args.out.as_deref(), "cycle.json", &to_json(&summary)?)
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| MftError::Io(e.to_string()))
}

fn write_json(dir: Option<&Path>, name: &str, text: &str) -> Result<()> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn cmd_rate(args: &RateArgs) -> Result<()> {
    let base = scenarios::scenario(&args.scenario, 0.1)?;
    let build = |e: f64| scenarios::scenario(&args.scenario, e)?.run();
    let fit = rate_harness(build, &args.epsilons)?;
    for (e, r) in fit.epsilons.iter().zip(&fit.sup_residuals) {
        println!("epsilon = {e:<8} sup |R| = {r:.6e}");
    }
    match fit.slope {
        Some(s) => println!("slope = {s:.4}"),
        None => println!("slope undefined: every run is exact"),
    }
    let finest = args.epsilons.iter().copied().fold(f64::INFINITY, f64::min);
    let rec = scenarios::scenario(&base.name, finest)?.run()?;
    let mut report = DiagnosticsReport::from_run(&rec);
    report.rate_fit = Some(fit);
    write_json(args.out.as_deref(), "diagnostics.json", &report.to_json()?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Riemann(a) => cmd_riemann(a),
        Cmd::Cycle(a) => cmd_cycle(a),
        Cmd::Rate(a) => cmd_rate(a),
        Cmd::Plot(a) => cmd_plot(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
