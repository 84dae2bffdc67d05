//! `orbit-equidist`: batch front end for the counting experiments, the
//! constant tables and the volume checks. Every output starts with `#`
//! lines recording the version and the resolved parameters.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration
//! error (including a start frame whose orbit is not dense), 3 enumeration
//! cap exceeded.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orbit_equidist::constants::ConstantTable;
use orbit_equidist::enumerate::{BallEnumerator, BallQuery, Group, DEFAULT_CAP};
use orbit_equidist::experiment::{
    density_certificate, default_height, orbit_dump, parse_list, run_sl_experiment, run_sp_experiment,
    ExperimentConfig, DEFAULT_TOL,
};
use orbit_equidist::geometry::Frame;
use orbit_equidist::measures::Region;
use orbit_equidist::volume_lab::{volume_sweep, SWEEP_HEADER};
use orbit_equidist::Error;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "orbit-equidist", version, about = "Lattice orbit counting on frame spaces")]
struct Cli {
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form limit constants for one (n, l).
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Orbit counts in regions against their predictions.
    Count(CountArgs),
    /// Norm-ball volumes in the triangular group against the asymptote.
    Volume {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[command(flatten)]
        radii: Radii,
        /// Floor on the free torus coordinates; omit for the whole ball.
        #[arg(long = "C", allow_hyphen_values = true)]
        c: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Orbit points for plotting, one per line.
    OrbitDump {
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        cap: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Finite-height search for a rational vector in span(v0).
    DensityCheck {
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long)]
        height: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Lattice elements in a norm ball, one row-major matrix per line.
    Enum {
        #[arg(long, default_value = "sl")]
        group: Group,
        #[arg(long)]
        n: usize,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        cap: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct OutArg {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Radii {
    #[arg(long = "T", conflicts_with = "t_grid")]
    t: Option<f64>,
    /// Comma separated, strictly increasing.
    #[arg(long = "T-grid", value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
}

impl Radii {
    fn grid(&self) -> Option<Vec<f64>> {
        self.t.map(|t| vec![t]).or_else(|| self.t_grid.clone())
    }
}

#[derive(Args)]
struct FrameArgs {
    #[arg(long, default_value = "sl")]
    group: Group,
    /// Ambient dimension for SL, half of it for Sp; inferred from v0 when
    /// omitted (one column for SL, Sp(1) for Sp).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// Frame entries column by column, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    v0: String,
}

impl FrameArgs {
    /// `(n, l, entries)`.
    fn resolve(&self) -> Result<(usize, usize, Vec<f64>), Error> {
        let v0 = parse_list(&self.v0, "v0")?;
        let len = v0.len();
        let (n, l) = match (self.group, self.n, self.l) {
            (Group::Sl, Some(n), Some(l)) => (n, l),
            (Group::Sl, Some(n), None) if n > 0 => (n, len / n),
            (Group::Sl, None, l) => {
                let l = l.unwrap_or(1);
                (len / l.max(1), l)
            }
            (Group::Sp, Some(n), _) => (n, n),
            (Group::Sp, None, _) => {
                let n = (1..=6).find(|n| 2 * n * n == len).ok_or_else(|| {
                    Error::Config(format!("{len} entries do not form an isotropic Sp frame"))
                })?;
                (n, n)
            }
            _ => return Err(Error::Config("bad frame shape".into())),
        };
        Ok((n, l, v0))
    }

    fn frame(&self) -> Result<(usize, usize, Frame), Error> {
        let (n, l, v0) = self.resolve()?;
        let ambient = match self.group {
            Group::Sl => n,
            Group::Sp => 2 * n,
        };
        if l == 0 || ambient * l != v0.len() {
            return Err(Error::Config(format!("v0 needs {} entries for n = {n}, l = {l}", ambient * l)));
        }
        Ok((n, l, Frame::new(ambient, l, v0)?))
    }
}

#[derive(Args)]
struct CountArgs {
    /// Experiment file; flags given alongside override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    group: Option<Group>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    v0: Option<String>,
    #[command(flatten)]
    radii: Radii,
    /// Region file: one `box lo hi lo hi …` or `annulus r_min r_max` per
    /// line.
    #[arg(long)]
    region: Option<PathBuf>,
    #[arg(long)]
    covolume: Option<f64>,
    #[arg(long)]
    height: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cap: Option<u64>,
    #[command(flatten)]
    out: OutArg,
}

impl CountArgs {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => Some(ExperimentConfig::parse(&read(p)?)?),
            None => None,
        };
        let group = self.group.or(cfg.as_ref().map(|c| c.group)).unwrap_or(Group::Sl);
        let rebuild = cfg.is_none()
            || self.group.is_some()
            || self.n.is_some()
            || self.l.is_some()
            || self.v0.is_some()
            || self.radii.grid().is_some();
        if rebuild {
            let old = cfg.as_ref();
            let n = self.n.or(old.map(|c| c.n)).ok_or_else(|| Error::Config("missing --n".into()))?;
            let l = match group {
                Group::Sp => n,
                Group::Sl => self.l.or(old.map(|c| c.l)).unwrap_or(1),
            };
            let v0 = match (&self.v0, old) {
                (Some(s), _) => parse_list(s, "v0")?,
                (None, Some(c)) => c.v0.coords().to_vec(),
                (None, None) => return Err(Error::Config("missing --v0".into())),
            };
            let grid = self
                .radii
                .grid()
                .or(old.map(|c| c.t_grid.clone()))
                .ok_or_else(|| Error::Config("missing --T or --T-grid".into()))?;
            let mut fresh = ExperimentConfig::new(group, n, l, &v0, grid)?;
            if let Some(c) = old {
                fresh.regions = c.regions.clone();
                fresh.covolume = c.covolume;
                fresh.seed = c.seed;
                fresh.cap = c.cap;
                fresh.tol = c.tol;
                if c.l == l {
                    fresh.height = c.height;
                }
            }
            cfg = Some(fresh);
        }
        let mut cfg = cfg.expect("config resolved");
        if let Some(p) = &self.region {
            cfg.regions = Region::parse_file(&read(p)?)?;
        }
        if cfg.regions.is_empty() {
            return Err(Error::Config("no regions given (--region or [regions])".into()));
        }
        if let Some(c) = self.covolume {
            cfg.covolume = Some(c);
        }
        if let Some(h) = self.height {
            cfg.height = h;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(c) = self.cap {
            cfg.cap = c;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(p: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
}

/// Formats with 12 significant digits.
fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        format!("{:.*}", (11 - mag).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

struct Output {
    header: Vec<String>,
    body: String,
}

impl Output {
    fn new(command: &str) -> Self {
        Self {
            header: vec![format!("orbit-equidist {VERSION}"), format!("command = {command}")],
            body: String::new(),
        }
    }

    fn write(&self, out: &OutArg) -> Result<(), Error> {
        let mut text = String::new();
        for h in &self.header {
            text.push_str("# ");
            text.push_str(h);
            text.push('\n');
        }
        text.push_str(&self.body);
        match &out.out {
            Some(p) => fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => 3,
            Error::Config(_)
            | Error::InvalidParameter(_)
            | Error::DimensionMismatch(_)
            | Error::DegenerateFrame(_)
            | Error::NotSymplectic(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Constants { n, l, out } => {
            let t = ConstantTable::get(n, l)?;
            let mut o = Output::new("constants");
            o.header.push(format!("n = {n}"));
            o.header.push(format!("l = {l}"));
            o.body.push_str("name,value\n");
            for (k, v) in t.v_k.iter().enumerate() {
                o.body.push_str(&format!("V_{k},{}\n", sig12(*v)));
            }
            for (name, v) in [
                ("d", t.d_nl),
                ("gamma", t.gamma_nl),
                ("a", t.a_nl),
                ("c", t.c_nl),
                ("covolume", t.covolume),
                ("b", t.b_nl),
            ] {
                o.body.push_str(&format!("{name},{}\n", sig12(v)));
            }
            o.write(&out)?;
        }
        Cmd::Count(args) => {
            let cfg = args.resolve()?;
            let report = match cfg.group {
                Group::Sl => run_sl_experiment(&cfg)?,
                Group::Sp => run_sp_experiment(&cfg)?,
            };
            let mut o = Output::new("count");
            o.header.extend(cfg.describe());
            o.header.push(format!("certificate: {}", report.certificate.describe()));
            for f in &report.flags {
                o.header.push(format!("flag: {f}"));
            }
            if report.invalid {
                o.header.push("INVALID: enumeration incomplete, counts are lower bounds".into());
            }
            o.body = report.csv();
            o.write(&args.out)?;
            eprintln!(
                "{} matrices in {:.3} s",
                report.telemetry.matrices,
                report.telemetry.elapsed.as_secs_f64()
            );
            if report.invalid {
                return Err(Failure {
                    code: 3,
                    message: format!("enumeration cap of {} exceeded; partial report written", cfg.cap),
                });
            }
            if !report.dense() {
                return Err(Failure {
                    code: 2,
                    message: format!("orbit not dense: {}", report.certificate.describe()),
                });
            }
        }
        Cmd::Volume { n, l, radii, c, out } => {
            let grid = radii.grid().ok_or_else(|| Error::Config("missing --T or --T-grid".into()))?;
            let c = c.unwrap_or(f64::NEG_INFINITY);
            let rows = volume_sweep(n, l, &grid, c)?;
            let mut o = Output::new("volume");
            o.header.push(format!("n = {n}"));
            o.header.push(format!("l = {l}"));
            o.header.push(format!("C = {c}"));
            o.body = format!("{SWEEP_HEADER}\n");
            for r in rows {
                o.body.push_str(&r.csv());
                o.body.push('\n');
            }
            o.write(&out)?;
        }
        Cmd::OrbitDump { frame, t, cap, out } => {
            let (n, l, v0) = frame.resolve()?;
            let mut cfg = ExperimentConfig::new(frame.group, n, l, &v0, vec![t])?;
            cfg.cap = cap.unwrap_or(DEFAULT_CAP);
            let dump = orbit_dump(&cfg, t)?;
            let mut o = Output::new("orbit-dump");
            o.header.push(format!("group = {}", cfg.group));
            o.header.push(format!("n = {n}"));
            o.header.push(format!("l = {l}"));
            o.header.push(format!("v0 = {}", frame.v0));
            o.header.push(format!("T = {t}"));
            o.header.push(format!("cap = {}", cfg.cap));
            if dump.truncated {
                o.header.push("TRUNCATED: enumeration cap exceeded".into());
            }
            o.body = dump.csv();
            o.write(&out)?;
            if dump.truncated {
                return Err(Failure {
                    code: 3,
                    message: format!("enumeration cap of {} exceeded; dump truncated", cfg.cap),
                });
            }
        }
        Cmd::DensityCheck {
            frame,
            height,
            tol,
            out,
        } => {
            let (n, l, v0) = frame.frame()?;
            let height = height.unwrap_or(default_height(l));
            let cert = density_certificate(&v0, height, tol.unwrap_or(DEFAULT_TOL));
            let mut o = Output::new("density-check");
            o.header.push(format!("group = {}", frame.group));
            o.header.push(format!("n = {n}"));
            o.header.push(format!("l = {l}"));
            o.header.push(format!("v0 = {}", frame.v0));
            o.header.push(format!("height = {height}"));
            o.header.push(format!("tol = {:e}", cert.tol));
            o.body = "witness\n".into();
            match &cert.witness {
                Some(q) => {
                    let q: Vec<String> = q.iter().map(i64::to_string).collect();
                    o.body.push_str(&q.join(","));
                    o.body.push('\n');
                }
                None => o.body.push_str("none\n"),
            }
            o.write(&out)?;
            eprintln!("{}", cert.describe());
        }
        Cmd::Enum { group, n, t, cap, out } => {
            let cap = cap.unwrap_or(DEFAULT_CAP);
            let stream = BallEnumerator::new(BallQuery::new(group, n, t)?)?.with_cap(cap).collect()?;
            let mut o = Output::new("enum");
            o.header.push(format!("group = {group}"));
            o.header.push(format!("n = {n}"));
            o.header.push(format!("T = {t}"));
            o.header.push(format!("cap = {cap}"));
            o.header.push(format!("count = {}", stream.len()));
            for m in &stream {
                o.body.push_str(&m.to_string());
                o.body.push('\n');
            }
            o.write(&out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
