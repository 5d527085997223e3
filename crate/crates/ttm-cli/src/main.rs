mod config;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use config::{format_complex, parse_complex, Flat};
use ttm::entropy;
use ttm::geometry::{self, PerimeterClass};
use ttm::orbit;
use ttm::raster::{self, Mode, Palette, Raster, ShaderConfig, Viewport};
use ttm::regime;
use ttm::Parameter;

#[derive(Parser)]
#[command(name = "ttm", about = "Twisted tent map toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the dynamical regime of a parameter
    Classify(JobArgs),
    /// Compute the perimeter region and its boundary for a parameter
    Perimeter(JobArgs),
    /// Render an escape-time or coded picture of the dynamical plane
    RenderJulia(JobArgs),
    /// Render a parameter-plane picture
    RenderParam(JobArgs),
    /// Sample one forward orbit and write it as CSV
    Orbit(JobArgs),
    /// Estimate the topological entropy from itinerary counts
    Entropy(JobArgs),
    /// Run the named invariant suite; nonzero exit on any failure
    Verify(JobArgs),
}

/// One flexible argument set shared by all subcommands: every value can come
/// from a `key = value` config file, with flags taking precedence.
#[derive(Args, Default)]
struct JobArgs {
    /// Flat key = value config file supplying defaults for the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// Map parameter, written a+bi
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Viewport center, written a+bi
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Viewport width in plane units
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    px_w: Option<String>,
    #[arg(long)]
    px_h: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    /// Escape radius; 0 selects the certified per-parameter radius
    #[arg(long)]
    escape_r: Option<String>,
    /// Visit count that resolves the coded channel
    #[arg(long)]
    coded_bailout: Option<String>,
    /// escape-time | coded | fastest
    #[arg(long)]
    mode: Option<String>,
    /// Parameter-plane picture kind: polygonal-locus | bubbles | layered | coded
    #[arg(long)]
    kind: Option<String>,
    /// Test point for kind=coded, written a+bi
    #[arg(long, allow_hyphen_values = true)]
    test_point: Option<String>,
    /// Vertex-index cap for kind=bubbles
    #[arg(long)]
    n_cap: Option<String>,
    /// Palette file: 256 lines of "r g b"
    #[arg(long)]
    palette: Option<String>,
    /// Output path (PPM for renders, CSV otherwise)
    #[arg(long)]
    out: Option<String>,
    /// Seed for any random draws
    #[arg(long)]
    seed: Option<String>,
    /// Orbit start point, written a+bi (seeded draw when omitted)
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    burn_in: Option<String>,
    /// Itinerary length cap for entropy estimation
    #[arg(long)]
    n_max: Option<String>,
    /// Least-squares window, inclusive
    #[arg(long)]
    window_lo: Option<String>,
    #[arg(long)]
    window_hi: Option<String>,
    /// Grid side length for entropy sampling of complex parameters
    #[arg(long)]
    samples: Option<String>,
    /// Escape pre-filter depth for entropy sampling
    #[arg(long)]
    depth: Option<String>,
}

enum Failure {
    Config(String),
    Runtime(String),
    Verify,
}

type JobResult = Result<(), Failure>;

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure::Config(format!("{e:#}"))
    }
}

impl From<ttm::Error> for Failure {
    fn from(e: ttm::Error) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

/// Effective settings: config file overridden by flags, echoed verbatim
/// into meta sidecars.
struct Job {
    flat: Flat,
}

impl Job {
    fn new(args: &JobArgs) -> Result<Job, Failure> {
        let mut flat = match &args.config {
            Some(path) => Flat::load(path).map_err(|e| Failure::Config(format!("{e:#}")))?,
            None => Flat::default(),
        };
        let overrides: [(&str, &Option<String>); 20] = [
            ("c", &args.c),
            ("center", &args.center),
            ("width", &args.width),
            ("px-w", &args.px_w),
            ("px-h", &args.px_h),
            ("max-iter", &args.max_iter),
            ("escape-r", &args.escape_r),
            ("coded-bailout", &args.coded_bailout),
            ("mode", &args.mode),
            ("kind", &args.kind),
            ("test-point", &args.test_point),
            ("n-cap", &args.n_cap),
            ("palette", &args.palette),
            ("out", &args.out),
            ("seed", &args.seed),
            ("z0", &args.z0),
            ("steps", &args.steps),
            ("burn-in", &args.burn_in),
            ("n-max", &args.n_max),
            ("depth", &args.depth),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                flat.set(key, v.clone());
            }
        }
        if let Some(v) = &args.window_lo {
            flat.set("window-lo", v.clone());
        }
        if let Some(v) = &args.window_hi {
            flat.set("window-hi", v.clone());
        }
        if let Some(v) = &args.samples {
            flat.set("samples", v.clone());
        }
        Ok(Job { flat })
    }

    fn complex(&self, key: &str) -> Result<Option<Complex64>, Failure> {
        match self.flat.get(key) {
            None => Ok(None),
            Some(text) => parse_complex(text)
                .map(Some)
                .map_err(|e| Failure::Config(format!("{key}: {e:#}"))),
        }
    }

    fn require_complex(&self, key: &str) -> Result<Complex64, Failure> {
        self.complex(key)?
            .ok_or_else(|| Failure::Config(format!("missing required value `{key}`")))
    }

    fn number<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, Failure>
    where
        T::Err: std::fmt::Display,
    {
        match self.flat.get(key) {
            None => Ok(default),
            Some(text) => text
                .parse()
                .map_err(|e| Failure::Config(format!("{key}: bad value {text:?}: {e}"))),
        }
    }

    fn mode(&self, default: Mode) -> Result<Mode, Failure> {
        match self.flat.get("mode") {
            None => Ok(default),
            Some("escape-time") => Ok(Mode::EscapeTime),
            Some("coded") => Ok(Mode::Coded),
            Some("fastest") => Ok(Mode::Fastest),
            Some(other) => Err(Failure::Config(format!("mode: unknown value {other:?}"))),
        }
    }

    fn viewport(&self) -> Result<Viewport, Failure> {
        let center = self.complex("center")?.unwrap_or(Complex64::new(0.0, 0.0));
        let width: f64 = self.number("width", 4.0)?;
        let px_w: usize = self.number("px-w", 400)?;
        let px_h: usize = self.number("px-h", 400)?;
        if width <= 0.0 || px_w == 0 || px_h == 0 {
            return Err(Failure::Config("viewport dimensions must be positive".into()));
        }
        Ok(Viewport::new(center, width, px_w, px_h))
    }

    fn shader(&self, default_mode: Mode) -> Result<ShaderConfig, Failure> {
        Ok(ShaderConfig {
            max_iter: self.number("max-iter", 1000u32)?,
            escape_r: self.number("escape-r", 0.0f64)?,
            coded_bailout: self.number("coded-bailout", 120u32)?,
            mode: self.mode(default_mode)?,
        })
    }

    fn palette(&self) -> Result<Palette, Failure> {
        match self.flat.get("palette") {
            None => Ok(Palette::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                Palette::parse(&text).map_err(|e| Failure::Config(format!("palette: {e}")))
            }
        }
    }

    fn out(&self) -> Option<&str> {
        self.flat.get("out")
    }

    fn seed(&self) -> Result<u64, Failure> {
        self.number("seed", 0u64)
    }

    /// Writes the image plus a text sidecar recording the raster's own meta
    /// lines and the effective job configuration.
    fn write_render(&self, raster: &Raster, mode: Mode) -> Result<(), Failure> {
        let Some(out) = self.out() else {
            return Err(Failure::Config("missing required value `out`".into()));
        };
        let palette = self.palette()?;
        let mut file = std::fs::File::create(out)?;
        raster::ppm::write_ppm(raster, &palette, mode, &mut file)?;
        let mut meta = raster.meta_text();
        meta.push_str("# effective job config\n");
        meta.push_str(&self.flat.serialize());
        std::fs::write(format!("{out}.meta"), meta)?;
        println!("wrote {out} and {out}.meta");
        Ok(())
    }
}

fn classify(job: &Job) -> JobResult {
    let c = job.require_complex("c")?;
    print!("{}", regime::report(c));
    let p = Parameter::canonicalize(c);
    if p.r > 1.0 {
        for cert in regime::boundedness_certificates(&p) {
            println!("certificate: {cert}");
        }
    }
    Ok(())
}

fn perimeter(job: &Job) -> JobResult {
    let c = job.require_complex("c")?;
    let p = Parameter::canonicalize(c);
    let rep = geometry::build_perimeter(&p)?;
    let class = match rep.classification {
        PerimeterClass::Polygon => "Polygon",
        PerimeterClass::PolygonWithHoles => "PolygonWithHoles",
        PerimeterClass::RamsHead => "RamsHead",
    };
    println!("c: {}", format_complex(c));
    println!("classification: {class}");
    println!("sides: {}", rep.side_count);
    if rep.zeta.exists {
        println!(
            "crossing: {} on segment {} (mirror hit: {})",
            format_complex(rep.zeta.point),
            rep.zeta.n,
            rep.zeta.via_l_minus1
        );
    } else {
        println!("crossing: none");
    }
    println!("escape regions: {}", rep.s_regions.len());
    println!("truncated: {}", rep.truncated);
    if let Some(out) = job.out() {
        std::fs::write(out, geometry::boundary_to_csv(&rep.outer_boundary))
            .map_err(Failure::from)?;
        println!("wrote {out}");
    }
    Ok(())
}

fn render_julia(job: &Job) -> JobResult {
    let c = job.require_complex("c")?;
    let p = Parameter::canonicalize(c);
    let vp = job.viewport()?;
    let cfg = job.shader(Mode::EscapeTime)?;
    let raster = raster::render_julia(&p, &vp, &cfg)?;
    job.write_render(&raster, cfg.mode)
}

fn render_param(job: &Job) -> JobResult {
    let vp = job.viewport()?;
    let kind = job.flat.get("kind").unwrap_or("polygonal-locus").to_string();
    let (raster, mode) = match kind.as_str() {
        "polygonal-locus" => {
            let cfg = job.shader(Mode::EscapeTime)?;
            (raster::render_param_polygonal_locus(&vp, &cfg), cfg.mode)
        }
        "bubbles" => {
            let n_cap: u32 = job.number("n-cap", 30)?;
            (raster::render_param_bubbles(&vp, n_cap), Mode::EscapeTime)
        }
        "layered" => (raster::render_param_layered(&vp), Mode::EscapeTime),
        "coded" => {
            let cfg = job.shader(Mode::Coded)?;
            let test_point = job.complex("test-point")?.unwrap_or(Complex64::new(0.0, -1.0));
            (raster::render_param_coded(&vp, test_point, &cfg), cfg.mode)
        }
        other => return Err(Failure::Config(format!("kind: unknown value {other:?}"))),
    };
    job.write_render(&raster, mode)
}

fn orbit_cmd(job: &Job) -> JobResult {
    let c = job.require_complex("c")?;
    let p = Parameter::canonicalize(c);
    let steps: u32 = job.number("steps", 10_000)?;
    let burn_in: u32 = job.number("burn-in", 100)?;
    let z0 = match job.complex("z0")? {
        Some(z) => z,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(job.seed()?);
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }
    };
    let sample = orbit::sample_orbit(&p, z0, steps, burn_in)?;
    println!("c: {}", format_complex(c));
    println!("start: {}", format_complex(z0));
    println!("points: {}", sample.points.len());
    println!("escaped: {}", sample.escaped);
    if let Some(out) = job.out() {
        std::fs::write(out, sample.to_csv())?;
        println!("wrote {out}");
    }
    Ok(())
}

fn entropy_cmd(job: &Job) -> JobResult {
    let c = job.require_complex("c")?;
    let p = Parameter::canonicalize(c);
    let n_max: usize = job.number("n-max", 14)?;
    let lo: usize = job.number("window-lo", 6)?;
    let hi: usize = job.number("window-hi", n_max)?;
    let samples: usize = job.number("samples", 512)?;
    let depth: u32 = job.number("depth", 400)?;

    let raw = if p.is_real() {
        match regime::classify(c).tag {
            regime::RegimeTag::RealSegment { endpoints } => {
                entropy::segment_samples(endpoints.0, endpoints.1, samples * samples)
            }
            _ => {
                return Err(Failure::Runtime(
                    "real parameter without a segment regime; no sampling domain".into(),
                ))
            }
        }
    } else {
        let rep = geometry::build_perimeter(&p)?;
        let vs = &rep.outer_boundary.vertices;
        let (mut lo_z, mut hi_z) = (vs[0], vs[0]);
        for v in vs {
            lo_z = Complex64::new(lo_z.re.min(v.re), lo_z.im.min(v.im));
            hi_z = Complex64::new(hi_z.re.max(v.re), hi_z.im.max(v.im));
        }
        entropy::grid_samples(lo_z, hi_z, samples, samples)
    };
    let bounded = entropy::filter_bounded(&p, &raw, depth)?;
    let ic = entropy::itinerary_counts(&p, &bounded, n_max)?;
    let est = entropy::estimate_entropy(&p, &ic, (lo, hi))?;
    println!("c: {}", format_complex(c));
    println!("survivors: {}", ic.survivors);
    println!("slope: {:.6}", est.slope);
    if let Some(t) = est.theoretical {
        println!("theoretical: {t:.6}");
    }
    println!("bound: {:.6}", est.bound);
    if let Some(out) = job.out() {
        std::fs::write(out, entropy::counts_csv(&ic))?;
        println!("wrote {out}");
    }
    Ok(())
}

fn verify(job: &Job) -> JobResult {
    let results = ttm::checks::run_all(job.seed()?);
    print!("{}", ttm::checks::format_results(&results));
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", results.len());
        return Err(Failure::Verify);
    }
    println!("all {} checks passed", results.len());
    Ok(())
}

fn run(cli: Cli) -> JobResult {
    let (args, handler): (&JobArgs, fn(&Job) -> JobResult) = match &cli.command {
        Command::Classify(a) => (a, classify),
        Command::Perimeter(a) => (a, perimeter),
        Command::RenderJulia(a) => (a, render_julia),
        Command::RenderParam(a) => (a, render_param),
        Command::Orbit(a) => (a, orbit_cmd),
        Command::Entropy(a) => (a, entropy_cmd),
        Command::Verify(a) => (a, verify),
    };
    let job = Job::new(args)?;
    handler(&job)
}

fn main() -> ExitCode {
    // Worker-count override; rendering output is schedule-independent, so
    // this only affects speed.
    if let Ok(text) = std::env::var("TTM_THREADS") {
        match text.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: TTM_THREADS must be a positive integer, got {text:?}");
                return ExitCode::from(2);
            }
        }
    }
    let code = match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verify) => ExitCode::from(3),
    };
    let _ = std::io::stdout().flush();
    code
}
