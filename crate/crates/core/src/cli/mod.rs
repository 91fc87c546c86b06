//! Command-line driver.

pub mod pgm;
pub mod registry;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::art::{art_k, art_k_time, Preset, QuadRule, RayQuadSpec};
use crate::error::{ArtError, Result};
use crate::fields::{
    load_grid, sample_grid, save_grid, AbsorptionSpec, GridField, PhaseField, TemporalProfile,
};
use crate::geometry::{make_sphere_grid, BallDomain, Grid3, Point3};
use crate::moments::{
    helmholtz_residual, reconstruct_prop44, volume_potential_grid, MomentRequest, MomentTable,
};
use crate::report::{aimed_samples, max_and_rms, write_csv};
use crate::tensor::SymTensorGridField;

use registry::SuiteConfig;

#[derive(Debug, Parser)]
#[command(
    name = "artkit",
    version,
    about = "Attenuated ray transforms of order k and their moments"
)]
pub struct Cli {
    /// Worker threads; falls back to ARTKIT_THREADS, then all cores.
    #[arg(long, global = true, env = "ARTKIT_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a phantom on a grid and write it as ARTK.
    Phantom(PhantomArgs),
    /// Evaluate u_k at sample points and write CSV.
    Forward(ForwardArgs),
    /// Angular moments E_kp on a grid.
    Moments(MomentsArgs),
    /// Run identity checks and write a CSV report.
    Verify(VerifyArgs),
    /// Recover f from E_20.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Gaussian,
    BallBump,
    Tensor,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    pub kind: Kind,
    /// Center as x,y,z.
    #[arg(long, value_parser = parse_point, default_value = "0,0,0", allow_hyphen_values = true)]
    pub center: Point3,
    /// Gaussian width.
    #[arg(long, default_value_t = 0.11)]
    pub width: f64,
    /// Ball-bump radius.
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    #[arg(long, value_parser = parse_complex, default_value = "1+0i", allow_hyphen_values = true)]
    pub amplitude: Complex64,
    /// Tensor rank for `--kind tensor`.
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    /// Multiply by a gaussian pulse in time with this center.
    #[arg(long)]
    pub pulse_center: Option<f64>,
    #[arg(long, default_value_t = 0.12)]
    pub pulse_width: f64,
}

impl SourceArgs {
    pub fn build(&self) -> Result<PhaseField> {
        let f = match self.kind {
            Kind::Gaussian => PhaseField::gaussian(self.center, self.width, self.amplitude)?,
            Kind::BallBump => PhaseField::ball_bump(self.center, self.radius, self.amplitude)?,
            Kind::Tensor => PhaseField::tensor_generated(registry::tensor_phantom(
                self.rank,
                self.center,
                self.width,
            )?),
            Kind::Zero => PhaseField::zero(),
        };
        match self.pulse_center {
            Some(center) => f.with_time(TemporalProfile::GaussianPulse {
                center,
                width: self.pulse_width,
            }),
            None => Ok(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetName {
    Wave,
    Photo,
}

#[derive(Debug, Clone, Args)]
pub struct AbsorptionArgs {
    /// Order of the transform.
    #[arg(long)]
    pub k: Option<usize>,
    /// Constant absorption a+bi.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    /// wave: k = 1, α = −i·kw. photo: k = 0, α = ε.
    #[arg(long, value_enum, conflicts_with = "alpha")]
    pub preset: Option<PresetName>,
    #[arg(long, default_value_t = 1.0)]
    pub kw: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
}

impl AbsorptionArgs {
    /// (k, α) after preset expansion.
    pub fn resolve(&self, default_alpha: Complex64) -> Result<(usize, AbsorptionSpec)> {
        match self.preset {
            Some(name) => {
                let p = match name {
                    PresetName::Wave => Preset::Wave { kw: self.kw },
                    PresetName::Photo => Preset::Photo { eps: self.eps },
                };
                if self.k.is_some_and(|k| k != p.order()) {
                    return Err(ArtError::arg(format!(
                        "--k conflicts with preset order {}",
                        p.order()
                    )));
                }
                Ok((p.order(), p.absorption()?))
            }
            None => Ok((
                self.k.unwrap_or(0),
                AbsorptionSpec::constant(self.alpha.unwrap_or(default_alpha))?,
            )),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Nodes per axis.
    #[arg(long, default_value_t = 17)]
    pub dims: usize,
    /// Half width of the cubic box.
    #[arg(long = "box", default_value_t = 0.5)]
    pub half: f64,
    /// Box center as x,y,z.
    #[arg(long, value_parser = parse_point, default_value = "0,0,0", allow_hyphen_values = true)]
    pub grid_center: Point3,
}

impl GridArgs {
    pub fn grid(&self) -> Result<Grid3> {
        Grid3::cube(self.grid_center, self.half, self.dims)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PhantomArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Number of time frames; stationary when absent.
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub absorption: AbsorptionArgs,
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub h_ray: Option<f64>,
    /// Peak time of a pulsed source.
    #[arg(long, default_value_t = 1.0)]
    pub t_peak: f64,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Part {
    Re,
    Im,
    Abs,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub absorption: AbsorptionArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0)]
    pub p: usize,
    /// Sphere grid as POLARxAZIMUTH.
    #[arg(long, value_parser = parse_sphere, default_value = "8x16")]
    pub sphere: (usize, usize),
    #[arg(long, default_value_t = 0.02)]
    pub h_ray: f64,
    /// Evaluation time for a pulsed source.
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Midplane slice as 16-bit PGM.
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    /// Tensor component shown in the slice.
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    #[arg(long, value_enum, default_value = "abs")]
    pub part: Part,
    /// Write ΔE_10 − α²E_10 + 4πf per interior node to this ARTK file.
    #[arg(long)]
    pub helmholtz: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Registered identity name or `all`.
    #[arg(long)]
    pub identity: String,
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<Complex64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long, value_parser = parse_sphere)]
    pub sphere: Option<(usize, usize)>,
    #[arg(long)]
    pub h_ray: Option<f64>,
    #[arg(long)]
    pub h_fd: Option<f64>,
    #[arg(long)]
    pub h_t: Option<f64>,
    /// CSV report; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl VerifyArgs {
    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            quick: self.quick,
            seed: self.seed,
            k: self.k,
            p: self.p,
            n: self.n,
            alpha: self.alpha,
            samples: self.samples,
            dims: self.dims,
            sphere: self.sphere,
            h_ray: self.h_ray,
            h_fd: self.h_fd,
            h_t: self.h_t,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructArgs {
    /// E_20 as a stationary scalar ARTK file. Without it E_20 is synthesized
    /// from the phantom and the round-trip error is printed.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_parser = parse_complex, default_value = "0.6+0.2i", allow_hyphen_values = true)]
    pub alpha: Complex64,
    /// Largest accepted relative L² error of the synthetic round trip.
    #[arg(long, default_value_t = 0.1)]
    pub bound: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub residual_csv: Option<PathBuf>,
}

/// Parse "a+bi", "a-bi", "a" or "bi" without whitespace.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(format!("expected a+bi without spaces, got '{s}'"));
    }
    let z: Complex64 = s.parse().map_err(|_| format!("expected a+bi, got '{s}'"))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite value '{s}'"));
    }
    Ok(z)
}

pub fn parse_point(s: &str) -> std::result::Result<Point3, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("bad coordinate '{t}' in '{s}'"))
        })
        .collect::<std::result::Result<_, _>>()?;
    match v.as_slice() {
        [a, b, c] if v.iter().all(|x| x.is_finite()) => Ok(Point3::new(*a, *b, *c)),
        _ => Err(format!("expected x,y,z, got '{s}'")),
    }
}

pub fn parse_sphere(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| format!("expected POLARxAZIMUTH, got '{s}'"))?;
    let n = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| format!("bad count '{t}' in '{s}'"))
    };
    Ok((n(a)?, n(b)?))
}

/// Exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Failed,
}

pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(ArtError::arg("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ArtError::arg(format!("thread pool: {e}")))?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<Outcome> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Phantom(a) => cmd_phantom(&a),
        Command::Forward(a) => cmd_forward(&a),
        Command::Moments(a) => cmd_moments(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn cmd_phantom(a: &PhantomArgs) -> Result<Outcome> {
    let f = a.source.build()?;
    let gf = sample_grid(&f, a.grid.grid()?, a.nt.map(|n| (n, a.dt)))?;
    save_grid(&gf, &a.out)?;
    Ok(Outcome::Ok)
}

pub fn cmd_forward(a: &ForwardArgs) -> Result<Outcome> {
    let f = a.source.build()?;
    let (k, alpha) = a.absorption.resolve(Complex64::new(0.5, 0.3))?;
    let q = match a.h_ray {
        Some(h) => RayQuadSpec::default().with_step(h)?,
        None => RayQuadSpec::default(),
    };
    let samples = aimed_samples(
        a.samples,
        a.seed,
        &BallDomain::unit(),
        0.8,
        &f,
        0.1,
        a.t_peak,
        0.1,
    );
    let timed = f.profile() != TemporalProfile::Off;
    let values: Vec<Complex64> = samples
        .par_iter()
        .map(|s| {
            if timed {
                art_k_time(k, &f, &alpha, s.t, &s.x, &s.xi, &q)
            } else {
                art_k(k, &f, &alpha, &s.x, &s.xi, &q)
            }
        })
        .collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    let csv_err = |e: csv::Error| ArtError::Io(io::Error::other(e));
    w.write_record(["x1", "x2", "x3", "xi1", "xi2", "xi3", "t", "re_u", "im_u"])
        .map_err(csv_err)?;
    for (s, u) in samples.iter().zip(&values) {
        let xi = s.xi.components();
        let t = if timed { s.t } else { 0.0 };
        let row = [
            s.x.0[0], s.x.0[1], s.x.0[2], xi[0], xi[1], xi[2], t, u.re, u.im,
        ];
        w.write_record(row.iter().map(|v| format!("{v:.12e}")))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(Outcome::Ok)
}

pub fn cmd_moments(a: &MomentsArgs) -> Result<Outcome> {
    let f = a.source.build()?;
    let (k, alpha) = a.absorption.resolve(Complex64::new(0.5, 0.3))?;
    let grid = a.grid.grid()?;
    let sgrid = make_sphere_grid(a.sphere.0, a.sphere.1)?;
    let q = RayQuadSpec::default()
        .with_step(a.h_ray)?
        .with_rule(QuadRule::GaussPanel4);
    let req = MomentRequest {
        kmax: k,
        pmax: a.p,
        time: a.time,
        alpha_weighted: false,
    };
    let table = MomentTable::compute(&req, &f, &alpha, &grid, &sgrid, &q)?;
    let m = table.moment_field(k, a.p)?;
    save_grid(&m.to_grid_field(), &a.out)?;
    if let Some(path) = &a.pgm {
        pgm::save_midplane(&m.field, a.component, a.part, path)?;
    }
    if let Some(path) = &a.helmholtz {
        if k != 1 || a.p != 0 {
            return Err(ArtError::arg("--helmholtz needs --k 1 --p 0"));
        }
        let al = alpha
            .as_constant()
            .ok_or_else(|| ArtError::arg("--helmholtz needs constant α"))?;
        let fs = sample_grid(&f, grid, None)?.frame(0);
        let r = helmholtz_residual(&m.field, &fs, al)?;
        let (mx, _) = max_and_rms(r.data.iter().map(|v| v.norm()));
        let scale =
            4.0 * std::f64::consts::PI * fs.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        eprintln!(
            "helmholtz residual max {mx:.6e} relative {:.6e}",
            mx / scale.max(f64::MIN_POSITIVE)
        );
        save_grid(&GridField::stationary(r), path)?;
    }
    Ok(Outcome::Ok)
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    if a.identity != "all" && registry::lookup(&a.identity).is_none() {
        return Err(ArtError::arg(format!(
            "unknown identity '{}'; registered: {}, all",
            a.identity,
            registry::names().join(", ")
        )));
    }
    let rows = registry::run(&a.identity, &a.suite())?;
    write_csv(&rows, output(a.out.as_deref())?)?;
    Ok(if rows.iter().all(|r| r.passed()) {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}

pub fn cmd_reconstruct(a: &ReconstructArgs) -> Result<Outcome> {
    if a.alpha == Complex64::new(0.0, 0.0) {
        return Err(ArtError::arg(
            "reconstruction needs α ≠ 0 (prop4.4 hypothesis)",
        ));
    }
    let (e20, truth) = match &a.input {
        Some(p) => (load_grid(p)?, None),
        None => {
            let f = a.source.build()?;
            let fs = sample_grid(&f, a.grid.grid()?, None)?.frame(0);
            (
                GridField::stationary(volume_potential_grid(2, &fs, a.alpha)?),
                Some(f),
            )
        }
    };
    let est = reconstruct_prop44(&e20, a.alpha)?;
    save_grid(&est, &a.out)?;
    let truth = truth.map(|f| sample_grid(&f, est.grid, None)).transpose()?;
    if let Some(path) = &a.residual_csv {
        write_reconstruction_csv(&est, truth.as_ref(), path)?;
    }
    let Some(t) = truth else {
        return Ok(Outcome::Ok);
    };
    let num: f64 = est
        .data
        .iter()
        .zip(&t.data)
        .map(|(u, v)| (u - v).norm_sqr())
        .sum();
    let den: f64 = t.data.iter().map(|v| v.norm_sqr()).sum();
    let rel = if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    };
    println!("relative L2 error {rel:.6e} bound {:.6e}", a.bound);
    Ok(if rel <= a.bound {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}

fn write_reconstruction_csv(est: &GridField, truth: Option<&GridField>, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(output(Some(path))?);
    let csv_err = |e: csv::Error| ArtError::Io(io::Error::other(e));
    w.write_record([
        "x1",
        "x2",
        "x3",
        "re_f",
        "im_f",
        "re_truth",
        "im_truth",
        "abs_error",
    ])
    .map_err(csv_err)?;
    for (i, u) in est.data.iter().enumerate() {
        let x = est.grid.node_at(i);
        let (tr, err) = match truth {
            Some(t) => (t.data[i], (u - t.data[i]).norm()),
            None => (Complex64::new(f64::NAN, f64::NAN), f64::NAN),
        };
        let row = [x.0[0], x.0[1], x.0[2], u.re, u.im, tr.re, tr.im, err];
        w.write_record(row.iter().map(|v| format!("{v:.12e}")))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Field-level helper shared by the slice writer and the tests.
pub fn midplane(
    field: &SymTensorGridField,
    component: usize,
    part: Part,
) -> Result<(usize, usize, Vec<f64>)> {
    if component >= field.ncomp() {
        return Err(ArtError::arg(format!(
            "component {component} out of range for rank {}",
            field.rank
        )));
    }
    let [nx, ny, nz] = field.grid.dims;
    let kz = nz / 2;
    let vals = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            let v = field.value(component, field.grid.index(i, j, kz));
            match part {
                Part::Re => v.re,
                Part::Im => v.im,
                Part::Abs => v.norm(),
            }
        })
        .collect();
    Ok((nx, ny, vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_flags() {
        assert_eq!(parse_complex("0.5+0.3i").unwrap(), Complex64::new(0.5, 0.3));
        assert_eq!(
            parse_complex("0.2-1e-3i").unwrap(),
            Complex64::new(0.2, -1e-3)
        );
        assert_eq!(parse_complex("-2").unwrap(), Complex64::new(-2.0, 0.0));
        assert!(parse_complex("0.5 + 0.3i").is_err());
        assert!(parse_complex("0,5+0i").is_err());
        assert!(parse_complex("nan+0i").is_err());
    }

    #[test]
    fn point_and_sphere_flags() {
        assert_eq!(
            parse_point("0.1,-0.2,3").unwrap(),
            Point3::new(0.1, -0.2, 3.0)
        );
        assert!(parse_point("1,2").is_err());
        assert_eq!(parse_sphere("8x16").unwrap(), (8, 16));
        assert!(parse_sphere("8,16").is_err());
    }

    #[test]
    fn presets_expand() {
        let cli = Cli::try_parse_from(["artkit", "forward", "--preset", "photo", "--eps", "0.5"])
            .unwrap();
        let Command::Forward(f) = cli.command else {
            panic!()
        };
        let (k, a) = f.absorption.resolve(Complex64::new(9.0, 9.0)).unwrap();
        assert_eq!(
            (k, a),
            (
                0,
                AbsorptionSpec::constant(Complex64::new(0.5, 0.0)).unwrap()
            )
        );
        let cli =
            Cli::try_parse_from(["artkit", "forward", "--preset", "wave", "--kw", "2"]).unwrap();
        let Command::Forward(f) = cli.command else {
            panic!()
        };
        let (k, a) = f.absorption.resolve(Complex64::new(9.0, 9.0)).unwrap();
        assert_eq!((k, a.as_constant()), (1, Some(Complex64::new(0.0, -2.0))));
        assert!(
            Cli::try_parse_from(["artkit", "forward", "--preset", "wave", "--alpha", "1+0i"])
                .is_err()
        );
        assert!(Cli::try_parse_from(["artkit", "forward", "--bogus"]).is_err());
    }

    #[test]
    fn unknown_identity_lists_registry() {
        let cli = Cli::try_parse_from(["artkit", "verify", "--identity", "eq9.9"]).unwrap();
        let Command::Verify(v) = cli.command else {
            panic!()
        };
        let msg = cmd_verify(&v).unwrap_err().to_string();
        for name in registry::names() {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn midplane_of_radial_field_peaks_in_the_middle() {
        let g = Grid3::cube(Point3::ORIGIN, 1.0, 9).unwrap();
        let f = SymTensorGridField::from_fn(0, g, |i| {
            crate::tensor::SymTensor::scalar(Complex64::new((-g.node_at(i).norm_sq()).exp(), 0.0))
        });
        let (nx, ny, v) = midplane(&f, 0, Part::Abs).unwrap();
        assert_eq!((nx, ny), (9, 9));
        let imax = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(imax, 4 * 9 + 4);
        assert!(midplane(&f, 1, Part::Re).is_err());
    }
}
