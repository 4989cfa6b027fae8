use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use visim_core::assessment::{
    render_amsler, render_contrast_chart, AmslerSpec, AnnotationSession, ContrastChartSpec,
};
use visim_core::gaze::{GazeSource, ScriptedSource};
use visim_core::io::{read_image, write_image};
use visim_core::pipeline::validate;
use visim_core::profiles::{canonical, preset, presets};
use visim_core::{Error, Profile, SessionState, ViewingGeometry};

use crate::render::render_frame;
use crate::schema::symptom_schema;

/// Exit status for a configuration that fails validation.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit status for IO and every other failure.
pub const EXIT_FAILURE: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "visim", version, about = "Gaze-contingent vision impairment simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a profile over an image.
    Apply(ApplyArgs),
    /// Generate a calibrated assessment chart.
    #[command(subcommand)]
    Assess(AssessCommand),
    /// Check a profile document without rendering.
    Validate { profile: PathBuf },
    /// Print the symptom parameter schema as JSON.
    Symptoms,
    /// List the built-in profiles, optionally writing them as documents.
    Presets {
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Run the local HTTP render service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Profile directory; defaults to $VISIM_PROFILE_DIR, then ./profiles.
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    pub input: PathBuf,
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Normalized gaze `x,y` in [0, 1].
    #[arg(long, value_parser = parse_pair, default_value = "0.5,0.5", conflicts_with = "gaze_path")]
    pub gaze: (f64, f64),
    /// Gaze records (`t x y valid` per line) sampled at each frame time.
    #[arg(long)]
    pub gaze_path: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub time: f64,
    #[arg(long, default_value_t = 1)]
    pub frames: u32,
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum AssessCommand {
    /// Amsler grid, one cell per degree.
    Amsler {
        #[command(flatten)]
        screen: ScreenArgs,
        /// Degrees on each side of fixation.
        #[arg(long, default_value_t = 10.0)]
        extent: f64,
        /// Annotation session JSON to draw over the grid.
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Letter contrast chart.
    Contrast {
        #[command(flatten)]
        screen: ScreenArgs,
        #[arg(long, default_value_t = 8)]
        triplets: u32,
        /// Contrast decrease per row, log10 units.
        #[arg(long, default_value_t = 0.15)]
        step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    #[arg(long)]
    pub distance_m: f64,
    #[arg(long)]
    pub pitch_mm: f64,
    /// Screen size `WxH` in pixels.
    #[arg(long, value_parser = parse_size)]
    pub size: (u32, u32),
}

impl ScreenArgs {
    fn geometry(&self) -> visim_core::Result<ViewingGeometry> {
        ViewingGeometry::new(self.size.0, self.size.1, self.pitch_mm * 1e-3, self.distance_m)
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `x,y`")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_size(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected `WxH`")?;
    let w: u32 = w.trim().parse().map_err(|e| format!("{e}"))?;
    let h: u32 = h.trim().parse().map_err(|e| format!("{e}"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

/// Maps an error chain to the process exit status.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Validation(_)) => EXIT_VALIDATION,
        _ => EXIT_FAILURE,
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Apply(args) => apply(&args),
        Command::Assess(cmd) => assess(&cmd),
        Command::Validate { profile } => {
            let p = Profile::load(&profile)?;
            let report = validate(&p.stack);
            if !report.is_ok() {
                return Err(Error::Validation(report).into());
            }
            println!("{}: ok ({} symptoms)", p.name, p.stack.len());
            Ok(())
        }
        Command::Symptoms => {
            println!("{}", canonical::to_string(&symptom_schema()));
            Ok(())
        }
        Command::Presets { export } => {
            for p in presets() {
                println!("{:<28} {} symptoms", p.name, p.stack.len());
                if let Some(dir) = &export {
                    std::fs::create_dir_all(dir)?;
                    p.save(dir.join(format!("{}.json", file_stem(&p.name))))?;
                }
            }
            Ok(())
        }
        Command::Serve { port, profiles } => {
            let dir = profiles
                .or_else(|| std::env::var_os("VISIM_PROFILE_DIR").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("profiles"));
            crate::service::serve(port, dir)
        }
    }
}

/// File-name-safe form of a profile name.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn load_profile(args: &ApplyArgs) -> anyhow::Result<Profile> {
    if let Some(name) = &args.preset {
        return preset(name).ok_or_else(|| {
            let known: Vec<String> = presets().into_iter().map(|p| p.name).collect();
            anyhow!("unknown preset {name:?}; known: {}", known.join(", "))
        });
    }
    let path = args.profile.as_ref().expect("clap requires --profile or --preset");
    Profile::load(path).with_context(|| format!("loading profile {}", path.display()))
}

/// Output path for frame `i` of `n`: the path itself for a single frame,
/// otherwise `stem_NNNN.ext`.
pub fn frame_path(output: &Path, i: u32, n: u32) -> PathBuf {
    if n <= 1 {
        return output.to_path_buf();
    }
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("frame");
    let ext = output.extension().and_then(|s| s.to_str()).unwrap_or("png");
    output.with_file_name(format!("{stem}_{i:04}.{ext}"))
}

fn apply(args: &ApplyArgs) -> anyhow::Result<()> {
    let profile = load_profile(args)?;
    let report = validate(&profile.stack);
    if !report.is_ok() {
        return Err(Error::Validation(report).into());
    }
    if args.frames == 0 {
        bail!("--frames must be at least 1");
    }
    if !(args.fps.is_finite() && args.fps > 0.0) {
        bail!("--fps must be positive");
    }
    let frame = read_image(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let mut path_source = match &args.gaze_path {
        Some(p) => Some(ScriptedSource::load(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let mut session = SessionState::new(profile.seed);
    let total = Instant::now();
    for i in 0..args.frames {
        let t = args.time + i as f64 / args.fps;
        let gaze = match &mut path_source {
            Some(src) => {
                let s = src.poll(t);
                (s.x, s.y)
            }
            None => args.gaze,
        };
        let start = Instant::now();
        let out = render_frame(&frame, &profile, gaze, t, Some(&mut session))?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let path = frame_path(&args.output, i, args.frames);
        write_image(&out, &path).with_context(|| format!("writing {}", path.display()))?;
        println!("frame {i:4} t={t:.3}s {ms:8.2} ms -> {}", path.display());
    }
    println!(
        "{} frame(s) in {:.2} ms",
        args.frames,
        total.elapsed().as_secs_f64() * 1e3
    );
    Ok(())
}

/// Letter height subtending this many degrees at the viewing distance.
const CONTRAST_LETTER_DEGREES: f64 = 2.8;

fn assess(cmd: &AssessCommand) -> anyhow::Result<()> {
    match cmd {
        AssessCommand::Amsler {
            screen,
            extent,
            annotations,
            output,
        } => {
            let mut spec = AmslerSpec::new(screen.geometry()?);
            spec.grid_extent_degrees = *extent;
            if let Some(p) = annotations {
                let text = std::fs::read_to_string(p)?;
                spec.annotations = AnnotationSession::from_json(&text)?.polylines;
            }
            write_image(&render_amsler(&spec)?, output)?;
            println!("wrote {}", output.display());
        }
        AssessCommand::Contrast {
            screen,
            triplets,
            step,
            seed,
            output,
        } => {
            let g = screen.geometry()?;
            let mut spec = ContrastChartSpec::new(screen.size.0, screen.size.1, *triplets);
            spec.contrast_step = *step;
            spec.seed = *seed;
            spec.letter_px = ((CONTRAST_LETTER_DEGREES * g.pixels_per_degree()) as u32).max(5);
            // Shrink the letters until every row fits on the screen.
            let chart = loop {
                match render_contrast_chart(&spec) {
                    Ok(c) => break c,
                    Err(Error::Assessment(msg)) if msg.contains("need") && spec.letter_px > 5 => {
                        spec.letter_px -= 5;
                    }
                    Err(e) => return Err(e.into()),
                }
            };
            if spec.letter_px < 5 * (CONTRAST_LETTER_DEGREES * g.pixels_per_degree() / 5.0) as u32 {
                log::warn!("letters shrunk to {} px to fit the screen", spec.letter_px);
            }
            write_image(&chart.frame, output)?;
            for (c, l) in chart.contrasts.iter().zip(&chart.letters) {
                println!("{:.4} {}{}{}", c, l[0], l[1], l[2]);
            }
            println!("wrote {}", output.display());
        }
    }
    Ok(())
}
