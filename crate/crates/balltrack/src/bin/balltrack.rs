use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use balltrack::config::{load_camera, load_params, CameraConfig, ParamsConfig};
use balltrack::lutfile::{load_lut, save_lut};
use balltrack::ppm::{load_ppm, save_ppm};
use balltrack::report::write_report;
use balltrack::runner::{bench, list_frames, overlay, run_frame, track_files};
use balltrack::scene::{default_scene, load_scene};
use balltrack_core::colorcal::{calibrate_detailed, ColorLut};
use balltrack_core::pipeline::Pipeline;
use balltrack_core::synth::{render, render_frame};
use balltrack_core::track::TrackState;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "balltrack",
    version,
    about = "Colored ball detection and tracking"
)]
struct Cli {
    /// Require an explicit --seed for every randomized command.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Camera intrinsics file (fx, fy, cx, cy, k1, k2, width, height, ball_radius_m).
    #[arg(long)]
    camera: Option<PathBuf>,
    /// Tuning parameter file.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a color lookup table from a sample image.
    Calibrate {
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Detect balls in a single frame.
    Detect {
        image: PathBuf,
        #[arg(long)]
        lut: PathBuf,
        /// Optional CSV of all detections.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Annotated copy of the frame.
        #[arg(long)]
        overlay: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Track over a frame directory or an explicit list of frames.
    Track {
        #[arg(required = true)]
        frames: Vec<PathBuf>,
        #[arg(long)]
        lut: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Directory receiving annotated frames.
        #[arg(long)]
        overlay: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Render a scene file to PPM.
    Synth {
        scene: PathBuf,
        /// Output image, or output directory with --frames.
        #[arg(long)]
        out: PathBuf,
        /// Render this many frames of the moving scene.
        #[arg(long)]
        frames: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Time every pipeline stage on a rendered scene.
    Bench {
        /// Scene file; defaults to one 60 px ball in a 640x480 frame.
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// Lookup table; learned from the scene itself when omitted.
        #[arg(long)]
        lut: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

struct Loaded {
    camera: Option<CameraConfig>,
    params: ParamsConfig,
    seed: u64,
}

fn load_common(c: &Common, strict: bool) -> Result<Loaded> {
    if strict && c.seed.is_none() {
        bail!("--strict requires --seed");
    }
    let camera = c.camera.as_deref().map(load_camera).transpose()?;
    let params = c
        .params
        .as_deref()
        .map(load_params)
        .transpose()?
        .unwrap_or_default();
    let seed = c.seed.or(params.seed).unwrap_or(0);
    Ok(Loaded {
        camera,
        params,
        seed,
    })
}

fn pipeline(lut: ColorLut, l: &Loaded) -> Result<Pipeline> {
    let intr = l.camera.as_ref().map(CameraConfig::intrinsics);
    Ok(Pipeline::new(
        lut,
        intr.as_ref(),
        l.params.frame_params(l.camera.as_ref()),
    )?)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| format!("{v:.4}"))
}

fn cmd_calibrate(image: &Path, out: &Path, l: &Loaded) -> Result<()> {
    let img = load_ppm(image)?;
    let mut config = l.params.calibration();
    config.vote.seed = l.seed;
    let cal = calibrate_detailed(&img, &config).context("calibration failed")?;
    save_lut(&cal.lut, out)?;
    println!("regions:");
    for f in &cal.fits {
        println!(
            "  label {:>4} pixels {:>7} circle ({:.1}, {:.1}, r {:.1}) qc {:.5} baseline {:.5} ratio {:.3} {}",
            f.label,
            f.pixel_count,
            f.circle.cx,
            f.circle.cy,
            f.circle.r,
            f.quality,
            f.baseline,
            f.fit_ratio,
            if f.accepted { "accepted" } else { "rejected" }
        );
    }
    println!("classes:");
    for (d, n) in cal.distributions.iter().zip(cal.class_samples()) {
        println!("  class {} samples {n}", d.class_index);
    }
    Ok(())
}

fn cmd_detect(
    image: &Path,
    lut: &Path,
    out: Option<&Path>,
    overlay_path: Option<&Path>,
    l: &Loaded,
) -> Result<()> {
    let p = pipeline(load_lut(lut)?, l)?;
    let frame = load_ppm(image)?;
    let (result, _) = run_frame(&p, &frame, &TrackState::new(), l.seed);
    let mut stdout = io::stdout().lock();
    for e in &result.estimates {
        let pose = e.pose;
        writeln!(
            stdout,
            "cx {:.3} cy {:.3} cr {:.3} qc {:.5} x {} y {} z {}{}",
            e.circle.cx,
            e.circle.cy,
            e.circle.r,
            e.quality(),
            fmt_opt(pose.map(|p| p.x)),
            fmt_opt(pose.map(|p| p.y)),
            fmt_opt(pose.map(|p| p.z)),
            if e.detection.vote.low_quality {
                " low-quality"
            } else {
                ""
            }
        )?;
    }
    if let Some(path) = out {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("{}", path.display()))?;
        w.write_record([
            "index", "cx", "cy", "cr", "qc", "x_m", "y_m", "z_m", "refined",
        ])?;
        for (i, e) in result.estimates.iter().enumerate() {
            let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                i.to_string(),
                e.circle.cx.to_string(),
                e.circle.cy.to_string(),
                e.circle.r.to_string(),
                e.quality().to_string(),
                opt(e.pose.map(|p| p.x)),
                opt(e.pose.map(|p| p.y)),
                opt(e.pose.map(|p| p.z)),
                e.refined.to_string(),
            ])?;
        }
        w.flush()?;
    }
    if let Some(path) = overlay_path {
        save_ppm(&overlay(&frame, &p, &result), path)?;
    }
    Ok(())
}

fn cmd_track(
    inputs: &[PathBuf],
    lut: &Path,
    out: &Path,
    overlay_dir: Option<&Path>,
    l: &Loaded,
) -> Result<()> {
    let p = pipeline(load_lut(lut)?, l)?;
    let frames = match inputs {
        [dir] if dir.is_dir() => list_frames(dir).with_context(|| format!("{}", dir.display()))?,
        files => files.to_vec(),
    };
    if let Some(dir) = overlay_dir {
        fs::create_dir_all(dir).with_context(|| format!("{}", dir.display()))?;
    }
    let records = track_files(&p, &frames, l.seed, overlay_dir)?;
    let file = File::create(out).with_context(|| format!("{}", out.display()))?;
    write_report(file, &records)?;
    let tracking = records.iter().filter(|r| r.status == "TRACKING").count();
    println!("{} frames, {tracking} tracking", records.len());
    Ok(())
}

fn cmd_synth(
    scene: &Path,
    out: &Path,
    frames: Option<u32>,
    seed: Option<u64>,
    strict: bool,
) -> Result<()> {
    if strict && seed.is_none() {
        bail!("--strict requires --seed");
    }
    let mut spec = load_scene(scene)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    match frames {
        None => {
            let (img, circles) = render(&spec);
            save_ppm(&img, out)?;
            for c in circles {
                println!("disk {:.3} {:.3} {:.3}", c.cx, c.cy, c.r);
            }
        }
        Some(n) => {
            fs::create_dir_all(out).with_context(|| format!("{}", out.display()))?;
            for t in 0..n {
                spec.at_frame(t)
                    .validate()
                    .with_context(|| format!("frame {t}"))?;
                let (img, circles) = render_frame(&spec, t);
                save_ppm(&img, out.join(format!("frame_{t:04}.ppm")))?;
                for c in circles {
                    println!("{t} disk {:.3} {:.3} {:.3}", c.cx, c.cy, c.r);
                }
            }
        }
    }
    Ok(())
}

fn cmd_bench(scene: Option<&Path>, reps: usize, lut: Option<&Path>, l: &Loaded) -> Result<()> {
    if reps == 0 {
        bail!("--reps must be at least 1");
    }
    let spec = match scene {
        Some(path) => load_scene(path)?,
        None => default_scene(),
    };
    let (frame, _) = render(&spec);
    let lut = match lut {
        Some(path) => load_lut(path)?,
        None => {
            let mut config = l.params.calibration();
            config.vote.seed = l.seed;
            calibrate_detailed(&frame, &config)
                .context("calibrating on the bench scene")?
                .lut
        }
    };
    let p = pipeline(lut, l)?;
    let samples = bench(&p, &frame, reps, l.seed);
    println!("{:<12} {:>12} {:>12}", "stage", "median_us", "p95_us");
    for (name, s) in samples.stages() {
        println!(
            "{name:<12} {:>12} {:>12}",
            s.median.as_micros(),
            s.p95.as_micros()
        );
    }
    println!("repetitions {reps}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let strict = cli.strict;
    match cli.command {
        Command::Calibrate { image, out, common } => {
            cmd_calibrate(&image, &out, &load_common(&common, strict)?)
        }
        Command::Detect {
            image,
            lut,
            out,
            overlay,
            common,
        } => cmd_detect(
            &image,
            &lut,
            out.as_deref(),
            overlay.as_deref(),
            &load_common(&common, strict)?,
        ),
        Command::Track {
            frames,
            lut,
            out,
            overlay,
            common,
        } => cmd_track(
            &frames,
            &lut,
            &out,
            overlay.as_deref(),
            &load_common(&common, strict)?,
        ),
        Command::Synth {
            scene,
            out,
            frames,
            seed,
        } => cmd_synth(&scene, &out, frames, seed, strict),
        Command::Bench {
            scene,
            reps,
            lut,
            common,
        } => cmd_bench(
            scene.as_deref(),
            reps,
            lut.as_deref(),
            &load_common(&common, strict)?,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
