use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use occlubench_core::harness::{self, LevelRange, SweepConfig};
use occlubench_core::report::{self, ReportFormat};
use occlubench_core::{FillColor, OcclusionKind, OcclusionMask, OcclusionSpec};

/// Occlusion robustness benchmark: build occluded sweeps and score predictions on them.
#[derive(Debug, Parser)]
#[command(name = "occlubench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write occluded copies of every input image plus manifest.jsonl.
    Generate {
        /// Input tree laid out as <class>/<image>.{png,jpg}.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "snow,rain,slide,bars,grid"
        )]
        kinds: Vec<OcclusionKind>,
        /// Occlusion levels in percent as start:end:step.
        #[arg(long, default_value = "0:100:5")]
        levels: LevelRange,
        /// Square evaluation resolution; images are resized before occlusion.
        #[arg(long, default_value_t = 224)]
        size: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "128,128,128")]
        fill: FillColor,
    },
    /// Per-class 16/4/rest train/val/test split.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a predictions CSV against a sweep manifest.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        model_id: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render one or more report JSON files as a markdown table or long-form CSV.
    Report {
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_parser = ["md", "csv"])]
        format: String,
    },
    /// Export a single mask as PNG (0 visible, 255 occluded) or run-length text.
    Mask {
        #[arg(long)]
        kind: OcclusionKind,
        #[arg(long)]
        fraction: f64,
        #[arg(long, default_value_t = 224)]
        width: u32,
        #[arg(long, default_value_t = 224)]
        height: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; `.png` writes an image, anything else run-length text.
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate {
            input,
            output,
            kinds,
            levels,
            size,
            seed,
            fill,
        } => {
            let config = SweepConfig {
                kinds,
                levels,
                resolution: size,
                master_seed: seed,
                fill,
                ..SweepConfig::new(input, output)
            };
            let manifest = harness::generate_sweep(&config)?;
            for w in &manifest.warnings {
                eprintln!("warning: skipped {}: {}", w.source_path, w.warning);
            }
            println!(
                "wrote {} artifacts to {}",
                manifest.entries.len(),
                config.output_dir.join(harness::MANIFEST_FILE).display()
            );
        }
        Command::Split { input, seed, out } => {
            let split = harness::split_dataset(&input, seed)?;
            let json = serde_json_string(&split)?;
            std::fs::write(&out, json).with_context(|| format!("writing {}", out.display()))?;
            println!("assigned {} images", split.entries.len());
        }
        Command::Evaluate {
            manifest,
            predictions,
            model_id,
            out,
        } => {
            let report = harness::evaluate(&manifest, &predictions, &model_id)?;
            report::save_report(&report, &out)?;
            print!("{}", report::render_markdown(std::slice::from_ref(&report)));
        }
        Command::Report { inputs, format } => {
            let format: ReportFormat = format.parse()?;
            let reports = inputs
                .iter()
                .map(|p| report::load_report(p))
                .collect::<Result<Vec<_>, _>>()?;
            print!("{}", report::render(&reports, format));
        }
        Command::Mask {
            kind,
            fraction,
            width,
            height,
            seed,
            out,
        } => {
            let mask = occlubench_core::generate(&OcclusionSpec::new(
                kind, fraction, width, height, seed,
            ))?;
            write_mask(&mask, &out)?;
            println!(
                "{} of {} pixels occluded",
                mask.occluded_count(),
                mask.len()
            );
        }
    }
    Ok(())
}

fn write_mask(mask: &OcclusionMask, out: &std::path::Path) -> anyhow::Result<()> {
    if out
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
    {
        mask.write_png(out)?;
    } else {
        std::fs::write(out, mask.to_rle() + "\n")
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn serde_json_string(split: &harness::SplitAssignment) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(split)?;
    s.push('\n');
    Ok(s)
}

/// 0 success, 1 validation or coverage failure, 2 filesystem failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    let io = err.chain().any(|cause| {
        cause
            .downcast_ref::<occlubench_core::Error>()
            .is_some_and(|e| e.is_io())
            || cause.downcast_ref::<std::io::Error>().is_some()
    });
    if io {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
