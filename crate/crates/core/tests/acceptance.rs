//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use common::{components4, gray_free_noise, sweep_levels_f64, trapezoid_oracle, write_dataset};
use occlubench_core::harness::{evaluate, generate_sweep, write_predictions, SweepConfig};
use occlubench_core::metrics::{average_nauc, nauc_of, PredictionRecord};
use occlubench_core::rng::SplitMix64;
use occlubench_core::{
    apply_mask, generate, load_image, target_pixels, FillColor, OcclusionKind, OcclusionSpec,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got:.17}, want {want} (tol {tol:e})")
    })
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

const CANVASES: [(u32, u32); 4] = [(224, 224), (336, 336), (448, 448), (640, 480)];
const SEEDS: [u64; 3] = [0, 42, 0xDEAD_BEEF];

fn exact_coverage() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (w, h) in CANVASES {
        for kind in OcclusionKind::ALL {
            for level in (0..=100).step_by(5) {
                let f = f64::from(level) / 100.0;
                let target = target_pixels(f, w, h).map_err(|e| e.to_string())?;
                for seed in SEEDS {
                    let m = generate(&OcclusionSpec::new(kind, f, w, h, seed))
                        .map_err(|e| e.to_string())?;
                    let pop = m.as_slice().iter().filter(|&&b| b).count();
                    ensure(pop == target && m.occluded_count() == target, || {
                        format!("{kind} {level}% {w}x{h} seed {seed}: {pop} != {target}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{checked} masks exact in {:?}", start.elapsed()))
}

fn sweep_checksums(input: &Path, seed: u64) -> Result<Vec<u64>, String> {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut config = SweepConfig::new(input, out.path());
    config.master_seed = seed;
    let manifest = generate_sweep(&config).map_err(|e| e.to_string())?;
    Ok(manifest.entries.iter().map(|e| e.pixel_checksum).collect())
}

fn determinism() -> Outcome {
    let input = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_dataset(input.path(), &["bmp1", "leopard2", "t72"], 10, 256, 192);
    let start = Instant::now();
    let first = sweep_checksums(input.path(), 42)?;
    let second = sweep_checksums(input.path(), 42)?;
    let elapsed = start.elapsed();
    ensure(first.len() == 30 * (5 * 20 + 1), || {
        format!("{} entries", first.len())
    })?;
    ensure(first == second, || "checksums differ between runs".into())?;
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "{} checksums identical across 2 runs in {elapsed:?}",
        first.len()
    ))
}

fn random_curve(rng: &mut SplitMix64) -> Vec<f64> {
    let mut acc = vec![rng.uniform(0.01, 1.0)];
    acc.extend((0..20).map(|_| rng.next_f64()));
    acc
}

fn nauc_correctness() -> Outcome {
    let nauc = |a: &[f64]| nauc_of(a).map_err(|e| e.to_string());
    close(nauc(&[0.37; 21])?, 1.0, 1e-12, "constant")?;
    let linear: Vec<f64> = (0..21).map(|i| 1.0 - f64::from(i) / 20.0).collect();
    close(nauc(&linear)?, 0.5, 1e-12, "linear")?;
    let step: Vec<f64> = (0..21).map(|i| if i <= 10 { 0.8 } else { 0.0 }).collect();
    let oracle = trapezoid_oracle(&sweep_levels_f64(), &step);
    close(oracle, 0.525, 1e-12, "step oracle")?;
    close(nauc(&step)?, 0.525, 1e-12, "step")?;

    let mut rng = SplitMix64::new(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let acc = random_curve(&mut rng);
        let (got, want) = (nauc(&acc)?, trapezoid_oracle(&sweep_levels_f64(), &acc));
        let rel = (got - want).abs() / want.abs();
        worst = worst.max(rel);
        ensure(rel <= 1e-12, || format!("random curve rel error {rel:e}"))?;
    }
    Ok(format!(
        "analytic cases exact; 1000 random curves, worst rel err {worst:.1e}"
    ))
}

fn scale_invariance() -> Outcome {
    let mut rng = SplitMix64::new(77);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let acc = random_curve(&mut rng);
        let c = 10.0 - rng.uniform(0.0, 10.0); // (0, 10]
        let scaled: Vec<f64> = acc.iter().map(|a| a * c).collect();
        let base = nauc_of(&acc).map_err(|e| e.to_string())?;
        let other = nauc_of(&scaled).map_err(|e| e.to_string())?;
        worst = worst.max((base - other).abs());
        close(other, base, 1e-12, &format!("c = {c}"))?;
    }
    Ok(format!("100 curves, worst abs diff {worst:.1e}"))
}

fn average_spot_check() -> Outcome {
    let avg = average_nauc(&[0.604, 0.622, 0.788, 0.811, 0.767]).map_err(|e| e.to_string())?;
    close(avg, 0.718, 5e-4, "average NAUC")?;
    Ok(format!("mean = {avg:.4}"))
}

fn analytic_end_to_end() -> Outcome {
    let input = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_dataset(input.path(), &["fuchs", "m109"], 3, 200, 150);
    let config = SweepConfig::new(input.path(), out.path());
    let manifest = generate_sweep(&config).map_err(|e| e.to_string())?;
    let fill = FillColor::GRAY.rgb();
    let n = 224 * 224;

    // Classifier: correct iff at least half the pixels are visible.
    let mut predictions = Vec::new();
    let mut visible_by_level = std::collections::BTreeMap::<u32, Vec<usize>>::new();
    for e in &manifest.entries {
        let img = load_image(&out.path().join(&e.output_path)).map_err(|e| e.to_string())?;
        let visible = img.as_bytes().chunks(3).filter(|p| *p != fill).count();
        if e.kind == OcclusionKind::Slide.into() || e.level_percent == 0 {
            visible_by_level
                .entry(e.level_percent)
                .or_default()
                .push(visible);
        }
        predictions.push(PredictionRecord {
            image_id: e.image_id.clone(),
            true_label: e.class_label.clone(),
            pred_label: if 2 * visible >= n {
                e.class_label.clone()
            } else {
                "unknown".into()
            },
            kind: e.kind,
            level_percent: e.level_percent,
        });
    }
    let preds_path = out.path().join("preds.csv");
    write_predictions(&preds_path, &predictions).map_err(|e| e.to_string())?;
    let report = evaluate(
        &out.path().join("manifest.jsonl"),
        &preds_path,
        "visible-half",
    )
    .map_err(|e| e.to_string())?;

    // Brute-force expectation from the per-level visible counts.
    let expected: Vec<f64> = visible_by_level
        .values()
        .map(|counts| counts.iter().filter(|&&v| 2 * v >= n).count() as f64 / counts.len() as f64)
        .collect();
    let step: Vec<f64> = (0..=100)
        .step_by(5)
        .map(|l| if l <= 50 { 1.0 } else { 0.0 })
        .collect();
    ensure(expected == step, || {
        format!("brute-force curve is not the 55% step: {expected:?}")
    })?;
    let slide = report.score(OcclusionKind::Slide).ok_or("no slide curve")?;
    ensure(slide.curve.accuracy == expected, || {
        format!(
            "evaluate curve {:?} != brute force {expected:?}",
            slide.curve.accuracy
        )
    })?;
    let oracle = trapezoid_oracle(&sweep_levels_f64(), &expected);
    close(slide.nauc, oracle, 1e-12, "slide NAUC")?;
    Ok(format!(
        "slide step drops at 55%, NAUC {:.6} == oracle {oracle:.6}",
        slide.nauc
    ))
}

fn gray_fill_exact() -> Outcome {
    let img = gray_free_noise(224, 224, 99);
    let mut checked = 0;
    for kind in OcclusionKind::ALL {
        for level in [5u32, 50, 95] {
            let spec = OcclusionSpec::new(
                kind,
                f64::from(level) / 100.0,
                224,
                224,
                31 + u64::from(level),
            );
            let mask = generate(&spec).map_err(|e| e.to_string())?;
            let out = apply_mask(&img, &mask, FillColor::GRAY).map_err(|e| e.to_string())?;
            for y in 0..224 {
                for x in 0..224 {
                    let want = if mask.is_occluded(x, y) {
                        [128, 128, 128]
                    } else {
                        img.pixel(x, y)
                    };
                    ensure(out.pixel(x, y) == want, || {
                        format!("{kind} {level}% pixel ({x},{y})")
                    })?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (kind, level) pairs bit-exact"))
}

fn structure() -> Outcome {
    for level in (5..100).step_by(5) {
        let f = f64::from(level) / 100.0;
        for (w, h) in CANVASES {
            let m = generate(&OcclusionSpec::new(OcclusionKind::Slide, f, w, h, 0))
                .map_err(|e| e.to_string())?;
            let c = components4(&m);
            ensure(c == 1, || {
                format!("slide {level}% {w}x{h} has {c} components")
            })?;
        }
    }
    let mut fewest = usize::MAX;
    for seed in SEEDS {
        let snow = generate(&OcclusionSpec::new(
            OcclusionKind::Snow,
            0.05,
            224,
            224,
            seed,
        ))
        .map_err(|e| e.to_string())?;
        let c = components4(&snow);
        fewest = fewest.min(c);
        ensure(c >= 10, || {
            format!("snow 5% seed {seed}: only {c} components")
        })?;
    }
    Ok(format!(
        "slide single component at all interior levels; snow 5% >= {fewest} components"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact-coverage", exact_coverage),
        ("determinism", determinism),
        ("nauc-correctness", nauc_correctness),
        ("scale-invariance", scale_invariance),
        ("average-nauc-spot-check", average_spot_check),
        ("analytic-end-to-end", analytic_end_to_end),
        ("gray-fill-bit-exact", gray_fill_exact),
        ("structure-checks", structure),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
