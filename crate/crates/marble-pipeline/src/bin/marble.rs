//! Command-line front end for the marble appearance pipeline.
//!
//! Exit codes: 0 success, 1 usage, 2 data validation, 3 runtime failure.
//! Failures print one machine-readable line: `error kind=... message="..."`.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use marble_core::FeatureSubsetId;
use marble_pipeline::config::PipelineConfig;
use marble_pipeline::error::{PipelineError, Result};
use marble_pipeline::manifest::{CorpusManifest, LabelSet};
use marble_pipeline::run::{self, Algorithm};
use marble_pipeline::synth::SyntheticSpec;
use marble_pipeline::{synth, table};

#[derive(Parser)]
#[command(
    name = "marble",
    version,
    about = "Stone appearance analysis: segmentation, granulometric features, quality reports and clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic corpus (images + manifest).
    Synth {
        /// Output directory for images/ and manifest.csv.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Replicates per (colour, vein) cell.
        #[arg(long, default_value_t = 4)]
        replicates: usize,
        /// Square image edge in pixels.
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Validate a corpus manifest.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Extract HF and MF feature tables to CSV.
    Featurize {
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory for hf.csv and mf.csv.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Quality measures per feature subset against expert labels.
    Evaluate {
        /// Feature CSV produced by featurize.
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// colour or vein.
        #[arg(long)]
        labels: LabelSet,
        /// Feature subset id (HF_A..MF_C); repeatable. Defaults to every
        /// subset resolvable for the feature width.
        #[arg(long = "subset")]
        subsets: Vec<FeatureSubsetId>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Supervised (lvq) or unsupervised (sa) clustering with a confusion
    /// matrix report.
    Cluster {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// lvq or sa.
        #[arg(long)]
        algorithm: Algorithm,
        #[arg(long)]
        subset: FeatureSubsetId,
        /// colour or vein.
        #[arg(long)]
        labels: LabelSet,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose one image and write its signature artefacts.
    Render {
        /// PPM/PGM image to decompose.
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn ensure_dir(dir: &PathBuf) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| PipelineError::runtime(format!("cannot create {}: {e}", dir.display())))
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            out,
            seed,
            replicates,
            size,
            config,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if size < 16 {
                return Err(PipelineError::data(format!(
                    "image size {size} too small (minimum 16)"
                )));
            }
            let spec = SyntheticSpec::new(size, replicates.max(1), cfg.seed);
            spec.validate(cfg.merge_metric, cfg.merge_threshold)?;
            ensure_dir(&out)?;
            let manifest = synth::generate(&spec, &out)?;
            println!(
                "wrote {} images and {}",
                manifest.len(),
                synth::manifest_path(&out).display()
            );
            Ok(())
        }
        Command::Ingest { manifest } => {
            let loaded = CorpusManifest::load(&manifest, true)?;
            let mut colour_counts = [0usize; 6];
            let mut vein_counts = [0usize; 3];
            for e in loaded.entries() {
                colour_counts[e.colour_class - 1] += 1;
                vein_counts[e.vein_class - 1] += 1;
            }
            println!("manifest ok: {} entries", loaded.len());
            println!("colour classes 1..6: {colour_counts:?}");
            println!("vein classes 1..3: {vein_counts:?}");
            Ok(())
        }
        Command::Featurize {
            manifest,
            out,
            config,
        } => {
            let cfg = load_config(&config)?;
            let loaded = CorpusManifest::load(&manifest, true)?;
            let features = run::featurize(&loaded, &cfg)?;
            ensure_dir(&out)?;
            let hf_path = out.join("hf.csv");
            let mf_path = out.join("mf.csv");
            std::fs::write(&hf_path, table::write_matrix_csv(&features.hf))?;
            std::fs::write(&mf_path, table::write_matrix_csv(&features.mf))?;
            println!(
                "wrote {} ({} x {}) and {} ({} x {})",
                hf_path.display(),
                features.hf.rows(),
                features.hf.cols(),
                mf_path.display(),
                features.mf.rows(),
                features.mf.cols()
            );
            Ok(())
        }
        Command::Evaluate {
            features,
            manifest,
            labels,
            subsets,
            config,
            out,
        } => {
            let cfg = load_config(&config)?;
            let loaded = CorpusManifest::load(&manifest, false)?;
            let matrix = table::read_matrix_csv(&read_file(&features)?)?;
            let subset_ids = if subsets.is_empty() {
                run::default_subsets(matrix.cols(), &cfg)
            } else {
                subsets
            };
            if subset_ids.is_empty() {
                return Err(PipelineError::data(
                    "no feature subsets resolvable for this feature width",
                ));
            }
            let report = run::evaluate(&matrix, &loaded, &subset_ids, labels, &cfg)?;
            let rendered = report.to_table();
            ensure_dir(&out)?;
            let path = out.join(format!("quality_{}.txt", labels.name()));
            std::fs::write(&path, &rendered)?;
            print!("{rendered}");
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Cluster {
            features,
            manifest,
            algorithm,
            subset,
            labels,
            seed,
            config,
            out,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let loaded = CorpusManifest::load(&manifest, false)?;
            let matrix = table::read_matrix_csv(&read_file(&features)?)?;
            let result = run::cluster(&matrix, &loaded, algorithm, subset, labels, &cfg)?;

            ensure_dir(&out)?;
            let tag = format!("{}_{}_{}", algorithm.name(), subset.name(), labels.name());
            let assignments_path = out.join(format!("assignments_{tag}.csv"));
            let confusion_path = out.join(format!("confusion_{tag}.txt"));
            std::fs::write(&assignments_path, &result.assignments_csv)?;
            std::fs::write(&confusion_path, result.confusion.to_table())?;
            if let Some(prototypes) = &result.prototypes {
                std::fs::write(
                    out.join(format!("prototypes_{tag}.tsv")),
                    prototypes.to_table(),
                )?;
            }
            write_gallery(&out.join(format!("gallery_{tag}")), &loaded, &result)?;
            print!("{}", result.confusion.to_table());
            println!(
                "accuracy {:.3}; wrote {} and {}",
                result.confusion.accuracy(),
                assignments_path.display(),
                confusion_path.display()
            );
            Ok(())
        }
        Command::Render { image, out, config } => {
            let cfg = load_config(&config)?;
            let (sig, rendered) = run::render(&image, &cfg)?;
            ensure_dir(&out)?;
            let ppm_path = out.join("signature.ppm");
            let table_path = out.join("regions.tsv");
            std::fs::write(&ppm_path, marble_core::encode_p6(&rendered))?;
            std::fs::write(&table_path, sig.to_region_table())?;
            println!(
                "{} regions ({} homogeneous); wrote {} and {}",
                sig.regions().len(),
                sig.regions().iter().filter(|r| r.homogeneous).count(),
                ppm_path.display(),
                table_path.display()
            );
            Ok(())
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| PipelineError::data(format!("cannot read {}: {e}", path.display())))
}

/// Copies each sample's image into a per-predicted-group directory so the
/// clusters can be inspected visually. Entries whose image files are not
/// reachable are skipped.
fn write_gallery(
    dir: &std::path::Path,
    manifest: &CorpusManifest,
    result: &marble_pipeline::ClusterOutput,
) -> Result<()> {
    // Assignments CSV: id,...,<group> with the predicted group last.
    for line in result.assignments_csv.lines().skip(1) {
        let mut fields = line.split(',');
        let id = fields.next().unwrap_or_default();
        let group = fields.next_back().unwrap_or_default();
        let Some(entry) = manifest.entries().iter().find(|e| e.id == id) else {
            continue;
        };
        let source = manifest.resolve_path(entry);
        if !source.is_file() {
            continue;
        }
        let group_dir = dir.join(format!("class_{group}"));
        std::fs::create_dir_all(&group_dir)?;
        let name = source
            .file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_else(|| format!("{id}.ppm"));
        std::fs::copy(&source, group_dir.join(name))?;
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let _ = e.print();
            let first_line = e
                .to_string()
                .lines()
                .next()
                .unwrap_or("bad usage")
                .to_string();
            eprintln!("error kind=usage message={first_line:?}");
            std::process::exit(1);
        }
    };
    if let Err(err) = dispatch(cli) {
        eprintln!("{}", err.machine_line());
        std::process::exit(err.kind.exit_code());
    }
}
