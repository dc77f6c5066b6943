//! Experiment runner behind the `plasmid-archive` binary: file encoding and
//! decoding, and presets that drive the simulator and write CSV.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use plasmid_archive::archive::LayoutMode;
use plasmid_archive::codec::{parse_plasmid_fasta, EncodedFile, Encoding, Manifest};
use plasmid_archive::engine::{
    circle_sweep, parameter_sweep, payload_for, simulate_retrieval, write_metrics_csv, write_trajectory_csv,
    MetricsRecord, Placement, SimConfig, SweepParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{layer, CodecBenchParams, RunConfig};

/// Environment variable naming the output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "PLASMID_ARCHIVE_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Final-position error over destination and start circles.
    Positioning,
    /// Retrieval campaign over retriever counts, D and encodings.
    Retrieval,
    /// Priority placement with two clusters outside the hull.
    ContentMgmt,
    /// Encoded length, density and round trip per payload size.
    CodecBench,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Positioning => "positioning",
            Preset::Retrieval => "retrieval",
            Preset::ContentMgmt => "content-mgmt",
            Preset::CodecBench => "codec-bench",
        }
    }

    /// Built-in defaults before any config file or override.
    pub fn defaults(self, desk_scale: bool, full: bool) -> RunConfig {
        let mut sim = SimConfig::default();
        let mut sweep = if full { SweepParams::default() } else { SweepParams::desk_scale() };
        let mut codec_bench = CodecBenchParams::default();
        match self {
            Preset::Positioning if desk_scale => {
                sim.positioning.dest_points_per_circle = 1;
                sim.positioning.start_points_per_circle = 1;
            }
            Preset::Retrieval if !desk_scale && !full => {
                sweep = SweepParams::single(1);
            }
            Preset::ContentMgmt => {
                sim.layout.mode = LayoutMode::TwoOutside;
                sim.placement = Placement::Priority { high_fraction: 0.5 };
                sim.n_retrievers_per_cluster = 150;
                sweep = SweepParams {
                    encodings: vec![Encoding::Basic, Encoding::Goldman],
                    ..SweepParams::single(if desk_scale { 3 } else { 10 })
                };
            }
            Preset::CodecBench if desk_scale => {
                codec_bench = CodecBenchParams { sizes: vec![0, 1, 256, 4096], samples: 2 };
            }
            _ => {}
        }
        RunConfig { sim, sweep, codec_bench }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub preset: Preset,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub desk_scale: bool,
    pub full: bool,
    pub config: Option<PathBuf>,
    pub overrides: Vec<String>,
    /// Also write agent states at every event tick of the first retrieval run.
    pub trajectory: bool,
}

impl RunOptions {
    pub fn new(preset: Preset) -> RunOptions {
        RunOptions {
            preset,
            seed: None,
            out_dir: None,
            jobs: None,
            desk_scale: false,
            full: false,
            config: None,
            overrides: Vec::new(),
            trajectory: false,
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub csv_path: PathBuf,
    pub runs: usize,
    pub line: String,
}

/// Resolves the config, runs the preset on a pool of `jobs` threads and
/// writes `<out>/<preset>.csv`.
pub fn cmd_run(opts: &RunOptions) -> Result<RunSummary> {
    if opts.desk_scale && opts.full {
        bail!("--desk-scale and --full are mutually exclusive");
    }
    let file = match &opts.config {
        Some(p) => Some(fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?),
        None => None,
    };
    let mut overrides = opts.overrides.clone();
    if let Some(seed) = opts.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = layer(&opts.preset.defaults(opts.desk_scale, opts.full), file.as_deref(), &overrides)?;
    cfg.sim.validate().map_err(|e| anyhow!("{e}"))?;

    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let csv_path = out_dir.join(format!("{}.csv", opts.preset.name()));

    let jobs = opts.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let (bytes, runs, line) = pool.install(|| run_preset(opts.preset, &cfg))?;
    fs::write(&csv_path, bytes).with_context(|| format!("writing {}", csv_path.display()))?;
    if opts.trajectory {
        let first = match opts.preset {
            Preset::Retrieval | Preset::ContentMgmt => cfg.sweep.configs(&cfg.sim).into_iter().next(),
            _ => None,
        }
        .ok_or_else(|| anyhow!("--trajectory needs a retrieval or content-mgmt preset"))?;
        let path = out_dir.join(format!("{}-trajectory.csv", opts.preset.name()));
        let mut rows = Vec::new();
        pool.install(|| simulate_retrieval(&first, &payload_for(&first), Some(&mut rows)))?;
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &rows)?;
        fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
    }
    let line = format!("{}: {line} -> {}", opts.preset.name(), csv_path.display());
    Ok(RunSummary { csv_path, runs, line })
}

fn run_preset(preset: Preset, cfg: &RunConfig) -> Result<(Vec<u8>, usize, String)> {
    match preset {
        Preset::Positioning => {
            let records = circle_sweep(&cfg.sim)?;
            let mean = mean(records.iter().filter_map(|r| r.positioning_error_cm));
            let line = format!("{} runs, mean positioning error {mean:.5} cm", records.len());
            Ok((metrics_bytes(&records)?, records.len(), line))
        }
        Preset::Retrieval | Preset::ContentMgmt => {
            let records = parameter_sweep(&cfg.sim, &cfg.sweep)?;
            let done = records.iter().filter(|r| r.pct_retrieved == Some(1.0)).count();
            let pct = mean(records.iter().filter_map(|r| r.pct_retrieved));
            let line = format!("{} runs, {done} complete, mean pct retrieved {pct:.4}", records.len());
            Ok((metrics_bytes(&records)?, records.len(), line))
        }
        Preset::CodecBench => {
            let rows = codec_bench(cfg.sim.seed, &cfg.codec_bench, cfg.sim.payload.plasmid_len);
            let ok = rows.iter().filter(|r| r.round_trip).count();
            let line = format!("{} runs, {ok} round trips exact", rows.len());
            Ok((codec_bench_csv(&rows), rows.len(), line))
        }
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

fn metrics_bytes(records: &[MetricsRecord]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_metrics_csv(&mut buf, records)?;
    Ok(buf)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodecBenchRow {
    pub size_bytes: usize,
    pub sample: usize,
    pub encoding: Encoding,
    pub bases: usize,
    pub plasmids: usize,
    pub longest_run: usize,
    pub round_trip: bool,
}

pub const CODEC_BENCH_HEADER: &str = "size_bytes,sample,encoding,bases,plasmids,bases_per_byte,longest_run,round_trip";

/// Encodes seeded random payloads of each size with both encodings.
pub fn codec_bench(seed: u64, params: &CodecBenchParams, plasmid_len: usize) -> Vec<CodecBenchRow> {
    let jobs: Vec<(usize, usize, Encoding)> = params
        .sizes
        .iter()
        .flat_map(|&size| (0..params.samples).map(move |s| (size, s)))
        .flat_map(|(size, s)| [Encoding::Basic, Encoding::Goldman].map(|e| (size, s, e)))
        .collect();
    jobs.into_par_iter()
        .map(|(size, sample, encoding)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((size as u64) << 16) | sample as u64);
            let mut data = vec![0u8; size];
            rng.fill(&mut data[..]);
            let file = EncodedFile::encode(&data, encoding, "bench", plasmid_len);
            let seq = file.sequence().expect("complete file");
            let mut longest = 0;
            let mut run = 0;
            for (i, b) in seq.as_slice().iter().enumerate() {
                run = if i > 0 && seq.as_slice()[i - 1] == *b { run + 1 } else { 1 };
                longest = longest.max(run);
            }
            CodecBenchRow {
                size_bytes: size,
                sample,
                encoding,
                bases: file.sequence_len_bases,
                plasmids: file.total_plasmids(),
                longest_run: longest,
                round_trip: file.decode().ok().as_deref() == Some(&data[..]),
            }
        })
        .collect()
}

pub fn codec_bench_csv(rows: &[CodecBenchRow]) -> Vec<u8> {
    let mut out = String::from(CODEC_BENCH_HEADER);
    out.push('\n');
    for r in rows {
        let density = if r.size_bytes == 0 { String::new() } else { (r.bases as f64 / r.size_bytes as f64).to_string() };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.size_bytes, r.sample, r.encoding, r.bases, r.plasmids, density, r.longest_run, r.round_trip
        );
    }
    out.into_bytes()
}

/// Encodes `input` and writes the manifest to `manifest_path` with the
/// plasmids next to it as `<manifest stem>.fasta`.
pub fn cmd_encode(input: &Path, encoding: Encoding, manifest_path: &Path, plasmid_len: usize) -> Result<Manifest> {
    if plasmid_len == 0 {
        bail!("plasmid length must be positive");
    }
    let data = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let file_id = input.file_name().map_or_else(|| "file".to_string(), |n| n.to_string_lossy().replace(' ', "_"));
    let file = EncodedFile::encode(&data, encoding, &file_id, plasmid_len);
    let fasta_path = manifest_path.with_extension("fasta");
    let mut manifest = file.manifest();
    manifest.plasmid_file = fasta_path.file_name().map(|n| n.to_string_lossy().into_owned());
    if let Some(dir) = manifest_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(&fasta_path, file.plasmids_to_fasta()).with_context(|| format!("writing {}", fasta_path.display()))?;
    fs::write(manifest_path, manifest.to_toml()).with_context(|| format!("writing {}", manifest_path.display()))?;
    Ok(manifest)
}

/// Reads a manifest and its plasmid file and writes the decoded bytes.
pub fn cmd_decode(manifest_path: &Path, output: &Path) -> Result<usize> {
    let text = fs::read_to_string(manifest_path).with_context(|| format!("reading {}", manifest_path.display()))?;
    let manifest = Manifest::from_toml(&text).with_context(|| format!("parsing {}", manifest_path.display()))?;
    let plasmids = match &manifest.plasmid_file {
        Some(name) => {
            let path = manifest_path.parent().unwrap_or(Path::new("")).join(name);
            let fasta = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            parse_plasmid_fasta(&fasta).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Vec::new(),
    };
    let file = EncodedFile::from_manifest(&manifest, plasmids)?;
    let data = file.decode()?;
    fs::write(output, &data).with_context(|| format!("writing {}", output.display()))?;
    Ok(data.len())
}
