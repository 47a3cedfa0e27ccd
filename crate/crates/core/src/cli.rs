//! Command-line harness.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a disagreement or
//! `stats-demo` sees a doubly charged pair, 2 on usage, I/O or parse errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bitmat::BitMatrix;
use crate::detector::{check_charging, DetectorConfig};
use crate::fourruss::SparseParams;
use crate::graph::{RunStats, TripartiteGraph, Verdict};
use crate::oracle::{brute_triangle_graph, multiply_scalar_oracle};
use crate::random::InstanceRng;
use crate::reduction::{
    bmm_via_triangle, BlockSpec, BruteForce, Framework, Recursive, SparseOnly, TriangleDetector, ViaBmm,
};

#[derive(Debug, Parser)]
#[command(name = "tribmm", version, about = "Combinatorial triangle detection and Boolean matrix multiplication")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report a triangle of a tripartite graph, or that there is none.
    Detect {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = DetectAlgo::Recursive)]
        algo: DetectAlgo,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        /// Part size below which views are searched exhaustively (default Δ⁶).
        #[arg(long)]
        small_threshold: Option<usize>,
        /// Volume below which the framework searches exhaustively (default n^2.5).
        #[arg(long)]
        volume_threshold: Option<u128>,
        /// Print run counters as key=value lines.
        #[arg(long)]
        stats: bool,
        /// Read a general graph ("n" then "i j" lines) and use its tripartite cover.
        #[arg(long)]
        general: bool,
    },
    /// Multiply two Boolean matrices.
    Multiply {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = MultiplyAlgo::Bitpacked)]
        algo: MultiplyAlgo,
        /// Block side for via-triangle (default ceil(n^(1/3))).
        #[arg(long)]
        block: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check every detector and multiplier against the brute-force oracles.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 32)]
        max_size: usize,
    },
    /// Time algorithms on random instances; CSV on standard output.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        densities: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        algos: Vec<BenchAlgo>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        delta: usize,
    },
    /// Run the recursive detector with the charged-pair ledger.
    StatsDemo {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        #[arg(long)]
        small_threshold: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectAlgo {
    Recursive,
    Sparse,
    Framework,
    Bmm,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MultiplyAlgo {
    Bitpacked,
    ViaTriangle,
    Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchAlgo {
    Recursive,
    Sparse,
    Framework,
    Bmm,
    Brute,
    Bitpacked,
    ViaTriangle,
    Scalar,
}

impl BenchAlgo {
    fn name(self) -> &'static str {
        match self {
            BenchAlgo::Recursive => "recursive",
            BenchAlgo::Sparse => "sparse",
            BenchAlgo::Framework => "framework",
            BenchAlgo::Bmm => "bmm",
            BenchAlgo::Brute => "brute",
            BenchAlgo::Bitpacked => "bitpacked",
            BenchAlgo::ViaTriangle => "via-triangle",
            BenchAlgo::Scalar => "scalar",
        }
    }
}

enum Failure {
    /// Usage, I/O or parse problem; exit 2.
    Usage(String),
}

type CliResult = std::result::Result<i32, Failure>;

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn read_file(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: crate::error::Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> std::result::Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Usage(format!("writing output: {e}")))
}

fn verdict_line(v: &Verdict) -> String {
    match v {
        Verdict::Found(t) => format!("TRIANGLE {} {} {}\n", t.a, t.b, t.c),
        Verdict::TriangleFree => "TRIANGLE-FREE\n".to_string(),
    }
}

fn stats_lines(stats: &RunStats) -> String {
    stats.entries().iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k}={v}");
        s
    })
}

fn detector_for(
    algo: DetectAlgo,
    delta: usize,
    small_threshold: Option<usize>,
    volume_threshold: Option<u128>,
) -> Box<dyn TriangleDetector> {
    match algo {
        DetectAlgo::Recursive => {
            let mut cfg = DetectorConfig::new(delta);
            cfg.small_threshold = small_threshold;
            Box::new(Recursive(cfg))
        }
        DetectAlgo::Sparse => Box::new(SparseOnly(SparseParams::new(delta))),
        DetectAlgo::Framework => {
            let mut fw = Framework::new(delta);
            fw.config.small_volume_threshold = volume_threshold;
            Box::new(fw)
        }
        DetectAlgo::Bmm => Box::new(ViaBmm),
        DetectAlgo::Brute => Box::new(BruteForce),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Detect {
            graph,
            algo,
            delta,
            small_threshold,
            volume_threshold,
            stats: show_stats,
            general,
        } => {
            let text = read_file(&graph)?;
            let g = if general {
                with_path(&graph, TripartiteGraph::parse_general_text(&text))?
            } else {
                with_path(&graph, TripartiteGraph::parse_text(&text))?
            };
            let detector = detector_for(algo, delta, small_threshold, volume_threshold);
            let mut stats = RunStats::default();
            let verdict = detector.detect(&g, &mut stats)?;
            let mut text = verdict_line(&verdict);
            if show_stats {
                text.push_str(&stats_lines(&stats));
            }
            emit(out, &text)?;
            Ok(0)
        }
        Command::Multiply { a, b, algo, block, out: out_path } => {
            let ma = with_path(&a, BitMatrix::parse_text(&read_file(&a)?))?;
            let mb = with_path(&b, BitMatrix::parse_text(&read_file(&b)?))?;
            let product = match algo {
                MultiplyAlgo::Bitpacked => ma.multiply_bitpacked(&mb)?,
                MultiplyAlgo::Scalar => multiply_scalar_oracle(&ma, &mb)?,
                MultiplyAlgo::ViaTriangle => {
                    let n = ma.rows();
                    let spec = match block {
                        Some(t) => BlockSpec::new(n, t)?,
                        None => BlockSpec::default_for(n),
                    };
                    let det = Recursive(DetectorConfig::default());
                    bmm_via_triangle(&ma, &mb, spec, &det, &mut RunStats::default())?
                }
            };
            std::fs::write(&out_path, product.to_text())
                .map_err(|e| Failure::Usage(format!("{}: {e}", out_path.display())))?;
            Ok(0)
        }
        Command::Verify { seed, trials, max_size } => verify(seed, trials, max_size, out),
        Command::Bench {
            sizes,
            densities,
            algos,
            seed,
            delta,
        } => bench(&sizes, &densities, &algos, seed, delta, out),
        Command::StatsDemo {
            graph,
            delta,
            small_threshold,
        } => {
            let g = with_path(&graph, TripartiteGraph::parse_text(&read_file(&graph)?))?;
            let mut cfg = DetectorConfig::new(delta).with_charge_check(true);
            cfg.small_threshold = small_threshold;
            let mut stats = RunStats::default();
            let (verdict, report) = check_charging(&g, &cfg, &mut stats);
            let mut text = verdict_line(&verdict);
            text.push_str(&stats_lines(&stats));
            let _ = writeln!(text, "charged_pairs={}", report.pairs_recorded);
            let _ = writeln!(text, "duplicate_charges={}", report.duplicates);
            let status = match (report.checked, report.held()) {
                (false, _) => "unchecked",
                (true, true) => "held",
                (true, false) => "violated",
            };
            let _ = writeln!(text, "charge_invariant={status}");
            emit(out, &text)?;
            Ok(if report.checked && !report.held() { 1 } else { 0 })
        }
    }
}

const VERIFY_DENSITIES: [f64; 5] = [0.02, 0.1, 0.3, 0.7, 1.0];

fn verify(seed: u64, trials: usize, max_size: usize, out: &mut dyn Write) -> CliResult {
    if max_size == 0 {
        return Err(Failure::Usage("--max-size must be at least 1".into()));
    }
    let mut rng = InstanceRng::new(seed);
    let mut detection_checks = 0u64;
    let mut multiplication_checks = 0u64;
    let mut report = format!("verify seed={seed} trials={trials} max_size={max_size}\n");

    for trial in 0..trials {
        let (na, nb, nc) = (
            rng.between(1, max_size),
            rng.between(1, max_size),
            rng.between(1, max_size),
        );
        let p = VERIFY_DENSITIES[rng.below(VERIFY_DENSITIES.len())];
        let g = rng.graph(na, nb, nc, p);
        let expected = brute_triangle_graph(&g);
        let small = [1, 2, 4, 8][rng.below(4)];
        let volume = [1u128, 8, 64][rng.below(3)];

        let mut recursive = DetectorConfig::new(2).with_small_threshold(small);
        recursive.debug_charge_check = true;
        let mut framework = Framework::new(2);
        framework.config = framework.config.with_small_volume_threshold(volume).with_verify_finder(true);
        let detectors: [(&str, Box<dyn TriangleDetector>); 5] = [
            ("recursive", Box::new(Recursive(recursive))),
            ("recursive-default", Box::new(Recursive(DetectorConfig::default()))),
            ("sparse", Box::new(SparseOnly(SparseParams::new(2)))),
            ("framework", Box::new(framework)),
            ("bmm", Box::new(ViaBmm)),
        ];
        for (name, det) in &detectors {
            detection_checks += 1;
            let got = det.detect(&g, &mut RunStats::default());
            let ok = match &got {
                Ok(v) => v.found() == expected.found() && v.witness().is_none_or(|t| g.is_triangle(t)),
                Err(_) => false,
            };
            if !ok {
                let _ = writeln!(
                    report,
                    "MISMATCH trial={trial} algo={name} expected={} got={}",
                    verdict_line(&expected).trim_end(),
                    match &got {
                        Ok(v) => verdict_line(v).trim_end().to_string(),
                        Err(e) => format!("error: {e}"),
                    }
                );
                report.push_str("counterexample:\n");
                report.push_str(&g.to_text());
                emit(out, &report)?;
                return Ok(1);
            }
        }

        let n = rng.between(1, max_size);
        let p = VERIFY_DENSITIES[rng.below(VERIFY_DENSITIES.len())];
        let a = rng.matrix(n, n, p);
        let b = rng.matrix(n, n, p);
        let expected = multiply_scalar_oracle(&a, &b)?;
        let t = match rng.below(4) {
            0 => 1,
            1 => 2.min(n),
            2 => 4.min(n),
            _ => BlockSpec::default_for(n).t(),
        };
        let det = Recursive(DetectorConfig::new(2).with_small_threshold(small));
        let candidates = [
            ("bitpacked", a.multiply_bitpacked(&b)),
            (
                "via-triangle",
                bmm_via_triangle(&a, &b, BlockSpec::new(n, t)?, &det, &mut RunStats::default()),
            ),
        ];
        for (name, got) in candidates {
            multiplication_checks += 1;
            if got.as_ref() != Ok(&expected) {
                let _ = writeln!(report, "MISMATCH trial={trial} algo={name} block={t}");
                report.push_str("counterexample a:\n");
                report.push_str(&a.to_text());
                report.push_str("counterexample b:\n");
                report.push_str(&b.to_text());
                emit(out, &report)?;
                return Ok(1);
            }
        }
    }
    let _ = writeln!(report, "detection_checks={detection_checks} mismatches=0");
    let _ = writeln!(report, "multiplication_checks={multiplication_checks} mismatches=0");
    report.push_str("OK\n");
    emit(out, &report)?;
    Ok(0)
}

pub const BENCH_HEADER: &str = "algo,n,density,millis,triples_enumerated,pairs_charged,table_queries";

fn bench(
    sizes: &[usize],
    densities: &[f64],
    algos: &[BenchAlgo],
    seed: u64,
    delta: usize,
    out: &mut dyn Write,
) -> CliResult {
    emit(out, &format!("{BENCH_HEADER}\n"))?;
    let mut rng = InstanceRng::new(seed);
    for &n in sizes {
        for &p in densities {
            let g = rng.graph(n, n, n, p);
            let a = rng.matrix(n, n, p);
            let b = rng.matrix(n, n, p);
            for &algo in algos {
                let mut stats = RunStats::default();
                let start = Instant::now();
                match algo {
                    BenchAlgo::Recursive => {
                        detector_for(DetectAlgo::Recursive, delta, None, None).detect(&g, &mut stats)?;
                    }
                    BenchAlgo::Sparse => {
                        detector_for(DetectAlgo::Sparse, delta, None, None).detect(&g, &mut stats)?;
                    }
                    BenchAlgo::Framework => {
                        detector_for(DetectAlgo::Framework, delta, None, None).detect(&g, &mut stats)?;
                    }
                    BenchAlgo::Bmm => {
                        detector_for(DetectAlgo::Bmm, delta, None, None).detect(&g, &mut stats)?;
                    }
                    BenchAlgo::Brute => {
                        detector_for(DetectAlgo::Brute, delta, None, None).detect(&g, &mut stats)?;
                    }
                    BenchAlgo::Bitpacked => {
                        a.multiply_bitpacked(&b)?;
                    }
                    BenchAlgo::Scalar => {
                        multiply_scalar_oracle(&a, &b)?;
                    }
                    BenchAlgo::ViaTriangle => {
                        let det = Recursive(DetectorConfig::new(delta));
                        bmm_via_triangle(&a, &b, BlockSpec::default_for(n), &det, &mut stats)?;
                    }
                }
                let millis = start.elapsed().as_secs_f64() * 1e3;
                emit(
                    out,
                    &format!(
                        "{},{n},{p},{millis:.3},{},{},{}\n",
                        algo.name(),
                        stats.triples_enumerated,
                        stats.pairs_charged,
                        stats.table_queries
                    ),
                )?;
            }
        }
    }
    Ok(0)
}
