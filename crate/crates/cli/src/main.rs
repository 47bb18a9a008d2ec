//! `bdmkit`: build machine-enumeration complexity tables and evaluate
//! block-decomposition estimates, entropy baselines and graph reports.
//!
//! Results go to `--out` or standard output; progress goes to standard
//! error. Every run is reproducible from the command line alone; identical
//! inputs produce byte-identical outputs. Exit codes: 0 success, 1
//! computation error (one `error:` line on stderr), 2 usage error.

use anyhow::{anyhow, bail, Context};
use bdmkit::bdm::{self, BdmConfig, Boundary, Quadrant, Variant};
use bdmkit::block::{self, Block};
use bdmkit::ctm::{self, CtmTable, SampleSpec};
use bdmkit::entropy::{self, BlockNormalization};
use bdmkit::harness::{self, Graph};
use bdmkit::turing::{self, RuleSpace};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "bdmkit",
    version,
    about = "Algorithmic-complexity estimates from machine enumeration and block decomposition",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a rule space and write the complexity lookup table.
    CtmBuild(CtmBuildArgs),
    /// Print table metadata or individual block values.
    CtmShow(CtmShowArgs),
    /// Block-decomposition complexity of a string, matrix or tensor file.
    Bdm(BdmArgs),
    /// Shannon / block entropy of a string.
    Entropy(EntropyArgs),
    /// Correlation sweep of decomposition configurations over all strings
    /// of a fixed length.
    Sweep(SweepArgs),
    /// Exact cospectrality checks, line-graph transforms and pair reports.
    GraphTest(GraphTestArgs),
}

#[derive(Args)]
struct CtmBuildArgs {
    /// Machine states.
    #[arg(long = "t")]
    states: u8,
    /// Tape symbols.
    #[arg(long = "k")]
    symbols: u8,
    /// Tape dimension: 1 (strings) or 2 (matrices).
    #[arg(long, default_value_t = 1)]
    dim: u8,
    /// Step cutoff; defaults to the known Busy Beaver bound of the space.
    #[arg(long)]
    cutoff: Option<u64>,
    /// Number of disjoint index ranges (parallelism hint; no effect on the
    /// output).
    #[arg(long)]
    partitions: Option<u64>,
    /// Base shape of the table, e.g. `8` or `4x4`; defaults to the largest
    /// shape with every class observed.
    #[arg(long)]
    base_shape: Option<String>,
    /// Completion offset added to the per-shape maximum for unobserved
    /// blocks.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Sample every `stride`-th machine instead of the full space (must be
    /// coprime to the per-cell radix).
    #[arg(long)]
    sample_stride: Option<u64>,
    /// First sampled index.
    #[arg(long, default_value_t = 0)]
    sample_offset: u64,
    /// Output table path.
    #[arg(long)]
    out: PathBuf,
    /// Also write the raw output distribution (canonical text form).
    #[arg(long)]
    dist_out: Option<PathBuf>,
}

#[derive(Args)]
struct CtmShowArgs {
    #[arg(long)]
    table: PathBuf,
    /// Print the value of one block key (e.g. `0101` or `2x2:0110`).
    #[arg(long)]
    block: Option<String>,
}

#[derive(Args)]
struct BdmArgs {
    #[arg(long)]
    table: PathBuf,
    /// Object file: one digit line (string), several lines (matrix), or a
    /// `dims=` header (tensor).
    #[arg(long, required_unless_present = "batch")]
    input: Option<PathBuf>,
    /// Per-dimension block size.
    #[arg(long)]
    block: usize,
    /// Window step m (1 <= m <= block); blocks overlap when m < block.
    /// Defaults to the block size (no overlap).
    #[arg(long)]
    overlap: Option<usize>,
    /// Boundary strategy: trim, cyclic, recursive or add-border.
    #[arg(long, default_value = "trim")]
    boundary: String,
    /// Variant: plain, smooth or mi.
    #[arg(long, default_value = "plain")]
    variant: String,
    /// Comma-separated recursive anchor corners (UL, UR, LL, LR).
    #[arg(long, default_value = "UL")]
    quadrants: String,
    /// Print the size-normalized value instead (square matrices).
    #[arg(long)]
    normalized: bool,
    /// Batch mode: read one digit-string object per line and emit a CSV
    /// measure report.
    #[arg(long)]
    batch: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    /// The string itself, as digits.
    string: Option<String>,
    /// Or a file containing it.
    #[arg(long, conflicts_with = "string")]
    input: Option<PathBuf>,
    /// Block length.
    #[arg(long, default_value_t = 1)]
    block: usize,
    /// Slide a window instead of partitioning.
    #[arg(long)]
    overlapping: bool,
    /// Minimize block entropy over sizes up to half the length; prints
    /// `l,value`.
    #[arg(long)]
    best: bool,
    /// Entropy-rate profile: print `l,H_l/l` for every block size up to
    /// half the length (no extrapolation).
    #[arg(long, conflicts_with = "best")]
    rate: bool,
    /// With --best: divide by log2 of the number of distinct possible
    /// blocks realizable at that size.
    #[arg(long)]
    normalized: bool,
    /// With --best --normalized: divide by log2 of the number of block
    /// positions instead.
    #[arg(long)]
    positions: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    table: PathBuf,
    /// String length; the sweep runs over all 2^bits binary strings.
    #[arg(long)]
    bits: usize,
    /// Configurations `block,overlap` separated by `;` (overlap here is
    /// `block - step`, the shared cells between windows). Defaults to every
    /// block size up to the table base with overlaps 0 and block-1.
    #[arg(long)]
    configs: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphTestArgs {
    /// First graph file for a cospectrality check.
    #[arg(long, requires = "g2")]
    g1: Option<PathBuf>,
    /// Second graph file for a cospectrality check.
    #[arg(long)]
    g2: Option<PathBuf>,
    /// Emit the line graph of this graph file.
    #[arg(long, conflicts_with_all = ["g1", "g2", "pairs"])]
    line_of: Option<PathBuf>,
    /// Directory of `pair_NN_g.graph` / `pair_NN_line.graph` files: emit a
    /// BDM pair report (requires --table).
    #[arg(long, conflicts_with_all = ["g1", "g2"])]
    pairs: Option<PathBuf>,
    #[arg(long)]
    table: Option<PathBuf>,
    /// Block size for the pair report decomposition.
    #[arg(long, default_value_t = 2)]
    block: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::CtmBuild(args) => ctm_build(args),
        Command::CtmShow(args) => ctm_show(args),
        Command::Bdm(args) => run_bdm(args),
        Command::Entropy(args) => run_entropy(args),
        Command::Sweep(args) => run_sweep(args),
        Command::GraphTest(args) => graph_test(args),
    }
}

fn parse_shape(text: &str) -> anyhow::Result<Vec<usize>> {
    text.split('x')
        .map(|d| {
            d.parse::<usize>()
                .map_err(|_| anyhow!("bad shape component `{d}`"))
        })
        .collect()
}

/// Largest base shape for which every shape class has at least one
/// observed block and the exhaustive table stays within the row cap (so
/// the table construction cannot fail).
fn auto_base_shape(dist: &ctm::OutputDistribution) -> Vec<usize> {
    let dim = dist.space().dimension() as usize;
    let k = dist.space().symbols() as usize;
    let covered = |shape: &[usize]| dist.counts().keys().any(|b| b.dims() == shape);
    let fits = |base: &[usize]| ctm::tabulation_rows(base, k) <= ctm::MAX_TABLE_ROWS;
    if dim == 1 {
        let mut l = 1;
        while covered(&[l + 1]) && fits(&[l + 1]) {
            l += 1;
        }
        vec![l]
    } else {
        let mut d = 1;
        'grow: loop {
            if !fits(&[d + 1, d + 1]) {
                break;
            }
            for r in 1..=d + 1 {
                for c in 1..=d + 1 {
                    if (r == d + 1 || c == d + 1) && !covered(&[r, c]) {
                        break 'grow;
                    }
                }
            }
            d += 1;
        }
        vec![d, d]
    }
}

fn ctm_build(args: CtmBuildArgs) -> anyhow::Result<()> {
    let space = RuleSpace::new(args.states, args.symbols, args.dim)?;
    let cutoff = turing::halting_cutoff(space, args.cutoff)?;
    let partitions = args.partitions.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|p| p.get() as u64)
            .unwrap_or(1)
    });
    let total = space.machine_count()?;
    eprintln!(
        "building distribution of {space}: {total} machines, cutoff {cutoff}, {partitions} partitions"
    );
    let start = Instant::now();
    let dist = match args.sample_stride {
        Some(stride) => ctm::build_distribution_sampled(
            space,
            cutoff,
            partitions,
            SampleSpec {
                stride,
                offset: args.sample_offset,
            },
        )?,
        None => ctm::build_distribution(space, cutoff, partitions)?,
    };
    eprintln!(
        "halting machines: {} of {} simulated, {} distinct outputs, {:.1}s",
        dist.halting_machines(),
        match dist.sample() {
            Some(s) => (total - s.offset - 1) / s.stride + 1,
            None => total,
        },
        dist.counts().len(),
        start.elapsed().as_secs_f64()
    );
    if let Some(path) = &args.dist_out {
        std::fs::write(path, dist.to_canonical_string())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let base = match &args.base_shape {
        Some(text) => parse_shape(text)?,
        None => auto_base_shape(&dist),
    };
    let table = ctm::ctm_table(&dist, &base, args.r)?;
    table.save(&args.out)?;
    eprintln!(
        "table: base shape {}, {} rows -> {}",
        base.iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x"),
        table.len(),
        args.out.display()
    );
    Ok(())
}

fn ctm_show(args: CtmShowArgs) -> anyhow::Result<()> {
    let table = CtmTable::load(&args.table)?;
    let space = table.space();
    let mut text = format!(
        "space={},{},{} cutoff={} total_halting={} completion_r={} base_shape={} rows={} min_bits={:.6} max_bits={:.6}\n",
        space.states(),
        space.symbols(),
        space.dimension(),
        table.cutoff(),
        table.total_halting(),
        table.completion_r(),
        table
            .base_shape()
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("x"),
        table.len(),
        table.min_bits(),
        table.max_bits(),
    );
    if let Some(sample) = table.sample() {
        text.push_str(&format!(
            "sampled: stride={} offset={}\n",
            sample.stride, sample.offset
        ));
    }
    if let Some(key) = &args.block {
        let block = Block::from_key(key)?;
        let bits = table.lookup(&block)?;
        let origin = match table.entry(&block).and_then(|e| e.count) {
            Some(c) => format!("count={c}"),
            None => "completed".to_string(),
        };
        text.push_str(&format!("{key}: {bits:.12} ({origin})\n"));
    }
    print!("{text}");
    Ok(())
}

fn run_bdm(args: BdmArgs) -> anyhow::Result<()> {
    let table = CtmTable::load(&args.table)?;
    let quadrants: Vec<Quadrant> = args
        .quadrants
        .split(',')
        .map(|q| q.trim().parse())
        .collect::<Result<_, _>>()?;
    let config = BdmConfig {
        block_size: args.block,
        offset: args.overlap.unwrap_or(args.block),
        boundary: args.boundary.parse::<Boundary>()?,
        variant: args.variant.parse::<Variant>()?,
        quadrants,
    };

    if let Some(batch) = &args.batch {
        let text = std::fs::read_to_string(batch)
            .with_context(|| format!("reading {}", batch.display()))?;
        let objects: Vec<(String, Block)> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| Ok((l.trim().to_string(), Block::from_digits(l.trim())?)))
            .collect::<bdmkit::Result<_>>()?;
        let csv = harness::measure_report(&objects, &table, std::slice::from_ref(&config));
        return emit(args.out.as_deref(), &csv);
    }

    let input = args.input.as_ref().expect("clap enforces input xor batch");
    let text =
        std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let object = block::parse_object(&text)?;
    let value = if args.normalized {
        bdm::normalized_bdm(&object, &table, args.block)?
    } else {
        bdm::bdm(&object, &table, &config)?.value
    };
    emit(args.out.as_deref(), &format!("{value:.6}\n"))
}

fn run_entropy(args: EntropyArgs) -> anyhow::Result<()> {
    let digits = match (&args.string, &args.input) {
        (Some(s), None) => s.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .trim()
            .to_string(),
        _ => bail!("provide the string either inline or via --input"),
    };
    let object = Block::from_digits(&digits)?;
    let text = if args.best {
        let norm = match (args.normalized, args.positions) {
            (false, _) => BlockNormalization::None,
            (true, false) => BlockNormalization::DistinctBlocks,
            (true, true) => BlockNormalization::Positions,
        };
        let (l, value) = entropy::best_block_entropy(&object, norm)?;
        format!("{l},{value:.6}\n")
    } else if args.rate {
        let mut out = String::from("l,h_over_l\n");
        for l in 1..=object.cells() / 2 {
            let h = entropy::block_entropy(&object, l, args.overlapping)?;
            out.push_str(&format!("{l},{:.6}\n", h / l as f64));
        }
        out
    } else {
        let h = entropy::block_entropy(&object, args.block, args.overlapping)?;
        format!("{h:.6}\n")
    };
    emit(args.out.as_deref(), &text)
}

fn run_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let table = CtmTable::load(&args.table)?;
    if args.bits == 0 || args.bits > 20 {
        bail!("bits must be between 1 and 20");
    }
    if table.alphabet() != 2 {
        bail!(
            "sweep enumerates binary strings; table alphabet is {}",
            table.alphabet()
        );
    }
    let configs: Vec<(usize, usize)> = match &args.configs {
        Some(text) => text
            .split(';')
            .map(|pair| {
                let (b, o) = pair
                    .split_once(',')
                    .ok_or_else(|| anyhow!("bad config `{pair}`, expected `block,overlap`"))?;
                Ok((b.trim().parse()?, o.trim().parse()?))
            })
            .collect::<anyhow::Result<_>>()?,
        None => {
            let max_block = table.base_shape()[0].min(args.bits);
            (1..=max_block)
                .flat_map(|b| [(b, 0)].into_iter().chain((b > 1).then_some((b, b - 1))))
                .collect()
        }
    };
    let strings = harness::all_binary_strings(args.bits);
    let report = harness::correlation_sweep(&strings, &table, &configs)?;
    emit(args.out.as_deref(), &report.to_csv())
}

fn load_graph(path: &Path) -> anyhow::Result<Graph> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Graph::from_text(&text, &path.display().to_string())?)
}

fn graph_test(args: GraphTestArgs) -> anyhow::Result<()> {
    if let (Some(g1), Some(g2)) = (&args.g1, &args.g2) {
        let a = load_graph(g1)?;
        let b = load_graph(g2)?;
        let verdict = harness::is_cospectral(&a, &b);
        return emit(args.out.as_deref(), &format!("cospectral: {verdict}\n"));
    }
    if let Some(path) = &args.line_of {
        let g = load_graph(path)?;
        let lg = harness::line_graph(&g)?;
        return emit(args.out.as_deref(), &lg.to_text());
    }
    if let Some(dir) = &args.pairs {
        let table_path = args
            .table
            .as_ref()
            .ok_or_else(|| anyhow!("--pairs needs --table"))?;
        let table = CtmTable::load(table_path)?;
        let mut pairs = Vec::new();
        for i in 0.. {
            let g_path = dir.join(format!("pair_{i:02}_g.graph"));
            let l_path = dir.join(format!("pair_{i:02}_line.graph"));
            if !g_path.exists() || !l_path.exists() {
                break;
            }
            pairs.push((load_graph(&g_path)?, load_graph(&l_path)?));
        }
        if pairs.is_empty() {
            bail!("no pair_NN_g.graph files under {}", dir.display());
        }
        let (csv, rho) = harness::pair_report(&pairs, &table, args.block)?;
        eprintln!("{} pairs, spearman rho {rho:.6}", pairs.len());
        return emit(args.out.as_deref(), &csv);
    }
    bail!("choose a mode: --g1/--g2, --line-of, or --pairs")
}
