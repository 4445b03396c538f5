//! The `tropmedian` command line.
//!
//! Exit codes: 0 on success, 1 when the input is rejected or a computation
//! fails, 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bench::{bench_gcd_scan, bench_staircase, scan_csv};
use crate::consensus::{input_ultrametrics, tropical_median, ConsensusOptions};
use crate::error::{Error, Result};
use crate::fw::{dimension, fw_polytrope_with, tropical_vertices, FacetMethod};
use crate::io::{read_matrix, read_weights};
use crate::rational::format_rational;
use crate::transport::{recover_primal, solve_transportation};
use crate::trees::{
    common_taxa, parse_newick, parse_tree_file, pointwise_max_consensus, rooted_triplets, tree_to_ultrametric,
    PhyloTree, Representative, Ultrametric,
};
use crate::tropical::{d_asym_raw, d_sym_raw, SiteMatrix};

#[derive(Debug, Parser)]
#[command(name = "tropmedian", version, about = "Tropical Fermat–Weber points, polytropes and median consensus trees")]
pub struct Cli {
    /// Worker threads for the per-facet linear programs.
    #[arg(long, global = true, value_name = "K")]
    pub threads: Option<usize>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Newick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Shortest paths in the complementary-slackness constraint graph.
    Paths,
    /// One exact linear program per ordered coordinate pair.
    Lp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Normalize {
    Raw,
    #[value(name = "H", alias = "h")]
    H,
}

#[derive(Debug, Args)]
pub struct SitesArgs {
    /// Comma- or tab-separated matrix, one site per row.
    pub sites: PathBuf,
    /// Skip the first non-comment line.
    #[arg(long)]
    pub header: bool,
    /// Positive integer multiplicity per site.
    #[arg(long, value_name = "FILE")]
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tropical median consensus tree of equidistant Newick trees.
    Consensus {
        input: PathBuf,
        /// Positive integer multiplicity per tree.
        #[arg(long, value_name = "FILE")]
        weights: Option<PathBuf>,
        /// Stretch pendant edges of non-equidistant inputs.
        #[arg(long)]
        adjust_equidistant: bool,
        #[arg(long, value_enum, default_value = "paths")]
        method: Method,
    },
    /// One Fermat–Weber point from the optimal transportation basis.
    FwPoint {
        #[command(flatten)]
        sites: SitesArgs,
        /// Also print the optimal transportation plan.
        #[arg(long)]
        dump_plan: bool,
    },
    /// The whole Fermat–Weber polytrope.
    FwSet {
        #[command(flatten)]
        sites: SitesArgs,
        #[arg(long, value_enum, default_value = "paths")]
        method: Method,
    },
    /// Check that every tree parses, is equidistant and uses the same taxa.
    Validate { input: PathBuf },
    /// Pairwise distances between sites, or between trees with `--trees`.
    Dist {
        input: PathBuf,
        /// Read Newick trees and compare their ultrametrics.
        #[arg(long)]
        trees: bool,
        /// Symmetric distance instead of the asymmetric one.
        #[arg(long)]
        symmetric: bool,
        #[arg(long)]
        header: bool,
    },
    /// Rooted triplets of each tree.
    Triplets { input: PathBuf },
    /// Pointwise-maximum consensus of equidistant trees.
    Pmax {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "raw")]
        normalize: Normalize,
    },
    /// Timing and dimension workloads.
    Bench {
        /// Staircase instance, e.g. `--staircase m=6 n=9`.
        #[arg(long, num_args = 2, value_names = ["m=M", "n=N"], conflicts_with = "taxa")]
        staircase: Option<Vec<String>>,
        /// Taxa per random tree for the gcd scan.
        #[arg(long, default_value_t = 5)]
        taxa: usize,
        /// Largest sample size in the gcd scan.
        #[arg(long, default_value_t = 50)]
        m_max: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            let _ = writeln!(err, "error: --threads must be at least 1");
            return 2;
        }
        // A global pool can be built once per process; later calls keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    if let Command::Bench { staircase: Some(items), .. } = &cli.command {
        if let Err(e) = parse_staircase(items) {
            let _ = writeln!(err, "error: --staircase: {e}");
            return 2;
        }
    }
    let outcome = match &cli.command {
        Command::Validate { input } => validate(&cli, input),
        _ => execute(&cli).map(|text| (text, true)),
    };
    match outcome {
        Ok((text, ok)) => match out.write_all(text.as_bytes()) {
            Ok(()) => i32::from(!ok),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn format_of(cli: &Cli, default: Format) -> Format {
    if cli.json {
        Format::Json
    } else {
        cli.format.unwrap_or(default)
    }
}

fn facet_method(m: Method) -> FacetMethod {
    match m {
        Method::Paths => FacetMethod::ShortestPaths,
        Method::Lp => FacetMethod::LinearPrograms,
    }
}

fn load_sites(args: &SitesArgs) -> Result<SiteMatrix> {
    let rows = read_matrix(&read(&args.sites)?, args.header)?;
    match &args.weights {
        Some(path) => SiteMatrix::with_weights(rows, read_weights(&read(path)?)?),
        None => SiteMatrix::new(rows),
    }
}

fn load_trees(path: &Path) -> Result<Vec<PhyloTree>> {
    let trees = parse_tree_file(&read(path)?)?;
    if trees.is_empty() {
        return Err(Error::Input(format!("{}: no trees", path.display())));
    }
    Ok(trees)
}

fn strings(values: &[crate::rational::Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Consensus { input, weights, adjust_equidistant, method } => {
            let trees = load_trees(input)?;
            let weights = weights.as_ref().map(|p| read(p).and_then(|t| read_weights(&t))).transpose()?;
            let options = ConsensusOptions {
                weights,
                adjust_equidistant: *adjust_equidistant,
                facet_method: facet_method(*method),
            };
            let r = tropical_median(&trees, &options)?;
            Ok(match format_of(cli, Format::Newick) {
                Format::Newick => format!("{}\n", r.tree),
                Format::Json => pretty(&r.to_json()),
                Format::Text => {
                    let mut s = String::new();
                    writeln!(s, "tree {}", r.tree).unwrap();
                    writeln!(s, "p_star {}", format_rational(&r.p_star)).unwrap();
                    writeln!(s, "fw_dimension {}", r.fw_dimension).unwrap();
                    writeln!(s, "tropical_vertex_count {}", r.tropical_vertex_count).unwrap();
                    writeln!(s, "distances {}", strings(&r.distances).join(" ")).unwrap();
                    s
                }
            })
        }
        Command::FwPoint { sites, dump_plan } => {
            let sites = load_sites(sites)?;
            let plan = solve_transportation(&sites)?;
            let primal = recover_primal(&plan, &sites)?;
            Ok(match format_of(cli, Format::Text) {
                Format::Json => {
                    let mut v = json!({
                        "point": strings(primal.x.coords()),
                        "t": strings(&primal.t),
                        "p_star": format_rational(&primal.value),
                    });
                    if *dump_plan {
                        v["plan"] = plan.to_json();
                    }
                    pretty(&v)
                }
                _ => {
                    let mut s = format!("{}\n", primal.x);
                    if *dump_plan {
                        writeln!(s, "objective {}", format_rational(plan.objective())).unwrap();
                        for row in plan.flow() {
                            writeln!(s, "{}", strings(row).join(" ")).unwrap();
                        }
                    }
                    s
                }
            })
        }
        Command::FwSet { sites, method } => {
            let sites = load_sites(sites)?;
            let p = fw_polytrope_with(&sites, facet_method(*method))?;
            Ok(match format_of(cli, Format::Text) {
                Format::Json => pretty(&p.to_json()),
                _ => {
                    let mut s = String::new();
                    writeln!(s, "p_star {}", format_rational(p.optimal_value())).unwrap();
                    writeln!(s, "dimension {}", dimension(&p)).unwrap();
                    writeln!(s, "bounds").unwrap();
                    for row in p.bounds() {
                        writeln!(s, "{}", strings(row).join(" ")).unwrap();
                    }
                    writeln!(s, "tropical_vertices").unwrap();
                    for v in tropical_vertices(&p) {
                        writeln!(s, "{v}").unwrap();
                    }
                    s
                }
            })
        }
        Command::Validate { .. } => unreachable!("handled in run"),
        Command::Dist { input, trees, symmetric, header } => {
            let (labels, rows): (Vec<String>, Vec<Vec<crate::rational::Rational>>) = if *trees {
                let ums = input_ultrametrics(&load_trees(input)?, false)?;
                (
                    (0..ums.len()).map(|k| format!("tree{k}")).collect(),
                    ums.iter().map(|u| u.values().to_vec()).collect(),
                )
            } else {
                let rows = read_matrix(&read(input)?, *header)?;
                ((0..rows.len()).map(|k| format!("site{k}")).collect(), rows)
            };
            let metric = if *symmetric { d_sym_raw } else { d_asym_raw };
            let table = rows
                .iter()
                .map(|a| rows.iter().map(|b| metric(a, b).map(|d| format_rational(&d))).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(match format_of(cli, Format::Text) {
                Format::Json => pretty(&json!({ "labels": labels, "symmetric": symmetric, "distances": table })),
                _ => table.iter().map(|r| r.join(" ") + "\n").collect(),
            })
        }
        Command::Triplets { input } => {
            let ums = input_ultrametrics(&load_trees(input)?, false)?;
            let lists: Vec<Vec<String>> = ums
                .iter()
                .map(|u| rooted_triplets(u).iter().map(|t| t.display(u.taxa()).to_string()).collect())
                .collect();
            Ok(match format_of(cli, Format::Text) {
                Format::Json => pretty(&json!({ "triplets": lists })),
                _ => lists.iter().map(|l| l.join(" ") + "\n").collect(),
            })
        }
        Command::Pmax { input, normalize } => {
            let ums = input_ultrametrics(&load_trees(input)?, false)?;
            let rep = match normalize {
                Normalize::Raw => Representative::Raw,
                Normalize::H => Representative::H,
            };
            let u = pointwise_max_consensus(&ums, rep)?;
            Ok(match format_of(cli, Format::Newick) {
                Format::Json => pretty(&json!({
                    "tree": u.to_tree().to_string(),
                    "ultrametric": { "pairs": u.pair_labels(), "d": strings(u.values()) },
                })),
                Format::Text => format!("{u}\n"),
                Format::Newick => format!("{}\n", u.to_tree()),
            })
        }
        Command::Bench { staircase, taxa, m_max, seed } => match staircase {
            Some(items) => {
                let (m, n) = parse_staircase(items)?;
                let r = bench_staircase(m, n)?;
                Ok(match format_of(cli, Format::Text) {
                    Format::Json => pretty(&json!({
                        "m": r.m, "n": r.n, "dimension": r.dim, "tropical_vertices": r.vertices, "micros": r.micros,
                    })),
                    _ => format!(
                        "staircase m={} n={} dimension={} tropical_vertices={} micros={}\n",
                        r.m, r.n, r.dim, r.vertices, r.micros
                    ),
                })
            }
            None => Ok(scan_csv(&bench_gcd_scan(*taxa, 1..=*m_max, *seed)?)),
        },
    }
}

fn parse_staircase(items: &[String]) -> Result<(usize, usize)> {
    let mut m = None;
    let mut n = None;
    for item in items {
        let (key, value) =
            item.split_once('=').ok_or_else(|| Error::Input(format!("expected key=value, got {item:?}")))?;
        let value: usize = value.parse().map_err(|_| Error::Input(format!("bad size in {item:?}")))?;
        match key {
            "m" => m = Some(value),
            "n" => n = Some(value),
            _ => return Err(Error::Input(format!("unknown staircase key {key:?}"))),
        }
    }
    match (m, n) {
        (Some(m), Some(n)) if m >= 1 && n >= 2 => Ok((m, n)),
        _ => Err(Error::Input("staircase needs m >= 1 and n >= 2".into())),
    }
}

/// Line-by-line checks so one bad tree does not hide the others. The flag
/// says whether everything passed.
fn validate(cli: &Cli, input: &Path) -> Result<(String, bool)> {
    let text = read(input)?;
    let mut problems: Vec<String> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut ultrametrics: Vec<Ultrametric> = Vec::new();
    let mut count = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        count += 1;
        let at = lineno + 1;
        match parse_newick(line).and_then(|t| tree_to_ultrametric(&t)) {
            Ok(u) => {
                for (a, b) in u.zero_pairs() {
                    warnings.push(format!("line {at}: zero distance {a}|{b}"));
                }
                ultrametrics.push(u);
            }
            Err(e) => problems.push(format!("line {at}: {e}")),
        }
    }
    if count == 0 {
        problems.push("no trees".into());
    }
    if problems.is_empty() {
        if let Err(e) = common_taxa(ultrametrics.iter().map(|u| u.taxa())) {
            problems.push(e.to_string());
        }
    }
    let report = match format_of(cli, Format::Text) {
        Format::Json => pretty(&json!({
            "trees": count, "valid": problems.is_empty(), "problems": problems, "warnings": warnings,
        })),
        _ => {
            let mut s = String::new();
            for w in &warnings {
                writeln!(s, "warning: {w}").unwrap();
            }
            for p in &problems {
                writeln!(s, "invalid: {p}").unwrap();
            }
            if problems.is_empty() {
                writeln!(s, "ok: {count} equidistant trees").unwrap();
            }
            s
        }
    };
    Ok((report, problems.is_empty()))
}
