//! `cayley-spectra`: generate graphs, compute spectra, check DISC and EIG,
//! extract witnesses, count closed walks and audit the interval lemmas.
//!
//! Exit status: 0 when the report was computed, 1 when `--strict` is set and
//! the verdict is a violation or failure, 2 on any usage or input error.

mod document;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cayley_spectra::audit::{
    audit_all_characters, audit_appendix_lemmas, AuditGrid, LemmaAuditEntry, LemmaAuditReport,
};
use cayley_spectra::cayley::MAX_DENSE_ORDER;
use cayley_spectra::discrepancy::PairCandidate;
use cayley_spectra::generators::{blowup, complete, cycle, gnp_plus_clique, interval_cayley, random_cyclic_cayley};
use cayley_spectra::interval::{audit_interval_identity, quotient_weights, IdentityAudit, QuotientWeights};
use cayley_spectra::spectrum::eigenvalues_adjacency;
use cayley_spectra::walks::{check_circuit_matrix, check_circuit_with, closed_walk_count_matrix, MAX_MATRIX_ORDER};
use cayley_spectra::witness::TrialSummary;
use cayley_spectra::{
    check_disc, check_disc2, check_eig, closed_walk_count, eigenvalues_character, extract_disc_violator,
    parse_rational, CayleyGraph, CharacterIndex, Error, ExtractionConfig, ExtractionResult, Graph, Rational, Strategy,
    VertexSet, WalkMethod,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use document::{GraphDocument, LoadedGraph};

/// Rational parameters are given as decimal strings or fractions and parsed
/// exactly: "0.2" is 1/5, "1/3" is one third.
#[derive(Parser)]
#[command(
    name = "cayley-spectra",
    version,
    about = "Spectra and discrepancy of Cayley graphs on finite abelian groups"
)]
struct Cli {
    /// Worker threads for parallel sections; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exit with status 1 when the verdict is a violation or a failure.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the report (or the generated document) to this file.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    /// Report format; CSV is available for spectra only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph and write its document.
    Generate(GenerateArgs),
    /// Eigenvalues, by characters (Cayley) or dense Jacobi (any graph).
    Spectrum(SpectrumArgs),
    /// Check EIG(eps) on a Cayley graph.
    Eig(EigArgs),
    /// Check DISC(delta) or, with --pairs, DISC2(delta).
    Disc(DiscArgs),
    /// Turn a large nontrivial eigenvalue into a set violating DISC.
    Witness(WitnessArgs),
    /// Count closed walks and optionally check CIRCUIT.
    Walks(WalksArgs),
    /// Audit the interval lemmas for one or all nontrivial characters.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Interval,
    Cycle,
    Complete,
    CyclicRandom,
    Blowup,
    GnpClique,
    Explicit,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: Option<u64>,
    /// Interval half-width, or blowup factor.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long, value_parser = rational)]
    p: Option<Rational>,
    #[arg(long, value_parser = rational)]
    alpha: Option<Rational>,
    #[arg(long)]
    seed: Option<u64>,
    /// Source document for --family blowup.
    #[arg(long)]
    from: Option<PathBuf>,
    /// Comma-separated moduli for --family explicit, e.g. "4,2".
    #[arg(long)]
    moduli: Option<String>,
    /// Connection set for --family explicit: elements separated by ';',
    /// residues by ',', e.g. "1,0;3,0".
    #[arg(long)]
    elements: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpectrumMethod {
    Character,
    Dense,
}

#[derive(Args)]
struct SpectrumArgs {
    graph: PathBuf,
    /// Defaults to character for Cayley documents, dense otherwise.
    #[arg(long, value_enum)]
    method: Option<SpectrumMethod>,
}

#[derive(Args)]
struct EigArgs {
    graph: PathBuf,
    #[arg(long, value_parser = rational)]
    eps: Rational,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiscMode {
    Exhaustive,
    Sampled,
    Guided,
}

#[derive(Args)]
struct DiscArgs {
    graph: PathBuf,
    /// Required unless --from-witness supplies it.
    #[arg(long, value_parser = rational)]
    delta: Option<Rational>,
    #[arg(long, value_enum, default_value_t = DiscMode::Exhaustive)]
    mode: DiscMode,
    /// Shorthand for --mode guided.
    #[arg(long)]
    guided: bool,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Check DISC2 on disjoint pairs instead of DISC on single sets.
    #[arg(long)]
    pairs: bool,
    /// A guided candidate: vertex indices separated by ',', and for --pairs
    /// the two sides separated by '|'. Repeatable.
    #[arg(long = "set")]
    sets: Vec<String>,
    /// Use the violator recorded in a witness report as the guided candidate.
    #[arg(long)]
    from_witness: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    graph: PathBuf,
    #[arg(long, value_parser = rational)]
    eps: Rational,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    max_tries: usize,
    /// Allowed distance of each sampled set size from its target fraction.
    #[arg(long, value_parser = rational, default_value = "0.05")]
    slack: Rational,
    /// Overrides the default eps/5 (eps/10 for real characters).
    #[arg(long, value_parser = rational)]
    delta: Option<Rational>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WalkMethodArg {
    Spectral,
    Matrix,
    Both,
}

#[derive(Args)]
struct WalksArgs {
    graph: PathBuf,
    #[arg(long)]
    length: u32,
    /// Defaults to both up to order 256, spectral above; generic graphs
    /// support matrix only.
    #[arg(long, value_enum)]
    method: Option<WalkMethodArg>,
    /// Check CIRCUIT at this tolerance (even length of at least 4).
    #[arg(long, value_parser = rational)]
    circuit_tol: Option<Rational>,
}

#[derive(Args)]
struct AuditArgs {
    graph: PathBuf,
    /// Character index as comma-separated residues; all nontrivial
    /// characters when omitted.
    #[arg(long)]
    character: Option<String>,
    /// Interval identity tuple "s,l,t" for the chosen character.
    #[arg(long)]
    identity: Option<String>,
    /// Include every audit entry, not only failures.
    #[arg(long)]
    entries: bool,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// A usage or input problem; always exit status 2.
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

impl From<String> for Usage {
    fn from(s: String) -> Self {
        Usage(s)
    }
}

type Outcome<T> = Result<T, Usage>;

struct Report {
    text: String,
    failed: bool,
}

impl Report {
    fn json<T: Serialize>(value: &T, failed: bool) -> Outcome<Self> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Usage(e.to_string()))?;
        text.push('\n');
        Ok(Report { text, failed })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => {
            if let Err(e) = emit(cli.output.as_deref(), &report.text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if cli.strict && report.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn run(cli: &Cli) -> Outcome<Report> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| Usage(e.to_string()))?;
    }
    if cli.format == Format::Csv && !matches!(cli.command, Command::Spectrum(_)) {
        return Err(Usage("--format csv is only available for spectrum".into()));
    }
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Spectrum(a) => spectrum(a, cli.format),
        Command::Eig(a) => eig(a),
        Command::Disc(a) => disc(a),
        Command::Witness(a) => witness(a),
        Command::Walks(a) => walks(a),
        Command::Audit(a) => audit(a),
    }
}

fn load(path: &Path) -> Outcome<LoadedGraph> {
    Ok(GraphDocument::read(path)?.to_graph()?)
}

fn load_cayley(path: &Path, command: &str) -> Outcome<CayleyGraph> {
    match load(path)? {
        LoadedGraph::Cayley(g) => Ok(g),
        LoadedGraph::Generic(_) => Err(Usage(format!("{command} needs a Cayley graph document"))),
    }
}

fn need<T>(value: Option<T>, flag: &str, family: &str) -> Outcome<T> {
    value.ok_or_else(|| Usage(format!("--family {family} needs {flag}")))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Outcome<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Usage(format!("cannot parse {what} from {t:?}"))))
        .collect()
}

fn generate(a: &GenerateArgs) -> Outcome<Report> {
    let doc = match a.family {
        Family::Interval => {
            GraphDocument::from_cayley(&interval_cayley(need(a.n, "--n", "interval")?, need(a.k, "--k", "interval")?)?)
        }
        Family::Cycle => GraphDocument::from_cayley(&cycle(need(a.n, "--n", "cycle")?)?),
        Family::Complete => GraphDocument::from_cayley(&complete(need(a.n, "--n", "complete")?)?),
        Family::CyclicRandom => GraphDocument::from_cayley(&random_cyclic_cayley(
            need(a.n, "--n", "cyclic-random")?,
            need(a.p, "--p", "cyclic-random")?,
            need(a.seed, "--seed", "cyclic-random")?,
        )?),
        Family::Blowup => {
            let base = load_cayley(&need(a.from.clone(), "--from", "blowup")?, "blowup")?;
            GraphDocument::from_cayley(&blowup(&base, need(a.k, "--k", "blowup")?)?)
        }
        Family::GnpClique => {
            let n = need(a.n, "--n", "gnp-clique")?;
            let h = gnp_plus_clique(
                usize::try_from(n).map_err(|_| Usage("--n is too large".into()))?,
                need(a.p, "--p", "gnp-clique")?,
                need(a.alpha, "--alpha", "gnp-clique")?,
                need(a.seed, "--seed", "gnp-clique")?,
            )?;
            GraphDocument::from_generic(&h.graph)
        }
        Family::Explicit => {
            let moduli: Vec<u64> = parse_list(&need(a.moduli.clone(), "--moduli", "explicit")?, "a modulus")?;
            let elements: Vec<Vec<i64>> = need(a.elements.clone(), "--elements", "explicit")?
                .split(';')
                .filter(|e| !e.trim().is_empty())
                .map(|e| parse_list(e, "a residue"))
                .collect::<Outcome<_>>()?;
            GraphDocument::from_cayley(&CayleyGraph::from_parts(&moduli, &elements)?)
        }
    };
    let g = doc.to_graph()?;
    let graph = g.as_graph();
    let n = graph.order();
    let pairs = (n * n.saturating_sub(1) / 2).max(1);
    let degree = match &g {
        LoadedGraph::Cayley(c) => format!("degree {}", c.degree()),
        LoadedGraph::Generic(_) => format!("average degree {:.4}", graph.average_degree()),
    };
    eprintln!(
        "{} graph: order {n}, {degree}, {} edges, density {:.6}",
        g.kind(),
        graph.edge_count(),
        graph.edge_count() as f64 / pairs as f64
    );
    Report::json(&doc, false)
}

#[derive(Serialize)]
struct SpectrumRow {
    index: usize,
    t: Option<CharacterIndex>,
    lambda: f64,
}

fn spectrum(a: &SpectrumArgs, format: Format) -> Outcome<Report> {
    let g = load(&a.graph)?;
    let method = a.method.unwrap_or(match g {
        LoadedGraph::Cayley(_) => SpectrumMethod::Character,
        LoadedGraph::Generic(_) => SpectrumMethod::Dense,
    });
    let rows: Vec<SpectrumRow> = match (method, &g) {
        (SpectrumMethod::Character, LoadedGraph::Cayley(c)) => eigenvalues_character(c)?
            .entries
            .into_iter()
            .map(|e| SpectrumRow { index: e.index, t: Some(e.character), lambda: e.lambda })
            .collect(),
        (SpectrumMethod::Character, LoadedGraph::Generic(_)) => {
            return Err(Usage("the character method needs a Cayley graph document".into()))
        }
        (SpectrumMethod::Dense, _) => {
            let graph = g.as_graph();
            if graph.order() > MAX_DENSE_ORDER {
                return Err(Usage(format!("dense spectra are limited to order {MAX_DENSE_ORDER}")));
            }
            eigenvalues_adjacency(&graph.adjacency_matrix()?)?
                .into_iter()
                .enumerate()
                .map(|(index, lambda)| SpectrumRow { index, t: None, lambda })
                .collect()
        }
    };
    match format {
        Format::Json => Report::json(
            &json!({
                "kind": g.kind(),
                "method": match method { SpectrumMethod::Character => "character", SpectrumMethod::Dense => "dense" },
                "order": g.as_graph().order(),
                "eigenvalues": rows,
            }),
            false,
        ),
        Format::Csv => {
            let mut text = String::from("index,t,lambda\n");
            for r in rows {
                let t = r.t.map(|t| t.residues().iter().map(u64::to_string).collect::<Vec<_>>().join(":"));
                text.push_str(&format!("{},{},{:.12}\n", r.index, t.unwrap_or_default(), r.lambda));
            }
            Ok(Report { text, failed: false })
        }
    }
}

fn eig(a: &EigArgs) -> Outcome<Report> {
    let g = load_cayley(&a.graph, "eig")?;
    let spectrum = eigenvalues_character(&g)?;
    let report = check_eig(&spectrum, a.eps)?;
    let failing_lambda = report.failing_character.as_ref().and_then(|t| spectrum.entry_for(t)).map(|e| e.lambda);
    let mut value = serde_json::to_value(&report).map_err(|e| Usage(e.to_string()))?;
    value["failing_lambda"] = json!(failing_lambda);
    Report::json(&value, !report.holds)
}

fn parse_set(n: usize, s: &str) -> Outcome<VertexSet> {
    Ok(VertexSet::from_indices(n, parse_list::<usize>(s, "a vertex index")?)?)
}

fn witness_candidate(path: &Path) -> Outcome<(Vec<usize>, Option<Rational>)> {
    let text = fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let set = v["violator_set"]
        .as_array()
        .ok_or_else(|| Usage(format!("{} does not record a violator set", path.display())))?
        .iter()
        .map(|x| x.as_u64().map(|i| i as usize).ok_or_else(|| Usage("violator set entries must be indices".into())))
        .collect::<Outcome<Vec<_>>>()?;
    let delta = v["delta_used"].as_str().map(rational).transpose()?;
    Ok((set, delta))
}

fn disc(a: &DiscArgs) -> Outcome<Report> {
    let g = load(&a.graph)?;
    let graph = g.as_graph();
    let n = graph.order();
    let mut mode = if a.guided { DiscMode::Guided } else { a.mode };
    let mut delta = a.delta;
    let mut singles: Vec<VertexSet> = Vec::new();
    let mut pairs: Vec<PairCandidate> = Vec::new();
    if let Some(path) = &a.from_witness {
        if a.pairs {
            return Err(Usage("--from-witness supplies a single set, not a pair".into()));
        }
        let (set, recorded) = witness_candidate(path)?;
        singles.push(VertexSet::from_indices(n, set)?);
        delta = delta.or(recorded);
        mode = DiscMode::Guided;
    }
    let delta = delta.ok_or_else(|| Usage("--delta is required".into()))?;
    for s in &a.sets {
        if a.pairs {
            let (u, w) = s.split_once('|').ok_or_else(|| Usage(format!("pair {s:?} needs the form 'u,..|w,..'")))?;
            pairs.push((parse_set(n, u)?, parse_set(n, w)?));
        } else {
            singles.push(parse_set(n, s)?);
        }
    }
    if mode == DiscMode::Exhaustive && matches!(g, LoadedGraph::Generic(_)) {
        return Err(Usage("generic documents support the sampled and guided modes only".into()));
    }
    if mode == DiscMode::Guided && singles.is_empty() && pairs.is_empty() {
        return Err(Usage("guided mode needs --set or --from-witness".into()));
    }
    if mode != DiscMode::Guided && !(singles.is_empty() && pairs.is_empty()) {
        return Err(Usage("--set is only used in guided mode".into()));
    }
    let seed = || a.seed.ok_or_else(|| Usage("sampled mode needs an explicit --seed".into()));
    let report = if a.pairs {
        let strategy = match mode {
            DiscMode::Exhaustive => Strategy::Exhaustive,
            DiscMode::Sampled => Strategy::Sampled { count: a.samples, seed: seed()? },
            DiscMode::Guided => Strategy::Guided(pairs),
        };
        check_disc2(graph, delta, strategy)?
    } else {
        let strategy = match mode {
            DiscMode::Exhaustive => Strategy::Exhaustive,
            DiscMode::Sampled => Strategy::Sampled { count: a.samples, seed: seed()? },
            DiscMode::Guided => Strategy::Guided(singles),
        };
        check_disc(graph, delta, strategy)?
    };
    let mut value = serde_json::to_value(&report).map_err(|e| Usage(e.to_string()))?;
    value["property"] = json!(if a.pairs { "DISC2" } else { "DISC" });
    Report::json(&value, report.is_violated())
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum WitnessReport {
    ExtractionFailed { tries: usize, best: Option<Box<TrialSummary>> },
}

/// A found witness counts as a violation and a failed extraction as a
/// failure; a graph without a large eigenvalue passes.
fn witness(a: &WitnessArgs) -> Outcome<Report> {
    let g = load_cayley(&a.graph, "witness")?;
    let cfg = ExtractionConfig { eps: a.eps, seed: a.seed, max_tries: a.max_tries, slack: a.slack, delta: a.delta };
    match extract_disc_violator(&g, &cfg) {
        Ok(ExtractionResult::Witness(w)) => {
            let mut value = serde_json::to_value(&w).map_err(|e| Usage(e.to_string()))?;
            value["kind"] = json!("witness");
            value["violator_size"] = json!(w.violator_set.len());
            Report::json(&value, true)
        }
        Ok(result @ ExtractionResult::NoLargeEigenvalue { .. }) => Report::json(&result, false),
        Err(Error::ExtractionFailed { tries, best }) => {
            Report::json(&WitnessReport::ExtractionFailed { tries, best }, true)
        }
        Err(e) => Err(e.into()),
    }
}

fn walks(a: &WalksArgs) -> Outcome<Report> {
    let g = load(&a.graph)?;
    let method = a.method.map(|m| match m {
        WalkMethodArg::Spectral => WalkMethod::Spectral,
        WalkMethodArg::Matrix => WalkMethod::Matrix,
        WalkMethodArg::Both => WalkMethod::Both,
    });
    match g {
        LoadedGraph::Cayley(c) => {
            let method =
                method.unwrap_or(if c.order() <= MAX_MATRIX_ORDER { WalkMethod::Both } else { WalkMethod::Spectral });
            match a.circuit_tol {
                Some(tol) => {
                    let r = check_circuit_with(&c, a.length, tol, method)?;
                    Report::json(&r, !r.holds)
                }
                None => Report::json(&closed_walk_count(&c, a.length, method)?, false),
            }
        }
        LoadedGraph::Generic(h) => {
            if method.is_some_and(|m| m != WalkMethod::Matrix) {
                return Err(Usage("generic documents support the matrix method only".into()));
            }
            match a.circuit_tol {
                Some(tol) => {
                    let r = check_circuit_matrix(&h, a.length, tol)?;
                    Report::json(&r, !r.holds)
                }
                None => Report::json(&closed_walk_count_matrix(&h, a.length)?, false),
            }
        }
    }
}

#[derive(Serialize)]
struct CharacterAudit {
    character: CharacterIndex,
    m: u64,
    audits: usize,
    applicable: usize,
    failures: Vec<LemmaAuditEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<LemmaAuditEntry>>,
}

#[derive(Serialize)]
struct AuditOutput {
    characters: Vec<CharacterAudit>,
    total_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient_weights: Option<QuotientWeights>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identity: Option<IdentityAudit>,
}

fn summarize(r: LemmaAuditReport, keep: bool) -> CharacterAudit {
    CharacterAudit {
        failures: r.failures().cloned().collect(),
        audits: r.entries.len(),
        applicable: r.applicable(),
        character: r.character,
        m: r.m,
        entries: keep.then_some(r.entries),
    }
}

fn audit(a: &AuditArgs) -> Outcome<Report> {
    let g = load_cayley(&a.graph, "audit")?;
    let grid = AuditGrid::default();
    let character = match &a.character {
        Some(s) => Some(g.group().element(&parse_list::<i64>(s, "a residue")?)?),
        None => None,
    };
    let (reports, weights, identity) = match &character {
        Some(t) => {
            let identity = match &a.identity {
                Some(s) => match parse_list::<u64>(s, "an identity parameter")?[..] {
                    [s, l, tt] => Some(audit_interval_identity(&g, t, s, l, tt)?),
                    _ => return Err(Usage("--identity takes three values s,l,t".into())),
                },
                None => None,
            };
            (vec![audit_appendix_lemmas(&g, t, &grid)?], Some(quotient_weights(&g, t)?), identity)
        }
        None => {
            if a.identity.is_some() {
                return Err(Usage("--identity needs --character".into()));
            }
            (audit_all_characters(&g, &grid)?, None, None)
        }
    };
    let characters: Vec<CharacterAudit> = reports.into_iter().map(|r| summarize(r, a.entries)).collect();
    let total_failures = characters.iter().map(|c| c.failures.len()).sum();
    let failed = total_failures > 0 || identity.as_ref().is_some_and(|i| !i.holds);
    Report::json(&AuditOutput { characters, total_failures, quotient_weights: weights, identity }, failed)
}
