use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use degkit::combgraphs::{
    self, alphabet_triples, decompose, enumerate_split_maps, enumerate_stable_types, eq_group, half_types, is_stable,
    max_length_bound, render_perm, verify_norm_identity, AdmissibleGraphJson, AdmissibleTriple, DegreeCheck, EnumCaps,
    GraphError, SplitMap, SplitMapJson, TopType, TripleJson, DEFAULT_ENUM_BOUND, DEFAULT_EQ_BOUND,
};
use degkit::contact::{
    check_pure_contact, eliminate, flat_local_forcing, standard_test_homs, universality_cases, ContactData,
    ContactDataJson, ContactError,
};
use degkit::localmodel::{
    fourfold_resolution, gamma_atlas, splice_check, verify_atlas, verify_product_invariance, verify_resolution,
    verify_single_factor_support, Report,
};

#[derive(Parser)]
#[command(name = "degkit", version, about = "Exact checks for expanded degenerations and relative map combinatorics")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Chart, projection and torus-action identities of the local model.
    VerifyAtlas {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Pullback and axis-incidence identities of the small resolution.
    VerifyResolution,
    /// Splitting identities at every cut of the local model.
    Splice {
        #[arg(long)]
        n: usize,
        /// A single cut; all cuts when omitted.
        #[arg(long)]
        l: Option<usize>,
    },
    /// Pure contact and the pre-deformability ideal.
    #[command(subcommand)]
    Contact(ContactCmd),
    /// Admissible graphs and triples.
    #[command(subcommand)]
    Graphs(GraphsCmd),
    /// Split maps over expansions.
    #[command(subcommand)]
    Maps(MapsCmd),
}

#[derive(Args)]
struct ContactInput {
    /// ContactData JSON file.
    file: PathBuf,
    /// Override the truncation degree N of the base algebra.
    #[arg(long)]
    trunc_base: Option<u32>,
    /// Override the series order M.
    #[arg(long)]
    trunc_series: Option<usize>,
}

#[derive(Subcommand)]
enum ContactCmd {
    /// Decide pure n-contact; witnesses or a certificate.
    Check {
        #[command(flatten)]
        input: ContactInput,
        /// Contact order; defaults to the common contact order.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Generators of the pre-deformability ideal.
    Ideal {
        #[command(flatten)]
        input: ContactInput,
        #[arg(long)]
        n: usize,
    },
    /// Compare pure contact with vanishing of the ideal over the test homomorphisms.
    Universality {
        #[command(flatten)]
        input: ContactInput,
        #[arg(long)]
        n: usize,
    },
    /// Recover n, beta1, beta2 and epsilon from flat data.
    Forcing {
        #[command(flatten)]
        input: ContactInput,
    },
}

#[derive(Subcommand)]
enum GraphsCmd {
    /// Validate a triple (or a single graph) and report its invariants.
    Validate { file: PathBuf },
    /// Glue a triple along its roots; `--format dot` gives Graphviz.
    Glue { file: PathBuf },
    /// The symmetry group Eq(η) by brute force.
    EqGroup {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EQ_BOUND)]
        max_r: usize,
    },
    /// Triples over the small fixed alphabet, with degree checks.
    Enumerate {
        #[arg(long, default_value_t = 2)]
        max_r: usize,
        /// Include every triple in the report, not only the counts.
        #[arg(long)]
        list: bool,
    },
    /// Degree identity for the gluing map on a realization of the triple.
    Degree { file: PathBuf },
}

#[derive(Subcommand)]
enum MapsCmd {
    /// Weights of each component group and stability.
    Stability { file: PathBuf },
    /// The norm identity and the ample weight sequence.
    Norm { file: PathBuf },
    /// Cut at interface l: halves, their types and the cut weights.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        l: usize,
    },
    /// Enumerate split maps of a topological type.
    Enumerate {
        #[arg(long)]
        b: u32,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        k: u32,
        /// Include unstable maps.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 2)]
        max_weight: u32,
        #[arg(long, default_value_t = 3)]
        max_pieces: usize,
        #[arg(long, default_value_t = 3)]
        max_nodes: usize,
        #[arg(long, default_value_t = DEFAULT_ENUM_BOUND)]
        bound: i64,
        #[arg(long)]
        list: bool,
    },
}

/// Malformed input: exit 2.
#[derive(Debug, Error)]
#[error("{0}")]
struct InputError(String);

/// Broken internal invariant: exit 3.
#[derive(Debug, Error)]
#[error("{0}")]
struct InternalError(String);

fn input(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow!(InputError(e.to_string()))
}

fn contact_err(e: ContactError) -> anyhow::Error {
    match e {
        ContactError::Internal(msg) => anyhow!(InternalError(msg)),
        other => input(other),
    }
}

/// The report and whether every requested check passed.
struct Outcome {
    report: Value,
    pass: bool,
    dot: Option<String>,
}

impl Outcome {
    fn new(report: Value, pass: bool) -> Self {
        Outcome { report, pass, dot: None }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_contact(inp: &ContactInput) -> Result<ContactData> {
    let mut j: ContactDataJson = read_json(&inp.file)?;
    if let Some(n) = inp.trunc_base {
        j.algebra.truncation = n;
    }
    if let Some(m) = inp.trunc_series {
        j.order = m;
    }
    j.build().map_err(contact_err)
}

fn load_triple(path: &Path) -> Result<AdmissibleTriple> {
    let j: TripleJson = read_json(path)?;
    j.build().map_err(input)
}

fn load_map(path: &Path) -> Result<SplitMap> {
    let j: SplitMapJson = read_json(path)?;
    j.build().map_err(input)
}

fn report_json(r: &Report) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

fn suite(entries: Vec<(String, Report)>) -> Outcome {
    let pass = entries.iter().all(|(_, r)| r.passed());
    let suites: Vec<Value> =
        entries.iter().map(|(name, r)| json!({"suite": name, "pass": r.passed(), "checks": report_json(r)["checks"]})).collect();
    Outcome::new(json!({"pass": pass, "suites": suites}), pass)
}

fn verify_atlas_cmd(n: usize) -> Result<Outcome> {
    if n == 0 {
        bail!(InputError("--n must be positive".into()));
    }
    let atlas = gamma_atlas(n).map_err(input)?;
    // atlas suites plus one splice suite per cut, computed in parallel
    let tasks: Vec<usize> = (0..n + 4).collect();
    let entries: Vec<Result<(String, Report)>> = tasks
        .par_iter()
        .map(|&i| match i {
            0 => Ok(("atlas".to_string(), verify_atlas(&atlas))),
            1 => Ok(("product_invariance".to_string(), verify_product_invariance(&atlas))),
            2 => Ok(("single_factor_support".to_string(), verify_single_factor_support(&atlas))),
            _ => {
                let l = i - 2;
                splice_check(n, l).map(|r| (format!("splice_l{l}"), r)).map_err(input)
            }
        })
        .collect();
    let entries = entries.into_iter().collect::<Result<Vec<_>>>()?;
    let mut out = suite(entries);
    out.report["n"] = json!(n);
    Ok(out)
}

fn splice_cmd(n: usize, l: Option<usize>) -> Result<Outcome> {
    let cuts: Vec<usize> = match l {
        Some(l) => vec![l],
        None => (1..=n + 1).collect(),
    };
    let entries: Vec<Result<(String, Report)>> =
        cuts.par_iter().map(|&l| splice_check(n, l).map(|r| (format!("splice_l{l}"), r)).map_err(input)).collect();
    let mut out = suite(entries.into_iter().collect::<Result<Vec<_>>>()?);
    out.report["n"] = json!(n);
    Ok(out)
}

fn contact_cmd(cmd: &ContactCmd) -> Result<Outcome> {
    match cmd {
        ContactCmd::Check { input: inp, n } => {
            let d = load_contact(inp)?;
            let n = match n {
                Some(n) => *n,
                None => {
                    let (n1, n2) = degkit::contact::contact_orders(&d).map_err(contact_err)?;
                    if n1 != n2 {
                        let report = json!({"pure": false, "n1": n1, "n2": n2, "reason": "contact orders differ"});
                        return Ok(Outcome::new(report, false));
                    }
                    n1
                }
            };
            let r = check_pure_contact(&d, n).map_err(contact_err)?;
            Ok(Outcome::new(serde_json::to_value(r.to_json())?, r.pure))
        }
        ContactCmd::Ideal { input: inp, n } => {
            let d = load_contact(inp)?;
            let el = eliminate(&d, *n).map_err(contact_err)?;
            let gens: Vec<String> = el.ideal.generators().iter().map(|g| g.render()).collect();
            let report = json!({
                "n": n,
                "generators": gens,
                "rank": el.ideal.rank(),
                "zero": el.ideal.is_zero(),
                "rounds": el.rounds,
                "beta": el.beta.render(),
                "epsilon": el.epsilon.render(),
            });
            Ok(Outcome::new(report, true))
        }
        ContactCmd::Universality { input: inp, n } => {
            let d = load_contact(inp)?;
            let homs = standard_test_homs(d.algebra());
            let cases = universality_cases(&d, *n, &homs).map_err(contact_err)?;
            let pass = cases.iter().all(|c| c.agrees());
            let rows: Vec<Value> = cases
                .iter()
                .map(|c| json!({"target": c.target, "images": c.images, "pure": c.pure, "kills_ideal": c.kills_ideal, "agrees": c.agrees()}))
                .collect();
            Ok(Outcome::new(json!({"n": n, "pass": pass, "count": cases.len(), "cases": rows}), pass))
        }
        ContactCmd::Forcing { input: inp } => {
            let d = load_contact(inp)?;
            match flat_local_forcing(&d) {
                Ok(r) => {
                    let mut v = serde_json::to_value(r.to_json())?;
                    v["pass"] = json!(true);
                    Ok(Outcome::new(v, true))
                }
                Err(ContactError::Internal(msg)) => Err(anyhow!(InternalError(msg))),
                Err(e @ (ContactError::Alg(_) | ContactError::OrderTooLarge { .. })) => Err(input(e)),
                Err(e) => Ok(Outcome::new(json!({"pass": false, "reason": e.to_string()}), false)),
            }
        }
    }
}

fn perms_json(perms: &[Vec<usize>]) -> Vec<String> {
    perms.iter().map(|p| render_perm(p)).collect()
}

fn triple_summary(t: &AdmissibleTriple) -> Value {
    json!({
        "r": t.r(),
        "k": t.k(),
        "genus": combgraphs::genus(t),
        "degree": combgraphs::degree(t),
        "type": combgraphs::topo_type(t),
    })
}

fn degree_json(c: &DegreeCheck) -> Value {
    let mut v = serde_json::to_value(c).expect("serializable");
    v["holds"] = json!(c.holds());
    v
}

fn graphs_cmd(cmd: &GraphsCmd, format: Format) -> Result<Outcome> {
    match cmd {
        GraphsCmd::Validate { file } => {
            let raw: Value = read_json(file)?;
            if raw.get("vertices").is_some() {
                let j: AdmissibleGraphJson = serde_json::from_value(raw).map_err(input)?;
                let g = j.build().map_err(input)?;
                return Ok(Outcome::new(json!({"valid": true, "kind": "graph", "vertices": g.vertices().len(), "r": g.r(), "k": g.k()}), true));
            }
            let j: TripleJson = serde_json::from_value(raw).map_err(input)?;
            let t = j.build().map_err(input)?;
            let mut v = triple_summary(&t);
            v["valid"] = json!(true);
            v["kind"] = json!("triple");
            Ok(Outcome::new(v, true))
        }
        GraphsCmd::Glue { file } => {
            let t = load_triple(file)?;
            let g = t.glue();
            let edges: Vec<Value> = g.edges.iter().map(|&(a, b, w)| json!([a, b, w])).collect();
            let vertices: Vec<Value> =
                g.vertices.iter().map(|v| json!({"side": v.side, "index": v.index, "genus": v.genus, "degree": v.degree_h})).collect();
            let report = json!({
                "vertices": vertices,
                "edges": edges,
                "legs": g.legs,
                "connected": g.is_connected(),
                "betti": g.betti(),
                "genus": combgraphs::genus(&t),
            });
            let mut out = Outcome::new(report, g.is_connected());
            if format == Format::Dot {
                out.dot = Some(g.to_dot());
            }
            Ok(out)
        }
        GraphsCmd::EqGroup { file, max_r } => {
            let t = load_triple(file)?;
            let perms = eq_group(&t, *max_r).map_err(input)?;
            let sub = combgraphs::is_subgroup(&perms, t.r());
            if !sub {
                bail!(InternalError("Eq(η) is not closed under composition".into()));
            }
            Ok(Outcome::new(json!({"order": perms.len(), "elements": perms_json(&perms), "r": t.r()}), true))
        }
        GraphsCmd::Enumerate { max_r, list } => {
            if *max_r > 5 {
                bail!(InputError(format!("--max-r {max_r} is above the supported 5")));
            }
            let triples = alphabet_triples(*max_r);
            let rows: Vec<Result<(usize, usize, bool)>> = triples
                .par_iter()
                .map(|t| {
                    let eq = eq_group(t, DEFAULT_EQ_BOUND.max(t.r())).map_err(input)?;
                    let m = combgraphs::realize(t).map_err(input)?;
                    let c = DegreeCheck::compute(t, &m, 1).map_err(input)?;
                    Ok((t.r(), eq.len(), c.holds() && c.eq_order == eq.len()))
                })
                .collect();
            let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
            let mut per_r = vec![0usize; max_r + 1];
            for (r, _, _) in &rows {
                per_r[*r] += 1;
            }
            let failures = rows.iter().filter(|x| !x.2).count();
            let mut report = json!({
                "max_r": max_r,
                "count": rows.len(),
                "per_r": per_r,
                "degree_failures": failures,
            });
            if *list {
                let items: Vec<Value> = triples
                    .iter()
                    .zip(&rows)
                    .map(|(t, (_, eq, ok))| json!({"triple": t.to_json(), "eq_order": eq, "degree_holds": ok}))
                    .collect();
                report["triples"] = json!(items);
            }
            Ok(Outcome::new(report, failures == 0))
        }
        GraphsCmd::Degree { file } => {
            let t = load_triple(file)?;
            let m = combgraphs::realize(&t).map_err(input)?;
            let c = DegreeCheck::compute(&t, &m, 1).map_err(input)?;
            let pass = c.holds();
            Ok(Outcome::new(json!({"check": degree_json(&c), "map": m.to_json()}), pass))
        }
    }
}

fn weights_of(m: &SplitMap) -> Vec<i64> {
    (1..=m.n() + 2).map(|i| combgraphs::weight(m, i).expect("index in range")).collect()
}

fn maps_cmd(cmd: &MapsCmd) -> Result<Outcome> {
    match cmd {
        MapsCmd::Stability { file } => {
            let m = load_map(file)?;
            let stable = is_stable(&m);
            Ok(Outcome::new(json!({"stable": stable, "n": m.n(), "weights": weights_of(&m)}), stable))
        }
        MapsCmd::Norm { file } => {
            let m = load_map(file)?;
            let t = m.total_type();
            let holds = verify_norm_identity(&m);
            let ample = combgraphs::ample_weights(&m).ok();
            let bound = max_length_bound(t).ok();
            let report = json!({
                "type": t,
                "norm": t.norm(),
                "weight_sum": weights_of(&m).iter().sum::<i64>(),
                "holds": holds,
                "ample_weights": ample,
                "length": m.n(),
                "length_bound": bound,
            });
            Ok(Outcome::new(report, holds))
        }
        MapsCmd::Decompose { file, l } => {
            let m = load_map(file)?;
            let (h1, h2, sigma) = decompose(&m, *l).map_err(input)?;
            let glued = combgraphs::glue_halves(&h1, &h2).map_err(|e| anyhow!(InternalError(e.to_string())))?;
            let round_trip = glued == m;
            let eta = half_types(&m, *l).map_err(input)?;
            let report = json!({
                "l": l,
                "sigma": sigma,
                "half1": h1,
                "half2": h2,
                "triple": eta.to_json(),
                "round_trip": round_trip,
            });
            Ok(Outcome::new(report, round_trip))
        }
        MapsCmd::Enumerate { b, g, k, all, max_weight, max_pieces, max_nodes, bound, list } => {
            let caps = EnumCaps {
                max_weight: *max_weight,
                max_pieces_per_group: *max_pieces,
                max_nodes_per_interface: *max_nodes,
                bound: *bound,
            };
            if *max_weight == 0 || *max_pieces == 0 || *max_nodes == 0 {
                bail!(InputError("enumeration caps must be positive".into()));
            }
            let t = TopType::new(*b, *g, *k);
            let res = if *all { enumerate_split_maps(t, &caps) } else { enumerate_stable_types(t, &caps) };
            let maps = res.map_err(|e: GraphError| input(e))?;
            let stable = maps.iter().filter(|m| is_stable(m)).count();
            let norm_ok = maps.iter().all(verify_norm_identity);
            let mut report = json!({
                "type": t,
                "norm": t.norm(),
                "count": maps.len(),
                "stable": stable,
                "norm_identity": norm_ok,
            });
            if *list {
                let items: Vec<SplitMapJson> = maps.iter().map(SplitMap::to_json).collect();
                report["maps"] = json!(items);
            }
            Ok(Outcome::new(report, norm_ok))
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::VerifyAtlas { n } => verify_atlas_cmd(*n),
        Command::VerifyResolution => {
            let r = verify_resolution(&fourfold_resolution());
            Ok(suite(vec![("resolution".into(), r)]))
        }
        Command::Splice { n, l } => splice_cmd(*n, *l),
        Command::Contact(c) => contact_cmd(c),
        Command::Graphs(c) => graphs_cmd(c, cli.format),
        Command::Maps(c) => maps_cmd(c),
    }
}

fn text_lines(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                text_lines(x, &p, out);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in items.iter().enumerate() {
                text_lines(x, &format!("{prefix}[{i}]"), out);
            }
        }
        other => {
            out.push_str(&format!("{prefix}: {other}\n"));
        }
    }
}

fn render(out: &Outcome, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&out.report)? + "\n"),
        Format::Text => {
            let mut s = String::new();
            text_lines(&out.report, "", &mut s);
            Ok(s)
        }
        Format::Dot => out.dot.clone().ok_or_else(|| input("--format dot is only available for `graphs glue`")),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("DEGKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| input(format!("DEGKIT_THREADS={v} is not a positive integer")))?;
    if n == 0 {
        bail!(InputError("DEGKIT_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<InternalError>().is_some() {
        3
    } else if e.downcast_ref::<InputError>().is_some() {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = catch_unwind(AssertUnwindSafe(|| -> Result<bool> {
        configure_threads()?;
        let out = run(&cli)?;
        let text = render(&out, cli.format)?;
        match &cli.out {
            Some(path) => fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(out.pass)
    }));
    match result {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(3),
    }
}
