use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use univoque::base::{BaseContext, DEFAULT_PRECISION};
use univoque::digits::{Digit, EpSeq, Strictness};
use univoque::expansions::{self, DEFAULT_CAP};
use univoque::graph::{self, UnivoqueGraph, Variant};
use univoque::oracle::{self, WordMode};
use univoque::spectral;
use univoque::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "univoque", version, about = "Univoque graphs of non-integer bases, computed exactly")]
struct Cli {
    #[command(flatten)]
    base: BaseArgs,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct BaseArgs {
    /// Largest digit of the alphabet {0, …, M}.
    #[arg(short = 'M', global = true, default_value_t = 1)]
    m: Digit,
    /// Greedy expansion of 1, e.g. "111(0)" or "3,3,1(0)".
    #[arg(long, global = true)]
    beta: Option<String>,
    /// Initial width of the isolating interval of q.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: f64,
}

impl BaseArgs {
    fn context(&self) -> Result<BaseContext> {
        let beta = self.beta.as_deref().ok_or_else(|| Error::InvalidArgument("--beta is required".into()))?;
        let beta: EpSeq = beta.parse()?;
        BaseContext::with_precision(self.m, beta, self.precision)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classification, successor chains and special points of a base.
    #[command(subcommand)]
    Base(BaseCommand),
    /// Graph construction and structural checks.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Spectral radius, entropy and dimension.
    Dim {
        #[arg(long, default_value = "tilde")]
        variant: VariantArg,
        /// List the radius of every cyclic strongly connected component.
        #[arg(long)]
        per_scc: bool,
    },
    /// Expansions of single points.
    #[command(subcommand)]
    Expansions(ExpansionsCommand),
    /// Brute-force references.
    #[command(subcommand, hide = true)]
    Oracle(OracleCommand),
}

#[derive(Subcommand, Debug)]
enum BaseCommand {
    /// Class of the base, its polynomial and numerical value.
    Classify,
    /// Successor chain `q, q⁺, q⁺⁺, …` or the chain `r_0, r_1, …`.
    Chain {
        #[arg(long, value_enum, default_value = "v")]
        kind: ChainKind,
        #[arg(long, default_value_t = 3)]
        steps: usize,
    },
    /// The points a_i, b_i, θ_j, η_j and their order.
    Points,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChainKind {
    V,
    R,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Full,
    Tilde,
    Tilde1,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::Tilde => Variant::Tilde,
            VariantArg::Tilde1 => Variant::Tilde1,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VerifyTarget {
    #[value(name = "1.3", alias = "isomorphism")]
    Isomorphism,
    #[value(name = "1.4", alias = "tower")]
    Tower,
}

#[derive(Subcommand, Debug)]
enum GraphCommand {
    /// Build a graph; write DOT or JSON to a file or `-` for stdout.
    Build {
        #[arg(long, default_value = "full")]
        variant: VariantArg,
        #[arg(long)]
        dot: Option<String>,
        #[arg(long = "json-out", alias = "json-file")]
        json_out: Option<String>,
    },
    /// Strongly connected components.
    Scc {
        #[arg(long, default_value = "tilde")]
        variant: VariantArg,
    },
    /// Isomorphism along the successor chain, or the tower structure.
    Verify {
        #[arg(long, value_enum)]
        theorem: VerifyTarget,
        #[arg(long, default_value_t = 3)]
        steps: usize,
    },
    /// Strong connectivity of the reduced graph, decided several ways.
    Connectivity,
}

#[derive(Subcommand, Debug)]
enum ExpansionsCommand {
    /// Count the expansions of the point with the given expansion.
    Count {
        /// A digit sequence whose value is the point, e.g. "1(001)".
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// A point with exactly m expansions.
    Witness {
        #[arg(short = 'm', default_value_t = 2)]
        count: usize,
        /// Tail sequence; defaults to the least admissible one.
        #[arg(long)]
        tail: Option<String>,
    },
    /// Check a tail sequence against the strict or weak conditions.
    Filter {
        #[arg(long)]
        tail: String,
        #[arg(long)]
        weak: bool,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Words of length L admitted by the lexicographic conditions.
    Words {
        #[arg(short = 'L', default_value_t = 4)]
        len: usize,
        #[arg(long, value_enum, default_value = "v")]
        mode: ModeArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    U,
    V,
}

/// Text and JSON renderings of one command's result.
struct Output {
    text: String,
    json: Value,
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn write_target(target: &str, content: &str, stdout: &mut String) -> Result<()> {
    if target == "-" {
        stdout.push_str(content);
        Ok(())
    } else {
        fs::write(target, content).map_err(|e| Error::InvalidArgument(format!("cannot write {target}: {e}")))
    }
}

fn run_base(cmd: &BaseCommand, ctx: &BaseContext) -> Result<Output> {
    match cmd {
        BaseCommand::Classify => {
            let text = format!(
                "M      {}\nbeta   {}\nalpha  {}\nclass  {}\nq      {}\npoly   {}\n",
                ctx.m(),
                ctx.beta(),
                ctx.alpha(),
                ctx.class(),
                ctx.int(1).mul_q().decimal(12),
                ctx.defining_poly()
            );
            Ok(Output { text, json: to_json(ctx) })
        }
        BaseCommand::Chain { kind, steps } => {
            let mut chain = vec![ctx.clone()];
            for k in 1..=*steps {
                let next = match kind {
                    ChainKind::V => chain.last().unwrap().v_successor()?,
                    ChainKind::R => ctx.r_chain(k)?,
                };
                chain.push(next);
            }
            let mut text = String::new();
            for (k, c) in chain.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "{k}  alpha={}  beta={}  class={}  q={}",
                    c.alpha(),
                    c.beta(),
                    c.class(),
                    c.int(1).mul_q().decimal(12)
                );
            }
            Ok(Output { text, json: to_json(&chain) })
        }
        BaseCommand::Points => {
            let sp = ctx.special_points()?;
            let order = ctx.order_points()?;
            let mut text = String::new();
            let mut pts = Vec::new();
            for p in sp.partition_points() {
                let _ = writeln!(text, "{:<5} {}  key={}", p.name.to_string(), p.value.decimal(12), p.key);
                pts.push(json!({"name": p.name.to_string(), "value": p.value.decimal(12), "key": p.key.to_string()}));
            }
            let _ = writeln!(text, "{order}");
            Ok(Output { text, json: json!({"points": pts, "order": order.to_string()}) })
        }
    }
}

fn run_graph(cmd: &GraphCommand, ctx: &BaseContext) -> Result<Output> {
    match cmd {
        GraphCommand::Build { variant, dot, json_out } => {
            let g = UnivoqueGraph::build(ctx, (*variant).into())?;
            let mut text = String::new();
            if let Some(t) = dot {
                write_target(t, &g.to_dot(), &mut text)?;
            }
            if let Some(t) = json_out {
                let s = serde_json::to_string_pretty(&g.to_view()).expect("serializable graph") + "\n";
                write_target(t, &s, &mut text)?;
            }
            if dot.is_none() && json_out.is_none() {
                let _ = writeln!(text, "{} vertices, {} edges", g.len(), g.edges().len());
                for v in 0..g.len() {
                    let _ = writeln!(text, "  v{v} {} label {}", g.vertex_name(v), g.vertices()[v].label);
                }
                for e in g.edges() {
                    let _ = writeln!(text, "  {} -{}-> {}", g.vertex_name(e.from), e.label, g.vertex_name(e.to));
                }
            }
            Ok(Output { text, json: to_json(&g.to_view()) })
        }
        GraphCommand::Scc { variant } => {
            let g = UnivoqueGraph::build(ctx, (*variant).into())?;
            let r = graph::scc(&g);
            let names: Vec<Vec<String>> =
                r.components.iter().map(|c| c.iter().map(|&v| g.vertex_name(v)).collect()).collect();
            let mut text = format!("strongly connected: {}\n", r.strongly_connected);
            for (i, c) in names.iter().enumerate() {
                let _ = writeln!(text, "  C{i}: {}", c.join(" "));
            }
            for (a, b) in &r.condensation {
                let _ = writeln!(text, "  C{a} -> C{b}");
            }
            Ok(Output {
                text,
                json: json!({"strongly_connected": r.strongly_connected, "components": names, "condensation": r.condensation}),
            })
        }
        GraphCommand::Verify { theorem: VerifyTarget::Isomorphism, steps } => {
            let mut chain = vec![ctx.clone()];
            for _ in 0..*steps {
                let next = chain.last().unwrap().v_successor()?;
                chain.push(next);
            }
            let graphs = chain.iter().map(|c| UnivoqueGraph::build(c, Variant::Full)).collect::<Result<Vec<_>>>()?;
            let iso = graph::check_isomorphic(&graphs[0], &graphs[1]).is_some();
            let mut text = format!("G(q0) ≅ G(q1): {iso}\n");
            let mut pairs = vec![json!({"from": 0, "to": 1, "isomorphic": iso})];
            for j in 1..graphs.len() - 1 {
                let i = graph::check_isomorphic(&graphs[j], &graphs[j + 1]).is_some();
                let _ = writeln!(text, "G(q{j}) ≅ G(q{}): {i}", j + 1);
                pairs.push(json!({"from": j, "to": j + 1, "isomorphic": i}));
            }
            if !iso {
                return Err(Error::Inconsistent(format!("G(q0) and G(q1) are not isomorphic for β = {}", ctx.beta())));
            }
            Ok(Output { text, json: json!({"pairs": pairs}) })
        }
        GraphCommand::Verify { theorem: VerifyTarget::Tower, steps } => {
            let t = graph::tower_decompose(ctx, *steps)?;
            let mut text = format!("block sizes: {:?}\n", t.block_sizes());
            for (j, w) in t.cycle_words.iter().enumerate() {
                let _ = writeln!(text, "C{} cycle word: ({w})", j + 2);
            }
            Ok(Output {
                text,
                json: json!({
                    "block_sizes": t.block_sizes(),
                    "cycle_words": t.cycle_words.iter().map(ToString::to_string).collect::<Vec<_>>(),
                }),
            })
        }
        GraphCommand::Connectivity => {
            let r = graph::connectivity_report(ctx)?;
            let opt = |b: Option<bool>| b.map_or("n/a".to_string(), |b| b.to_string());
            let text = format!(
                "strongly connected:       {}\nreachability criterion:   {}\nb2 below inner a:         {}\nab reachability:          {}\nunreached:                {}\nwithout in-edges in G:    {}\n",
                r.strongly_connected,
                r.reachability_criterion,
                opt(r.b2_below_inner_a),
                opt(r.ab_reachability),
                r.unreached.join(" "),
                r.without_in_edges.join(" ")
            );
            Ok(Output { text, json: to_json(&r) })
        }
    }
}

fn run_dim(ctx: &BaseContext, variant: Variant, per_scc: bool) -> Result<Output> {
    let g = UnivoqueGraph::build(ctx, variant)?;
    let r = spectral::spectral_report::<f64>(&g)?;
    let mut text =
        format!("radius     {:.10}\nentropy    {:.10}\ndimension  {:.10}\n", r.radius, r.entropy, r.dimension);
    if per_scc {
        for c in r.scc.iter().filter(|c| c.cyclic) {
            let _ = writeln!(text, "  radius {:.10}  {}", c.radius, c.vertices.join(" "));
        }
    }
    Ok(Output { text, json: to_json(&r) })
}

fn run_expansions(cmd: &ExpansionsCommand, ctx: &BaseContext) -> Result<Output> {
    match cmd {
        ExpansionsCommand::Count { x, cap } => {
            let seq: EpSeq = x.parse()?;
            seq.check_alphabet(ctx.m())?;
            let value = ctx.value_of(&seq);
            let c = expansions::count_expansions(ctx, &value, *cap)?;
            let mut text = format!("x ≈ {}\n{}  ({} states)\n", value.decimal(12), c.kind, c.states);
            for w in &c.witnesses {
                let _ = writeln!(text, "  {w}");
            }
            Ok(Output { text, json: to_json(&c) })
        }
        ExpansionsCommand::Witness { count, tail } => {
            let c = match tail {
                Some(t) => t.parse()?,
                None => expansions::default_witness_tail(ctx)?,
            };
            let w = expansions::build_witness_xm(ctx, *count, &c)?;
            let mut text = format!("tail {}\nx ≈ {}\n", w.tail, w.value.decimal(12));
            for e in &w.expansions {
                let _ = writeln!(text, "  {e}");
            }
            Ok(Output { text, json: to_json(&w) })
        }
        ExpansionsCommand::Filter { tail, weak } => {
            let c: EpSeq = tail.parse()?;
            let how = if *weak { Strictness::Weak } else { Strictness::Strict };
            let r = expansions::f_family_filter(ctx, &c, how)?;
            let failure = r.failure.map_or("none".to_string(), |f| format!("{:?} at {}", f.condition, f.index));
            let text = format!(
                "passed            {}\nfailure           {}\nprefix split pair {}\nnormal form       {}\n",
                r.passed, failure, r.prefix_split_pair, r.normal_form
            );
            Ok(Output { text, json: to_json(&r) })
        }
    }
}

fn run_oracle(cmd: &OracleCommand, ctx: &BaseContext) -> Result<Output> {
    let OracleCommand::Words { len, mode } = cmd;
    let mode = match mode {
        ModeArg::U => WordMode::UPrefix,
        ModeArg::V => WordMode::VPrefix,
    };
    let words = oracle::enumerate_admissible_words(ctx, *len, mode)?;
    let strs: Vec<String> = words.iter().map(ToString::to_string).collect();
    let mut text = format!("{} words\n", strs.len());
    for s in &strs {
        let _ = writeln!(text, "{s}");
    }
    Ok(Output { text, json: json!({"count": strs.len(), "words": strs}) })
}

fn run(cli: &Cli) -> Result<Output> {
    let ctx = cli.base.context()?;
    match &cli.command {
        Command::Base(c) => run_base(c, &ctx),
        Command::Graph(c) => run_graph(c, &ctx),
        Command::Dim { variant, per_scc } => run_dim(&ctx, (*variant).into(), *per_scc),
        Command::Expansions(c) => run_expansions(c, &ctx),
        Command::Oracle(c) => run_oracle(c, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let rendered = if cli.json {
                serde_json::to_string_pretty(&out.json).expect("serializable output") + "\n"
            } else {
                out.text
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(rendered.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
    }
}
