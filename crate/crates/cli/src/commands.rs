//! Command-line surface. [`run`] parses arguments, executes one command and
//! returns what would be printed, with the exit status.

use std::ffi::OsString;
use std::fmt;
use std::fmt::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use subcat::dynamics::{
    clean, intersect_dynamics, largest_subcategorical, union_dynamics, Checks, Dynamics,
};
use subcat::generation::{engender, primo_engender, stability_report, GeneratedDynamics, Mode};
use subcat::open::{discrete_partition, full_partition, OpenDynamics};
use subcat::random;
use subcat::temporal::{enumerate_h_realizations, enumerate_realizations, SizeGuard};
use thiserror::Error;

use crate::corpus;
use crate::doc::Document;
use crate::render::{self, Properties};
use crate::workspace::{
    dynamics_doc, family_documents, open_doc, provenance_doc, read_sources, LoadErrors, Workspace,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "subcat",
    version,
    about = "Check and generate open sub-categorical dynamics"
)]
pub struct Cli {
    /// Document file or directory; repeatable. The bundled corpus is used when none is given.
    #[arg(short, long = "input", global = true)]
    pub inputs: Vec<PathBuf>,
    /// Also load the bundled corpus.
    #[arg(long, global = true)]
    pub corpus: bool,
    /// Largest clock (in instants) to enumerate realizations over.
    #[arg(long, global = true, default_value_t = 12)]
    pub size_guard: usize,
    /// Witnesses listed per property.
    #[arg(long, global = true, default_value_t = 100)]
    pub max_violations: usize,
    /// Seed for random families and random quotients.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate every document.
    Validate,
    /// Run all five checkers on a dynamics, an expression or an open dynamics.
    ///
    /// Expressions: a name, union(..), intersect(..), clean(x), largest(x).
    Props { target: String },
    /// Remove out-of-play states.
    Clean { target: String },
    /// Union of dynamics over one motor.
    Union {
        #[arg(required = true)]
        targets: Vec<String>,
    },
    /// Largest sub-categorical sub-dynamics.
    LargestSubcat { target: String },
    /// Realizations of an open dynamics, or of a dynamics along a clock.
    Realizations {
        target: String,
        dynamics: Option<String>,
    },
    /// Generated dynamics of a family, with provenance.
    Generate {
        family: String,
        /// primo, mono, or quotient|functional|souple=<partition>; the
        /// partition is a partition document, `full` or `discrete`.
        #[arg(long, default_value = "primo")]
        mode: String,
    },
    /// Whether generation preserves categoricity.
    Stability {
        family: String,
        #[arg(long = "partition")]
        partitions: Vec<String>,
        /// Additional random quotients of the primo parameters.
        #[arg(long, default_value_t = 0)]
        random_quotients: usize,
    },
    /// Bundled demonstrations: `union` or `mimicry`.
    Demo { name: String },
    /// Seeded random families: generate and check sub-categoricity.
    RandomFamily {
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        quotients: usize,
        /// Print the families as documents instead of checking them.
        #[arg(long)]
        emit: bool,
    },
    /// Print every loaded document, normalized.
    Export,
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Load(#[from] LoadErrors),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("bad expression `{expr}`: {reason}")]
    Expression { expr: String, reason: String },
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("unknown demo `{0}` (expected union or mimicry)")]
    UnknownDemo(String),
    #[error("{0}")]
    Module(String),
}

fn module<E: fmt::Display>(e: E) -> CommandError {
    CommandError::Module(e.to_string())
}

/// Printed output and exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Output {
    text: String,
    json: Value,
    code: i32,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output {
            text,
            json,
            code: EXIT_OK,
        }
    }
}

struct Context {
    inputs: Vec<PathBuf>,
    corpus: bool,
    checks: Checks,
    guard: SizeGuard,
    seed: u64,
}

impl Context {
    fn workspace(&self) -> Result<Workspace, CommandError> {
        let mut sources = if self.inputs.is_empty() || self.corpus {
            corpus::sources()
        } else {
            Vec::new()
        };
        sources.extend(read_sources(&self.inputs)?);
        Ok(Workspace::from_sources(&sources)?)
    }

    fn properties(&self, d: &Dynamics) -> Properties {
        Properties {
            subcategorical: self.checks.subcategorical(d),
            proper: self.checks.proper(d).ok(),
            categorical: self.checks.categorical(d),
            deterministic: self.checks.deterministic(d),
            quasi_deterministic: self.checks.quasi_deterministic(d),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), rendered)
            } else {
                (rendered, String::new())
            };
            return Outcome {
                stdout,
                stderr,
                code,
            };
        }
    };
    let ctx = Context {
        inputs: cli.inputs,
        corpus: cli.corpus,
        checks: Checks::new(cli.max_violations),
        guard: SizeGuard {
            max_instants: cli.size_guard,
            ..SizeGuard::default()
        },
        seed: cli.seed,
    };
    match execute(&ctx, &cli.command) {
        Ok(out) => {
            let mut stdout = match cli.format {
                Format::Text => out.text,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable"),
            };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            Outcome {
                stdout,
                stderr: String::new(),
                code: out.code,
            }
        }
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: EXIT_INVALID,
        },
    }
}

fn execute(ctx: &Context, command: &Command) -> Result<Output, CommandError> {
    match command {
        Command::Validate => {
            let ws = ctx.workspace()?;
            let counts = json!({
                "categories": ws.categories.len(),
                "dynamics": ws.dynamics.len(),
                "clocks": ws.clocks.len(),
                "open": ws.opens.len(),
                "families": ws.families.len(),
                "partitions": ws.partitions.len(),
            });
            Ok(Output::ok(
                format!("ok: {}", ws.summary()),
                json!({ "ok": true, "counts": counts }),
            ))
        }
        Command::Props { target } => props(ctx, &ctx.workspace()?, target),
        Command::Clean { target } => {
            let ws = ctx.workspace()?;
            if let Some(e) = ws.opens.get(target) {
                let a = e.open.semi_proper_clean().map_err(module)?;
                let name = format!("clean({target})");
                return Ok(open_output(&name, &e.clock, &a));
            }
            let (d, motor) = eval(&ws, &parse_expr(&format!("clean({target})"))?)?;
            Ok(dynamics_output(&format!("clean({target})"), &motor, &d))
        }
        Command::Union { targets } => {
            let ws = ctx.workspace()?;
            let expr = Expr::Call(
                "union".into(),
                targets
                    .iter()
                    .map(|t| parse_expr(t))
                    .collect::<Result<_, _>>()?,
            );
            let (d, motor) = eval(&ws, &expr)?;
            Ok(dynamics_output(&expr.to_string(), &motor, &d))
        }
        Command::LargestSubcat { target } => {
            let ws = ctx.workspace()?;
            let expr = Expr::Call("largest".into(), vec![parse_expr(target)?]);
            let (d, motor) = eval(&ws, &expr)?;
            Ok(dynamics_output(&expr.to_string(), &motor, &d))
        }
        Command::Realizations { target, dynamics } => {
            realizations(ctx, &ctx.workspace()?, target, dynamics.as_deref())
        }
        Command::Generate { family, mode } => generate(ctx, &ctx.workspace()?, family, mode),
        Command::Stability {
            family,
            partitions,
            random_quotients,
        } => stability(
            ctx,
            &ctx.workspace()?,
            family,
            partitions,
            *random_quotients,
        ),
        Command::Demo { name } => match name.as_str() {
            "union" => demo_union(ctx),
            "mimicry" => demo_mimicry(ctx),
            _ => Err(CommandError::UnknownDemo(name.clone())),
        },
        Command::RandomFamily {
            count,
            quotients,
            emit,
        } => random_family(ctx, *count, *quotients, *emit),
        Command::Export => {
            let docs = ctx.workspace()?.to_documents();
            let v = serde_json::to_value(&docs).expect("serializable");
            Ok(Output::ok(
                serde_json::to_string_pretty(&v).expect("serializable"),
                v,
            ))
        }
    }
}

/// `name` or `f(e1,...,en)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Name(String),
    Call(String, Vec<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Name(n) => write!(f, "{n}"),
            Expr::Call(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr, CommandError> {
    let err = |reason: &str| CommandError::Expression {
        expr: s.to_owned(),
        reason: reason.to_owned(),
    };
    let mut tokens: Vec<String> = Vec::new();
    let mut cur = String::new();
    for c in s.chars() {
        if matches!(c, '(' | ')' | ',') || c.is_whitespace() {
            if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    fn parse(tokens: &[String], pos: &mut usize) -> Result<Expr, &'static str> {
        let name = tokens.get(*pos).ok_or("unexpected end")?;
        if matches!(name.as_str(), "(" | ")" | ",") {
            return Err("expected a name");
        }
        *pos += 1;
        if tokens.get(*pos).map(String::as_str) != Some("(") {
            return Ok(Expr::Name(name.clone()));
        }
        *pos += 1;
        let mut args = Vec::new();
        loop {
            args.push(parse(tokens, pos)?);
            match tokens.get(*pos).map(String::as_str) {
                Some(",") => *pos += 1,
                Some(")") => {
                    *pos += 1;
                    return Ok(Expr::Call(name.clone(), args));
                }
                _ => return Err("expected `,` or `)`"),
            }
        }
    }
    let mut pos = 0;
    let e = parse(&tokens, &mut pos).map_err(err)?;
    if pos != tokens.len() {
        return Err(err("trailing input"));
    }
    Ok(e)
}

/// Evaluates to a dynamics and the name of its motor.
pub fn eval(ws: &Workspace, e: &Expr) -> Result<(Dynamics, String), CommandError> {
    match e {
        Expr::Name(n) => {
            if let Some(d) = ws.dynamics.get(n) {
                Ok((d.dynamics.clone(), d.motor.clone()))
            } else if let Some(h) = ws.clocks.get(n) {
                Ok((h.clock.dynamics().clone(), h.motor.clone()))
            } else {
                Err(CommandError::UnknownName {
                    kind: "dynamics",
                    name: n.clone(),
                })
            }
        }
        Expr::Call(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval(ws, a))
                .collect::<Result<Vec<_>, _>>()?;
            let bad = |reason: &str| CommandError::Expression {
                expr: e.to_string(),
                reason: reason.to_owned(),
            };
            if vals.iter().any(|(_, m)| *m != vals[0].1) {
                return Err(bad("operands have different motors"));
            }
            let motor = vals[0].1.clone();
            let ds: Vec<Dynamics> = vals.into_iter().map(|(d, _)| d).collect();
            let single = || {
                if ds.len() == 1 {
                    Ok(&ds[0])
                } else {
                    Err(bad("takes one argument"))
                }
            };
            let d = match f.as_str() {
                "union" => union_dynamics(ds[0].motor(), &ds).map_err(module)?,
                "intersect" => intersect_dynamics(&ds).map_err(module)?,
                "clean" => clean(single()?).map_err(module)?,
                "largest" => largest_subcategorical(single()?),
                _ => return Err(bad("unknown operation")),
            };
            Ok((d, motor))
        }
    }
}

fn dynamics_output(name: &str, motor: &str, d: &Dynamics) -> Output {
    let text = format!(
        "{name} over {motor}\nstates:\n{}transitions:\n{}",
        render::states(d, "  "),
        render::transitions(d, "  ")
    );
    let doc = Document::Dynamics(dynamics_doc(name, motor, d));
    Output::ok(text, serde_json::to_value(doc).expect("serializable"))
}

fn open_output(name: &str, clock: &str, a: &OpenDynamics) -> Output {
    let text = format!("{name} on {clock}\n{}", render::open(a));
    let doc = Document::Open(open_doc(name, clock, a));
    Output::ok(text, serde_json::to_value(doc).expect("serializable"))
}

fn props(ctx: &Context, ws: &Workspace, target: &str) -> Result<Output, CommandError> {
    if let Some(e) = ws.opens.get(target) {
        let a = &e.open;
        let mut text = format!("{target} on {}\n", e.clock);
        let mut slices = Vec::new();
        let mut code = EXIT_OK;
        for (p, name) in a.parameters().iter().enumerate() {
            let d = a.slice(p);
            let ps = ctx.properties(d);
            if !ps.all_hold() {
                code = EXIT_PROPERTY;
            }
            let _ = write!(
                text,
                "parameter {name}:\n{}{}",
                render::transitions(d, "  "),
                ps.text()
            );
            slices.push(json!({ "parameter": name, "properties": ps.json() }));
        }
        let json = json!({ "name": target, "clock": e.clock, "slices": slices });
        return Ok(Output { text, json, code });
    }
    let expr = parse_expr(target)?;
    let (d, motor) = eval(ws, &expr)?;
    let ps = ctx.properties(&d);
    let name = expr.to_string();
    let text = format!(
        "{name} over {motor}\n{}{}",
        render::transitions(&d, "  "),
        ps.text()
    );
    let doc = dynamics_doc(&name, &motor, &d);
    let json = json!({ "dynamics": Document::Dynamics(doc), "properties": ps.json() });
    let code = if ps.all_hold() {
        EXIT_OK
    } else {
        EXIT_PROPERTY
    };
    Ok(Output { text, json, code })
}

fn realizations(
    ctx: &Context,
    ws: &Workspace,
    target: &str,
    dynamics: Option<&str>,
) -> Result<Output, CommandError> {
    match dynamics {
        None => {
            let e = ws
                .opens
                .get(target)
                .ok_or_else(|| CommandError::UnknownName {
                    kind: "open dynamics",
                    name: target.to_owned(),
                })?;
            let set = enumerate_realizations(&e.open, &ctx.guard).map_err(module)?;
            let mut text = format!("realizations of {target}: {}\n", set.all.len());
            for r in &set.all {
                let _ = writeln!(text, "  {r}");
            }
            let _ = writeln!(text, "external parts: {}", set.external_parts.len());
            for r in &set.external_parts {
                let _ = writeln!(text, "  {r}");
            }
            Ok(Output::ok(
                text,
                serde_json::to_value(&set).expect("serializable"),
            ))
        }
        Some(dn) => {
            let h = ws
                .clocks
                .get(target)
                .ok_or_else(|| CommandError::UnknownName {
                    kind: "clock",
                    name: target.to_owned(),
                })?;
            let (d, _) = eval(ws, &parse_expr(dn)?)?;
            let rs = enumerate_h_realizations(&h.clock, &d, &ctx.guard).map_err(module)?;
            let mut text = format!("{target}-realizations of {dn}: {}\n", rs.len());
            for r in &rs {
                let _ = writeln!(text, "  {r}");
            }
            Ok(Output::ok(
                text,
                serde_json::to_value(&rs).expect("serializable"),
            ))
        }
    }
}

fn partition_named(
    ws: &Workspace,
    name: &str,
    params: &[String],
) -> Result<Vec<Vec<String>>, CommandError> {
    match name {
        "full" => Ok(full_partition(params)),
        "discrete" => Ok(discrete_partition(params)),
        _ => ws
            .partitions
            .get(name)
            .cloned()
            .ok_or_else(|| CommandError::UnknownName {
                kind: "partition",
                name: name.to_owned(),
            }),
    }
}

fn family_entry<'a>(
    ws: &'a Workspace,
    name: &str,
) -> Result<&'a crate::workspace::FamilyEntry, CommandError> {
    ws.families
        .get(name)
        .ok_or_else(|| CommandError::UnknownName {
            kind: "family",
            name: name.to_owned(),
        })
}

/// Parses `--mode`; partitions are resolved against the primo parameters.
fn parse_mode(
    ws: &Workspace,
    ctx: &Context,
    family: &str,
    mode: &str,
) -> Result<Mode, CommandError> {
    match mode {
        "primo" => return Ok(Mode::Primo),
        "mono" => return Ok(Mode::Mono),
        _ => {}
    }
    let (kind, p) = mode
        .split_once('=')
        .ok_or_else(|| CommandError::UnknownMode(mode.to_owned()))?;
    if !matches!(kind, "quotient" | "functional" | "souple") {
        return Err(CommandError::UnknownMode(mode.to_owned()));
    }
    let f = &family_entry(ws, family)?.family;
    let params = primo_engender(f, &ctx.guard)
        .map_err(module)?
        .result
        .parameters()
        .to_vec();
    let partition = partition_named(ws, p, &params)?;
    Ok(match kind {
        "quotient" => Mode::Quotient(partition),
        "functional" => Mode::Functional(partition),
        _ => Mode::Souple(partition),
    })
}

fn provenance_text(g: &GeneratedDynamics) -> String {
    let mut out = String::from("provenance:\n");
    for e in &g.provenance {
        let _ = writeln!(
            out,
            "  {}: {}({}) ∋ {}  [tuple {}]",
            e.parameter, e.arrow, e.from, e.to, e.witness
        );
    }
    out
}

fn generate(
    ctx: &Context,
    ws: &Workspace,
    family: &str,
    mode: &str,
) -> Result<Output, CommandError> {
    let entry = family_entry(ws, family)?;
    let f = &entry.family;
    let m = parse_mode(ws, ctx, family, mode)?;
    let g = engender(f, &m, &ctx.guard).map_err(module)?;
    let clock = &ws.opens[&entry.components[f.synchronizer()]].clock;
    let name = format!("{family}.{mode}");
    let text = format!(
        "{name} ({}) on {clock}\n{}{}",
        g.mode,
        render::open(&g.result),
        provenance_text(&g)
    );
    let docs = vec![
        Document::Open(open_doc(&name, clock, &g.result)),
        Document::Provenance(provenance_doc(&format!("{name}.provenance"), &name, &g)),
    ];
    Ok(Output::ok(
        text,
        serde_json::to_value(docs).expect("serializable"),
    ))
}

fn stability(
    ctx: &Context,
    ws: &Workspace,
    family: &str,
    names: &[String],
    random_quotients: usize,
) -> Result<Output, CommandError> {
    let f = &family_entry(ws, family)?.family;
    let params = primo_engender(f, &ctx.guard)
        .map_err(module)?
        .result
        .parameters()
        .to_vec();
    let mut partitions = names
        .iter()
        .map(|n| partition_named(ws, n, &params))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = random::rng(ctx.seed);
    partitions.extend((0..random_quotients).map(|_| random::random_partition(&mut rng, &params)));
    let report = stability_report(f, &partitions, &ctx.guard).map_err(module)?;
    let failed = report
        .modes
        .iter()
        .any(|m| !m.subcategorical || m.categorical == Some(false));
    Ok(Output {
        text: report.to_string(),
        json: serde_json::to_value(&report).expect("serializable"),
        code: if failed { EXIT_PROPERTY } else { EXIT_OK },
    })
}

fn demo_workspace() -> Result<Workspace, CommandError> {
    Ok(corpus::workspace()?)
}

fn demo_union(ctx: &Context) -> Result<Output, CommandError> {
    let ws = demo_workspace()?;
    let out = props(ctx, &ws, "union(alpha1,alpha2)")?;
    let (d, _) = eval(&ws, &parse_expr("union(alpha1,alpha2)")?)?;
    let parts = [
        ctx.properties(&ws.dynamics["alpha1"].dynamics)
            .categorical
            .holds,
        ctx.properties(&ws.dynamics["alpha2"].dynamics)
            .categorical
            .holds,
    ];
    let ps = ctx.properties(&d);
    let confirmed = parts.iter().all(|&c| c) && ps.subcategorical.holds && !ps.categorical.holds;
    let verdict = if confirmed {
        "confirmed"
    } else {
        "not confirmed"
    };
    let text = format!(
        "alpha1 categorical: {}\nalpha2 categorical: {}\n{}union of categorical dynamics is sub-categorical but not categorical: {verdict}\n",
        yes_no(parts[0]),
        yes_no(parts[1]),
        out.text
    );
    let json =
        json!({ "props": out.json, "components_categorical": parts, "confirmed": confirmed });
    Ok(Output {
        text,
        json,
        code: if confirmed { EXIT_OK } else { EXIT_PROPERTY },
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn demo_mimicry(ctx: &Context) -> Result<Output, CommandError> {
    let ws = demo_workspace()?;
    let entry = family_entry(&ws, "mimicry")?;
    let f = &entry.family;
    let mut text = String::new();
    let mut components = Vec::new();
    let mut all_det = true;
    for (i, idx) in f.index().iter().enumerate() {
        let a = f.component(i);
        for (p, param) in a.parameters().iter().enumerate() {
            let det = ctx.checks.deterministic(a.slice(p)).holds;
            all_det &= det;
            let _ = writeln!(
                text,
                "{idx} = {}, parameter {param}: deterministic: {}",
                entry.components[i],
                yes_no(det)
            );
            components.push(json!({ "component": idx, "parameter": param, "deterministic": det }));
        }
    }
    let g = engender(f, &Mode::Mono, &ctx.guard).map_err(module)?;
    let slice = g.result.slice(0);
    let deterministic = ctx.checks.deterministic(slice);
    let quasi = ctx.checks.quasi_deterministic(slice);
    let _ = write!(
        text,
        "mimicry.mono, parameter {}:\n{}{deterministic}\n{quasi}\n",
        g.result.parameters()[0],
        render::transitions(slice, "  ")
    );
    let confirmed = all_det && !quasi.holds;
    let _ = writeln!(
        text,
        "deterministic components, mono slice with a state of several successors: {}",
        if confirmed {
            "confirmed"
        } else {
            "not confirmed"
        }
    );
    let json = json!({
        "components": components,
        "mono": { "deterministic": deterministic, "quasi_deterministic": quasi },
        "confirmed": confirmed,
    });
    Ok(Output {
        text,
        json,
        code: if confirmed { EXIT_OK } else { EXIT_PROPERTY },
    })
}

/// Every pair `(a, b)` of every slice has `τ(b) = f(τ(a))` on the clock.
pub fn datation_sound(a: &OpenDynamics) -> bool {
    let h = a.clock();
    a.multi().slices().iter().all(|s| {
        (0..s.motor().num_arrows()).all(|f| {
            let arrow = s.motor().arrow(f);
            s.transition(f).pairs().all(|(x, y)| {
                let (gx, gy) = (s.global(arrow.dom, x), s.global(arrow.cod, y));
                h.step(f, a.datation(gx)) == Some(a.datation(gy))
            })
        })
    })
}

fn random_family(
    ctx: &Context,
    count: usize,
    quotients: usize,
    emit: bool,
) -> Result<Output, CommandError> {
    if emit {
        let mut docs = Vec::new();
        for k in 0..count as u64 {
            let seed = ctx.seed + k;
            docs.extend(family_documents(
                &format!("random{seed}"),
                &random::random_family(seed),
            ));
        }
        let v = serde_json::to_value(&docs).expect("serializable");
        return Ok(Output::ok(
            serde_json::to_string_pretty(&v).expect("serializable"),
            v,
        ));
    }
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut passed = 0;
    for k in 0..count as u64 {
        let seed = ctx.seed + k;
        let f = random::random_family(seed);
        let primo = primo_engender(&f, &ctx.guard).map_err(module)?;
        let params = primo.result.parameters().to_vec();
        let mut rng = random::rng(seed);
        let mut modes = vec![(Mode::Primo, primo.result.clone())];
        for _ in 0..quotients {
            let p = random::random_partition(&mut rng, &params);
            let q = primo.result.quotient(&p).map_err(module)?;
            modes.push((Mode::Quotient(p), q));
        }
        let mut ok = true;
        let mut cells = Vec::new();
        for (m, a) in &modes {
            let sub = a
                .multi()
                .slices()
                .iter()
                .all(|s| ctx.checks.subcategorical(s).holds);
            let dated = datation_sound(a);
            ok &= sub && dated;
            cells.push(json!({ "mode": m.to_string(), "parameters": a.parameters().len(), "subcategorical": sub, "datation": dated }));
        }
        if ok {
            passed += 1;
        }
        let _ = writeln!(
            text,
            "seed {seed}: {} components, {} tuples, {} primo parameters, {} quotients: {}",
            f.index().len(),
            f.interaction().len(),
            params.len(),
            quotients,
            if ok {
                "sub-categorical and dated"
            } else {
                "FAILED"
            }
        );
        rows.push(json!({ "seed": seed, "components": f.index().len(), "tuples": f.interaction().len(), "modes": cells, "ok": ok }));
    }
    let _ = writeln!(text, "{passed}/{count} families passed");
    Ok(Output {
        text,
        json: json!({ "families": rows, "passed": passed, "count": count }),
        code: if passed == count {
            EXIT_OK
        } else {
            EXIT_PROPERTY
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions_round_trip() {
        let e = parse_expr("union( alpha1 , clean(alpha2))").unwrap();
        assert_eq!(e.to_string(), "union(alpha1,clean(alpha2))");
        assert!(parse_expr("union(a,").is_err());
        assert!(parse_expr("a b").is_err());
        assert_eq!(parse_expr("a2'").unwrap(), Expr::Name("a2'".into()));
    }
}
