//! Command-line front end. [`run`] parses arguments, executes one command
//! and returns the process exit code: 0 on success, 1 when a check fails,
//! 2 on unreadable, unparsable or invalid input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use eqsite::check::{run_suite, RunReport};
use eqsite::eqsheaf::enumerate_eq_maps;
use eqsite::format::{parse_groupoid, parse_label_set, serialize};
use eqsite::galois::{dominates, gd_closure, is_definable};
use eqsite::generate::{corpus, generate, RandomParams, RANDOM_MAX_ARROWS};
use eqsite::restrict::Restriction;
use eqsite::site::{subobject_lattice, Site, SiteObject};
use eqsite::{Error, FinGroupoid, OpenSubgroupoid, RepleteInclusion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "eqsite", version, about = "Finite open groupoids, equivariant sheaves and Moerdijk sites")]
pub struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value = "human", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the groupoid axioms, continuity and openness.
    Validate { file: PathBuf },
    /// List the open subgroupoids.
    Subgroupoids { file: PathBuf },
    /// List the site objects and the sizes of their hom-sets.
    Site { file: PathBuf },
    /// Enumerate the morphisms between two site objects, given by the arrows
    /// of N as a comma-separated list (`-` for the empty subgroupoid).
    Hom { file: PathBuf, source: String, target: String },
    /// List the subobjects of a site object.
    Subobjects { file: PathBuf, object: String },
    /// Verify the restriction of the site along a replete inclusion.
    Restrict {
        file: PathBuf,
        #[arg(long)]
        h0: String,
    },
    /// Compute the domination closure of a set of objects.
    Closure {
        file: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Decide whether a replete set of objects is closed under domination.
    Definable {
        file: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Run the verification suite on groupoid files or on a generated corpus.
    Check {
        files: Vec<PathBuf>,
        /// Run every check, including sheaf generation and restriction.
        #[arg(long)]
        all: bool,
        /// Check the presets and this many random groupoids instead of files.
        #[arg(long)]
        corpus: Option<usize>,
        /// First seed of the random corpus.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a groupoid from a preset or family spec.
    Gen {
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_obj: usize,
        #[arg(long, default_value_t = RANDOM_MAX_ARROWS)]
        max_arrows: usize,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    CheckFailed,
}

/// Input problems; all map to exit code 2.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<Outcome, InputError>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let mut ctx = Ctx { format: cli.format, out };
    match execute(&mut ctx, cli.command) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::CheckFailed) => 1,
        Err(InputError(message)) => {
            let _ = writeln!(err, "error: {message}");
            2
        }
    }
}

struct Ctx<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// Writes the machine JSON or the human text.
    fn emit(&mut self, machine: Value, human: impl FnOnce() -> String) {
        let text = match self.format {
            Format::Machine => serde_json::to_string_pretty(&machine).expect("json") + "\n",
            Format::Human => human(),
        };
        let _ = self.out.write_all(text.as_bytes());
    }
}

fn load(path: &Path) -> Result<FinGroupoid, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    parse_groupoid(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_site(path: &Path) -> Result<Site, InputError> {
    Ok(Site::new(Arc::new(load(path)?))?)
}

fn find_object<'a>(site: &'a Site, spec: &str) -> Result<&'a Arc<SiteObject>, InputError> {
    let g = site.groupoid();
    let arrows = parse_label_set(g.arrows(), spec)?;
    let sub = OpenSubgroupoid::new(g, arrows)?;
    site.object(sub)
        .ok_or_else(|| InputError(format!("{} is not an open subgroupoid", sub.describe(g))))
}

fn braces(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

fn execute(ctx: &mut Ctx, command: Command) -> CmdResult {
    match command {
        Command::Validate { file } => validate(ctx, &file),
        Command::Subgroupoids { file } => subgroupoids(ctx, &file),
        Command::Site { file } => site(ctx, &file),
        Command::Hom { file, source, target } => hom(ctx, &file, &source, &target),
        Command::Subobjects { file, object } => subobjects(ctx, &file, &object),
        Command::Restrict { file, h0 } => restrict(ctx, &file, &h0),
        Command::Closure { file, set } => closure(ctx, &file, &set),
        Command::Definable { file, set } => definable(ctx, &file, &set),
        Command::Check { files, all, corpus, seed } => check(ctx, &files, all, corpus, seed),
        Command::Gen { spec, output, seed, max_obj, max_arrows } => {
            gen(ctx, &spec, output.as_deref(), RandomParams { seed, max_objects: max_obj, max_arrows })
        }
    }
}

fn validate(ctx: &mut Ctx, file: &Path) -> CmdResult {
    let g = load(file)?;
    let report = g.validate();
    let ok = report.all_ok();
    ctx.emit(serde_json::to_value(&report).expect("json"), || {
        let mut s = format!(
            "{} objects, {} arrows\naxioms: {}\ncontinuity: {}\nopen: {}\ncomposition open: {}\n",
            g.num_objects(),
            g.num_arrows(),
            report.axioms_ok,
            report.continuity_ok,
            report.is_open,
            report.composition_open
        );
        for f in &report.failures {
            s.push_str(&format!("  {f}\n"));
        }
        s
    });
    Ok(if ok { Outcome::Ok } else { Outcome::CheckFailed })
}

fn subgroupoids(ctx: &mut Ctx, file: &Path) -> CmdResult {
    let g = load(file)?;
    let subs = g.open_subgroupoids()?;
    let rows: Vec<Value> = subs
        .iter()
        .map(|s| json!({"objects": g.object_names(s.objects), "arrows": g.arrow_names(s.arrows)}))
        .collect();
    ctx.emit(json!({ "count": subs.len(), "subgroupoids": rows }), || {
        let mut s = format!("{} open subgroupoids\n", subs.len());
        for sub in &subs {
            s.push_str(&format!("  {}\n", sub.describe(&g)));
        }
        s
    });
    Ok(Outcome::Ok)
}

fn site(ctx: &mut Ctx, file: &Path) -> CmdResult {
    let site = load_site(file)?;
    let objects = site.objects();
    let mut rows = Vec::new();
    let mut matrix = Vec::new();
    for a in objects {
        let sheaf = a.sheaf();
        rows.push(json!({
            "object": a.describe(),
            "elements": sheaf.total().labels(),
        }));
        let counts = objects.iter().map(|b| site.hom(a, b).map(|h| h.len())).collect::<Result<Vec<_>, _>>()?;
        matrix.push(counts);
    }
    ctx.emit(json!({ "objects": rows, "hom_counts": matrix }), || {
        let mut s = format!("{} site objects\n", objects.len());
        for (k, a) in objects.iter().enumerate() {
            s.push_str(&format!("  [{k}] {}  elements {}\n", a.describe(), braces(a.sheaf().total().labels())));
        }
        s.push_str("hom-set sizes (row = source):\n");
        for (k, row) in matrix.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>3}")).collect();
            s.push_str(&format!("  [{k}] {}\n", cells.join("")));
        }
        s
    });
    Ok(Outcome::Ok)
}

fn hom(ctx: &mut Ctx, file: &Path, source: &str, target: &str) -> CmdResult {
    let site = load_site(file)?;
    let a = find_object(&site, source)?;
    let b = find_object(&site, target)?;
    let tsets = site.hom(a, b)?;
    let mut rows = Vec::new();
    let mut graphs = Vec::new();
    for t in &tsets {
        let graph = t.graph()?;
        let pairs: Vec<(String, String)> = graph
            .graph
            .iter()
            .enumerate()
            .map(|(p, &q)| (a.sheaf().total().label(p).to_owned(), b.sheaf().total().label(q).to_owned()))
            .collect();
        rows.push(json!({ "arrows": t.arrow_names(), "graph": pairs }));
        graphs.push(graph);
    }
    graphs.sort();
    let oracle = enumerate_eq_maps(a.sheaf(), b.sheaf())?;
    let agree = graphs == oracle;
    ctx.emit(
        json!({
            "source": a.describe(),
            "target": b.describe(),
            "tsets": rows,
            "equivariant_maps": oracle.len(),
            "oracle_agrees": agree,
        }),
        || {
            let mut s = format!("{} → {}: {} morphisms\n", a.describe(), b.describe(), tsets.len());
            for row in &rows {
                let arrows: Vec<String> = serde_json::from_value(row["arrows"].clone()).unwrap_or_default();
                let graph: Vec<(String, String)> = serde_json::from_value(row["graph"].clone()).unwrap_or_default();
                let maps: Vec<String> = graph.iter().map(|(p, q)| format!("{p} ↦ {q}")).collect();
                s.push_str(&format!("  T = {}  {}\n", braces(&arrows), maps.join(", ")));
            }
            s.push_str(&format!(
                "equivariant maps by brute force: {} ({})\n",
                oracle.len(),
                if agree { "agrees" } else { "DISAGREES" }
            ));
            s
        },
    );
    Ok(if agree { Outcome::Ok } else { Outcome::CheckFailed })
}

fn subobjects(ctx: &mut Ctx, file: &Path, object: &str) -> CmdResult {
    let site = load_site(file)?;
    let g = site.groupoid();
    let a = find_object(&site, object)?;
    let lattice = subobject_lattice(a)?;
    let rows: Vec<(Vec<String>, Vec<String>)> = lattice
        .opens
        .iter()
        .map(|&v| (g.object_names(v), a.sheaf().total().names(lattice.sub_from_open(v))))
        .collect();
    let values: Vec<Value> = rows.iter().map(|(v, s)| json!({ "open": v, "elements": s })).collect();
    ctx.emit(json!({ "object": a.describe(), "subobjects": values }), || {
        let mut s = format!("{}: {} subobjects\n", a.describe(), rows.len());
        for (v, e) in &rows {
            s.push_str(&format!("  V = {}  ↦  {}\n", braces(v), braces(e)));
        }
        s
    });
    Ok(Outcome::Ok)
}

fn restrict(ctx: &mut Ctx, file: &Path, h0: &str) -> CmdResult {
    let g = Arc::new(load(file)?);
    let carrier = parse_label_set(g.objects(), h0)?;
    let restriction = Restriction::new(RepleteInclusion::new(&g, carrier)?)?;
    let report = restriction.verify()?;
    let ok = report.all_ok();
    ctx.emit(serde_json::to_value(&report).expect("json"), || {
        let mut s = format!("H₀ = {}\n", braces(&report.carrier));
        for (a, ia) in &report.object_map {
            s.push_str(&format!("  I{a} = {ia}\n"));
        }
        for (flag, name) in [
            (report.pullback_iso, "pullback isomorphism"),
            (report.m_intersection, "m-intersection identity"),
            (report.functorial, "functoriality"),
            (report.comparison_gate, "comparison morphisms"),
            (report.essentially_surjective, "essentially surjective"),
            (report.essentially_full, "essentially full"),
        ] {
            s.push_str(&format!("{name}: {flag}\n"));
        }
        s.push_str(&format!(
            "{} morphisms restricted, {} lifted\n",
            report.morphisms_checked,
            report.witnesses.len()
        ));
        for f in &report.failures {
            s.push_str(&format!("  {f}\n"));
        }
        s
    });
    Ok(if ok { Outcome::Ok } else { Outcome::CheckFailed })
}

fn closure(ctx: &mut Ctx, file: &Path, set: &str) -> CmdResult {
    let g = load(file)?;
    let h0 = parse_label_set(g.objects(), set)?;
    let closed = gd_closure(&g, h0)?;
    let mut excluded = Vec::new();
    for x in g.all_objects().difference(closed).iter() {
        let q = dominates(&g, x, h0)?;
        let w = q.witness.expect("non-dominating point has a witness");
        excluded.push((g.objects().label(x).to_owned(), w.view(&g)));
    }
    let witnesses: Vec<Value> = excluded
        .iter()
        .map(|(x, w)| json!({ "object": x, "witness": serde_json::to_value(w).expect("json") }))
        .collect();
    ctx.emit(
        json!({ "set": g.object_names(h0), "closure": g.object_names(closed), "excluded": witnesses }),
        || {
            let mut s = format!("closure of {} = {}\n", braces(&g.object_names(h0)), braces(&g.object_names(closed)));
            for (x, w) in &excluded {
                s.push_str(&format!(
                    "  {x} does not dominate: over {}, V = {}, W = {}, arrow {}\n",
                    w.subgroupoid,
                    braces(&w.v),
                    braces(&w.w),
                    w.arrow
                ));
            }
            s
        },
    );
    Ok(Outcome::Ok)
}

fn definable(ctx: &mut Ctx, file: &Path, set: &str) -> CmdResult {
    let g = load(file)?;
    let h0 = parse_label_set(g.objects(), set)?;
    let result = is_definable(&g, h0)?;
    let closed = gd_closure(&g, h0)?;
    ctx.emit(
        json!({ "set": g.object_names(h0), "definable": result, "closure": g.object_names(closed) }),
        || format!("{} definable: {result}\n", braces(&g.object_names(h0))),
    );
    Ok(Outcome::Ok)
}

fn check(ctx: &mut Ctx, files: &[PathBuf], all: bool, corpus_size: Option<usize>, seed: u64) -> CmdResult {
    let mut inputs: Vec<(String, FinGroupoid)> = Vec::new();
    for f in files {
        inputs.push((f.display().to_string(), load(f)?));
    }
    if let Some(n) = corpus_size {
        inputs.extend(corpus(n, seed)?);
    }
    if inputs.is_empty() {
        return Err(InputError("nothing to check: give files or --corpus N".into()));
    }
    let mut runs = Vec::new();
    for (name, g) in inputs {
        let mut run = run_suite(&name, g);
        if !all {
            run.checks.retain(|c| !matches!(c.name.as_str(), "generation" | "restriction" | "derived-laws"));
        }
        runs.push(run);
    }
    let report = RunReport::new(runs);
    let text = match ctx.format {
        Format::Machine => report.machine(),
        Format::Human => report.human(),
    };
    let _ = ctx.out.write_all(text.as_bytes());
    Ok(if report.passed { Outcome::Ok } else { Outcome::CheckFailed })
}

fn gen(ctx: &mut Ctx, spec: &str, output: Option<&Path>, params: RandomParams) -> CmdResult {
    let g = generate(spec, params)?;
    let text = serialize(&g);
    match output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            ctx.emit(
                json!({ "spec": spec, "output": path.display().to_string(), "objects": g.num_objects(), "arrows": g.num_arrows() }),
                || format!("wrote {} ({} objects, {} arrows)\n", path.display(), g.num_objects(), g.num_arrows()),
            );
        }
        None => {
            let _ = ctx.out.write_all(text.as_bytes());
        }
    }
    Ok(Outcome::Ok)
}

