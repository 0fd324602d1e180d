//! Command-line surface: curve specification files, the classify /
//! table / mesh / simulate subcommands, and the process exit-code
//! contract (0 ok, 1 usage, 2 bad input, 3 numeric failure,
//! 4 expectation mismatch).

use crate::classify::ClassifierCfg;
use crate::criteria::{classify_end, verdict_matches, ConformalReport};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::geometry::{
    arc_reparam, catalog, catalog_names, mesh, CatalogParams, EndSpec, Kappa,
    ParamCurve, ProfilePoint,
};
use crate::report::{ReportDocument, SimulationDocument, SCHEMA_VERSION};
use crate::stochastic::{exact_hitting, simulate_hitting, DiffusionCfg};
use crate::warp::warp_from_curve;
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Parse argv, honor REVEND_THREADS, run the selected command and
/// translate any failure into its stable exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here too; only real flag
            // misuse goes to stderr with the usage exit code.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match init_threads().and_then(|()| dispatch(&cli.cmd)) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "revend",
    version,
    about = "Conformal type and stochastic completeness of ends of revolution \
             in constant-curvature space forms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Classify one end and emit a report document.
    Classify(ClassifyArgs),
    /// Classify the whole catalog and check the declared expectations.
    Table(TableArgs),
    /// Sample the surface of revolution as a plain-text triangle mesh.
    Mesh(MeshArgs),
    /// Run the radial diffusion and compare against the exact hitting split.
    Simulate(SimulateArgs),
}

/// Where the generating curve comes from: a named catalog entry or a
/// key-value curve file.
#[derive(Debug, Args)]
struct SourceArgs {
    /// Catalog entry name (see `table` for the list).
    #[arg(long, value_name = "NAME", conflicts_with = "curve")]
    catalog: Option<String>,
    /// Curve specification file.
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
    /// Catalog parameter, repeatable (only with --catalog).
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Ambient curvature sign {-1, 0, 1} for curve files that omit it.
    #[arg(long, value_name = "K", allow_hyphen_values = true)]
    kappa: Option<String>,
}

impl SourceArgs {
    fn resolve(&self) -> Result<EndSpec> {
        match (&self.catalog, &self.curve) {
            (Some(name), None) => {
                if self.kappa.is_some() {
                    return Err(Error::Usage(
                        "--kappa applies to curve files; catalog entries fix their model".into(),
                    ));
                }
                let params = CatalogParams::parse_pairs(&self.params)?;
                catalog(name, &params)
            }
            (None, Some(path)) => {
                if !self.params.is_empty() {
                    return Err(Error::Usage(
                        "--param applies to --catalog; curve files carry parameters inline".into(),
                    ));
                }
                let flag_kappa = match &self.kappa {
                    None => None,
                    Some(raw) => Some(parse_kappa(raw)?),
                };
                load_curve(path, flag_kappa)
            }
            (None, None) => Err(Error::Usage("one of --catalog or --curve is required".into())),
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        }
    }
}

fn parse_kappa(raw: &str) -> Result<Kappa> {
    let v: i64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("--kappa must be -1, 0 or 1, got `{raw}`")))?;
    Kappa::from_value(v)
}

/// Overrides for the divergence classifier; unset flags keep defaults.
#[derive(Debug, Args)]
struct ClassifierArgs {
    /// First decision horizon for the tail integrals.
    #[arg(long = "horizon-t0", value_name = "S")]
    horizon_t0: Option<f64>,
    /// Number of horizon doublings before giving up.
    #[arg(long = "max-doublings", value_name = "N")]
    max_doublings: Option<u32>,
    /// Dead band around the critical tail exponent.
    #[arg(long, value_name = "D")]
    delta: Option<f64>,
    /// Absolute tolerance for negligible tails and stabilization.
    #[arg(long, value_name = "T")]
    tol: Option<f64>,
}

impl ClassifierArgs {
    fn build(&self) -> Result<ClassifierCfg> {
        let mut cfg = ClassifierCfg::default();
        if let Some(v) = self.horizon_t0 {
            cfg.horizon_t0 = v;
        }
        if let Some(v) = self.max_doublings {
            cfg.max_doublings = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the report document as JSON.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Write the per-end verdict table as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Omit wall-clock timings so identical runs are byte-identical.
    #[arg(long = "no-timings")]
    no_timings: bool,
}

impl OutputArgs {
    fn emit(&self, doc: &ReportDocument) -> Result<()> {
        if let Some(path) = &self.json {
            write_text(path, &doc.to_json()?)?;
        }
        if let Some(path) = &self.csv {
            write_text(path, &doc.to_csv())?;
        }
        Ok(())
    }
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct MeshArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Arc-length extent of the sampled band.
    #[arg(long = "s-max", value_name = "S", default_value_t = 10.0)]
    s_max: f64,
    /// Number of arc-length sample rows.
    #[arg(long, value_name = "N", default_value_t = 96)]
    ns: usize,
    /// Number of angular samples per row.
    #[arg(long, value_name = "N", default_value_t = 64)]
    ntheta: usize,
    /// Output file (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Number of diffusion paths.
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    paths: u64,
    /// Euler-Maruyama time step.
    #[arg(long, value_name = "H", default_value_t = 1e-4)]
    step: f64,
    /// Seed for the per-path random streams.
    #[arg(long, value_name = "SEED", default_value_t = 1)]
    seed: u64,
    /// Inner absorbing radius.
    #[arg(long, value_name = "S", default_value_t = 0.0)]
    rho: f64,
    /// Outer absorbing radius.
    #[arg(long = "R", value_name = "S", default_value_t = 2.0)]
    big_r: f64,
    /// Start radius.
    #[arg(long, value_name = "S", default_value_t = 1.0)]
    x0: f64,
    /// Write the simulation document as JSON.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
    /// Omit wall-clock timings so identical runs are byte-identical.
    #[arg(long = "no-timings")]
    no_timings: bool,
}

fn dispatch(cmd: &Cmd) -> Result<()> {
    match cmd {
        Cmd::Classify(args) => cmd_classify(args),
        Cmd::Table(args) => cmd_table(args),
        Cmd::Mesh(args) => cmd_mesh(args),
        Cmd::Simulate(args) => cmd_simulate(args),
    }
}

/// REVEND_THREADS caps the rayon pool. A pool that is already built
/// (tests, repeated entry) keeps its size; that is not an error.
fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("REVEND_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::Usage(format!("REVEND_THREADS must be a positive integer, got `{raw}`"))
        })?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> Result<()> {
    let end = args.source.resolve()?;
    let cfg = args.classifier.build()?;
    let started = Instant::now();
    let report = classify_end(&end, &cfg)?;
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    let mut out = String::new();
    render_report(&mut out, &report);
    print!("{out}");
    let mut doc = ReportDocument::new(cfg, vec![report]);
    if !args.output.no_timings {
        let mut timings = BTreeMap::new();
        timings.insert(end.name.clone(), elapsed);
        doc.timings_ms = Some(timings);
    }
    args.output.emit(&doc)
}

fn cmd_table(args: &TableArgs) -> Result<()> {
    let cfg = args.classifier.build()?;
    let mut ends = Vec::new();
    for name in catalog_names() {
        ends.push(catalog(name, &CatalogParams::new())?);
    }
    let (doc, text, mismatches) = table_over(ends, &cfg, args.output.no_timings)?;
    print!("{text}");
    args.output.emit(&doc)?;
    if mismatches > 0 {
        return Err(Error::Mismatch(format!(
            "{mismatches} of {} catalog ends disagree with their declared verdicts",
            doc.ends.len()
        )));
    }
    Ok(())
}

/// Classify `ends` in parallel, render the verdict table in input order
/// and count disagreements with the declared expectations.
fn table_over(
    ends: Vec<EndSpec>,
    cfg: &ClassifierCfg,
    no_timings: bool,
) -> Result<(ReportDocument, String, usize)> {
    use rayon::prelude::*;
    let classified: Vec<(ConformalReport, f64)> = ends
        .par_iter()
        .map(|end| {
            let started = Instant::now();
            let report = classify_end(end, cfg)?;
            Ok((report, started.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<_>>()?;

    let name_w = ends.iter().map(|e| e.name.len()).max().unwrap_or(4).max(4);
    let mut text = format!(
        "{:<name_w$}  {:>5}  {:<14}  {:<17}  status\n",
        "end", "kappa", "verdict", "expected"
    );
    let mut mismatches = 0usize;
    let mut timings = BTreeMap::new();
    let mut reports = Vec::with_capacity(classified.len());
    for (end, (report, ms)) in ends.iter().zip(classified) {
        let expected = match end.expected {
            Some(e) => e.to_string(),
            None => "-".to_string(),
        };
        let ok = match end.expected {
            Some(e) => verdict_matches(e, report.verdict),
            None => true,
        };
        if !ok {
            mismatches += 1;
        }
        text.push_str(&format!(
            "{:<name_w$}  {:>5}  {:<14}  {:<17}  {}\n",
            end.name,
            end.kappa.value(),
            report.verdict.to_string(),
            expected,
            if ok { "ok" } else { "MISMATCH" }
        ));
        timings.insert(end.name.clone(), ms);
        reports.push(report);
    }
    text.push_str(&format!("{} ends, {} mismatches\n", reports.len(), mismatches));
    let mut doc = ReportDocument::new(*cfg, reports);
    if !no_timings {
        doc.timings_ms = Some(timings);
    }
    Ok((doc, text, mismatches))
}

fn cmd_mesh(args: &MeshArgs) -> Result<()> {
    let end = args.source.resolve()?;
    let surface = mesh(&end, args.s_max, args.ns, args.ntheta)?;
    let mut buf = Vec::new();
    surface
        .write_obj(&mut buf)
        .map_err(|e| Error::Io(format!("rendering mesh: {e}")))?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &buf)
                .map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&buf)
                .and_then(|()| lock.flush())
                .map_err(|e| Error::Io(format!("writing mesh to stdout: {e}")))?;
        }
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let end = args.source.resolve()?;
    let w = warp_from_curve(&end.curve)?;
    let cfg = DiffusionCfg {
        step: args.step,
        n_paths: args.paths,
        seed: args.seed,
        ..DiffusionCfg::default()
    };
    cfg.validate()?;
    let (exact_inner, exact_outer) = exact_hitting(&w, args.rho, args.big_r, args.x0)?;
    let started = Instant::now();
    let stats = simulate_hitting(&w, args.rho, args.big_r, args.x0, &cfg)?;
    let elapsed = started.elapsed().as_secs_f64() * 1e3;

    let mut text = format!(
        "end: {}  interval [{}, {}] from x0 = {}\n",
        end.name, args.rho, args.big_r, args.x0
    );
    text.push_str(&format!(
        "exact     p_inner = {exact_inner}  p_outer = {exact_outer}\n"
    ));
    text.push_str(&format!(
        "empirical p_inner = {} +- {}  p_outer = {} +- {}\n",
        stats.p_hit_inner.value,
        stats.p_hit_inner.error,
        stats.p_hit_outer.value,
        stats.p_hit_outer.error
    ));
    text.push_str(&format!(
        "paths = {}  undecided = {}  mean exit time = {} +- {}\n",
        stats.n_paths,
        stats.n_undecided,
        stats.mean_exit_time.value,
        stats.mean_exit_time.error
    ));
    let gap = (stats.p_hit_inner.value - exact_inner).abs();
    text.push_str(&format!("inner deviation = {gap}\n"));
    print!("{text}");

    let mut doc = SimulationDocument {
        schema_version: SCHEMA_VERSION,
        tool_version: crate::report::tool_version().to_string(),
        end_name: end.name.clone(),
        rho: args.rho,
        big_r: args.big_r,
        x0: args.x0,
        config: cfg,
        exact_inner,
        exact_outer,
        stats,
        timings_ms: None,
    };
    if !args.no_timings {
        let mut timings = BTreeMap::new();
        timings.insert(end.name.clone(), elapsed);
        doc.timings_ms = Some(timings);
    }
    if let Some(path) = &args.json {
        write_text(path, &doc.to_json()?)?;
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))
}

fn render_report(out: &mut String, report: &ConformalReport) {
    out.push_str(&format!(
        "end: {}  (kappa = {})\n",
        report.end_name,
        report.kappa.value()
    ));
    out.push_str(&format!("verdict: {}\n", report.verdict));
    if report.fired.is_empty() {
        out.push_str("criteria fired: none\n");
    } else {
        out.push_str("criteria fired:\n");
        for f in &report.fired {
            out.push_str(&format!("  {:<12} {}\n", f.criterion, f.evidence));
        }
    }
    out.push_str("integrals:\n");
    let rows = [
        ("ds/w", &report.integrals.parabolicity),
        ("s/Omega", &report.integrals.sufficient),
        ("(C0+Omega)/w", &report.integrals.stochastic),
    ];
    for (label, v) in rows {
        let mut line = format!("  {:<13} {:?}", label, v.kind);
        if let Some(b) = &v.value {
            line.push_str(&format!(" = {} +- {}", b.value, b.error));
        }
        line.push_str(&format!("  [{}, horizon {}]\n", v.rule, v.horizon));
        out.push_str(&line);
    }
    out.push_str("checks:\n");
    for c in &report.consistency {
        out.push_str(&format!("  {:<24} {:<5} {}\n", c.id, c.status, c.detail));
    }
}

/// One `key = value` assignment with the byte offset where the value
/// starts, so expression errors can point into the file.
struct FileEntry {
    value: String,
    value_offset: usize,
}

/// Load an end from a flat key-value curve file.
///
/// Recognized keys: `name`, `kappa`, `t0`, `x1`, `x3`, and optional
/// closed-form derivatives `dx1`/`dx3` (both or neither); `*_expr`
/// spellings are accepted aliases. Alternatively `builtin = <entry>`
/// selects a catalog curve (for the quadrature-defined profiles that
/// expressions cannot state) and every remaining key is passed to it
/// as a parameter. Lines starting with `#`, and anything after a `#`
/// in a value, are comments. `kappa` may instead come from the
/// `--kappa` flag; when both are present they must agree.
pub fn load_curve(path: &Path, flag_kappa: Option<Kappa>) -> Result<EndSpec> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "curve".to_string());
    load_curve_source(&source, &stem, flag_kappa)
}

fn load_curve_source(source: &str, stem: &str, flag_kappa: Option<Kappa>) -> Result<EndSpec> {
    let mut entries: BTreeMap<String, FileEntry> = BTreeMap::new();
    let mut offset = 0usize;
    for line in source.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let content = line.trim_end_matches('\n');
        let stripped = match content.find('#') {
            Some(i) => &content[..i],
            None => content,
        };
        if stripped.trim().is_empty() {
            continue;
        }
        let Some(eq) = stripped.find('=') else {
            return Err(Error::Parse {
                offset: line_start + (stripped.len() - stripped.trim_start().len()),
                msg: "expected `key = value`".into(),
            });
        };
        let key_raw = &stripped[..eq];
        let value_raw = &stripped[eq + 1..];
        let key = canonical_key(key_raw.trim());
        if key.is_empty() {
            return Err(Error::Parse { offset: line_start, msg: "empty key".into() });
        }
        let lead = value_raw.len() - value_raw.trim_start().len();
        let value_offset = line_start + eq + 1 + lead;
        let value = value_raw.trim().to_string();
        if entries
            .insert(key.clone(), FileEntry { value, value_offset })
            .is_some()
        {
            return Err(Error::Parse {
                offset: line_start,
                msg: format!("duplicate key `{key}`"),
            });
        }
    }

    let name = match entries.remove("name") {
        Some(e) => e.value,
        None => stem.to_string(),
    };

    if let Some(builtin) = entries.remove("builtin") {
        if let Some(extra) = ["kappa", "t0", "x1", "x3", "dx1", "dx3"]
            .iter()
            .find(|k| entries.contains_key(**k))
        {
            return Err(Error::Parse {
                offset: entries[*extra].value_offset,
                msg: format!("`{extra}` does not apply to a builtin curve"),
            });
        }
        let mut params = CatalogParams::new();
        for (key, entry) in &entries {
            params.set(key.clone(), entry.value.clone());
        }
        let mut end = catalog(&builtin.value, &params)?;
        if let Some(flag) = flag_kappa {
            if flag != end.kappa {
                return Err(Error::Usage(format!(
                    "--kappa {} contradicts builtin `{}` (kappa = {})",
                    flag.value(),
                    builtin.value,
                    end.kappa.value()
                )));
            }
        }
        end.name = name;
        // A file-loaded curve carries no verdict expectation.
        end.expected = None;
        return Ok(end);
    }

    let file_kappa = match entries.remove("kappa") {
        None => None,
        Some(e) => {
            let v: i64 = e.value.parse().map_err(|_| Error::Parse {
                offset: e.value_offset,
                msg: format!("kappa must be -1, 0 or 1, got `{}`", e.value),
            })?;
            Some(Kappa::from_value(v)?)
        }
    };
    let kappa = match (file_kappa, flag_kappa) {
        (Some(f), Some(g)) if f != g => {
            return Err(Error::Usage(format!(
                "--kappa {} contradicts the file's kappa = {}",
                g.value(),
                f.value()
            )));
        }
        (Some(f), _) => f,
        (None, Some(g)) => g,
        (None, None) => {
            return Err(Error::domain(
                "curve file sets no kappa and --kappa was not given",
            ));
        }
    };

    let t0 = match entries.remove("t0") {
        None => 0.0,
        Some(e) => e.value.parse::<f64>().map_err(|_| Error::Parse {
            offset: e.value_offset,
            msg: format!("t0 must be a number, got `{}`", e.value),
        })?,
    };

    let x1 = take_expr(&mut entries, "x1")?;
    let x3 = take_expr(&mut entries, "x3")?;
    let dx1 = take_opt_expr(&mut entries, "dx1")?;
    let dx3 = take_opt_expr(&mut entries, "dx3")?;
    if let Some((key, entry)) = entries.iter().next() {
        return Err(Error::Parse {
            offset: entry.value_offset,
            msg: format!(
                "unknown key `{key}` (expected name, kappa, t0, x1, x3, dx1, dx3 or builtin)"
            ),
        });
    }

    // Finite-difference derivatives carry ~1e-9 relative noise; arc
    // refinement budgets below that stall, so the tolerance stays two
    // orders above it. Closed-form derivatives support the full
    // catalog tolerance.
    let (curve, arc_tol) = match (dx1, dx3) {
        (Some(d1), Some(d3)) => (
            ParamCurve::new(
                name.clone(),
                t0,
                f64::INFINITY,
                move |t| ProfilePoint::new(x1.eval(t), x3.eval(t)),
                move |t| (d1.eval(t), d3.eval(t)),
            ),
            1e-9,
        ),
        (None, None) => (
            ParamCurve::with_fd_deriv(name.clone(), t0, f64::INFINITY, move |t| {
                ProfilePoint::new(x1.eval(t), x3.eval(t))
            }),
            1e-7,
        ),
        _ => {
            return Err(Error::domain(
                "derivative expressions dx1 and dx3 must be given together",
            ));
        }
    };
    let arc = arc_reparam(&curve, kappa, 1.0, arc_tol)?;
    Ok(EndSpec { name, kappa, curve: arc, expected: None })
}

/// `x1_expr` and friends are accepted spellings of the short keys.
fn canonical_key(key: &str) -> String {
    let lower = key.to_ascii_lowercase();
    match lower.strip_suffix("_expr") {
        Some(base) if matches!(base, "x1" | "x3" | "dx1" | "dx3") => base.to_string(),
        _ => lower,
    }
}

fn take_expr(entries: &mut BTreeMap<String, FileEntry>, key: &str) -> Result<Expr> {
    match take_opt_expr(entries, key)? {
        Some(e) => Ok(e),
        None => Err(Error::domain(format!("curve file is missing `{key}`"))),
    }
}

fn take_opt_expr(
    entries: &mut BTreeMap<String, FileEntry>,
    key: &str,
) -> Result<Option<Expr>> {
    let Some(entry) = entries.remove(key) else {
        return Ok(None);
    };
    match parse_expr(&entry.value) {
        Ok(e) => Ok(Some(e)),
        Err(Error::Parse { offset, msg }) => Err(Error::Parse {
            offset: entry.value_offset + offset,
            msg: format!("in `{key}`: {msg}"),
        }),
        Err(other) => Err(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog;

    fn spec_from(source: &str) -> Result<EndSpec> {
        load_curve_source(source, "from-test", None)
    }

    #[test]
    fn horosphere_file_matches_the_catalog_entry() {
        let end = spec_from(
            "# unit horosphere profile\n\
             name = horo-file\n\
             kappa = -1\n\
             t0 = 0\n\
             x1 = 1*t+1\n\
             x3 = 1\n",
        )
        .unwrap();
        let mut params = CatalogParams::new();
        params.set("z", "1");
        let reference = catalog("horosphere", &params).unwrap();
        assert_eq!(end.kappa, Kappa::Hyperbolic);
        // Richardson-extrapolated differences leave ~3e-11 of speed
        // noise per unit arc length, so 1e-9 holds comfortably out to
        // s = 10 but not arbitrarily far.
        for s in [0.0, 0.5, 1.3, 7.0, 10.0] {
            let p = end.curve.point(s).unwrap();
            let q = reference.curve.point(s).unwrap();
            let d1 = (p.x1 - q.x1).abs();
            assert!(d1 < 1e-9, "x1 off by {d1:e} at s={s}");
            assert!((p.x3 - q.x3).abs() < 1e-9, "x3 off at s={s}");
        }
    }

    #[test]
    fn curve_on_the_model_boundary_is_rejected() {
        let err = spec_from("kappa = -1\nx1 = t+1\nx3 = 0\n").unwrap_err();
        assert_eq!(err.exit_code(), 2, "x3 = 0 leaves the half-space: {err}");
    }

    #[test]
    fn expression_errors_point_into_the_file() {
        let source = "kappa = 0\nx1 = t\nx3 = sin(\n";
        let err = spec_from(source).unwrap_err();
        match err {
            Error::Parse { offset, .. } => {
                // The offending `sin(` ends at the end of the file body.
                assert_eq!(offset, source.len() - 1);
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn builtin_files_reach_quadrature_curves() {
        let end = spec_from("builtin = clothoid\nname = cornu\n").unwrap();
        assert_eq!(end.name, "cornu");
        assert_eq!(end.kappa, Kappa::Hyperbolic);
        let reference = catalog("clothoid", &CatalogParams::new()).unwrap();
        for s in [0.0, 1.0, 4.0] {
            let p = end.curve.point(s).unwrap();
            let q = reference.curve.point(s).unwrap();
            assert!((p.x1 - q.x1).abs() < 1e-9);
            assert!((p.x3 - q.x3).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_form_derivatives_are_used_verbatim() {
        let end = spec_from(
            "kappa = 0\nx1 = 2+sin(t)\nx3 = t\ndx1 = cos(t)\ndx3 = 1\n",
        )
        .unwrap();
        // speed^2 = cos^2 + 1 at t = 0 -> sqrt(2)
        let tangent = end.curve.tangent(0.0).unwrap();
        let n = (tangent.0 * tangent.0 + tangent.1 * tangent.1).sqrt();
        assert!((n - 1.0).abs() < 1e-9, "unit tangent, got {n}");
    }

    #[test]
    fn kappa_conflicts_are_usage_errors() {
        let err = load_curve_source("kappa = 0\nx1 = t+1\nx3 = 1\n", "k", Some(Kappa::Hyperbolic))
            .unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let ok = load_curve_source("x1 = t+1\nx3 = 1\n", "k", Some(Kappa::Hyperbolic));
        assert!(ok.is_ok(), "flag alone sets kappa: {ok:?}");
        let missing = spec_from("x1 = t+1\nx3 = 1\n").unwrap_err();
        assert_eq!(missing.exit_code(), 2);
    }

    #[test]
    fn duplicate_and_unknown_keys_are_parse_errors() {
        let dup = spec_from("kappa = 0\nx1 = t\nx1 = 2*t\nx3 = 1\n").unwrap_err();
        assert!(matches!(dup, Error::Parse { .. }), "{dup:?}");
        let unknown = spec_from("kappa = 0\nx1 = t\nx3 = 1\nspin = 3\n").unwrap_err();
        assert!(matches!(unknown, Error::Parse { .. }), "{unknown:?}");
    }

    #[test]
    fn table_flags_expectation_mismatches() {
        let mut end = catalog("plane_end", &CatalogParams::new()).unwrap();
        end.expected = Some(crate::geometry::ExpectedVerdict::NonParabolic);
        let cfg = ClassifierCfg::default();
        let (doc, text, mismatches) = table_over(vec![end], &cfg, true).unwrap();
        assert_eq!(mismatches, 1);
        assert!(text.contains("MISMATCH"));
        assert_eq!(doc.ends.len(), 1);
        assert!(doc.timings_ms.is_none());
    }

    #[test]
    fn classifier_flag_overrides_are_validated() {
        let args = ClassifierArgs {
            horizon_t0: Some(4.0),
            max_doublings: Some(10),
            delta: None,
            tol: None,
        };
        let cfg = args.build().unwrap();
        assert_eq!(cfg.horizon_t0, 4.0);
        assert_eq!(cfg.max_doublings, 10);
        let bad = ClassifierArgs {
            horizon_t0: Some(-1.0),
            max_doublings: None,
            delta: None,
            tol: None,
        };
        assert_eq!(bad.build().unwrap_err().exit_code(), 2);
    }
}
