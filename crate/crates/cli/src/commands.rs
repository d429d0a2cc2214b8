//! Subcommands. Each returns the process exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sketchbim::bim::{build as build_plan, compile, emit_script_text, export_obj, ElementClass};
use sketchbim::edit::apply_feedback;
use sketchbim::eval::evaluate;
use sketchbim::extract::{extract_layout, ExtractOptions, SketchBundle};
use sketchbim::gen::{p10_analog, p10_script, render_raster, render_strokes, suite, RenderOptions};
use sketchbim::session::{score_session, SessionLog, SessionManager};
use sketchbim::validate::{auto_repair, validate};
use sketchbim::Layout;

#[derive(Debug, Parser)]
#[command(name = "sketchbim", version, about = "Floor-plan sketches to validated layouts and building models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract a layout from a sketch bundle.
    Extract(ExtractArgs),
    /// Check a layout against the structural rules; exit 0 iff it passes.
    Validate(ValidateArgs),
    /// Apply feedback commands to a layout.
    Edit(EditArgs),
    /// Score a layout against ground truth.
    Eval(EvalArgs),
    /// Score every snapshot of a session log against ground truth.
    EvalSession(EvalSessionArgs),
    /// Compile and execute a layout into a model, script and plan.
    Build(BuildArgs),
    /// Run the session service.
    Serve(ServeArgs),
    /// Write the synthetic plan suite as bundles with ground truth.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    pub bundle: PathBuf,
    /// Feet per pixel, skipping dimension callouts.
    #[arg(long)]
    pub assume_scale: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stage records and warnings as JSON.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub layout: PathBuf,
    /// Apply the fix catalog and check the result.
    #[arg(long)]
    pub repair: bool,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Where to write the repaired layout.
    #[arg(long, requires = "repair")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EditArgs {
    pub layout: PathBuf,
    /// One feedback message.
    #[arg(long, conflicts_with = "script", required_unless_present = "script")]
    pub say: Option<String>,
    /// Feedback file, one message per line, replayed as a session.
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Session log of a `--script` replay.
    #[arg(long, requires = "script")]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalSessionArgs {
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub layout: PathBuf,
    #[arg(long)]
    pub obj: Option<PathBuf>,
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long)]
    pub plan: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Session directory; sessions stay in memory without one.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Render rasters instead of pen strokes.
    #[arg(long)]
    pub raster: bool,
    /// Pen jitter in pixels.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn read_layout(path: &Path) -> Result<Layout> {
    Layout::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Writes to `path`, or prints when there is none.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Extract(a) => extract(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Edit(a) => edit(a),
        Command::Eval(a) => eval(a),
        Command::EvalSession(a) => eval_session(a),
        Command::Build(a) => build(a),
        Command::Serve(a) => serve(a),
        Command::Gen(a) => gen(a),
    }
}

fn extract(a: ExtractArgs) -> Result<i32> {
    let bundle = SketchBundle::from_json(&read(&a.bundle)?)?;
    let opts = ExtractOptions {
        assume_scale: a.assume_scale,
        ..Default::default()
    };
    let ex = extract_layout(&bundle, &opts)?;
    if let Some(p) = &a.log {
        let doc = serde_json::json!({"stages": ex.log, "warnings": ex.warnings});
        write(p, serde_json::to_string_pretty(&doc)?)?;
    }
    for w in &ex.warnings {
        eprintln!("warning: {w}");
    }
    emit(a.out.as_deref(), &ex.layout.to_json_pretty())?;
    eprint!("{}", ex.summary);
    Ok(0)
}

fn validate_cmd(a: ValidateArgs) -> Result<i32> {
    let mut layout = read_layout(&a.layout)?;
    let mut report = validate(&layout);
    if a.repair && !report.passes {
        layout = auto_repair(&layout, &report);
        report = validate(&layout);
    }
    if a.repair {
        emit(a.out.as_deref(), &layout.to_json_pretty())?;
    }
    if let Some(p) = &a.report {
        write(p, serde_json::to_string_pretty(&report)?)?;
    }
    for v in &report.violations {
        eprintln!("{} [{}] {}", v.code.as_str(), v.elements.join(", "), v.message);
    }
    eprintln!("{}", if report.passes { "valid" } else { "invalid" });
    Ok(if report.passes { 0 } else { 1 })
}

fn edit(a: EditArgs) -> Result<i32> {
    let layout = read_layout(&a.layout)?;
    let result = match (&a.say, &a.script) {
        (Some(text), _) => {
            let out = apply_feedback(&layout, text)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            out.new_layout
        }
        (None, Some(script)) => {
            let m = SessionManager::in_memory();
            let id = m.start_from_layout(layout)?.session_id;
            for line in read(script)?.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                let r = m.submit_feedback(&id, line).with_context(|| format!("feedback {line:?}"))?;
                eprintln!("[{}] {:?} {line}", r.iteration, r.phase);
                for w in &r.warnings {
                    eprintln!("  warning: {w}");
                }
            }
            if let Some(p) = &a.log {
                write(p, m.session_log(&id)?.to_json_pretty())?;
            }
            m.layout(&id)?
        }
        (None, None) => bail!("either --say or --script is required"),
    };
    emit(a.out.as_deref(), &result.to_json_pretty())?;
    Ok(0)
}

fn eval(a: EvalArgs) -> Result<i32> {
    let report = evaluate(&read_layout(&a.pred)?, &read_layout(&a.gt)?);
    if let Some(p) = &a.report {
        write(p, serde_json::to_string_pretty(&report)?)?;
    }
    println!("category  tp  fp  fn  precision  recall  f1      rmse    mae");
    for (name, m) in report.rows() {
        println!(
            "{name:<8} {:>3} {:>3} {:>3}  {:>9.4}  {:>6.4}  {:.4}  {:.4}  {:.4}",
            m.tp, m.fp, m.fn_, m.precision, m.recall, m.f1, m.rmse_length, m.mae_midpoint
        );
    }
    Ok(0)
}

fn eval_session(a: EvalSessionArgs) -> Result<i32> {
    let log = SessionLog::from_json(&read(&a.log)?).with_context(|| format!("parsing {}", a.log.display()))?;
    let trace = score_session(&log, &read_layout(&a.gt)?)?;
    let csv = trace.to_csv();
    match &a.out {
        Some(p) => write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn build(a: BuildArgs) -> Result<i32> {
    let layout = read_layout(&a.layout)?;
    let plan = compile(&layout)?;
    let out = build_plan(&plan, Some(&layout))?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &a.obj {
        write(p, export_obj(&out.model))?;
    }
    if let Some(p) = &a.script {
        write(p, emit_script_text(&out.plan))?;
    }
    if let Some(p) = &a.plan {
        write(p, out.plan.to_json_pretty())?;
    }
    let m = &out.model;
    println!(
        "{} ops; {} walls, {} doors, {} windows, {} slab; {} repair rounds",
        out.plan.ops.len(),
        m.count(ElementClass::Wall),
        m.count(ElementClass::Door),
        m.count(ElementClass::Window),
        m.count(ElementClass::Slab),
        out.repairs
    );
    Ok(0)
}

fn serve(a: ServeArgs) -> Result<i32> {
    let manager = match &a.data {
        Some(dir) => SessionManager::open(dir)?,
        None => SessionManager::in_memory(),
    };
    let app = crate::server::router(Arc::new(manager));
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", a.port)).await?;
        eprintln!("listening on {}", listener.local_addr()?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        anyhow::Ok(())
    })?;
    Ok(0)
}

fn gen(a: GenArgs) -> Result<i32> {
    fs::create_dir_all(&a.out)?;
    let render = |l: &Layout, rotation_deg: f64| {
        let o = RenderOptions {
            rotation: rotation_deg.to_radians(),
            jitter_px: a.jitter,
            seed: a.seed,
            ..Default::default()
        };
        if a.raster {
            render_raster(l, o)
        } else {
            render_strokes(l, o)
        }
    };
    for plan in suite() {
        let gt = plan.spec.build();
        let name = &plan.spec.name;
        write(&a.out.join(format!("{name}.bundle.json")), render(&gt, plan.rotation_deg).to_json())?;
        write(&a.out.join(format!("{name}.gt.json")), gt.to_json_pretty())?;
    }
    let (init, gt) = p10_analog();
    write(&a.out.join("session.bundle.json"), render(&init.build(), 0.0).to_json())?;
    write(&a.out.join("session.gt.json"), gt.build().to_json_pretty())?;
    write(&a.out.join("session.feedback.txt"), p10_script().join("\n") + "\n")?;
    eprintln!("wrote {} plans to {}", suite().len(), a.out.display());
    Ok(0)
}
