//! The `copaint` command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use copaint_core::affect::{EmotionCategory, VaPoint};
use copaint_core::canvas::load_canvas;
use copaint_core::metaphor::{analyze_turn, MetaphorMode, ModePreference, TurnHistory};
use copaint_core::user_model::{load_profile_with_warnings, save_profile, Profile, StereotypeRules};
use serde::Serialize;

use crate::api::{serve, AppState};
use crate::config::Config;
use crate::engine::{new_profile, DisclosureRequest, Engine};
use crate::repro::{write_study, STUDY_SIZE};
use crate::store::ProfileStore;

#[derive(Debug, Parser)]
#[command(name = "copaint", version, about = "Affective co-painting engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure a PNG canvas and infer its emotion.
    Analyze {
        png: PathBuf,
        /// Symbols the painter says they drew, comma separated.
        #[arg(long, value_delimiter = ',')]
        symbols: Vec<String>,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Choose a response for a target emotion.
    Metaphor {
        #[arg(long, allow_hyphen_values = true)]
        valence: f64,
        #[arg(long, allow_hyphen_values = true)]
        arousal: f64,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        symbols: Vec<String>,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Create, update or inspect a profile file.
    Profile {
        #[command(subcommand)]
        action: ProfileAction,
    },
    /// Paint an emotion: composition SVG plus its stroke plan.
    Sketch {
        #[arg(long)]
        emotion: EmotionCategory,
        #[arg(long, value_enum)]
        mode: SketchMode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        strokes: Option<PathBuf>,
        #[arg(long, default_value_t = STUDY_SIZE)]
        size: u32,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Write the eight study images (JSON and SVG) into a directory.
    ReproStudy {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = STUDY_SIZE)]
        size: u32,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Run one robot turn on a PNG canvas.
    Turn {
        png: PathBuf,
        /// Profile file; repeat for a group.
        #[arg(long, required = true)]
        profile: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        symbols: Vec<String>,
        #[command(flatten)]
        config: ConfigArg,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[command(flatten)]
        config: ConfigArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProfileAction {
    /// New profile on the population taxonomy.
    Init {
        id: String,
        /// Stereotype attribute, e.g. `ageBand=senior`; repeatable.
        #[arg(long = "attr", value_parser = parse_attr)]
        attributes: Vec<(String, String)>,
        /// Stereotype rules; the bundled illustrative rules by default.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a disclosure form (JSON) to a profile.
    Disclose {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        form: PathBuf,
        /// Defaults to overwriting `--profile`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a summary of a profile.
    Show {
        #[arg(long)]
        profile: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Auto,
    Abstract,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SketchMode {
    Abstract,
    #[value(alias = "rep")]
    Representational,
}

fn parse_attr(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or("expected key=value")?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn engine(arg: &ConfigArg) -> anyhow::Result<Engine> {
    let config = match &arg.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    Ok(Engine::new(config)?)
}

fn read_profile(path: &Path) -> anyhow::Result<Profile> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let (profile, warnings) = load_profile_with_warnings(&bytes).with_context(|| format!("loading {}", path.display()))?;
    for w in warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(profile)
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Runs a parsed command, writing its primary output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Analyze {
            png,
            symbols,
            profile,
            config,
        } => {
            let engine = engine(&config)?;
            let profile = match profile {
                Some(p) => read_profile(&p)?,
                None => Profile::empty("anonymous"),
            };
            let raster = load_canvas(&std::fs::read(&png)?)?;
            let analysis = analyze_turn(&raster, &symbols, &profile, &engine.generic, &engine.config.inference_weights)?;
            print_json(out, &analysis)
        }
        Command::Metaphor {
            valence,
            arousal,
            profile,
            symbols,
            mode,
            config,
        } => {
            if !(-1.0..=1.0).contains(&valence) || !(-1.0..=1.0).contains(&arousal) {
                bail!("valence and arousal must lie in [-1, 1]");
            }
            let engine = engine(&config)?;
            let profile = match profile {
                Some(p) => read_profile(&p)?,
                None => new_profile("anonymous"),
            };
            let analysis = engine.analysis_at(VaPoint::new(valence, arousal), &symbols, &profile)?;
            let mode = match mode {
                ModeArg::Auto => ModePreference::Auto,
                ModeArg::Abstract => ModePreference::Abstract,
            };
            let decision = engine.decide(&analysis, &[profile], &TurnHistory::default(), mode)?;
            print_json(out, &decision)
        }
        Command::Profile { action } => run_profile(action, out),
        Command::Sketch {
            emotion,
            mode,
            out: svg_path,
            strokes,
            size,
            config,
        } => {
            let engine = engine(&config)?;
            let mode = match mode {
                SketchMode::Abstract => MetaphorMode::Abstract,
                SketchMode::Representational => MetaphorMode::Representational,
            };
            let rendering = engine.study_rendering(emotion, mode, size, size)?;
            std::fs::write(&svg_path, rendering.composition.to_svg())?;
            if let Some(path) = strokes {
                std::fs::write(path, serde_json::to_vec_pretty(&rendering.stroke_plan)?)?;
            }
            print_json(out, &rendering.decision)
        }
        Command::ReproStudy { out: dir, size, config } => {
            let engine = engine(&config)?;
            for path in write_study(&engine, &dir, size)? {
                writeln!(out, "{}", path.display())?;
            }
            Ok(())
        }
        Command::Turn {
            png,
            profile,
            symbols,
            config,
        } => {
            let engine = engine(&config)?;
            let profiles = profile.iter().map(|p| read_profile(p)).collect::<anyhow::Result<Vec<_>>>()?;
            let raster = load_canvas(&std::fs::read(&png)?)?;
            let response = engine.single_turn(raster, &profiles, &symbols)?;
            print_json(out, &response)
        }
        Command::Serve { port, host, config } => {
            let engine = Arc::new(engine(&config)?);
            let store = Arc::new(match &engine.config.profile_dir {
                Some(dir) => ProfileStore::on_disk(dir)?,
                None => ProfileStore::in_memory(),
            });
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(AppState::new(engine, store), SocketAddr::new(host, port)))?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ProfileSummary<'a> {
    id: &'a str,
    attributes: &'a BTreeMap<String, String>,
    nodes: usize,
    known_nodes: Vec<String>,
    stereotype_nodes: Vec<String>,
    element_overrides: Vec<String>,
    taboo: Vec<&'a str>,
    history: usize,
}

fn run_profile(action: ProfileAction, out: &mut dyn Write) -> anyhow::Result<()> {
    match action {
        ProfileAction::Init {
            id,
            attributes,
            rules,
            out: path,
        } => {
            if !crate::store::valid_id(&id) {
                bail!("invalid profile id `{id}`");
            }
            let mut profile = new_profile(&id);
            profile.attributes.extend(attributes);
            if !profile.attributes.is_empty() {
                let rules = match rules {
                    Some(p) => StereotypeRules::parse(&std::fs::read_to_string(p)?)?,
                    None => StereotypeRules::demo(),
                };
                profile = profile.apply_stereotypes(&rules, &copaint_core::affect::build_generic_table());
            }
            let bytes = save_profile(&profile);
            match path {
                Some(p) => std::fs::write(p, bytes)?,
                None => out.write_all(&bytes)?,
            }
            Ok(())
        }
        ProfileAction::Disclose {
            profile,
            form,
            out: path,
        } => {
            let current = read_profile(&profile)?;
            let req: DisclosureRequest = serde_json::from_slice(&std::fs::read(&form)?)
                .with_context(|| format!("parsing {}", form.display()))?;
            let next = req.apply(&current);
            std::fs::write(path.as_ref().unwrap_or(&profile), save_profile(&next))?;
            writeln!(out, "{} history entries added", next.history.len() - current.history.len())?;
            Ok(())
        }
        ProfileAction::Show { profile } => {
            let p = read_profile(&profile)?;
            let layer_nodes = |layer| {
                p.taxonomy
                    .iter()
                    .filter(|(_, n)| n.explicit_affect.is_some_and(|e| e.layer == layer))
                    .map(|(path, n)| format!("{path} {}", n.explicit_affect.unwrap().affect()))
                    .collect()
            };
            let summary = ProfileSummary {
                id: &p.id,
                attributes: &p.attributes,
                nodes: p.taxonomy.len(),
                known_nodes: layer_nodes(copaint_core::user_model::Layer::Known),
                stereotype_nodes: layer_nodes(copaint_core::user_model::Layer::Stereotype),
                element_overrides: p
                    .element_overrides
                    .iter()
                    .map(|(e, v)| format!("{e} {} ({})", v.affect(), v.layer))
                    .collect(),
                taboo: p.taboo.iter().map(String::as_str).collect(),
                history: p.history.len(),
            };
            print_json(out, &summary)
        }
    }
}

pub fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
