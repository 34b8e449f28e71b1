use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use limp_core::config::Config;
use limp_core::endgame::{solve_endgame_lp, EndgameInstance};
use limp_core::equilibrium::{table_exploitability, Cfr, CfrVariant, GameTree, StrategyTable};
use limp_core::game::GameSpec;
use limp_core::harness::{
    big_blind_unit, compute_payouts, load_strategy, match_report, play_duplicate_match, read_jsonl, write_jsonl, Agent,
    AgentSpec, MatchReport, StrategyAgent,
};
use limp_core::postprocess::{apply_schedule, matrix_purification_experiment, purify, ThresholdSchedule};
use limp_service::ServiceConfig;

#[derive(Parser)]
#[command(name = "limp", version, about = "Heads-up betting game solver, match runner and session server")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Vanilla,
    ChanceSampled,
}

impl From<Variant> for CfrVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Vanilla => CfrVariant::Vanilla,
            Variant::ChanceSampled => CfrVariant::ChanceSampled,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run CFR on an abstract game and save the average strategy.
    ///
    /// The config is copied beside the table with a `.toml` extension so
    /// `cfr:<table>` agents can find it.
    Solve {
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Iterations; scientific notation such as `1e6` is accepted.
        #[arg(long, value_parser = parse_count)]
        iters: u64,
        #[arg(long, value_enum, default_value = "vanilla")]
        variant: Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also report exploitability in the abstract game.
        #[arg(long)]
        exploitability: bool,
    },
    /// Solve a saved endgame instance.
    Endgame {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Play a duplicate match and write the hand history.
    Match {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_parser = parse_count)]
        pairs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Game preset, needed when neither agent carries a strategy.
        #[arg(long)]
        game: Option<String>,
        /// Play the trunk strategy in the final round too.
        #[arg(long)]
        no_endgame: bool,
        /// Write every solved endgame instance to this directory.
        #[arg(long)]
        instances: Option<PathBuf>,
    },
    /// Summarize a hand history.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// Preset whose big blind (or ante) is the unit for BB/100.
        #[arg(long, default_value = "river-nlhe")]
        game: String,
        #[arg(long)]
        json: bool,
    },
    /// Threshold or fully purify a strategy table.
    Purify {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Per-round thresholds, e.g. `0,0.15`. Full purification when absent.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<f64>>,
    },
    /// Compare purified and unpurified play in random 4x4 matrix games.
    MatrixPurify {
        #[arg(long, value_parser = parse_count, default_value = "2000")]
        games: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Split the prize pool among four players by profit.
    Payouts {
        #[arg(allow_negative_numbers = true, num_args = 4, required = true)]
        profits: Vec<i64>,
    },
    /// Run the HTTP and WebSocket session server.
    Serve {
        /// TOML file; `LIMP_*` environment variables override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s}"))?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(format!("not a count: {s}"));
    }
    Ok(x as u64)
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Solve { preset, config, iters, variant, seed, out, exploitability } => {
            solve(preset, config, iters, variant.into(), seed, &out, exploitability)
        }
        Command::Endgame { instance, out } => endgame(&instance, &out),
        Command::Match { a, b, pairs, seed, out, game, no_endgame, instances } => {
            run_match(&a, &b, pairs, seed, out.as_deref(), game.as_deref(), !no_endgame, instances)
        }
        Command::Report { input, game, json } => report(&input, &game, json),
        Command::Purify { table, out, schedule } => purify_table(&table, &out, schedule),
        Command::MatrixPurify { games, seed } => {
            let summary = matrix_purification_experiment(games as usize, seed)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::Payouts { profits } => {
            let r = compute_payouts(profits[0], profits[1], profits[2], profits[3])?;
            for (x, d) in r.profits.iter().zip(r.dollars()) {
                println!("{x:>12}  ${d:.2}");
            }
            Ok(())
        }
        Command::Serve { config } => {
            let config = ServiceConfig::load(config.as_deref())?;
            tokio::runtime::Runtime::new()?.block_on(limp_service::serve(config))?;
            Ok(())
        }
    }
}

fn solve(
    preset: Option<String>,
    config: Option<PathBuf>,
    iters: u64,
    variant: CfrVariant,
    seed: u64,
    out: &Path,
    exploitability: bool,
) -> Result<()> {
    let cfg = match (preset, config) {
        (Some(name), _) => Config::for_preset(&name),
        (None, Some(path)) => Config::load(&path).with_context(|| format!("reading {}", path.display()))?,
        (None, None) => bail!("give --preset or --config"),
    };
    let game = cfg.abstract_game()?;
    tracing::info!(infosets = limp_core::equilibrium::Game::num_infosets(&game), "abstract game built");
    let start = Instant::now();
    let mut cfr = Cfr::new(&game, variant, seed)?;
    let step = (iters / 10).max(1);
    cfr.run(iters, |c| {
        if c.iterations() % step == 0 {
            tracing::info!(iterations = c.iterations(), "cfr");
        }
    })?;
    // infosets CFR never reached keep a uniform strategy so agents can look them up
    let mut table = StrategyTable::uniform(&game);
    let average = cfr.average();
    for (k, v) in average.iter() {
        table.insert(k.clone(), v.clone());
    }
    table.meta = average.meta.clone();
    table.save(out).with_context(|| format!("writing {}", out.display()))?;
    let config_path = out.with_extension("toml");
    std::fs::write(&config_path, toml::to_string(&cfg)?)?;
    println!(
        "{} iterations in {:.1}s; {} infosets written to {} with config {}",
        iters,
        start.elapsed().as_secs_f64(),
        table.len(),
        out.display(),
        config_path.display()
    );
    if exploitability {
        let tree = GameTree::from_game(&game, cfg.max_tree_nodes)?;
        println!("exploitability {:.6}", table_exploitability(&tree, &table)?);
    }
    Ok(())
}

fn endgame(instance: &Path, out: &Path) -> Result<()> {
    let inst = EndgameInstance::load(instance).with_context(|| format!("reading {}", instance.display()))?;
    let solution = solve_endgame_lp(&inst)?;
    solution.save(out)?;
    println!(
        "value {:.4} (player 2 program {:.4}), player 1 pot share {:.4}, {} infosets; written to {}",
        solution.value,
        solution.value_p2,
        solution.p1_pot_share(&inst),
        solution.strategy.len(),
        out.display()
    );
    Ok(())
}

fn load_agent(name: &str, endgame: bool, instances: Option<&Path>) -> Result<(Box<dyn Agent>, Option<GameSpec>)> {
    let spec: AgentSpec = name.parse()?;
    match spec {
        AgentSpec::Strategy { table, config } => {
            let mut cfg = load_strategy(&table, &config, endgame)?;
            cfg.instance_log = instances.map(Path::to_path_buf);
            let game = (*cfg.abstraction.spec).clone();
            Ok((Box::new(StrategyAgent::new(Arc::new(cfg))), Some(game)))
        }
        other => Ok((other.load(endgame)?, None)),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_match(
    a: &str,
    b: &str,
    pairs: u64,
    seed: u64,
    out: Option<&Path>,
    game: Option<&str>,
    endgame: bool,
    instances: Option<PathBuf>,
) -> Result<()> {
    if let Some(dir) = &instances {
        std::fs::create_dir_all(dir)?;
    }
    let (agent_a, game_a) = load_agent(a, endgame, instances.as_deref())?;
    let (agent_b, game_b) = load_agent(b, endgame, instances.as_deref())?;
    let preset = game.map(GameSpec::preset).transpose()?;
    let mut games = [game_a, game_b, preset].into_iter().flatten();
    let Some(spec) = games.next() else { bail!("neither agent carries a game; pass --game") };
    if let Some(other) = games.find(|g| g.hash() != spec.hash()) {
        bail!("agents and game disagree: {} vs {}", spec.name, other.name);
    }
    let start = Instant::now();
    let result = play_duplicate_match(agent_a.as_ref(), agent_b.as_ref(), pairs, &spec, seed)?;
    let records: Vec<_> = result.pairs.iter().flat_map(|p| p.records.iter().cloned()).collect();
    if let Some(path) = out {
        let w = BufWriter::new(File::create(path).with_context(|| format!("writing {}", path.display()))?);
        write_jsonl(w, &records)?;
    }
    tracing::info!(seconds = start.elapsed().as_secs_f64(), "match finished");
    print_report(&match_report(&records, big_blind_unit(&spec))?);
    println!("variance per hand {:.1}, per pair {:.1}", result.var_hand, result.var_pair);
    Ok(())
}

fn report(input: &Path, game: &str, json: bool) -> Result<()> {
    let f = File::open(input).with_context(|| format!("reading {}", input.display()))?;
    let records = read_jsonl(BufReader::new(f))?;
    let r = match_report(&records, big_blind_unit(&GameSpec::preset(game)?))?;
    if json {
        println!("{}", serde_json::to_string_pretty(&r)?);
    } else {
        print_report(&r);
    }
    Ok(())
}

fn print_report(r: &MatchReport) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{} hands in {} pairs, {} forfeits", r.hands, r.pairs, r.forfeits);
    if r.broken_pairs > 0 {
        let _ = writeln!(out, "warning: {} pairs do not mirror their cards", r.broken_pairs);
    }
    for a in &r.agents {
        let _ = writeln!(
            out,
            "{:<24} {:>8} hands {:>12} chips {:>9.2} bb/100  95% [{:.2}, {:.2}]",
            a.label, a.hands, a.total, a.bb_per_100, a.ci95.0, a.ci95.1
        );
    }
    let t = &r.off_tree;
    let _ = writeln!(
        out,
        "off-tree: {} of {} hands diverged, {} translations ({} outside the grid)",
        t.hands_with_divergence, t.hands, t.translation_events, t.extreme_events
    );
    for w in &t.worst {
        let _ = writeln!(out, "  hand {} player {}: divergence {}", w.hand_id, w.player, w.max_divergence);
    }
}

fn purify_table(table: &Path, out: &Path, schedule: Option<Vec<f64>>) -> Result<()> {
    let t = StrategyTable::load(table).with_context(|| format!("reading {}", table.display()))?;
    let result = match schedule {
        Some(s) => apply_schedule(&t, &ThresholdSchedule::new(s)?)?,
        None => {
            let mut p = t.clone();
            for (_, v) in p.iter_mut() {
                *v = purify(v);
            }
            p.meta.note = Some("purified".into());
            p
        }
    };
    result.save(out)?;
    let config = table.with_extension("toml");
    if config.exists() {
        std::fs::copy(&config, out.with_extension("toml"))?;
    }
    println!("{} infosets written to {}", result.len(), out.display());
    Ok(())
}
