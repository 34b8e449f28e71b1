use std::path::PathBuf;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abstraction::{pot_after_call, round_half_down, AbstractGame, Abstraction, ActionGrid, PublicKind, PublicTree};
use crate::cards::Card;
use crate::endgame::{build_endgame, SolvedEndgame};
use crate::equilibrium::StrategyTable;
use crate::error::{Error, Result};
use crate::game::{Action, ActionRecord, Betting, Phase, Player};
use crate::postprocess::{apply_schedule, ThresholdSchedule};
use crate::translation::{bet_fraction, translate_fraction, TranslationEvent};

/// What an agent sees when asked to act. `betting` is the true state.
#[derive(Clone, Copy, Debug)]
pub struct Observation<'a> {
    pub seat: Player,
    pub private: &'a [Card],
    pub board: &'a [Card],
    pub betting: &'a Betting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl Decision {
    pub fn plain(action: Action) -> Self {
        Decision { action, diagnostics: None }
    }
}

/// Where a strategy agent's action distribution came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicySource {
    Trunk,
    /// The infoset was absent from the table; uniform over abstract actions.
    TrunkUniform,
    Endgame,
    /// The hand was outside the endgame range; uniform.
    EndgameUniform,
    /// The perceived state was not a decision for this agent.
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgameRef {
    pub instance_hash: u64,
    pub pot: u32,
    pub contributions: [u32; 2],
    pub bucket_counts: [u32; 2],
    pub zero_reach_fallback: bool,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub true_pot: u32,
    /// Pot implied by the abstract history the agent believes it is in.
    pub perceived_pot: Option<u32>,
    pub divergence: u32,
    pub perceived_history: Option<String>,
    /// Translations of opponent bets since this agent's previous decision.
    #[serde(default)]
    pub translations: Vec<TranslationEvent>,
    pub source: PolicySource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endgame: Option<EndgameRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endgame_error: Option<String>,
}

/// A player in the harness. One instance plays one hand at a time;
/// `begin_hand` resets any per-hand state.
pub trait Agent: Send {
    fn label(&self) -> String;

    fn begin_hand(&mut self, seat: Player, rng: ChaCha8Rng);

    fn act(&mut self, obs: &Observation<'_>) -> Result<Decision>;

    /// A fresh agent sharing this one's configuration.
    fn fork(&self) -> Box<dyn Agent>;
}

fn check_or_call(betting: &Betting) -> Action {
    if betting.legal_actions().check {
        Action::Check
    } else {
        Action::Call
    }
}

/// Picks uniformly among fold, check, call, the minimum raise and all-in,
/// whichever are legal.
#[derive(Clone, Debug)]
pub struct UniformAgent {
    rng: ChaCha8Rng,
}

impl UniformAgent {
    pub fn new() -> Self {
        UniformAgent { rng: rand::SeedableRng::seed_from_u64(0) }
    }
}

impl Default for UniformAgent {
    fn default() -> Self {
        Self::new()
    }
}

impl Agent for UniformAgent {
    fn label(&self) -> String {
        "uniform".into()
    }

    fn begin_hand(&mut self, _seat: Player, rng: ChaCha8Rng) {
        self.rng = rng;
    }

    fn act(&mut self, obs: &Observation<'_>) -> Result<Decision> {
        let options = obs.betting.legal_actions().to_vec();
        if options.is_empty() {
            return Err(Error::Terminal);
        }
        Ok(Decision::plain(options[self.rng.gen_range(0..options.len())]))
    }

    fn fork(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// Moves all-in whenever it can, otherwise calls or checks.
#[derive(Clone, Debug, Default)]
pub struct AllInAgent;

impl Agent for AllInAgent {
    fn label(&self) -> String {
        "all-in".into()
    }

    fn begin_hand(&mut self, _seat: Player, _rng: ChaCha8Rng) {}

    fn act(&mut self, obs: &Observation<'_>) -> Result<Decision> {
        let legal = obs.betting.legal_actions();
        Ok(Decision::plain(match legal.raise {
            Some((_, hi)) => Action::RaiseTo(hi),
            None => check_or_call(obs.betting),
        }))
    }

    fn fork(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// Plays a fixed list of actions, one per decision, then checks or calls.
/// Actions are sent as given, legal or not.
#[derive(Clone, Debug)]
pub struct ScriptedAgent {
    script: Vec<Action>,
    next: usize,
}

impl ScriptedAgent {
    pub fn new(script: Vec<Action>) -> Self {
        ScriptedAgent { script, next: 0 }
    }
}

impl Agent for ScriptedAgent {
    fn label(&self) -> String {
        let tokens: Vec<String> = self.script.iter().map(|a| a.token()).collect();
        format!("scripted:{}", tokens.join(","))
    }

    fn begin_hand(&mut self, _seat: Player, _rng: ChaCha8Rng) {
        self.next = 0;
    }

    fn act(&mut self, obs: &Observation<'_>) -> Result<Decision> {
        let action = self.script.get(self.next).copied().unwrap_or_else(|| check_or_call(obs.betting));
        self.next += 1;
        Ok(Decision::plain(action))
    }

    fn fork(&self) -> Box<dyn Agent> {
        Box::new(self.clone())
    }
}

/// Settings for re-solving the final round.
#[derive(Clone, Debug)]
pub struct EndgameSettings {
    pub grid: ActionGrid,
    pub buckets: [u32; 2],
}

/// Everything a strategy agent reads; shared between forks.
pub struct StrategyConfig {
    pub name: String,
    pub abstraction: Abstraction,
    pub tree: PublicTree,
    /// Table the agent plays from, after any thresholding.
    pub trunk: StrategyTable,
    /// The unprocessed table, used for Bayes ranges in endgames.
    pub trunk_raw: StrategyTable,
    pub endgame: Option<EndgameSettings>,
    /// Directory where each solved endgame instance is written as
    /// `<instance hash>.json`.
    pub instance_log: Option<PathBuf>,
}

impl StrategyConfig {
    /// Checks the table against the game, then applies `schedule` if given.
    pub fn new(
        name: impl Into<String>,
        game: &AbstractGame,
        trunk: StrategyTable,
        schedule: Option<&ThresholdSchedule>,
        endgame: Option<EndgameSettings>,
    ) -> Result<Self> {
        let abstraction = game.abstraction().clone();
        trunk.check_hashes(abstraction.spec.hash(), abstraction.hash())?;
        let played = match schedule {
            Some(s) => apply_schedule(&trunk, s)?,
            None => trunk.clone(),
        };
        if let Some(e) = &endgame {
            e.grid.check_spec(&abstraction.spec)?;
        }
        Ok(StrategyConfig {
            name: name.into(),
            abstraction,
            tree: game.tree().clone(),
            trunk: played,
            trunk_raw: trunk,
            endgame,
            instance_log: None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Perceived {
    Trunk(u32),
    Endgame(u32),
    /// Tracking failed; the agent falls back to checking or calling.
    Lost,
}

/// Plays a precomputed trunk strategy, translating opponent bets onto its
/// grid and optionally re-solving the final round.
pub struct StrategyAgent {
    config: Arc<StrategyConfig>,
    seat: Player,
    rng: ChaCha8Rng,
    real: Option<Betting>,
    seen: usize,
    perceived: Perceived,
    own_choice: Option<usize>,
    events: Vec<TranslationEvent>,
    endgame: Option<Arc<SolvedEndgame>>,
    endgame_error: Option<String>,
}

impl StrategyAgent {
    pub fn new(config: Arc<StrategyConfig>) -> Self {
        StrategyAgent {
            config,
            seat: Player::P1,
            rng: rand::SeedableRng::seed_from_u64(0),
            real: None,
            seen: 0,
            perceived: Perceived::Lost,
            own_choice: None,
            events: Vec::new(),
            endgame: None,
            endgame_error: None,
        }
    }

    fn tree(&self) -> &PublicTree {
        match self.perceived {
            Perceived::Endgame(_) => &self.endgame.as_ref().expect("endgame solved").tree,
            _ => &self.config.tree,
        }
    }

    fn grid(&self) -> &ActionGrid {
        match self.perceived {
            Perceived::Endgame(_) => &self.endgame.as_ref().expect("endgame solved").instance.grid,
            _ => &self.config.abstraction.grid,
        }
    }

    fn node_id(&self) -> Option<u32> {
        match self.perceived {
            Perceived::Trunk(id) | Perceived::Endgame(id) => Some(id),
            Perceived::Lost => None,
        }
    }

    fn set_node(&mut self, id: u32) {
        self.perceived = match self.perceived {
            Perceived::Trunk(_) => Perceived::Trunk(id),
            Perceived::Endgame(_) => Perceived::Endgame(id),
            Perceived::Lost => Perceived::Lost,
        };
    }

    /// Brings the perceived node to the start of `round`, following
    /// check/call edges if the abstract round was still open.
    fn enter_round(&mut self, round: usize, board: &[Card]) {
        let Some(mut id) = self.node_id() else { return };
        loop {
            let tree = self.tree();
            let node = tree.node(id);
            if node.round() >= round {
                break;
            }
            match &node.kind {
                PublicKind::Deal { child, .. } => id = *child,
                PublicKind::Decision { children, .. } => {
                    match children.iter().find(|(a, _)| matches!(a, Action::Check | Action::Call)) {
                        Some(&(_, c)) => id = c,
                        None => {
                            self.perceived = Perceived::Lost;
                            return;
                        }
                    }
                }
                PublicKind::Terminal => {
                    self.perceived = Perceived::Lost;
                    return;
                }
            }
        }
        id = self.tree().skip_deals(id);
        self.set_node(id);
        let spec = &self.config.abstraction.spec;
        if round + 1 == spec.num_rounds() && matches!(self.perceived, Perceived::Trunk(_)) {
            self.start_endgame(id, round, &board[..spec.board_len(round)]);
        }
    }

    fn start_endgame(&mut self, node: u32, round: usize, board: &[Card]) {
        let Some(settings) = &self.config.endgame else { return };
        let real = self.real.as_ref().expect("hand started");
        let contributions = [
            real.total_commit(Player::P1) - real.round_commit(Player::P1),
            real.total_commit(Player::P2) - real.round_commit(Player::P2),
        ];
        debug_assert_eq!(real.round(), round);
        let c = &self.config;
        let solved = build_endgame(
            &c.trunk_raw,
            &c.abstraction,
            &c.tree,
            node,
            board,
            contributions,
            settings.grid.clone(),
            settings.buckets,
        )
        .and_then(SolvedEndgame::solve);
        match solved {
            Ok(s) => {
                if let Some(dir) = &c.instance_log {
                    let path = dir.join(format!("{:016x}.json", s.instance.hash()));
                    if let Err(e) = s.instance.save(&path) {
                        self.endgame_error = Some(format!("writing {}: {e}", path.display()));
                    }
                }
                let root = s.tree.root();
                self.endgame = Some(Arc::new(s));
                self.perceived = Perceived::Endgame(root);
            }
            Err(e) => self.endgame_error = Some(e.to_string()),
        }
    }

    /// Moves the perceived node along the real action `rec`, taken from the
    /// true state `real`.
    fn follow(&mut self, rec: &ActionRecord, real: &Betting) -> Result<()> {
        let Some(id) = self.node_id() else { return Ok(()) };
        let node = self.tree().node(id).clone();
        if node.round() > rec.round || matches!(node.kind, PublicKind::Deal { .. }) {
            // the abstract round already closed; wait for the real one
            return Ok(());
        }
        let PublicKind::Decision { player, children } = &node.kind else {
            self.perceived = Perceived::Lost;
            return Ok(());
        };
        let raises = self.grid().raises(&node.betting);
        if *player != rec.player {
            self.perceived = Perceived::Lost;
            return Ok(());
        }
        let passive = children.iter().position(|(a, _)| matches!(a, Action::Check | Action::Call));
        let index = if rec.player == self.seat && self.own_choice.is_some() {
            self.own_choice.take()
        } else {
            match rec.action {
                Action::Fold => children.iter().position(|(a, _)| *a == Action::Fold),
                Action::Check | Action::Call => passive,
                Action::RaiseTo(to) => {
                    let first_raise = children.iter().position(|(a, _)| matches!(a, Action::RaiseTo(_)));
                    let all_in = real.legal_actions().raise.is_some_and(|(_, hi)| hi == to);
                    match (first_raise, passive) {
                        (None, p) => p,
                        (Some(r), _) if all_in && raises.last().is_some_and(|s| s.all_in) => {
                            Some(r + raises.len() - 1)
                        }
                        (Some(r), p) => {
                            let mut candidates = Vec::with_capacity(raises.len() + 1);
                            if p.is_some() {
                                candidates.push(0.0);
                            }
                            candidates.extend(raises.iter().map(|s| s.fraction));
                            let x = bet_fraction(real, rec.player, to);
                            let (i, event) = translate_fraction(x, &candidates, &mut self.rng)?;
                            self.events.extend(event);
                            match (p, i) {
                                (Some(p), 0) => Some(p),
                                (Some(_), i) => Some(r + i - 1),
                                (None, i) => Some(r + i),
                            }
                        }
                    }
                }
            }
        };
        match index {
            Some(i) => {
                let child = children[i].1;
                self.set_node(child);
            }
            None => self.perceived = Perceived::Lost,
        }
        Ok(())
    }

    fn catch_up(&mut self, obs: &Observation<'_>) -> Result<()> {
        let spec = self.config.abstraction.spec.clone();
        let records = obs.betting.history();
        while self.seen < records.len() {
            let rec = records[self.seen];
            self.advance_deals(obs.board)?;
            let real = self.real.clone().expect("hand started");
            self.follow(&rec, &real)?;
            self.real.as_mut().expect("hand started").apply(rec.action)?;
            self.seen += 1;
        }
        self.advance_deals(obs.board)?;
        if self.real.as_ref().map(|b| b.round()) != Some(obs.betting.round()) {
            return Err(Error::InvalidConfig(format!("{} lost track of the betting", spec.name)));
        }
        Ok(())
    }

    fn advance_deals(&mut self, board: &[Card]) -> Result<()> {
        loop {
            let real = self.real.as_mut().expect("hand started");
            let Phase::Deal(_) = real.phase() else { return Ok(()) };
            real.deal_done()?;
            let round = real.round();
            self.enter_round(round, board);
        }
    }

    /// Real action carrying out abstract action `abs` chosen at perceived
    /// betting `perceived`, sized against the true pot.
    fn realize(&self, abs: Action, perceived: &Betting, real: &Betting) -> Action {
        let legal = real.legal_actions();
        match abs {
            Action::Fold if legal.fold => Action::Fold,
            Action::Fold | Action::Check | Action::Call => check_or_call(real),
            Action::RaiseTo(to) => {
                let Some((lo, hi)) = legal.raise else { return check_or_call(real) };
                let Some(sized) = self.grid().raises(perceived).into_iter().find(|s| s.to == to) else {
                    return check_or_call(real);
                };
                if sized.all_in {
                    return Action::RaiseTo(hi);
                }
                let level = real.round_commit(self.seat.opponent());
                let chips = round_half_down(sized.fraction * pot_after_call(real, self.seat) as f64);
                let target = (level as u64 + chips).min(u32::MAX as u64) as u32;
                Action::RaiseTo(target.clamp(lo, hi))
            }
        }
    }

    fn sample(&mut self, probs: &[f64]) -> usize {
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
    }
}

impl Agent for StrategyAgent {
    fn label(&self) -> String {
        self.config.name.clone()
    }

    fn begin_hand(&mut self, seat: Player, rng: ChaCha8Rng) {
        self.seat = seat;
        self.rng = rng;
        self.real = Some(Betting::new(self.config.abstraction.spec.clone()));
        self.seen = 0;
        self.perceived = Perceived::Trunk(self.config.tree.skip_deals(self.config.tree.root()));
        self.own_choice = None;
        self.events.clear();
        self.endgame = None;
        self.endgame_error = None;
    }

    fn act(&mut self, obs: &Observation<'_>) -> Result<Decision> {
        if self.real.is_none() {
            return Err(Error::InvalidConfig("act called before begin_hand".into()));
        }
        self.catch_up(obs)?;
        let real = obs.betting;
        let perceived_node = self.node_id().map(|id| self.tree().node(id).clone());
        let mut source = PolicySource::Fallback;
        let mut action = check_or_call(real);
        if let Some(node) = &perceived_node {
            if let PublicKind::Decision { player, children } = &node.kind {
                if *player == self.seat && node.round() == real.round() {
                    let n = children.len();
                    let (probs, src) = match self.perceived {
                        Perceived::Endgame(_) => {
                            let solved = self.endgame.as_ref().expect("endgame solved");
                            let p = solved.policy(self.seat, obs.private, &node.history)?;
                            let src = if p.fallback { PolicySource::EndgameUniform } else { PolicySource::Endgame };
                            (p.probs, src)
                        }
                        _ => {
                            let c = &self.config;
                            let id = self.node_id().expect("tracked");
                            let board = &obs.board[..c.abstraction.spec.board_len(node.round())];
                            let key = c.abstraction.key(&c.tree, id, obs.private, board);
                            match c.trunk.get(&key) {
                                Some(p) if p.len() == n => (p.to_vec(), PolicySource::Trunk),
                                _ => (vec![1.0 / n as f64; n], PolicySource::TrunkUniform),
                            }
                        }
                    };
                    let i = self.sample(&probs);
                    self.own_choice = Some(i);
                    action = self.realize(children[i].0, &node.betting, real);
                    source = src;
                }
            }
        }
        if source == PolicySource::Fallback {
            self.own_choice = None;
        }
        let true_pot = real.total_pot();
        let perceived_pot = perceived_node.as_ref().map(|n| n.betting.total_pot());
        let endgame = self.endgame.as_ref().map(|s| EndgameRef {
            instance_hash: s.instance.hash(),
            pot: s.instance.pot,
            contributions: s.instance.contributions,
            bucket_counts: s.instance.bucket_counts,
            zero_reach_fallback: s.instance.zero_reach_fallback,
            value: s.solution.value,
        });
        Ok(Decision {
            action,
            diagnostics: Some(Diagnostics {
                true_pot,
                perceived_pot,
                divergence: perceived_pot.map_or(0, |p| p.abs_diff(true_pot)),
                perceived_history: perceived_node.map(|n| n.history),
                translations: std::mem::take(&mut self.events),
                source,
                endgame,
                endgame_error: self.endgame_error.clone(),
            }),
        })
    }

    fn fork(&self) -> Box<dyn Agent> {
        Box::new(StrategyAgent::new(self.config.clone()))
    }
}
