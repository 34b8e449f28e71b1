//! Exact equilibria of explicit trees through the sequence-form linear
//! programs, one per player.

use std::collections::HashMap;

use super::game::{toys, GameTree, TreeNode};
use super::table::{StrategyTable, TableMeta};
use crate::error::{Error, Result};
use crate::game::Player;
use crate::lp::{Cmp, LinearProgram, Sense, Var};

/// Most sequences per player the solver accepts.
pub const MAX_SEQUENCES: usize = 10_000;

/// Primal and dual values must agree to this tolerance.
pub const VALUE_GAP_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SequenceSolution {
    /// Game value to player 1 from player 1's program.
    pub value: f64,
    /// Game value to player 1 from player 2's program.
    pub value_p2: f64,
    /// Both players' behaviour strategies.
    pub strategy: StrategyTable,
}

/// Sequences of one player: 0 is the empty sequence, then one per
/// (infoset, action) of that player.
struct Sequences {
    offset: HashMap<u32, usize>,
    actions: HashMap<u32, usize>,
    parent: HashMap<u32, usize>,
    infosets: Vec<u32>,
    count: usize,
}

impl Sequences {
    fn of(tree: &GameTree, player: Player) -> Sequences {
        let mut offset = HashMap::new();
        let mut actions = HashMap::new();
        let mut infosets = Vec::new();
        let mut count = 1;
        for (i, info) in tree.infosets().iter().enumerate() {
            if info.player == player {
                offset.insert(i as u32, count);
                actions.insert(i as u32, info.labels.len());
                infosets.push(i as u32);
                count += info.labels.len();
            }
        }
        Sequences { offset, actions, parent: HashMap::new(), infosets, count }
    }

    fn range(&self, infoset: u32) -> std::ops::Range<usize> {
        let o = self.offset[&infoset];
        o..o + self.actions[&infoset]
    }

    fn seq(&self, infoset: u32, action: usize) -> usize {
        self.offset[&infoset] + action
    }
}

struct Form {
    seqs: [Sequences; 2],
    /// Expected payoff to player 1 per (P1 sequence, P2 sequence) pair.
    payoff: HashMap<(usize, usize), f64>,
}

fn build(tree: &GameTree) -> Result<Form> {
    let mut seqs = [Sequences::of(tree, Player::P1), Sequences::of(tree, Player::P2)];
    for s in &seqs {
        if s.count > MAX_SEQUENCES {
            return Err(Error::TooLarge(format!("{} sequences for one player", s.count)));
        }
    }
    let mut payoff = HashMap::new();
    let mut stack = vec![(tree.root_id(), 1.0, [0usize, 0usize])];
    while let Some((id, p, last)) = stack.pop() {
        match tree.node(id) {
            TreeNode::Terminal { payoff: v } => {
                *payoff.entry((last[0], last[1])).or_insert(0.0) += p * v;
            }
            TreeNode::Chance { children } => {
                stack.extend(children.iter().filter(|c| c.1 > 0.0).map(|&(c, q)| (c, p * q, last)));
            }
            TreeNode::Decision { player, infoset, children } => {
                let k = player.index();
                match seqs[k].parent.get(infoset) {
                    Some(&prev) if prev != last[k] => {
                        return Err(Error::InvalidSpec(format!(
                            "infoset {} violates perfect recall",
                            tree.infosets()[*infoset as usize].key
                        )))
                    }
                    Some(_) => {}
                    None => {
                        seqs[k].parent.insert(*infoset, last[k]);
                    }
                }
                for (a, &c) in children.iter().enumerate() {
                    let mut next = last;
                    next[k] = seqs[k].seq(*infoset, a);
                    stack.push((c, p, next));
                }
            }
        }
    }
    Ok(Form { seqs, payoff })
}

/// Solves one player's program. For player 1: maximise q0 subject to
/// F'q <= A'x and Ex = e; for player 2 the mirror image with payoffs
/// negated. Returns the optimum and the realization plan.
fn solve_for(form: &Form, me: Player) -> Result<(f64, Vec<f64>)> {
    let (mi, oi) = (me.index(), me.opponent().index());
    let mine = &form.seqs[mi];
    let theirs = &form.seqs[oi];
    let sign = me.sign();

    let mut lp = LinearProgram::new(Sense::Maximize);
    let x: Vec<Var> = (0..mine.count).map(|_| lp.var(0.0, 0.0, f64::INFINITY)).collect();
    // one dual per opponent constraint row: row 0 for the empty sequence,
    // then one per reached opponent infoset
    let rows: Vec<u32> = theirs.infosets.iter().copied().filter(|i| theirs.parent.contains_key(i)).collect();
    let q0 = lp.var(1.0, f64::NEG_INFINITY, f64::INFINITY);
    let q: Vec<Var> = rows.iter().map(|_| lp.var(0.0, f64::NEG_INFINITY, f64::INFINITY)).collect();

    // columns of F' per opponent sequence
    let mut lhs: Vec<Vec<(Var, f64)>> = vec![Vec::new(); theirs.count];
    lhs[0].push((q0, 1.0));
    for (r, &j) in rows.iter().enumerate() {
        lhs[theirs.parent[&j]].push((q[r], -1.0));
        for s in theirs.range(j) {
            lhs[s].push((q[r], 1.0));
        }
    }
    for (&(s1, s2), &v) in &form.payoff {
        let (own, other) = if mi == 0 { (s1, s2) } else { (s2, s1) };
        lhs[other].push((x[own], -sign * v));
    }
    for terms in &lhs {
        if !terms.is_empty() {
            lp.constraint(terms, Cmp::Le, 0.0);
        }
    }

    lp.constraint(&[(x[0], 1.0)], Cmp::Eq, 1.0);
    for &i in &mine.infosets {
        let Some(&parent) = mine.parent.get(&i) else { continue };
        let mut terms = vec![(x[parent], -1.0)];
        for s in mine.range(i) {
            terms.push((x[s], 1.0));
        }
        lp.constraint(&terms, Cmp::Eq, 0.0);
    }
    let sol = lp.solve()?;
    Ok((sign * sol.objective, x.iter().map(|&v| sol.value(v)).collect()))
}

/// Computes an exact equilibrium of `tree` and checks that both programs
/// agree on the value.
pub fn solve_sequence_form(tree: &GameTree) -> Result<SequenceSolution> {
    let form = build(tree)?;
    let (v1, x) = solve_for(&form, Player::P1)?;
    let (v2, y) = solve_for(&form, Player::P2)?;
    if (v1 - v2).abs() > VALUE_GAP_TOLERANCE {
        return Err(Error::Lp(format!("primal and dual values differ: {v1} vs {v2}")));
    }
    let mut strategy = StrategyTable::new(TableMeta {
        game_hash: super::game::Game::game_hash(tree),
        abstraction_hash: super::game::Game::abstraction_hash(tree),
        variant: Some("sequence-form".into()),
        ..Default::default()
    });
    for (k, plan) in [(0usize, &x), (1, &y)] {
        let seqs = &form.seqs[k];
        for &i in &seqs.infosets {
            let info = &tree.infosets()[i as usize];
            let n = info.labels.len();
            let o = seqs.offset[&i];
            let parent = seqs.parent.get(&i).map_or(0.0, |&p| plan[p]);
            let probs = if parent > 1e-12 {
                let raw: Vec<f64> = (0..n).map(|a| plan[o + a].max(0.0)).collect();
                let total: f64 = raw.iter().sum();
                if total > 0.0 {
                    raw.iter().map(|r| r / total).collect()
                } else {
                    vec![1.0 / n as f64; n]
                }
            } else {
                vec![1.0 / n as f64; n]
            };
            strategy.insert(info.key.clone(), probs);
        }
    }
    Ok(SequenceSolution { value: v1, value_p2: v2, strategy })
}

/// Equilibrium of a zero-sum matrix game with row-player payoffs `a`:
/// (value, row mix, column mix).
pub fn solve_matrix_game(a: &[Vec<f64>]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    if a.is_empty() || a[0].is_empty() || a.iter().any(|r| r.len() != a[0].len()) {
        return Err(Error::InvalidConfig("matrix must be non-empty and rectangular".into()));
    }
    let tree = toys::matrix_game(a);
    let sol = solve_sequence_form(&tree)?;
    let row = sol.strategy.require(&tree.infosets()[row_infoset(&tree)].key)?.to_vec();
    let col = sol.strategy.require(&tree.infosets()[1 - row_infoset(&tree)].key)?.to_vec();
    Ok((sol.value, row, col))
}

fn row_infoset(tree: &GameTree) -> usize {
    tree.infosets().iter().position(|i| i.player == Player::P1).expect("row player")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::best_response::table_exploitability;

    #[test]
    fn rps_value_zero_uniform() {
        let t = toys::rock_paper_scissors();
        let s = solve_sequence_form(&t).unwrap();
        assert!(s.value.abs() < 1e-9);
        for (_, v) in s.strategy.iter() {
            for p in v {
                assert!((p - 1.0 / 3.0).abs() < 1e-9);
            }
        }
        assert!(table_exploitability(&t, &s.strategy).unwrap().abs() < 1e-9);
    }

    #[test]
    fn matching_pennies_variant() {
        // value (ad - bc) / (a + d - b - c) for a 2x2 game without saddle point
        let (v, row, col) = solve_matrix_game(&[vec![3.0, -1.0], vec![-2.0, 1.0]]).unwrap();
        assert!((v - 1.0 / 7.0).abs() < 1e-9);
        assert!((row[0] - 3.0 / 7.0).abs() < 1e-9);
        assert!((col[0] - 2.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn saddle_point() {
        let (v, row, col) = solve_matrix_game(&[vec![2.0, 3.0], vec![1.0, 0.0]]).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        assert!((row[0] - 1.0).abs() < 1e-9);
        assert!((col[0] - 1.0).abs() < 1e-9);
    }
}
