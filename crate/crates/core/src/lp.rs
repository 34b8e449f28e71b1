//! Thin wrapper over the `microlp` simplex solver.

use std::collections::BTreeMap;

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(usize);

pub struct LinearProgram {
    problem: Problem,
    vars: Vec<Variable>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub objective: f64,
    values: Vec<f64>,
}

impl LpSolution {
    pub fn value(&self, v: Var) -> f64 {
        self.values[v.0]
    }
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        let dir = match sense {
            Sense::Minimize => OptimizationDirection::Minimize,
            Sense::Maximize => OptimizationDirection::Maximize,
        };
        LinearProgram { problem: Problem::new(dir), vars: Vec::new() }
    }

    /// Adds a variable with objective coefficient `obj`; bounds may be infinite.
    pub fn var(&mut self, obj: f64, lo: f64, hi: f64) -> Var {
        self.vars.push(self.problem.add_var(obj, (lo, hi)));
        Var(self.vars.len() - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Adds `sum(coef * var) cmp rhs`; repeated variables are merged.
    pub fn constraint(&mut self, terms: &[(Var, f64)], cmp: Cmp, rhs: f64) {
        let mut merged: BTreeMap<Var, f64> = BTreeMap::new();
        for &(v, c) in terms {
            *merged.entry(v).or_insert(0.0) += c;
        }
        let expr: Vec<(Variable, f64)> =
            merged.into_iter().filter(|&(_, c)| c != 0.0).map(|(v, c)| (self.vars[v.0], c)).collect();
        let op = match cmp {
            Cmp::Le => ComparisonOp::Le,
            Cmp::Ge => ComparisonOp::Ge,
            Cmp::Eq => ComparisonOp::Eq,
        };
        self.problem.add_constraint(expr, op, rhs);
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let outcome = self.problem.solve().map_err(|e| Error::Lp(e.to_string()))?;
        let sol = outcome.into_solution().map_err(|_| Error::Lp("solve interrupted".into()))?;
        let values = self.vars.iter().map(|&v| sol.var_value_raw(v)).collect();
        Ok(LpSolution { objective: sol.objective(), values })
    }
}
