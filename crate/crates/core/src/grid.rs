//! Exact evaluation of a form on small named grids.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::form::{FormError, SparseForm};
use crate::rational::{self, q, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grid {
    /// `{−1,0,1}² × {1}`.
    X,
    /// `{−2,0,2}² × {1}`.
    Xprime,
    /// `{0,1}³ × {1}`.
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("unknown grid '{0}' (expected X, Xprime or Y)")]
    UnknownGrid(String),
    #[error("grid {grid} has arity {grid_arity}, form has {form_arity} variables")]
    ArityMismatch {
        grid: Grid,
        grid_arity: usize,
        form_arity: usize,
    },
    #[error(transparent)]
    Form(#[from] FormError),
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" => Ok(Grid::X),
            "Xprime" | "X'" => Ok(Grid::Xprime),
            "Y" => Ok(Grid::Y),
            other => Err(GridError::UnknownGrid(other.to_string())),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grid::X => "X",
            Grid::Xprime => "Xprime",
            Grid::Y => "Y",
        })
    }
}

impl Grid {
    pub fn arity(&self) -> usize {
        match self {
            Grid::X | Grid::Xprime => 3,
            Grid::Y => 4,
        }
    }

    /// Points in lexicographic order of their coordinates.
    pub fn points(&self) -> Vec<Vec<Rational>> {
        let (values, free): (Vec<i64>, usize) = match self {
            Grid::X => (vec![-1, 0, 1], 2),
            Grid::Xprime => (vec![-2, 0, 2], 2),
            Grid::Y => (vec![0, 1], 3),
        };
        let mut out: Vec<Vec<Rational>> = vec![Vec::new()];
        for _ in 0..free {
            out = out
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut p = p.clone();
                        p.push(q(*v));
                        p
                    })
                })
                .collect();
        }
        for p in &mut out {
            p.push(q(1));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridValue {
    #[serde(with = "rational::serde_str::vec")]
    pub point: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridReport {
    pub grid: Grid,
    pub values: Vec<GridValue>,
}

impl GridReport {
    pub fn zero_count(&self) -> usize {
        self.values.iter().filter(|v| v.value.is_zero()).count()
    }

    pub fn nonzero(&self) -> Vec<&GridValue> {
        self.values.iter().filter(|v| !v.value.is_zero()).collect()
    }
}

pub fn evaluate_grid(f: &SparseForm, grid: Grid) -> Result<GridReport, GridError> {
    if f.num_vars() != grid.arity() {
        return Err(GridError::ArityMismatch {
            grid,
            grid_arity: grid.arity(),
            form_arity: f.num_vars(),
        });
    }
    let values = grid
        .points()
        .into_iter()
        .map(|p| {
            let value = f.evaluate(&p)?;
            Ok(GridValue { point: p, value })
        })
        .collect::<Result<_, FormError>>()?;
    Ok(GridReport { grid, values })
}
