use std::collections::BTreeMap;
use std::fmt;

use super::{CrFields, FormalVectorField};
use crate::error::Result;

/// A generator of the CR Lie algebra: `L(k)` is `𝓛_{k+1}`, `U(k)` is `𝓛̲_{k+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    L(usize),
    U(usize),
}

impl Generator {
    pub fn index(self) -> usize {
        match self {
            Generator::L(k) | Generator::U(k) => k,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::L(k) => write!(f, "L{}", k + 1),
            Generator::U(k) => write!(f, "U{}", k + 1),
        }
    }
}

/// A bracket expression over the generators, e.g. `[U1,[U1,L1]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BracketWord {
    Gen(Generator),
    Bracket(Box<BracketWord>, Box<BracketWord>),
}

impl BracketWord {
    pub fn generator(g: Generator) -> Self {
        BracketWord::Gen(g)
    }

    pub fn bracket(a: BracketWord, b: BracketWord) -> Self {
        BracketWord::Bracket(Box::new(a), Box::new(b))
    }

    /// `[g_1,[g_2,[...,g_n]]]`. Panics on an empty list.
    pub fn left_normed(gens: &[Generator]) -> Self {
        let (last, rest) = gens.split_last().expect("nonempty word");
        rest.iter().rev().fold(BracketWord::Gen(*last), |acc, g| {
            BracketWord::bracket(BracketWord::Gen(*g), acc)
        })
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        match self {
            BracketWord::Gen(_) => 1,
            BracketWord::Bracket(a, b) => a.len() + b.len(),
        }
    }

    pub fn is_generator(&self) -> bool {
        matches!(self, BracketWord::Gen(_))
    }

    /// Computes the field this word denotes.
    pub fn materialize(&self, fields: &CrFields) -> Result<FormalVectorField> {
        let mut memo = BTreeMap::new();
        self.materialize_with(fields, &mut memo)
    }

    pub(crate) fn materialize_with(
        &self,
        fields: &CrFields,
        memo: &mut BTreeMap<BracketWord, FormalVectorField>,
    ) -> Result<FormalVectorField> {
        if let Some(f) = memo.get(self) {
            return Ok(f.clone());
        }
        let f = match self {
            BracketWord::Gen(g) => fields.get(*g)?.clone(),
            BracketWord::Bracket(a, b) => {
                let fa = a.materialize_with(fields, memo)?;
                let fb = b.materialize_with(fields, memo)?;
                fa.bracket(&fb)?
            }
        };
        memo.insert(self.clone(), f.clone());
        Ok(f)
    }
}

impl fmt::Display for BracketWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketWord::Gen(g) => write!(f, "{g}"),
            BracketWord::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}
