use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph_core::VertexKey;
use crate::groups::HeightFunction;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind<S> {
    Zero,
    Constant(S),
    /// `q(x) = table[h(x) mod len]`.
    HeightTable { height: HeightFunction, table: Vec<S> },
    /// Explicit values; zero elsewhere.
    Tabulated(BTreeMap<VertexKey, S>),
}

/// A bounded real potential with a certified bound on `|q|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec<S> {
    pub kind: PotentialKind<S>,
    pub bound: S,
}

impl<S: Scalar> PotentialSpec<S> {
    pub fn zero() -> Self {
        PotentialSpec { kind: PotentialKind::Zero, bound: S::zero() }
    }

    pub fn constant(c: S) -> Self {
        PotentialSpec { bound: c.abs(), kind: PotentialKind::Constant(c) }
    }

    pub fn height_table(height: HeightFunction, table: Vec<S>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::Data("empty potential table".into()));
        }
        let bound = table.iter().fold(S::zero(), |m, v| S::max_of(m, v.abs()));
        Ok(PotentialSpec { kind: PotentialKind::HeightTable { height, table }, bound })
    }

    pub fn tabulated(values: BTreeMap<VertexKey, S>) -> Self {
        let bound = values.values().fold(S::zero(), |m, v| S::max_of(m, v.abs()));
        PotentialSpec { kind: PotentialKind::Tabulated(values), bound }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    pub fn eval(&self, x: &VertexKey) -> Result<S> {
        let v = match &self.kind {
            PotentialKind::Zero => S::zero(),
            PotentialKind::Constant(c) => c.clone(),
            PotentialKind::HeightTable { height, table } => {
                let h = height.eval(x)?;
                table[h.rem_euclid(table.len() as i64) as usize].clone()
            }
            PotentialKind::Tabulated(map) => map.get(x).cloned().unwrap_or_else(S::zero),
        };
        if v.abs() > self.bound {
            return Err(Error::Consistency(format!(
                "|q({})| = {} exceeds the certified bound {}",
                x,
                v.abs().to_exact_string(),
                self.bound.to_exact_string()
            )));
        }
        Ok(v)
    }
}
