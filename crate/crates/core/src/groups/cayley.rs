use serde::{Deserialize, Serialize};

use super::element::{Element, GroupSpec};
use crate::error::{Error, Result};
use crate::graph_core::{EdgeBundle, GraphOracle, VertexKey};
use crate::operators::OperatorWeightScheme;
use crate::scalar::Scalar;

/// Edge convention for a Cayley graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// One edge per element of `S ∪ S⁻¹`.
    #[default]
    Simple,
    /// Edges `G x S` and their reverses: an involution or an inverse pair
    /// inside `S` gives a double edge.
    Serre,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    pub generators: Vec<Element>,
    pub convention: Convention,
}

/// One neighbor step `g -> g s` with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub element: Element,
    pub inverse: Element,
    pub multiplicity: u32,
}

impl GeneratingSet {
    pub fn new(spec: &GroupSpec, generators: Vec<Element>, convention: Convention) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Data("empty generating set".into()));
        }
        let id = spec.identity();
        for g in &generators {
            spec.check(g)?;
            if *g == id {
                return Err(Error::Data("the identity cannot be a generator".into()));
            }
        }
        Ok(GeneratingSet { generators, convention })
    }

    pub fn from_strings(spec: &GroupSpec, gens: &[impl AsRef<str>], convention: Convention) -> Result<Self> {
        let els = gens.iter().map(|s| spec.parse(s.as_ref())).collect::<Result<_>>()?;
        Self::new(spec, els, convention)
    }

    /// Named generating sets of the built-in groups.
    ///
    /// - lattice `standard`: unit vectors
    /// - cross `two`: `(1,0), (0,1)`; `figure3`: adds `(1,1), (-1,1)`
    /// - lamplighter `ac`: `a = (∅,1)`, `c = ({0},0)`; `ab`: `a` and `b = ac`
    /// - Baumslag-Solitar `ab`: `x -> 2x` and `x -> x + 1`
    /// - tree `letters`: all involutive letters
    pub fn preset(spec: &GroupSpec, name: &str, convention: Convention) -> Result<Self> {
        let strs: Vec<String> = match (spec, name) {
            (GroupSpec::IntLattice { dim }, "standard") => (0..*dim)
                .map(|i| (0..*dim).map(|j| if i == j { "1" } else { "0" }).collect::<Vec<_>>().join(","))
                .collect(),
            (GroupSpec::IntCrossC2, "two") => vec!["1|0".into(), "0|1".into()],
            (GroupSpec::IntCrossC2, "figure3") => vec!["1|0".into(), "0|1".into(), "1|1".into(), "-1|1".into()],
            (GroupSpec::Lamplighter, "ac") => vec!["|1".into(), "0|0".into()],
            (GroupSpec::Lamplighter, "ab") => vec!["|1".into(), "1|1".into()],
            (GroupSpec::BaumslagSolitar12, "ab") => vec!["1|0/2^0".into(), "0|1/2^0".into()],
            (GroupSpec::RegularTree { degree }, "letters") => (0..*degree).map(|l| l.to_string()).collect(),
            _ => return Err(Error::Data(format!("no preset generating set {:?} for {}", name, spec.name()))),
        };
        Self::from_strings(spec, &strs, convention)
    }

    pub fn default_preset(spec: &GroupSpec) -> &'static str {
        match spec {
            GroupSpec::IntLattice { .. } => "standard",
            GroupSpec::IntCrossC2 => "two",
            GroupSpec::Lamplighter => "ac",
            GroupSpec::BaumslagSolitar12 => "ab",
            GroupSpec::RegularTree { .. } => "letters",
        }
    }

    /// Neighbor steps in a fixed order: each generator followed by its inverse,
    /// duplicates merged (multiplicity 1 under `Simple`, summed under `Serre`).
    pub fn steps(&self, spec: &GroupSpec) -> Result<Vec<Step>> {
        let mut steps: Vec<Step> = Vec::new();
        for s in &self.generators {
            let inv = spec.inv(s)?;
            for (e, i) in [(s.clone(), inv.clone()), (inv.clone(), s.clone())] {
                match steps.iter_mut().find(|st| st.element == e) {
                    Some(st) => {
                        if self.convention == Convention::Serre {
                            st.multiplicity += 1;
                        }
                    }
                    None => steps.push(Step { element: e, inverse: i, multiplicity: 1 }),
                }
            }
        }
        if self.convention == Convention::Simple {
            for st in &mut steps {
                st.multiplicity = 1;
            }
        }
        Ok(steps)
    }
}

/// Cayley graph of a built-in group as a lazy oracle.
#[derive(Clone, Debug)]
pub struct CayleyOracle<S> {
    spec: GroupSpec,
    gens: GeneratingSet,
    scheme: OperatorWeightScheme<S>,
    steps: Vec<Step>,
    step_weights: Vec<S>,
    vertex_weight: S,
    degree_bound: S,
}

impl<S: Scalar> CayleyOracle<S> {
    pub fn new(spec: GroupSpec, gens: GeneratingSet, scheme: OperatorWeightScheme<S>) -> Result<Self> {
        spec.validate()?;
        let steps = gens.steps(&spec)?;
        let keyed: Vec<(String, String, u32)> = steps
            .iter()
            .map(|s| (spec.canonical(&s.element), spec.canonical(&s.inverse), s.multiplicity))
            .collect();
        let (step_weights, vertex_weight) = scheme.weights(&keyed)?;
        let mass = steps
            .iter()
            .zip(&step_weights)
            .fold(S::zero(), |acc, (st, w)| acc + w.clone() * S::from_ratio(st.multiplicity as i64, 1));
        let degree_bound = mass / vertex_weight.clone();
        Ok(CayleyOracle { spec, gens, scheme, steps, step_weights, vertex_weight, degree_bound })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn generating_set(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn scheme(&self) -> &OperatorWeightScheme<S> {
        &self.scheme
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of distinct neighbors of every vertex.
    pub fn degree(&self) -> usize {
        self.steps.len()
    }

    /// Sum of multiplicities at every vertex.
    pub fn total_multiplicity(&self) -> u32 {
        self.steps.iter().map(|s| s.multiplicity).sum()
    }

    pub fn key(&self, g: &Element) -> VertexKey {
        self.spec.key(g)
    }

    pub fn identity_key(&self) -> VertexKey {
        self.spec.key(&self.spec.identity())
    }
}

impl<S: Scalar> GraphOracle<S> for CayleyOracle<S> {
    fn out_edges(&self, x: &VertexKey) -> Result<Vec<EdgeBundle<S>>> {
        let g = self.spec.parse_key(x)?;
        self.steps
            .iter()
            .zip(&self.step_weights)
            .map(|(st, w)| {
                Ok(EdgeBundle {
                    origin: x.clone(),
                    terminus: self.spec.key(&self.spec.mul(&g, &st.element)?),
                    weight: w.clone(),
                    multiplicity: st.multiplicity,
                })
            })
            .collect()
    }

    fn vertex_weight(&self, x: &VertexKey) -> Result<S> {
        self.spec.parse_key(x)?;
        Ok(self.vertex_weight.clone())
    }

    fn degree_bound(&self) -> S {
        self.degree_bound.clone()
    }

    fn descriptor(&self) -> String {
        format!(
            "{} generators [{}] convention {} scheme {}",
            self.spec.name(),
            self.gens.generators.iter().map(|g| self.spec.canonical(g)).collect::<Vec<_>>().join("; "),
            match self.gens.convention {
                Convention::Simple => "simple",
                Convention::Serre => "serre",
            },
            self.scheme.name()
        )
    }
}
