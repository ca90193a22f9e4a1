use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_core::VertexKey;

/// Built-in finitely generated groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    /// `Z^dim`.
    IntLattice { dim: usize },
    /// `Z x Z/2`.
    IntCrossC2,
    /// `Z/2 wr Z`: finitely supported lamp configurations and a cursor.
    Lamplighter,
    /// Affine maps `x -> 2^k x + b` with `b` dyadic.
    BaumslagSolitar12,
    /// Free product of `degree` copies of `Z/2`; its Cayley graph on the
    /// letters is the `degree`-regular tree.
    RegularTree { degree: usize },
}

/// Normal form of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Lattice(Vec<i64>),
    Cross { k: i64, x: u8 },
    Lamp { lamps: BTreeSet<i64>, cursor: i64 },
    /// `b = num / 2^exp` in lowest terms (`num` odd or `exp == 0`).
    Affine { k: i64, num: i128, exp: u32 },
    /// Reduced word: no two consecutive letters are equal.
    Tree(Vec<u8>),
}

fn overflow() -> Error {
    Error::Numerical("dyadic coordinate overflowed 128 bits".into())
}

/// Reduce `num / 2^exp` to lowest terms.
fn dyadic(mut num: i128, mut exp: u32) -> (i128, u32) {
    if num == 0 {
        return (0, 0);
    }
    while exp > 0 && num % 2 == 0 {
        num /= 2;
        exp -= 1;
    }
    (num, exp)
}

/// `2^shift * num / 2^exp` for any signed shift.
fn dyadic_shift(num: i128, exp: u32, shift: i64) -> Result<(i128, u32)> {
    if shift >= 0 {
        let s = shift as u32;
        if s >= exp {
            let up = s - exp;
            if up >= 127 {
                return if num == 0 { Ok((0, 0)) } else { Err(overflow()) };
            }
            num.checked_mul(1i128 << up).map(|v| (v, 0)).ok_or_else(overflow)
        } else {
            Ok(dyadic(num, exp - s))
        }
    } else {
        let e = (exp as i64 - shift).try_into().map_err(|_| overflow())?;
        Ok(dyadic(num, e))
    }
}

fn dyadic_add(a: (i128, u32), b: (i128, u32)) -> Result<(i128, u32)> {
    let e = a.1.max(b.1);
    let lift = |(n, x): (i128, u32)| -> Result<i128> {
        let up = e - x;
        if up >= 127 {
            return if n == 0 { Ok(0) } else { Err(overflow()) };
        }
        n.checked_mul(1i128 << up).ok_or_else(overflow)
    };
    let sum = lift(a)?.checked_add(lift(b)?).ok_or_else(overflow)?;
    Ok(dyadic(sum, e))
}

impl GroupSpec {
    pub fn name(&self) -> String {
        match self {
            GroupSpec::IntLattice { dim } => format!("int_lattice({})", dim),
            GroupSpec::IntCrossC2 => "int_cross_c2".into(),
            GroupSpec::Lamplighter => "lamplighter".into(),
            GroupSpec::BaumslagSolitar12 => "baumslag_solitar_1_2".into(),
            GroupSpec::RegularTree { degree } => format!("regular_tree({})", degree),
        }
    }

    /// Amenable built-ins carry a Følner family.
    pub fn is_amenable(&self) -> bool {
        !matches!(self, GroupSpec::RegularTree { degree } if *degree >= 3)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::IntLattice { dim } if *dim == 0 => Err(Error::Data("lattice dimension must be positive".into())),
            GroupSpec::RegularTree { degree } if !(2..=10).contains(degree) => {
                Err(Error::Data(format!("tree degree {} outside 2..=10", degree)))
            }
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupSpec::IntLattice { dim } => Element::Lattice(vec![0; *dim]),
            GroupSpec::IntCrossC2 => Element::Cross { k: 0, x: 0 },
            GroupSpec::Lamplighter => Element::Lamp { lamps: BTreeSet::new(), cursor: 0 },
            GroupSpec::BaumslagSolitar12 => Element::Affine { k: 0, num: 0, exp: 0 },
            GroupSpec::RegularTree { .. } => Element::Tree(Vec::new()),
        }
    }

    /// Checks that `g` is a valid normal form for this group.
    pub fn check(&self, g: &Element) -> Result<()> {
        let ok = match (self, g) {
            (GroupSpec::IntLattice { dim }, Element::Lattice(v)) => v.len() == *dim,
            (GroupSpec::IntCrossC2, Element::Cross { x, .. }) => *x < 2,
            (GroupSpec::Lamplighter, Element::Lamp { .. }) => true,
            (GroupSpec::BaumslagSolitar12, Element::Affine { num, exp, .. }) => *exp == 0 || num % 2 != 0,
            (GroupSpec::RegularTree { degree }, Element::Tree(w)) => {
                w.iter().all(|&l| (l as usize) < *degree) && w.windows(2).all(|p| p[0] != p[1])
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Data(format!("{:?} is not a normal form of {}", g, self.name())))
        }
    }

    pub fn mul(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (g, h) {
            (Element::Lattice(a), Element::Lattice(b)) => Element::Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            (Element::Cross { k: k1, x: x1 }, Element::Cross { k: k2, x: x2 }) => Element::Cross { k: k1 + k2, x: x1 ^ x2 },
            (Element::Lamp { lamps: f1, cursor: k1 }, Element::Lamp { lamps: f2, cursor: k2 }) => {
                let shifted: BTreeSet<i64> = f2.iter().map(|p| p + k1).collect();
                Element::Lamp { lamps: f1.symmetric_difference(&shifted).copied().collect(), cursor: k1 + k2 }
            }
            (Element::Affine { k: k1, num: n1, exp: e1 }, Element::Affine { k: k2, num: n2, exp: e2 }) => {
                let (num, exp) = dyadic_add(dyadic_shift(*n2, *e2, *k1)?, (*n1, *e1))?;
                Element::Affine { k: k1 + k2, num, exp }
            }
            (Element::Tree(a), Element::Tree(b)) => {
                let mut w = a.clone();
                for &l in b {
                    if w.last() == Some(&l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Element::Tree(w)
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn inv(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        Ok(match g {
            Element::Lattice(a) => Element::Lattice(a.iter().map(|x| -x).collect()),
            Element::Cross { k, x } => Element::Cross { k: -k, x: *x },
            Element::Lamp { lamps, cursor } => {
                Element::Lamp { lamps: lamps.iter().map(|p| p - cursor).collect(), cursor: -cursor }
            }
            Element::Affine { k, num, exp } => {
                let (n, e) = dyadic_shift(*num, *exp, -k)?;
                Element::Affine { k: -k, num: -n, exp: e }
            }
            Element::Tree(w) => Element::Tree(w.iter().rev().copied().collect()),
        })
    }

    /// Canonical string, used as the vertex key.
    pub fn canonical(&self, g: &Element) -> String {
        match g {
            Element::Lattice(a) => a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
            Element::Cross { k, x } => format!("{}|{}", k, x),
            Element::Lamp { lamps, cursor } => {
                format!("{}|{}", lamps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "), cursor)
            }
            Element::Affine { k, num, exp } => format!("{}|{}/2^{}", k, num, exp),
            Element::Tree(w) => {
                let path: String = w.iter().map(|l| char::from(b'0' + l)).collect();
                format!("{}|{}", path, busemann(w))
            }
        }
    }

    pub fn key(&self, g: &Element) -> VertexKey {
        VertexKey::new(self.canonical(g))
    }

    /// Inverse of [`GroupSpec::canonical`]. Rejects non-canonical encodings.
    pub fn parse(&self, s: &str) -> Result<Element> {
        let bad = || Error::Data(format!("malformed {} element {:?}", self.name(), s));
        let int = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
        let g = match self {
            GroupSpec::IntLattice { .. } => Element::Lattice(s.split(',').map(int).collect::<Result<_>>()?),
            GroupSpec::IntCrossC2 => {
                let (k, x) = s.split_once('|').ok_or_else(bad)?;
                let x = match x.trim() {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(bad()),
                };
                Element::Cross { k: int(k)?, x }
            }
            GroupSpec::Lamplighter => {
                let (f, k) = s.split_once('|').ok_or_else(bad)?;
                let lamps: Vec<i64> = f.split_whitespace().map(int).collect::<Result<_>>()?;
                let set: BTreeSet<i64> = lamps.iter().copied().collect();
                if set.len() != lamps.len() {
                    return Err(bad());
                }
                Element::Lamp { lamps: set, cursor: int(k)? }
            }
            GroupSpec::BaumslagSolitar12 => {
                let (k, b) = s.split_once('|').ok_or_else(bad)?;
                let (num, exp) = match b.split_once('/') {
                    Some((n, d)) => {
                        let e = d.trim().strip_prefix("2^").ok_or_else(bad)?;
                        (n.trim().parse::<i128>().map_err(|_| bad())?, e.parse::<u32>().map_err(|_| bad())?)
                    }
                    None => (b.trim().parse::<i128>().map_err(|_| bad())?, 0),
                };
                if (num, exp) != dyadic(num, exp) {
                    return Err(bad());
                }
                Element::Affine { k: int(k)?, num, exp }
            }
            GroupSpec::RegularTree { .. } => {
                let (path, level) = match s.split_once('|') {
                    Some((p, l)) => (p, Some(int(l)?)),
                    None => (s, None),
                };
                let w: Vec<u8> = path
                    .trim()
                    .chars()
                    .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
                    .collect::<Result<_>>()?;
                if level.is_some_and(|l| l != busemann(&w)) {
                    return Err(bad());
                }
                Element::Tree(w)
            }
        };
        self.check(&g)?;
        Ok(g)
    }

    pub fn parse_key(&self, key: &VertexKey) -> Result<Element> {
        self.parse(key.as_str())
    }
}

/// Busemann function of the end `0101...`: `2 L - |w|` where `L` is the length
/// of the common prefix of `w` with that end.
pub(crate) fn busemann(w: &[u8]) -> i64 {
    let common = w.iter().enumerate().take_while(|(i, &l)| l as usize == i % 2).count();
    2 * common as i64 - w.len() as i64
}

/// `mul`, `inv` or `id` applied to canonical strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupOp {
    Mul,
    Inv,
    Id,
}

pub fn group_arithmetic(spec: &GroupSpec, op: GroupOp, args: &[Element]) -> Result<Element> {
    match (op, args) {
        (GroupOp::Id, []) => Ok(spec.identity()),
        (GroupOp::Inv, [g]) => spec.inv(g),
        (GroupOp::Mul, gs) if !gs.is_empty() => {
            let mut acc = gs[0].clone();
            spec.check(&acc)?;
            for g in &gs[1..] {
                acc = spec.mul(&acc, g)?;
            }
            Ok(acc)
        }
        _ => Err(Error::Data(format!("wrong number of arguments for {:?}", op))),
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lamplighter_a_times_c_is_b() {
        let g = GroupSpec::Lamplighter;
        let a = g.parse("|1").unwrap();
        let c = g.parse("0|0").unwrap();
        assert_eq!(g.canonical(&g.mul(&a, &c).unwrap()), "1|1");
        let b = g.mul(&a, &c).unwrap();
        assert_eq!(g.canonical(&g.inv(&b).unwrap()), "0|-1");
    }

    #[test]
    fn bs_conjugation_doubles_translation() {
        let g = GroupSpec::BaumslagSolitar12;
        let a = g.parse("1|0/2^0").unwrap();
        let b = g.parse("0|1/2^0").unwrap();
        let ainv = g.inv(&a).unwrap();
        let r = group_arithmetic(&g, GroupOp::Mul, &[a.clone(), b.clone(), ainv.clone()]).unwrap();
        assert_eq!(g.canonical(&r), "0|2/2^0");
        let r = group_arithmetic(&g, GroupOp::Mul, &[ainv, b, a]).unwrap();
        assert_eq!(g.canonical(&r), "0|1/2^1");
        assert!(g.parse("0|2/2^1").is_err());
    }

    #[test]
    fn tree_words_reduce() {
        let g = GroupSpec::RegularTree { degree: 3 };
        let w = g.parse("012").unwrap();
        assert_eq!(g.mul(&w, &g.inv(&w).unwrap()).unwrap(), g.identity());
        assert_eq!(g.canonical(&w), "012|1");
        assert_eq!(g.canonical(&g.parse("01").unwrap()), "01|2");
        assert!(g.parse("011").is_err());
        assert!(g.parse("01|0").is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let g = GroupSpec::Lamplighter;
        let e = g.parse("-3 0 2|5").unwrap();
        assert_eq!(g.parse(&g.canonical(&e)).unwrap(), e);
        assert!(g.parse("1 1|0").is_err());
        assert!(GroupSpec::IntCrossC2.parse("1|2").is_err());
        assert!(GroupSpec::IntLattice { dim: 2 }.parse("1,x").is_err());
    }
}
