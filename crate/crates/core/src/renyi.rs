//! Dimensionally ordered families of extended measures.
//!
//! A list of measures `μ_0 ≺ μ_1 ≺ …` (values in `[0, +∞]`) is dimensionally
//! ordered relative to a family when every member `G` has exactly one level
//! with `0 < μ(G) < ∞`, all lower levels give `+∞` on `G` and all higher ones
//! give `0`. Such a family generates a CPS through
//! `p_G(E) = μ_γ(E ∩ G) / μ_γ(G)` at the active level `γ = γ(G)`.
//!
//! [`represent`] builds such a list from a finite CPS on a union-closed family
//! by grouping members into dominance classes.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::cps::{Cps, ProbMeasure};
use crate::error::{Error, Result};
use crate::foundations::{Event, ExtValue, SetFamily, StateSpace};

/// Per-state values in `[0, +∞]`; an event's measure is the sum over its
/// states.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtMeasure {
    values: Vec<ExtValue>,
}

impl ExtMeasure {
    pub fn new(values: Vec<ExtValue>) -> Result<Self> {
        if values
            .iter()
            .any(|v| v.as_finite().is_some_and(|r| r.is_negative()))
        {
            return Err(Error::ExtArithmetic("extended values are nonnegative"));
        }
        Ok(ExtMeasure { values })
    }

    pub fn values(&self) -> &[ExtValue] {
        &self.values
    }

    pub fn value(&self, state: usize) -> &ExtValue {
        &self.values[state]
    }

    pub fn eval(&self, e: Event) -> ExtValue {
        e.states().map(|s| &self.values[s]).sum()
    }
}

impl fmt::Debug for ExtMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.values).finish()
    }
}

/// Levels listed dominated-first: a later index is higher in the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimOrderedFamily {
    space: StateSpace,
    levels: Vec<ExtMeasure>,
}

impl DimOrderedFamily {
    pub fn new(space: StateSpace, levels: Vec<ExtMeasure>) -> Result<Self> {
        if levels.iter().any(|l| l.values.len() != space.size()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(DimOrderedFamily { space, levels })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn levels(&self) -> &[ExtMeasure] {
        &self.levels
    }

    /// The unique level with `0 < μ(g) < ∞`, if exactly one exists.
    pub fn active_level(&self, g: Event) -> Option<usize> {
        let mut found = None;
        for (i, l) in self.levels.iter().enumerate() {
            if l.eval(g).is_positive_finite() {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelFailure {
    NoActiveLevel,
    SeveralActiveLevels(Vec<usize>),
    /// A level below the active one is finite on the member.
    FiniteBelow {
        active: usize,
        level: usize,
    },
    /// A level above the active one is nonzero on the member.
    NonzeroAbove {
        active: usize,
        level: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderCheck {
    pub holds: bool,
    pub witness: Option<(Event, LevelFailure)>,
}

/// Checks dimensional ordering relative to `family`.
pub fn verify(dof: &DimOrderedFamily, family: &SetFamily) -> OrderCheck {
    for g in family.iter() {
        if let Some(failure) = member_failure(dof, g) {
            return OrderCheck {
                holds: false,
                witness: Some((g, failure)),
            };
        }
    }
    OrderCheck {
        holds: true,
        witness: None,
    }
}

fn member_failure(dof: &DimOrderedFamily, g: Event) -> Option<LevelFailure> {
    let vals: Vec<ExtValue> = dof.levels.iter().map(|l| l.eval(g)).collect();
    let active: Vec<usize> = (0..vals.len())
        .filter(|&i| vals[i].is_positive_finite())
        .collect();
    let gamma = match active.as_slice() {
        [] => return Some(LevelFailure::NoActiveLevel),
        [one] => *one,
        _ => return Some(LevelFailure::SeveralActiveLevels(active)),
    };
    if let Some(level) = (0..gamma).find(|&i| !vals[i].is_infinite()) {
        return Some(LevelFailure::FiniteBelow {
            active: gamma,
            level,
        });
    }
    if let Some(level) = (gamma + 1..vals.len()).find(|&i| !vals[i].is_zero()) {
        return Some(LevelFailure::NonzeroAbove {
            active: gamma,
            level,
        });
    }
    None
}

/// The CPS generated by a dimensionally ordered family.
pub fn regenerate(dof: &DimOrderedFamily, family: &SetFamily) -> Result<Cps> {
    let check = verify(dof, family);
    if let Some((g, failure)) = check.witness {
        return Err(Error::VerifyFailed(format!("{g:?}: {failure:?}")));
    }
    let n = dof.space.size();
    let measures = family
        .iter()
        .map(|g| {
            let level = &dof.levels[dof.active_level(g).expect("verified")];
            let mass = level.eval(g);
            let weights = (0..n)
                .map(|s| {
                    if g.contains(s) {
                        level.value(s).div(&mass)
                    } else {
                        Ok(Zero::zero())
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((g, ProbMeasure::from_weights(weights)))
        })
        .collect::<Result<Vec<_>>>()?;
    Cps::new(dof.space.clone(), family.clone(), measures)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dominance {
    /// `p_{G∪H}(H) = 0`.
    FirstDominates,
    /// `p_{G∪H}(G) = 0`.
    SecondDominates,
    /// Both have positive probability given the union.
    Equivalent,
}

/// Compares two conditioning events through the measure on their union.
pub fn dominance(cps: &Cps, g: Event, h: Event) -> Result<Dominance> {
    cps.measure(g)?;
    cps.measure(h)?;
    let p = cps.measure(g.union(h))?;
    let (pg, ph) = (p.prob(g), p.prob(h));
    Ok(match (pg.is_positive(), ph.is_positive()) {
        (true, true) => Dominance::Equivalent,
        (true, false) => Dominance::FirstDominates,
        (false, true) => Dominance::SecondDominates,
        (false, false) => {
            return Err(Error::InternalOrder(format!(
                "neither {g:?} nor {h:?} has positive probability given their union"
            )))
        }
    })
}

/// Builds a dimensionally ordered family generating `cps`.
///
/// Members are grouped into dominance-equivalence classes, classes are
/// ordered by comparing their unions, and the level of class `c` is
/// `p_{U_c}` plus `+∞` on the support of every higher class's union measure.
pub fn represent(cps: &Cps) -> Result<DimOrderedFamily> {
    cps.ensure_valid()?;
    let members: Vec<Event> = cps.family().iter().collect();
    let k = members.len();

    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut relation = vec![vec![Dominance::Equivalent; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = dominance(cps, members[i], members[j])?;
            relation[i][j] = d;
            relation[j][i] = match d {
                Dominance::FirstDominates => Dominance::SecondDominates,
                Dominance::SecondDominates => Dominance::FirstDominates,
                Dominance::Equivalent => Dominance::Equivalent,
            };
            if d == Dominance::Equivalent {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_to_class = vec![usize::MAX; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        if root_to_class[r] == usize::MAX {
            root_to_class[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[root_to_class[r]].push(i);
    }
    for class in &classes {
        for (x, &i) in class.iter().enumerate() {
            for &j in &class[x + 1..] {
                if relation[i][j] != Dominance::Equivalent {
                    return Err(Error::InternalOrder(format!(
                        "{:?} and {:?} are linked by equivalence but not equivalent",
                        members[i], members[j]
                    )));
                }
            }
        }
    }

    let unions: Vec<Event> = classes
        .iter()
        .map(|c| c.iter().fold(Event::EMPTY, |u, &i| u.union(members[i])))
        .collect();
    for (c, &u) in classes.iter().zip(&unions) {
        let p = cps.measure(u)?;
        if let Some(&i) = c.iter().find(|&&i| !p.prob(members[i]).is_positive()) {
            return Err(Error::InternalOrder(format!(
                "class union {u:?} gives zero probability to its member {:?}",
                members[i]
            )));
        }
    }

    let nc = classes.len();
    let mut dominated_count = vec![0usize; nc];
    for c in 0..nc {
        for d in 0..nc {
            if c == d {
                continue;
            }
            match dominance(cps, unions[c], unions[d])? {
                Dominance::FirstDominates => dominated_count[c] += 1,
                Dominance::SecondDominates => {}
                Dominance::Equivalent => {
                    return Err(Error::InternalOrder(format!(
                        "class unions {:?} and {:?} are equivalent",
                        unions[c], unions[d]
                    )))
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..nc).collect();
    order.sort_by_key(|&c| dominated_count[c]);
    for (x, &lo) in order.iter().enumerate() {
        for &hi in &order[x + 1..] {
            if dominance(cps, unions[hi], unions[lo])? != Dominance::FirstDominates {
                return Err(Error::InternalOrder(format!(
                    "dominance between {:?} and {:?} is not transitive",
                    unions[hi], unions[lo]
                )));
            }
        }
    }

    let supports: Vec<Event> = order
        .iter()
        .map(|&c| cps.measure(unions[c]).map(ProbMeasure::support))
        .collect::<Result<_>>()?;
    let n = cps.size();
    let mut levels = Vec::with_capacity(nc);
    for (pos, &c) in order.iter().enumerate() {
        let p = cps.measure(unions[c])?;
        let above = supports[pos + 1..]
            .iter()
            .fold(Event::EMPTY, |acc, &s| acc.union(s));
        let values = (0..n)
            .map(|s| {
                if above.contains(s) {
                    ExtValue::Infinity
                } else {
                    ExtValue::Finite(p.weight(s).clone())
                }
            })
            .collect();
        levels.push(ExtMeasure::new(values)?);
    }
    let dof = DimOrderedFamily::new(cps.space().clone(), levels)?;
    if let Some((g, failure)) = verify(&dof, cps.family()).witness {
        return Err(Error::VerifyFailed(format!("{g:?}: {failure:?}")));
    }
    Ok(dof)
}
