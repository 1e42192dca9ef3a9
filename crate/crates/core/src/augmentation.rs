//! The 1-augmentation `𝒢̂` of a conditioning family and the extension of a
//! CPS from `𝒢` to `𝒢̂`.
//!
//! The extension runs on the dimensionally ordered representation of the
//! input. Each atom `H_i` of the algebra generated by `𝒢̂` receives a
//! dimension `d_i`: the active level of any member of `𝒢` containing it with
//! positive mass there, or the new bottom dimension [`Dimension::Base`] when no
//! such member exists. The extended level `μ̂_η` carries the finite part of
//! every atom of dimension `η` and `+∞` on every atom of higher dimension; a
//! member `K` of `𝒢̂` is conditioned at the highest dimension among its atoms.

use std::collections::BTreeMap;

use crate::assumptions::{certain_events, check_one_closed};
use crate::cps::{Cps, ProbMeasure};
use crate::error::{Error, Result};
use crate::foundations::{rational, Event, ExtValue, SetFamily};
use crate::renyi::{represent, DimOrderedFamily, ExtMeasure};

/// Dimensions of the extended representation. `Base` lies below every level
/// of the input's representation; `Level(i)` is the input's level `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Base,
    Level(usize),
}

#[derive(Clone, Debug)]
pub struct AugmentationResult {
    pub augmented_family: SetFamily,
    pub extended_cps: Cps,
    /// Algebra atoms `H_i` of `𝒢̂`, ordered by lowest state.
    pub atoms: Vec<Event>,
    /// `dimensions[i]` is `d_i`.
    pub dimensions: Vec<Dimension>,
    /// First member of `𝒢` (in family order) witnessing `d_i`, if any.
    pub witness_map: Vec<Option<Event>>,
    /// Representation of the input.
    pub representation: DimOrderedFamily,
    /// Extended levels `μ̂_η`, lowest dimension first; `Base` appears only if
    /// some atom has it.
    pub levels: Vec<(Dimension, ExtMeasure)>,
    /// `η(K)` for every `K ∈ 𝒢̂`.
    pub active: BTreeMap<Event, Dimension>,
}

impl AugmentationResult {
    pub fn dimension_of(&self, atom: Event) -> Option<Dimension> {
        self.atoms
            .iter()
            .position(|&h| h == atom)
            .map(|i| self.dimensions[i])
    }
}

/// `𝒢̂`: the closure of all events certain under some member's measure.
pub fn augment_family(cps: &Cps) -> Result<SetFamily> {
    cps.ensure_valid()?;
    Ok(certain_events(cps).close())
}

pub fn extend(cps: &Cps) -> Result<AugmentationResult> {
    let dof = represent(cps)?;
    let hat = augment_family(cps)?;
    let atoms = hat.algebra_atoms();
    let n = cps.size();

    let gamma: BTreeMap<Event, usize> = cps
        .family()
        .iter()
        .map(|g| {
            dof.active_level(g)
                .map(|l| (g, l))
                .ok_or_else(|| Error::Extension(format!("{g:?} has no active level")))
        })
        .collect::<Result<_>>()?;

    let mut dimensions = Vec::with_capacity(atoms.len());
    let mut witness_map = Vec::with_capacity(atoms.len());
    for &h in &atoms {
        let mut found: Option<(Event, usize)> = None;
        for (&k, &level) in &gamma {
            if !h.is_subset(k) || !dof.levels()[level].eval(h).is_positive_finite() {
                continue;
            }
            match found {
                None => found = Some((k, level)),
                Some((first, l)) if l != level => {
                    return Err(Error::Extension(format!(
                        "witnesses {first:?} and {k:?} of atom {h:?} have levels {l} and {level}"
                    )))
                }
                Some(_) => {}
            }
        }
        witness_map.push(found.map(|(k, _)| k));
        dimensions.push(found.map_or(Dimension::Base, |(_, l)| Dimension::Level(l)));
    }

    let mut used: Vec<Dimension> = (0..dof.levels().len()).map(Dimension::Level).collect();
    if dimensions.contains(&Dimension::Base) {
        used.insert(0, Dimension::Base);
    }
    let levels: Vec<(Dimension, ExtMeasure)> = used
        .iter()
        .map(|&eta| {
            let mut values = vec![ExtValue::zero(); n];
            for (&h, &d) in atoms.iter().zip(&dimensions) {
                for s in h.states() {
                    values[s] = if d > eta {
                        ExtValue::Infinity
                    } else if d < eta {
                        ExtValue::zero()
                    } else {
                        match d {
                            Dimension::Base => ExtValue::Finite(rational(1, h.len() as i64)),
                            Dimension::Level(l) => dof.levels()[l].value(s).clone(),
                        }
                    };
                }
            }
            Ok((eta, ExtMeasure::new(values)?))
        })
        .collect::<Result<_>>()?;

    let mut active = BTreeMap::new();
    let mut measures = Vec::with_capacity(hat.len());
    for k in hat.iter() {
        let eta = atoms
            .iter()
            .zip(&dimensions)
            .filter(|(h, _)| h.is_subset(k))
            .map(|(_, &d)| d)
            .max()
            .ok_or_else(|| Error::Extension(format!("{k:?} contains no atom")))?;
        let level = &levels
            .iter()
            .find(|(d, _)| *d == eta)
            .expect("every atom dimension has a level")
            .1;
        let mass = level.eval(k);
        let weights = (0..n)
            .map(|s| {
                if k.contains(s) {
                    level.value(s).div(&mass)
                } else {
                    Ok(rational(0, 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        active.insert(k, eta);
        measures.push((k, ProbMeasure::from_weights(weights)));
    }

    for (&g, &l) in &gamma {
        if active.get(&g) != Some(&Dimension::Level(l)) {
            return Err(Error::Extension(format!(
                "{g:?} is active at {:?} in the extension but at level {l} in the input",
                active.get(&g)
            )));
        }
    }

    let extended_cps = Cps::new_valid(cps.space().clone(), hat.clone(), measures)?;
    if extended_cps.restrict(cps.family())? != *cps {
        return Err(Error::Extension(
            "extension does not restrict to the input".into(),
        ));
    }

    Ok(AugmentationResult {
        augmented_family: hat,
        extended_cps,
        atoms,
        dimensions,
        witness_map,
        representation: dof,
        levels,
        active,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoNewOnes {
    pub holds: bool,
    /// A certain event of the extension outside `𝒢̂`.
    pub witness: Option<Event>,
}

/// Every event certain under some extended measure already belongs to `𝒢̂`.
pub fn verify_no_new_ones(result: &AugmentationResult) -> NoNewOnes {
    let witness = certain_events(&result.extended_cps)
        .iter()
        .find(|&e| !result.augmented_family.contains(e));
    NoNewOnes {
        holds: witness.is_none(),
        witness,
    }
}

/// Augmenting the extension adds nothing further.
pub fn verify_idempotent(cps: &Cps) -> Result<bool> {
    let result = extend(cps)?;
    Ok(augment_family(&result.extended_cps)? == result.augmented_family)
}

pub fn is_fixed_point(cps: &Cps) -> Result<bool> {
    Ok(augment_family(cps)? == *cps.family())
}

/// `is_fixed_point` and `check_one_closed` must give the same answer.
pub fn fixed_point_matches_one_closed(cps: &Cps) -> Result<bool> {
    Ok(is_fixed_point(cps)? == check_one_closed(cps).holds)
}
