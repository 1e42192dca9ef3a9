//! Enumerated and sampled CPSs for property checks.
//!
//! Measures come from a rank and a nonnegative weight per state: `p_G` is the
//! normalized weight of the lowest rank at which `G` carries positive weight.
//! Zero weights let some states be null under every measure; candidates that
//! fail validation are dropped.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cps::{Cps, ProbMeasure};
use crate::error::{Error, Result};
use crate::foundations::{Event, Rational, SetFamily, StateSpace};

/// Largest space for which all closed families are listed.
pub const MAX_ENUMERATED_STATES: usize = 4;

/// Every covering family over `n` states closed under unions and nonempty
/// intersections.
pub fn closed_families(n: usize) -> Result<Vec<SetFamily>> {
    if n == 0 || n > MAX_ENUMERATED_STATES {
        return Err(Error::TooLarge {
            size: n,
            cap: MAX_ENUMERATED_STATES,
        });
    }
    let events: Vec<Event> = (1..1u64 << n).map(Event::from_bits).collect();
    let full = Event::full(n);
    let mut out = Vec::new();
    for mask in 0u64..1 << events.len() {
        let members: Vec<Event> = (0..events.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| events[i])
            .collect();
        if !members.contains(&full) {
            continue;
        }
        let closed = members.iter().all(|&x| {
            members.iter().all(|&y| {
                members.contains(&x.union(y))
                    && (!x.meets(y) || members.contains(&x.intersection(y)))
            })
        });
        if closed {
            out.push(SetFamily::new(n, members)?);
        }
    }
    Ok(out)
}

/// The ranked measure on `g`, or `None` when `g` has no positive weight.
pub fn ranked_measure(rank: &[usize], weight: &[u32], g: Event) -> Option<ProbMeasure> {
    let mut levels: Vec<usize> = g
        .states()
        .filter(|&s| weight[s] > 0)
        .map(|s| rank[s])
        .collect();
    levels.sort_unstable();
    let top = *levels.first()?;
    let chosen: Vec<usize> = g
        .states()
        .filter(|&s| rank[s] == top && weight[s] > 0)
        .collect();
    let total: u32 = chosen.iter().map(|&s| weight[s]).sum();
    ProbMeasure::new(
        rank.len(),
        chosen
            .iter()
            .map(|&s| (s, Rational::new(weight[s].into(), total.into()))),
    )
    .ok()
}

/// A valid CPS from ranks and weights, if there is one.
pub fn ranked_cps(family: &SetFamily, rank: &[usize], weight: &[u32]) -> Option<Cps> {
    let n = family.size();
    let measures: Vec<(Event, ProbMeasure)> = family
        .iter()
        .map(|g| ranked_measure(rank, weight, g).map(|p| (g, p)))
        .collect::<Option<_>>()?;
    let cps = Cps::new(StateSpace::indexed(n).ok()?, family.clone(), measures).ok()?;
    cps.validate().is_valid().then_some(cps)
}

/// All rank functions onto `0..k` for some `k`, i.e. ordered partitions.
pub fn ordered_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rank = vec![0; n];
    loop {
        let mut used: Vec<usize> = rank.clone();
        used.sort_unstable();
        used.dedup();
        if used.iter().enumerate().all(|(i, &r)| i == r) {
            out.push(rank.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            rank[i] += 1;
            if rank[i] < n {
                break;
            }
            rank[i] = 0;
            i += 1;
        }
    }
}

fn key(cps: &Cps) -> Vec<(Event, Vec<Rational>)> {
    cps.measures()
        .iter()
        .map(|(&g, p)| (g, p.weights().to_vec()))
        .collect()
}

/// Exhaustive up to three states (every family, every ordered partition,
/// weights in `{0,1,2}`), then every four-state family with `per_family`
/// sampled rank/weight draws.
pub fn exhaustive(per_family: usize, seed: u64) -> Result<Vec<Cps>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=3 {
        let weights = weight_vectors(n, 2);
        for family in closed_families(n)? {
            for rank in ordered_partitions(n) {
                for w in &weights {
                    if let Some(c) = ranked_cps(&family, &rank, w) {
                        if seen.insert(key(&c)) {
                            out.push(c);
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for family in closed_families(4)? {
        let mut found = 0;
        for _ in 0..per_family * 8 {
            if found == per_family {
                break;
            }
            let (rank, w) = random_rank_weight(4, &mut rng);
            if let Some(c) = ranked_cps(&family, &rank, &w) {
                found += 1;
                if seen.insert(key(&c)) {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

fn weight_vectors(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |w| {
                    let mut v = v.clone();
                    v.push(w);
                    v
                })
            })
            .collect();
    }
    out
}

fn random_rank_weight(n: usize, rng: &mut impl Rng) -> (Vec<usize>, Vec<u32>) {
    let levels = rng.gen_range(1..=n);
    let rank = (0..n).map(|_| rng.gen_range(0..levels)).collect();
    let weight = (0..n)
        .map(|_| {
            if rng.gen_bool(0.2) {
                0
            } else {
                rng.gen_range(1..=3)
            }
        })
        .collect();
    (rank, weight)
}

/// A random closed covering family over `n` states.
pub fn random_family(n: usize, rng: &mut impl Rng) -> SetFamily {
    let full = Event::full(n);
    let count = rng.gen_range(0..=n + 2);
    let members = (0..count)
        .map(|_| Event::from_bits(rng.gen_range(1..=full.bits())))
        .chain([full]);
    SetFamily::new(n, members)
        .expect("nonempty in-range members")
        .close()
}

/// `count` valid CPSs with state counts drawn from `1..=max_states`.
pub fn random(count: usize, max_states: usize, seed: u64) -> Vec<Cps> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(1..=max_states);
        let family = random_family(n, &mut rng);
        let (rank, w) = random_rank_weight(n, &mut rng);
        if let Some(c) = ranked_cps(&family, &rank, &w) {
            out.push(c);
        }
    }
    out
}
