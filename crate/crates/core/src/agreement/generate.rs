//! Random agent pairs built from lexicographic sequences of measures.
//!
//! A sequence assigns each state a rank and a positive weight; `p_G` puts the
//! normalized weights on the lowest-ranked states of `G`. Such systems are
//! CPSs on any covering family. When both agents share one sequence, every
//! event in both families gets the same measure, so local consistency holds
//! everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assumptions::{assess_agent, certain_events, local_consistency_all};
use crate::corpus::random_family;
use crate::cps::{Cps, ProbMeasure};
use crate::error::{Error, Result};
use crate::foundations::{Event, Rational, SetFamily, StateSpace};

/// Hypotheses the generator can be told to violate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    Reflection,
    OneClosed,
    Consistency,
}

impl std::str::FromStr for Hypothesis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "reflection" => Ok(Hypothesis::Reflection),
            "one_closed" => Ok(Hypothesis::OneClosed),
            "consistency" => Ok(Hypothesis::Consistency),
            _ => Err(format!(
                "unknown hypothesis {s:?}; expected reflection, one_closed or consistency"
            )),
        }
    }
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Hypothesis::Reflection => "reflection",
            Hypothesis::OneClosed => "one_closed",
            Hypothesis::Consistency => "consistency",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub state_count: usize,
    pub seed: u64,
    pub trials: usize,
    pub shared_lexicographic: bool,
    pub drop: Option<Hypothesis>,
}

impl GeneratorConfig {
    pub fn new(state_count: usize, seed: u64, trials: usize) -> Self {
        GeneratorConfig {
            state_count,
            seed,
            trials,
            shared_lexicographic: true,
            drop: None,
        }
    }

    pub fn with_drop(mut self, drop: Option<Hypothesis>) -> Self {
        self.drop = drop;
        if drop == Some(Hypothesis::Consistency) {
            self.shared_lexicographic = false;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.state_count == 0 || self.state_count > 16 {
            return Err(Error::Config(format!(
                "state count must be between 1 and 16, got {}",
                self.state_count
            )));
        }
        if self.drop.is_some() && self.state_count < 2 {
            return Err(Error::Config(
                "a hypothesis can only be violated with at least two states".into(),
            ));
        }
        if self.drop == Some(Hypothesis::Consistency) && self.shared_lexicographic {
            return Err(Error::Config(
                "a shared sequence cannot violate local consistency".into(),
            ));
        }
        Ok(())
    }

    fn rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

/// A lexicographic sequence: lower rank dominates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lps {
    rank: Vec<usize>,
    weight: Vec<u32>,
}

impl Lps {
    pub fn new(rank: Vec<usize>, weight: Vec<u32>) -> Result<Self> {
        if rank.len() != weight.len() || weight.contains(&0) {
            return Err(Error::Config("ranks and positive weights per state".into()));
        }
        Ok(Lps { rank, weight })
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let levels = rng.gen_range(1..=n);
        let rank = (0..n).map(|_| rng.gen_range(0..levels)).collect();
        let weight = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        Lps { rank, weight }
    }

    pub fn measure(&self, g: Event) -> ProbMeasure {
        let top = g
            .states()
            .map(|s| self.rank[s])
            .min()
            .expect("nonempty member");
        let n = self.rank.len();
        ProbMeasure::new(
            n,
            g.states()
                .filter(|&s| self.rank[s] == top)
                .map(|s| (s, Rational::from_integer(self.weight[s].into()))),
        )
        .expect("states in range")
        .normalized()
    }

    pub fn cps(&self, space: &StateSpace, family: &SetFamily) -> Result<Cps> {
        Cps::new(
            space.clone(),
            family.clone(),
            family.iter().map(|g| (g, self.measure(g))),
        )
    }

    /// Adds certain events until the family is closed under them.
    pub fn one_close(&self, space: &StateSpace, mut family: SetFamily) -> Result<SetFamily> {
        loop {
            let next = certain_events(&self.cps(space, &family)?).close();
            if next == family {
                return Ok(family);
            }
            family = next;
        }
    }
}

const ATTEMPTS: usize = 64;

/// The instance of trial 0.
pub fn generate_instance(config: &GeneratorConfig) -> Result<(Cps, Cps)> {
    generate_trial(config, 0)
}

/// The instance for one trial; depends only on the seed and trial index.
pub fn generate_trial(config: &GeneratorConfig, trial: usize) -> Result<(Cps, Cps)> {
    config.validate()?;
    let n = config.state_count;
    let space = StateSpace::indexed(n)?;
    let mut rng = config.rng(trial);
    for _ in 0..ATTEMPTS {
        let la = Lps::random(n, &mut rng);
        let lb = if config.shared_lexicographic {
            la.clone()
        } else {
            Lps::random(n, &mut rng)
        };
        let (mut fa, mut fb) = (random_family(n, &mut rng), random_family(n, &mut rng));
        if config.drop != Some(Hypothesis::OneClosed) {
            fa = la.one_close(&space, fa)?;
            fb = lb.one_close(&space, fb)?;
        }
        let (a, b) = (la.cps(&space, &fa)?, lb.cps(&space, &fb)?);
        if acceptable(config, &a, &b)? {
            return Ok((a, b));
        }
    }
    fallback(config, &space, &mut rng)
}

fn acceptable(config: &GeneratorConfig, a: &Cps, b: &Cps) -> Result<bool> {
    let (xa, xb) = (assess_agent(a, true)?, assess_agent(b, true)?);
    let reflection = xa.reflection.holds && xb.reflection.holds;
    let one_closed = xa.one_closed.holds && xb.one_closed.holds;
    Ok(match config.drop {
        None => reflection,
        Some(Hypothesis::Reflection) => !reflection,
        Some(Hypothesis::OneClosed) => reflection && !one_closed,
        Some(Hypothesis::Consistency) => {
            reflection && local_consistency_all(a, b)?.iter().any(|c| !c.holds)
        }
    })
}

/// Small deterministic constructions used when sampling does not produce the
/// requested violation.
fn fallback(
    config: &GeneratorConfig,
    space: &StateSpace,
    rng: &mut impl Rng,
) -> Result<(Cps, Cps)> {
    let n = config.state_count;
    let full = Event::full(n);
    let first = Event::singleton(0);
    let pair = |f: SetFamily, la: &Lps, lb: &Lps| Ok((la.cps(space, &f)?, lb.cps(space, &f)?));
    match config.drop {
        None => {
            let la = Lps::random(n, rng);
            let lb = if config.shared_lexicographic {
                la.clone()
            } else {
                Lps::random(n, rng)
            };
            let f = SetFamily::power_set(n);
            pair(f, &la, &lb)
        }
        Some(Hypothesis::OneClosed) => {
            // p_Ω is certain of {s0} but Ω is the only member
            let l = Lps::new((0..n).map(|s| usize::from(s != 0)).collect(), vec![1; n])?;
            pair(SetFamily::new(n, [full])?, &l, &l)
        }
        Some(Hypothesis::Reflection) => {
            // atom {s0} sits inside Ω with probability 1/n
            let l = Lps::new(vec![0; n], vec![1; n])?;
            pair(SetFamily::new(n, [first, full])?, &l, &l)
        }
        Some(Hypothesis::Consistency) => {
            let la = Lps::new(vec![0; n], vec![1; n])?;
            let lb = Lps::new(
                vec![0; n],
                (0..n).map(|s| if s == 0 { 2 } else { 1 }).collect(),
            )?;
            pair(SetFamily::new(n, [full])?, &la, &lb)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assumptions::check_one_closed;

    #[test]
    fn shared_instances_are_valid_and_consistent() {
        for seed in 0..20 {
            let config = GeneratorConfig::new(4, seed, 1);
            let (a, b) = generate_instance(&config).unwrap();
            assert!(a.validate().is_valid() && b.validate().is_valid());
            assert!(local_consistency_all(&a, &b)
                .unwrap()
                .iter()
                .all(|c| c.holds));
            assert!(check_one_closed(&a).holds && check_one_closed(&b).holds);
            assert!(assess_agent(&a, true).unwrap().reflection.holds);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let config = GeneratorConfig::new(5, 7, 3);
        for trial in 0..3 {
            let x = generate_trial(&config, trial).unwrap();
            let y = generate_trial(&config, trial).unwrap();
            assert_eq!(x, y);
        }
        assert_ne!(
            generate_trial(&config, 0).unwrap(),
            generate_trial(&config, 1).unwrap()
        );
    }

    #[test]
    fn one_state() {
        let (a, b) = generate_instance(&GeneratorConfig::new(1, 3, 1)).unwrap();
        for c in [a, b] {
            assert_eq!(c.family().len(), 1);
            assert_eq!(
                c.measure(Event::full(1)).unwrap(),
                &ProbMeasure::dirac(1, 0)
            );
        }
        let bad = GeneratorConfig::new(1, 3, 1).with_drop(Some(Hypothesis::OneClosed));
        assert!(matches!(generate_instance(&bad), Err(Error::Config(_))));
        assert!(generate_instance(&GeneratorConfig::new(0, 3, 1)).is_err());
    }

    #[test]
    fn drop_modes_violate_their_hypothesis() {
        for seed in 0..10 {
            let c = GeneratorConfig::new(4, seed, 1).with_drop(Some(Hypothesis::OneClosed));
            let (a, b) = generate_instance(&c).unwrap();
            assert!(!check_one_closed(&a).holds || !check_one_closed(&b).holds);
            assert!(local_consistency_all(&a, &b)
                .unwrap()
                .iter()
                .all(|c| c.holds));

            let c = GeneratorConfig::new(4, seed, 1).with_drop(Some(Hypothesis::Reflection));
            let (a, b) = generate_instance(&c).unwrap();
            assert!(
                !assess_agent(&a, true).unwrap().reflection.holds
                    || !assess_agent(&b, true).unwrap().reflection.holds
            );

            let c = GeneratorConfig::new(4, seed, 1).with_drop(Some(Hypothesis::Consistency));
            let (a, b) = generate_instance(&c).unwrap();
            assert!(local_consistency_all(&a, &b)
                .unwrap()
                .iter()
                .any(|c| !c.holds));
        }
    }

    #[test]
    fn fallbacks_violate_their_hypothesis() {
        let space = StateSpace::indexed(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = GeneratorConfig::new(3, 0, 1).with_drop(Some(Hypothesis::OneClosed));
        let (a, b) = fallback(&c, &space, &mut rng).unwrap();
        assert!(acceptable(&c, &a, &b).unwrap());
        for h in [Hypothesis::Reflection, Hypothesis::Consistency] {
            let c = GeneratorConfig::new(3, 0, 1).with_drop(Some(h));
            let (a, b) = fallback(&c, &space, &mut rng).unwrap();
            assert!(acceptable(&c, &a, &b).unwrap(), "{h}");
        }
        let c = GeneratorConfig::new(3, 0, 1);
        let (a, b) = fallback(&c, &space, &mut rng).unwrap();
        assert!(acceptable(&c, &a, &b).unwrap());
    }

    #[test]
    fn hypothesis_names_round_trip() {
        for h in [
            Hypothesis::Reflection,
            Hypothesis::OneClosed,
            Hypothesis::Consistency,
        ] {
            assert_eq!(h.to_string().parse::<Hypothesis>().unwrap(), h);
        }
        assert!("prior".parse::<Hypothesis>().is_err());
    }
}
