use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{InitialCondition, SimConfig};
use super::run::Sample;
use super::SimError;
use crate::economy::{inequality, x_from_chi, Group};
use crate::interaction::{InteractionDistribution, Outcomes, Relation, Stance};
use crate::strategy::Strategy;
use crate::utility::logistic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    One,
    Two,
}

impl Party {
    fn index(self) -> usize {
        match self {
            Party::One => 0,
            Party::Two => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub group: Group,
    pub party: Party,
    pub strategy: Strategy,
}

impl Individual {
    #[inline]
    fn class(&self) -> usize {
        2 * self.group.index() + self.party.index()
    }
}

/// State dumped when a run hits a non-finite utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub config: SimConfig,
    pub events: u64,
    pub theta: f64,
    pub individuals: Vec<Individual>,
}

/// Probability that a focal individual imitates a model whose utility
/// exceeds its own by `advantage`.
#[inline]
pub fn copy_probability(selection: f64, advantage: f64) -> f64 {
    logistic(selection * advantage)
}

const CLASS_GROUP: [Group; 4] = [Group::One, Group::One, Group::Two, Group::Two];

/// Class reached from class `k` by following `rel`.
#[inline]
fn target_class(k: usize, rel: Relation) -> usize {
    let (g, q) = (k / 2, k % 2);
    let g = if rel.same_group() { g } else { 1 - g };
    let q = if rel.same_party() { q } else { 1 - q };
    2 * g + q
}

type StrategyKey = (u64, u64);

fn key(s: &Strategy) -> StrategyKey {
    let (g, p) = s.components();
    (g.to_bits(), p.to_bits())
}

/// Individuals plus the per-class aggregates needed for O(1) utilities.
#[derive(Debug, Clone)]
pub struct Population {
    config: SimConfig,
    individuals: Vec<Individual>,
    class_size: [usize; 4],
    /// Relation counts seen from each class, as weights for the distribution.
    shares: [[f64; 4]; 4],
    /// `[class][relation]`: sum of members' interaction probabilities.
    choice_sum: [[f64; 4]; 4],
    /// `[class][relation]`: sum of members' acceptance probabilities.
    accept_sum: [[f64; 4]; 4],
    theta: f64,
    outcomes: [Outcomes; 2],
    events: u64,
    census: BTreeMap<StrategyKey, usize>,
}

impl Population {
    /// Assign parties at the configured sorting and set initial strategies.
    pub fn new(config: &SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let n = config.n_per_group;
        let x = x_from_chi(config.chi)?;
        let aligned = ((x * n as f64).floor() as usize).min(n);

        let mut individuals = Vec::with_capacity(2 * n);
        for group in [Group::One, Group::Two] {
            let (home, away) = match group {
                Group::One => (Party::One, Party::Two),
                Group::Two => (Party::Two, Party::One),
            };
            for k in 0..n {
                let party = if k < aligned { home } else { away };
                individuals.push(Individual {
                    group,
                    party,
                    strategy: Strategy::Scalar(0.0),
                });
            }
        }

        let mut class_size = [0usize; 4];
        for ind in &individuals {
            class_size[ind.class()] += 1;
        }
        match config.initial {
            InitialCondition::Uniform(s) => individuals.iter_mut().for_each(|i| i.strategy = s),
            InitialCondition::Mixed {
                fraction,
                minority,
                majority,
            } => {
                let mut seen = [0usize; 4];
                for ind in individuals.iter_mut() {
                    let k = ind.class();
                    let quota = (fraction * class_size[k] as f64).round() as usize;
                    ind.strategy = if seen[k] < quota { minority } else { majority };
                    seen[k] += 1;
                }
            }
        }

        let mut shares = [[0.0; 4]; 4];
        for (k, row) in shares.iter_mut().enumerate() {
            for rel in Relation::ALL {
                row[rel.index()] = class_size[target_class(k, rel)] as f64;
            }
        }

        let mut pop = Self {
            config: *config,
            individuals,
            class_size,
            shares,
            choice_sum: [[0.0; 4]; 4],
            accept_sum: [[0.0; 4]; 4],
            theta: config.econ.theta,
            outcomes: [Outcomes::new(&config.econ, &config.shape, Group::One, config.econ.theta); 2],
            events: 0,
            census: BTreeMap::new(),
        };
        pop.rebuild();
        Ok(pop)
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn individuals(&self) -> &[Individual] {
        &self.individuals
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn class_sizes(&self) -> [usize; 4] {
        self.class_size
    }

    /// Whether every individual plays the same strategy.
    pub fn is_monomorphic(&self) -> bool {
        self.census.len() == 1
    }

    #[inline]
    fn stance(&self, s: &Strategy) -> Stance {
        let (group, party) = s.components();
        Stance {
            logic: self.config.logic,
            group,
            party,
        }
    }

    #[inline]
    fn distribution(&self, k: usize, s: &Strategy) -> Option<InteractionDistribution> {
        self.stance(s).distribution(&self.shares[k])
    }

    /// Mean acceptance of the members reached from class `k` via `rel`.
    #[inline]
    fn acceptance_seen_from(&self, k: usize) -> [f64; 4] {
        Relation::ALL.map(|rel| {
            let t = target_class(k, rel);
            match self.class_size[t] {
                0 => 0.0,
                n => self.accept_sum[t][rel.index()] / n as f64,
            }
        })
    }

    fn add(&mut self, k: usize, s: &Strategy, sign: f64) {
        let stance = self.stance(s);
        let dist = stance.distribution(&self.shares[k]);
        for rel in Relation::ALL {
            self.accept_sum[k][rel.index()] += sign * stance.acceptance(rel);
            if let Some(d) = &dist {
                self.choice_sum[k][rel.index()] += sign * d.get(rel);
            }
        }
    }

    /// Recompute every aggregate from scratch. Incremental updates drift by
    /// rounding, so runs resynchronize at each sample.
    pub fn rebuild(&mut self) {
        self.choice_sum = [[0.0; 4]; 4];
        self.accept_sum = [[0.0; 4]; 4];
        self.census.clear();
        for i in 0..self.individuals.len() {
            let ind = self.individuals[i];
            self.add(ind.class(), &ind.strategy, 1.0);
            *self.census.entry(key(&ind.strategy)).or_default() += 1;
        }
        self.update_environment();
    }

    /// Replace the strategy of individual `i`, keeping aggregates current.
    /// The environment is not refreshed; call [`Population::update_environment`].
    pub fn set_strategy(&mut self, i: usize, strategy: Strategy) {
        let old = self.individuals[i];
        if old.strategy == strategy {
            return;
        }
        let k = old.class();
        self.add(k, &old.strategy, -1.0);
        self.add(k, &strategy, 1.0);
        let old_key = key(&old.strategy);
        if let Some(c) = self.census.get_mut(&old_key) {
            *c -= 1;
            if *c == 0 {
                self.census.remove(&old_key);
            }
        }
        *self.census.entry(key(&strategy)).or_default() += 1;
        self.individuals[i].strategy = strategy;
    }

    /// Population mean of the expected gross benefit per interaction attempt.
    pub fn mean_gross_benefit(&self) -> f64 {
        let mut total = 0.0;
        for k in 0..4 {
            let accept = self.acceptance_seen_from(k);
            let out = &self.outcomes[CLASS_GROUP[k].index()];
            for rel in Relation::ALL {
                let (q, gross) = if rel.same_group() {
                    (out.q_in, out.gross_in)
                } else {
                    (out.q_out, out.gross_out)
                };
                total += self.choice_sum[k][rel.index()] * accept[rel.index()] * q * gross;
            }
        }
        total / self.individuals.len() as f64
    }

    /// Refresh the environment (public good when feedback is on) and the
    /// outcome utilities that depend on it. Returns the new environment.
    pub fn update_environment(&mut self) -> f64 {
        let econ = &self.config.econ;
        let shape = &self.config.shape;
        self.theta = if self.config.feedback {
            econ.public_environment(self.mean_gross_benefit())
        } else {
            econ.theta
        };
        self.outcomes = [
            Outcomes::new(econ, shape, Group::One, self.theta),
            Outcomes::new(econ, shape, Group::Two, self.theta),
        ];
        self.theta
    }

    /// Expected utility of individual `i` under the current composition.
    pub fn expected_utility(&self, i: usize) -> f64 {
        let ind = &self.individuals[i];
        let k = ind.class();
        let dist = self.distribution(k, &ind.strategy);
        self.outcomes[ind.group.index()].expected_utility(dist.as_ref(), &self.acceptance_seen_from(k))
    }

    fn checked_utility(&self, i: usize) -> Result<f64, SimError> {
        let w = self.expected_utility(i);
        if w.is_finite() {
            Ok(w)
        } else {
            Err(SimError::NonFinite {
                event: self.events,
                individual: i,
                value: w,
                snapshot: Box::new(self.snapshot()),
            })
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            config: self.config,
            events: self.events,
            theta: self.theta,
            individuals: self.individuals.clone(),
        }
    }

    /// One copying event, possibly followed by a mutation.
    pub fn copy_event<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(), SimError> {
        let n = self.individuals.len();
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let w_i = self.checked_utility(i)?;
        let w_j = self.checked_utility(j)?;
        let mut changed = false;
        if rng.random::<f64>() < copy_probability(self.config.selection, w_j - w_i) {
            let model = self.individuals[j].strategy;
            if model != self.individuals[i].strategy {
                self.set_strategy(i, model);
                changed = true;
            }
        }
        if self.config.mutation_rate > 0.0 && rng.random::<f64>() < self.config.mutation_rate {
            let k = rng.random_range(0..n);
            let step = if rng.random::<bool>() {
                self.config.mutation_size
            } else {
                -self.config.mutation_size
            };
            let nudge = |v: f64| (v + step).clamp(0.0, 1.0);
            let mutated = match self.individuals[k].strategy {
                Strategy::Scalar(p) => Strategy::Scalar(nudge(p)),
                Strategy::TwoDim { group, party } => {
                    if rng.random::<bool>() {
                        Strategy::TwoDim { group: nudge(group), party }
                    } else {
                        Strategy::TwoDim { group, party: nudge(party) }
                    }
                }
            };
            if mutated != self.individuals[k].strategy {
                self.set_strategy(k, mutated);
                changed = true;
            }
        }
        if changed && self.config.feedback {
            self.update_environment();
        }
        self.events += 1;
        Ok(())
    }

    /// Population summary at the current event.
    pub fn observe(&self) -> Sample {
        let n = self.config.n_per_group as f64;
        let mut p = [0.0; 2];
        let mut w = [0.0; 2];
        for (i, ind) in self.individuals.iter().enumerate() {
            let g = ind.group.index();
            p[g] += ind.strategy.primary();
            w[g] += self.expected_utility(i);
        }
        let (w1, w2) = (w[0] / n, w[1] / n);
        let gap = match self.config.econ.richer_group() {
            Some(Group::One) => inequality(w1, w2),
            Some(Group::Two) => inequality(w2, w1),
            None => inequality(w1.max(w2), w1.min(w2)),
        };
        Sample {
            event: self.events,
            mean_p: (p[0] + p[1]) / (2.0 * n),
            mean_p_g1: p[0] / n,
            mean_p_g2: p[1] / n,
            theta: self.theta,
            mean_w: (w1 + w2) / 2.0,
            mean_w_g1: w1,
            mean_w_g2: w2,
            inequality: gap,
        }
    }
}
