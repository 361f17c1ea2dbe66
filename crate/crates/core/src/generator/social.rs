use indexmap::IndexSet;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use rustc_hash::FxBuildHasher;

use super::GeneratorError;

type ContactSet = IndexSet<u32, FxBuildHasher>;

const REPEAT_TRIES: usize = 32;
const TWO_HOP_TRIES: usize = 16;
const GLOBAL_TRIES: usize = 64;

enum GlobalPool {
    Uniform,
    Weighted { alias: WeightedAliasIndex<f64>, weights: Vec<f64>, max: f64 },
}

/// Contact memory of the reinforcement process.
///
/// A host with `n_t` contacts repeats one of them with probability
/// `n_t / (n_t + eta)` and otherwise meets a new node. A new node is, with
/// probability `mu`, a contact of one of the host's contacts (found by a
/// two-step walk), else a draw from the whole population. In heterogeneous
/// mode both draws favour nodes by their continuation probability; the walk
/// accepts a candidate with probability `w / max w`. Contact sets only
/// grow and never contain their owner.
pub struct SocialState {
    contacts: Vec<ContactSet>,
    pool: GlobalPool,
    n: u32,
    eta: f64,
    mu: f64,
    mark: Vec<u32>,
    epoch: u32,
    scratch: Vec<u32>,
}

impl SocialState {
    pub fn new(n: u32, eta: f64, mu: f64, weights: Option<&[f64]>) -> Result<Self, GeneratorError> {
        let pool = match weights {
            None => GlobalPool::Uniform,
            Some(w) => {
                if w.len() != n as usize {
                    return Err(GeneratorError::Params("one weight per node is required".into()));
                }
                let alias = WeightedAliasIndex::new(w.to_vec())
                    .map_err(|e| GeneratorError::Params(format!("global pool weights: {e}")))?;
                GlobalPool::Weighted { alias, weights: w.to_vec(), max: w.iter().copied().fold(0.0, f64::max) }
            }
        };
        Ok(SocialState {
            contacts: (0..n).map(|_| ContactSet::default()).collect(),
            pool,
            n,
            eta,
            mu,
            mark: vec![0; n as usize],
            epoch: 0,
            scratch: Vec::new(),
        })
    }

    pub fn contacts(&self, node: u32) -> &ContactSet {
        &self.contacts[node as usize]
    }

    /// Probability that the next slot of `host` repeats a known contact.
    pub fn repeat_probability(&self, host: u32) -> f64 {
        let n_t = self.contacts[host as usize].len() as f64;
        n_t / (n_t + self.eta)
    }

    fn is_chosen(&self, x: u32) -> bool {
        self.mark[x as usize] == self.epoch
    }

    /// Picks `d` distinct neighbours for one copy of `host` into `out`.
    pub fn select_neighbours<R: Rng + ?Sized>(
        &mut self,
        host: u32,
        d: usize,
        rng: &mut R,
        out: &mut Vec<u32>,
    ) -> Result<(), GeneratorError> {
        if d as u64 >= self.n as u64 {
            return Err(GeneratorError::Params(format!("degree {d} needs more than {} other nodes", self.n - 1)));
        }
        out.clear();
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.fill(0);
            self.epoch = 1;
        }
        for _ in 0..d {
            let n_t = self.contacts[host as usize].len();
            // every chosen node is in the contact set, so `n_t - out.len()` are available
            let available = n_t - out.len();
            let repeat = rng.random::<f64>() < n_t as f64 / (n_t as f64 + self.eta);
            let pick = if repeat && available > 0 {
                self.pick_repeat(host, rng)
            } else {
                match self.pick_new(host, rng) {
                    Some(x) => {
                        self.contacts[host as usize].insert(x);
                        x
                    }
                    None => self.pick_repeat(host, rng),
                }
            };
            self.mark[pick as usize] = self.epoch;
            out.push(pick);
        }
        Ok(())
    }

    fn pick_repeat<R: Rng + ?Sized>(&mut self, host: u32, rng: &mut R) -> u32 {
        let set = &self.contacts[host as usize];
        for _ in 0..REPEAT_TRIES {
            let x = set[rng.random_range(0..set.len())];
            if !self.is_chosen(x) {
                return x;
            }
        }
        self.scratch.clear();
        self.scratch.extend(set.iter().copied().filter(|&x| self.mark[x as usize] != self.epoch));
        self.scratch[rng.random_range(0..self.scratch.len())]
    }

    fn is_new(&self, host: u32, x: u32) -> bool {
        x != host && !self.contacts[host as usize].contains(&x)
    }

    fn pick_new<R: Rng + ?Sized>(&mut self, host: u32, rng: &mut R) -> Option<u32> {
        let own = &self.contacts[host as usize];
        if !own.is_empty() && rng.random::<f64>() < self.mu {
            for _ in 0..TWO_HOP_TRIES {
                let c = own[rng.random_range(0..own.len())];
                let theirs = &self.contacts[c as usize];
                if theirs.is_empty() {
                    continue;
                }
                let x = theirs[rng.random_range(0..theirs.len())];
                if let GlobalPool::Weighted { weights, max, .. } = &self.pool {
                    if rng.random::<f64>() * max >= weights[x as usize] {
                        continue;
                    }
                }
                if self.is_new(host, x) {
                    return Some(x);
                }
            }
        }
        for _ in 0..GLOBAL_TRIES {
            let x = match &self.pool {
                GlobalPool::Uniform => rng.random_range(0..self.n),
                GlobalPool::Weighted { alias, .. } => alias.sample(rng) as u32,
            };
            if self.is_new(host, x) {
                return Some(x);
            }
        }
        // dense contact set: enumerate what is left
        self.scratch.clear();
        self.scratch.extend((0..self.n).filter(|&x| x != host && !self.contacts[host as usize].contains(&x)));
        if self.scratch.is_empty() {
            return None;
        }
        Some(match &self.pool {
            GlobalPool::Uniform => self.scratch[rng.random_range(0..self.scratch.len())],
            GlobalPool::Weighted { weights, .. } => {
                let total: f64 = self.scratch.iter().map(|&x| weights[x as usize]).sum();
                let mut u = rng.random::<f64>() * total;
                let mut pick = *self.scratch.last().unwrap();
                for &x in &self.scratch {
                    u -= weights[x as usize];
                    if u < 0.0 {
                        pick = x;
                        break;
                    }
                }
                pick
            }
        })
    }
}
