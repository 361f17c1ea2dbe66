use rand::Rng;

use super::{DegreeModel, GeneratorError, ModelParams};
use crate::rng;
use crate::stochastic::{equilibrium_probs, Geometric, TruncatedGeometric};

/// What a node's random stream produces, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivityEvent {
    /// A new active copy `[start, end)`, truncated at the horizon.
    Copy { start: u32, end: u32 },
    /// A link of the most recent copy that joins before the horizon.
    Link { join: u32, leave: u32 },
}

/// Per-node sampler of activity and link timing.
///
/// Each node draws, from its own stream: its continuation probability
/// (heterogeneous mode), its initial state, then alternating inactive and
/// active periods. Every copy draws its degree `d` (capped at `n - 1`) and,
/// per link, a creation delay bounded by the copy length plus `delta` and a
/// duration. Links that would join at or after the horizon are dropped.
#[derive(Debug, Clone)]
pub struct NodeSimulator {
    params: ModelParams,
    pi1: f64,
    active: Geometric,
    inactive: Geometric,
    duration: Geometric,
}

impl NodeSimulator {
    pub fn new(params: &ModelParams) -> Result<Self, GeneratorError> {
        let (_, pi1) = equilibrium_probs(params.rho, params.q)?;
        Ok(NodeSimulator {
            params: params.clone(),
            pi1,
            active: Geometric::success(params.rho)?,
            inactive: Geometric::success(params.q)?,
            duration: Geometric::success(params.p_b)?,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Replays `node`'s stream; returns its continuation probability.
    pub fn run<F: FnMut(ActivityEvent)>(&self, node: u32, mut emit: F) -> f64 {
        let p = &self.params;
        let horizon = p.grid.horizon_steps() as u64;
        let cap = (p.n_nodes - 1) as u64;
        let mut r = rng::stream(p.master_seed, &[rng::domain::NODE_ACTIVITY, node as u64]);
        let lambda = match p.degree {
            DegreeModel::Homogeneous { lambda } => lambda,
            DegreeModel::Heterogeneous(law) => law.sample(&mut r),
        };
        let degree = Geometric::continuation(lambda.min(1.0 - f64::EPSILON)).expect("lambda in [0, 1)");
        let mut active = r.random::<f64>() < self.pi1;
        let mut t: u64 = 0;
        loop {
            if !active {
                t += self.inactive.sample(&mut r);
            }
            if t >= horizon {
                break;
            }
            let full_end = t + self.active.sample(&mut r);
            let end = full_end.min(horizon);
            emit(ActivityEvent::Copy { start: t as u32, end: end as u32 });
            let d = degree.sample(&mut r).min(cap);
            let bound = end - t + p.delta as u64;
            let delay = TruncatedGeometric::new(p.p_c, bound).expect("positive bound");
            for _ in 0..d {
                let join = t + delay.sample(&mut r);
                let leave = join + self.duration.sample(&mut r);
                if join < horizon {
                    emit(ActivityEvent::Link { join: join as u32, leave: leave.min(u32::MAX as u64) as u32 });
                }
            }
            if full_end >= horizon {
                break;
            }
            t = full_end;
            active = false;
        }
        lambda
    }
}

/// Fraction of node-steps covered by copies, over nodes `0..n`.
pub fn equilibrium_active_fraction(sim: &NodeSimulator, nodes: u32) -> f64 {
    let mut covered = 0u64;
    for node in 0..nodes {
        sim.run(node, |e| {
            if let ActivityEvent::Copy { start, end } = e {
                covered += (end - start) as u64;
            }
        });
    }
    covered as f64 / (nodes as f64 * sim.params().grid.horizon_steps() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TimeGrid;

    #[test]
    fn unit_rho_gives_single_step_copies() {
        let mut p = ModelParams::defaults(50, TimeGrid::new(300, 1).unwrap(), 1);
        p.rho = 1.0;
        p.q = 0.2;
        let sim = NodeSimulator::new(&p).unwrap();
        let mut n = 0;
        for node in 0..50 {
            let mut last_end = None;
            sim.run(node, |e| {
                if let ActivityEvent::Copy { start, end } = e {
                    assert_eq!(end - start, 1);
                    if let Some(le) = last_end {
                        assert!(start > le);
                    }
                    last_end = Some(end);
                    n += 1;
                }
            });
        }
        assert!(n > 0);
    }

    #[test]
    fn immediate_creation_without_delta() {
        let mut p = ModelParams::defaults(20, TimeGrid::new(300, 1).unwrap(), 2);
        p.delta = 0;
        p.p_c = 1.0;
        p.q = 0.1;
        let sim = NodeSimulator::new(&p).unwrap();
        for node in 0..20 {
            let mut start = 0;
            sim.run(node, |e| match e {
                ActivityEvent::Copy { start: s, .. } => start = s,
                ActivityEvent::Link { join, .. } => assert_eq!(join, start),
            });
        }
    }
}
