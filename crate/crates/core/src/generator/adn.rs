use rand::seq::index;

use super::{emit_blocks, GenerateOptions, GeneratorError, NetworkSink, NodeBlock, Summary};
use crate::model::{LinkRecord, TimeGrid};
use crate::rng;
use crate::stochastic::{BoundedPowerLaw, Geometric};

/// Length of one activity-driven time step.
pub const ADN_SLOT_SECONDS: u32 = 3000;

/// Per-node activation probability per slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Constant(f64),
    PowerLaw(BoundedPowerLaw),
}

/// Links created per activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdnDegree {
    Fixed(u32),
    /// Continuation probability drawn per activation from the law, then a
    /// continuation-form geometric degree.
    Mixed(BoundedPowerLaw),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdnParams {
    pub potential: Potential,
    pub degree: AdnDegree,
    pub slot_steps: u32,
    pub n_nodes: u32,
    pub grid: TimeGrid,
    pub master_seed: u64,
}

impl AdnParams {
    /// Potentials with density proportional to `x^-2.95` on `[0.02, 0.18]`,
    /// 50-minute slots.
    pub fn defaults(degree: AdnDegree, n_nodes: u32, grid: TimeGrid, master_seed: u64) -> Result<Self, GeneratorError> {
        if !ADN_SLOT_SECONDS.is_multiple_of(grid.step_seconds()) {
            return Err(GeneratorError::Params(format!(
                "step of {} s does not divide the {ADN_SLOT_SECONDS} s activation slot",
                grid.step_seconds()
            )));
        }
        Ok(AdnParams {
            potential: Potential::PowerLaw(BoundedPowerLaw::new(1.95, 0.02, 0.18)?),
            degree,
            slot_steps: ADN_SLOT_SECONDS / grid.step_seconds(),
            n_nodes,
            grid,
            master_seed,
        })
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n_nodes < 2 {
            return Err(GeneratorError::Params("at least two nodes are required".into()));
        }
        if self.slot_steps == 0 {
            return Err(GeneratorError::Params("slot length must be positive".into()));
        }
        if let Potential::Constant(v) = self.potential {
            if !(0.0..=1.0).contains(&v) {
                return Err(GeneratorError::Params(format!("potential {v} is not in [0, 1]")));
            }
        }
        if self.degree == AdnDegree::Fixed(0) {
            return Err(GeneratorError::Params("links per activation must be positive".into()));
        }
        Ok(())
    }

    /// Number of slots; the last one may be cut short by the horizon.
    pub fn slots(&self) -> u32 {
        self.grid.horizon_steps().div_ceil(self.slot_steps)
    }

    pub fn mean_potential(&self) -> f64 {
        match self.potential {
            Potential::Constant(v) => v,
            Potential::PowerLaw(law) => law.mean(),
        }
    }
}

/// One node's activations. Activations in adjacent slots form one copy.
fn node_block(p: &AdnParams, node: u32, block: &mut NodeBlock) {
    let mut r = rng::stream(p.master_seed, &[rng::domain::ADN, node as u64]);
    let theta = match p.potential {
        Potential::Constant(v) => v,
        Potential::PowerLaw(law) => law.sample(&mut r),
    };
    if theta <= 0.0 {
        return;
    }
    let skip = Geometric::success(theta).expect("theta in (0, 1]");
    let horizon = p.grid.horizon_steps();
    let slots = p.slots() as u64;
    let others = (p.n_nodes - 1) as usize;
    let mut k = skip.sample(&mut r) - 1;
    while k < slots {
        let join = k as u32 * p.slot_steps;
        let leave = (join + p.slot_steps).min(horizon);
        let m = match p.degree {
            AdnDegree::Fixed(m) => m as usize,
            AdnDegree::Mixed(law) => {
                let lambda = law.sample(&mut r).min(1.0 - f64::EPSILON);
                Geometric::continuation(lambda).expect("lambda in [0, 1)").sample(&mut r).min(others as u64) as usize
            }
        }
        .min(others);
        let open = block.spans.len() > block.link_ends.len();
        match block.spans.last_mut() {
            Some(last) if open && last.end == join => last.end = leave,
            _ => {
                block.close_copy();
                block.open_copy(join, leave);
            }
        }
        for i in index::sample(&mut r, others, m) {
            let neighbour = if i as u32 >= node { i as u32 + 1 } else { i as u32 };
            block.push_link(LinkRecord { join, leave, neighbour });
        }
        k += skip.sample(&mut r);
    }
    block.close_copy();
}

pub(super) fn generate<S: NetworkSink>(p: &AdnParams, opts: &GenerateOptions, sink: &mut S) -> Result<Summary, GeneratorError> {
    p.validate()?;
    emit_blocks(p.n_nodes, opts.chunk_nodes, sink, |node, block| node_block(p, node, block))
}
