//! Decomposable, cb, δ-, Δ- and injective norms; cone membership for the two
//! tensor cones; witness constructions.
//!
//! Tensor shapes: the δ routes work on `A^* ⊗ B`, the Δ routes on `A ⊗ B^*`.
//! Both norms are symmetric in the two legs, so a tensor in the mirrored
//! shape is flipped first.

mod big_delta;
mod cb;
mod cone;
mod dec;
mod delta;
mod lmi;
mod tensor;
mod witness;

pub use big_delta::{
    big_delta_norm, big_delta_norm_with, big_delta_primal_upper, big_delta_primal_upper_with,
    factorization_upper, DeltaBracket, PrimalUpper,
};
pub use cb::{apply_amplified, cb_norm, cb_norm_problem, cb_norm_with, cb_power_lower_bound, CbNorm};
pub use cone::{
    cone_member_big_delta, cone_member_big_delta_with, cone_member_delta, BigDeltaMembership,
    FactorizationWitness,
};
pub use dec::{
    dec_ball_sup, dec_norm, dec_norm_problem, dec_norm_with, decompose, decompose_with, DecBallSup,
    DecNorm, DecWitness,
};
pub use delta::{apply_pair, delta_norm, delta_norm_with, delta_sampled_lower, inj_norm, inj_norm_with, DeltaNorm};
pub use tensor::TensorElement;
pub use witness::{basis_block, elementary_nonempty_witness, nonempty_witness, NonemptyWitness};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sdp::{SdpSolution, SolverOptions, Status};

/// Knobs shared by the norm routines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    pub solver: SolverOptions,
    /// Seed for sampled bounds and restarts.
    pub seed: u64,
    /// Random c.c.p. pairs for the sampled δ lower bound.
    pub samples: usize,
    /// Random restarts of the alternating maximizations.
    pub restarts: usize,
    /// Iteration cap of each alternating maximization.
    pub max_alternations: usize,
    /// Relative improvement below which an alternation stops.
    pub alternation_tol: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            seed: 0,
            samples: 256,
            restarts: 4,
            max_alternations: 50,
            alternation_tol: 1e-7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub status: Status,
    pub iterations: usize,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

impl SolverStats {
    /// Worst of two runs, for routines that solve several programs.
    pub fn merge(self, other: SolverStats) -> SolverStats {
        SolverStats {
            status: if self.status == Status::Optimal { other.status } else { self.status },
            iterations: self.iterations + other.iterations,
            gap: self.gap.max(other.gap),
            primal_infeasibility: self.primal_infeasibility.max(other.primal_infeasibility),
            dual_infeasibility: self.dual_infeasibility.max(other.dual_infeasibility),
        }
    }
}

/// Accepts optimal solutions, and iteration-capped ones that are already
/// accurate to 1e-6; anything else is a solver failure.
pub(crate) fn check_solution(sol: &SdpSolution) -> Result<SolverStats> {
    let stats = SolverStats {
        status: sol.status,
        iterations: sol.iterations,
        gap: sol.gap,
        primal_infeasibility: sol.primal_infeasibility,
        dual_infeasibility: sol.dual_infeasibility,
    };
    let usable = match sol.status {
        Status::Optimal => true,
        Status::MaxIter => {
            sol.gap <= 1e-6 && sol.primal_infeasibility <= 1e-6 && sol.dual_infeasibility <= 1e-6
        }
        Status::Infeasible | Status::Unbounded => false,
    };
    if usable {
        Ok(stats)
    } else {
        Err(Error::solver(
            sol.iterations,
            sol.primal_infeasibility.max(sol.dual_infeasibility).max(sol.gap),
            format!("norm program ended with status {:?}", sol.status),
        ))
    }
}
