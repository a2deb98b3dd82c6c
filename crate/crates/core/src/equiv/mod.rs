//! Positive-weight forms, necessary-condition screens and the decision
//! procedure for unitary equivalence through diagonal-form intertwiners.

mod conjugator;
mod decide;
mod gram;
mod intertwiner;
mod positive;
mod screens;

pub use conjugator::{solve_joint_conjugator, solve_joint_conjugator_with, ConjugatorOutcome, SolverOptions};
pub use decide::{
    decide_diagonal_equivalence, decide_over_offsets, DecideConfig, EquivalenceVerdict, Obstruction, ObstructionKind,
    OffsetDecision,
};
pub use gram::{gram_chains, Direction, GramChain, GramChains};
pub use intertwiner::{construct_diagonal_intertwiner, DiagonalWitness, WitnessScope};
pub use positive::{positive_form, PositiveForm};
pub use screens::{eigen_moduli_screen, norm_mismatch, norm_offset_screen};
