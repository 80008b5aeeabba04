//! Threshold-based behavioural distances for coalgebraic systems.
//!
//! Systems (Markov chains, labelled chains, generative transition systems,
//! fuzzy and metric transition systems, convex Markov chains) are compared
//! through 2-to-V predicate liftings. The crate decides `ε`-similarity with
//! the codensity game, computes distances, and extracts distinguishing
//! formulae in a two-valued threshold logic and a quantitative logic with
//! Sugeno modalities. All arithmetic is exact.

pub mod cli;
pub mod extract;
pub mod flow;
pub mod game;
pub mod gen;
pub mod logic;
pub mod modalities;
pub mod oracle;
pub mod solvers;
pub mod systems;
pub mod values;

pub use game::{check_bisimilar, check_similar, distance, solve_game, Distance, DistanceMode, GameConfig, GameSolution};
pub use modalities::{ModalityId, ModalitySet};
pub use systems::{load_system, System, SystemKind};
pub use values::Value;
