//! Simplex-embeddability of accessible GPT fragments.
//!
//! A fragment is a finite list of state and effect vectors whose inner
//! products are outcome probabilities. The fragment admits a noncontextual
//! ontological model iff it embeds in a simplex, which is decided by a linear
//! program over the facet inequalities of the state and effect cones. With a
//! noise map in the program the optimum is the least noise weight at which the
//! noisy fragment becomes embeddable, its robustness.
//!
//! The [`scenarios`] module builds the minimum-error state discrimination
//! family in the ZX-plane representation of a qubit and supplies the closed
//! forms that the linear program is checked against.

pub mod cone;
pub mod embedding;
pub mod error;
pub mod fragment;
mod linalg;
pub mod lp;
pub mod noise;
pub mod numfmt;
pub mod scenarios;

pub use nalgebra;

pub use cone::{cone_contains, enumerate_facets, enumerate_facets_bruteforce_3d, ConeFacets};
pub use embedding::{
    assemble_embedding_lp, embeddable_at, extract_model, is_simplex_embeddable,
    min_noise_for_embedding, EmbeddingSolution, EmbeddingStatus, NoncontextualModel,
};
pub use error::{ConeError, EmbeddingError, FragmentError, LpError, ScenarioError};
pub use fragment::{
    apply_noise_to_effects, apply_noise_to_states, compute_inclusion_maps, pair_probability,
    validate_fragment, GptFragment, InclusionMaps, RealVector, ValidationReport, Violation,
};
pub use lp::{LinearProgram, LpSolution, LpStatus};
pub use noise::{dephasing_matrix, depolarizing_matrix, NoiseKind, NoiseMap};
pub use scenarios::{build_mesd, DataTable, MesdParams, Sce};

/// Tolerance for rank, membership and sign decisions unless a call overrides it.
pub const DEFAULT_TOL: f64 = 1e-9;
