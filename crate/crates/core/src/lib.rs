//! Hodge cohomology of finite metric measure spaces at a fixed scale.
//!
//! The pipeline is: build a [`MetricMeasureSpace`], enumerate a
//! [`ScaleComplex`] at scale `α`, assemble weighted operators, and extract
//! harmonic forms and Betti numbers with [`hodge`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
pub mod error;
pub mod hodge;
pub mod metric;
pub mod operators;
pub mod sweep;

pub use complex::{
    build_complex, build_rips_complex, build_witness_complex, simplex_key, slice_set, ComplexMode, PrescribedComplex,
    ScaleComplex, Simplex,
};
pub use error::{Error, Result};
pub use hodge::{
    betti_numbers, harmonic_basis, harmonic_representative, hodge_decompose, hodge_report, volume_cocycle_circle,
    Decomposition, HarmonicSpace, HodgeOptions, HodgeReport,
};
pub use metric::{
    gen_circle, gen_cluster_space, gen_interval_with_atom, gen_square, gen_tower_complex, validate_space, MeasureSpec,
    MetricKind, MetricMeasureSpace, SpaceOptions, ValidationReport,
};
pub use operators::{
    boundary_matrix, coboundary_matrix, dirichlet_energy, kernel_laplacian0, laplacian_matrix, normalized_laplacian0,
    Cochain, Kernel, Support, WeightedOperator,
};
pub use sweep::{
    betti_sweep, cluster_series, cluster_sv_decay, corestriction_rank, interval_regularity_experiment, BettiProfile,
    CorestrictionResult,
};
