//! Bipartite complementarity for truncated two-mode squeezed states.
//!
//! Three independent routes to the same numbers:
//!
//! * [`fock`]: amplitudes and operator matrix elements in a truncated Fock
//!   space (reduced states, Bloch-vector observables, quadrature moments).
//! * [`complementarity`]: closed forms in `xi = tanh r` and cut-off `t`.
//! * [`gaussian`]: variance-matrix algebra (symplectic spectra, PPT test,
//!   local symplectic reductions).
//!
//! [`homodyne`] samples quadratures from a Gaussian state and estimates the
//! variance matrix and I-concurrence from finite data.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix double precision, which the documented tolerances assume.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complementarity;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod homodyne;
pub mod scalar;

pub use complementarity::{
    approx_lhs_rhs, budget, fidelity_to_tmss, generate_sweep, iconcurrence_closed,
    iconcurrence_from_vm, predictability_closed, purity_curves, purity_discrepancy, reduced_purity,
    stepped_range, vm_elements_closed, vm_elements_quotient, vm_elements_series, xi_from_vm,
    ComplementarityBudget, Quantity, SweepAxis, SweepGrid, SweepRow, VmElements, XiFromVm,
};
pub use error::{Error, Result};
pub use fock::{
    concurrence_2qubit, make_truncated_tmss, quadrature_vm_oracle, triality_check,
    BipartitePureState, DensityMatrix, HioeEberlyBasis, Operator, Subsystem, Triality,
    TruncatedTmss,
};
pub use gaussian::{
    local_antisqueeze, symplectic_eigenvalues_eigensolver, vm_beamsplitter_state, vm_tmss,
    SymplecticSpectrum, SymplecticTransform, VarianceMatrix,
};
pub use homodyne::{
    estimate_complementarity, estimate_vm, sample, ComplementarityEstimate, SampleBatch, VmEstimate,
};
pub use scalar::Real;

pub type TruncatedTmss64 = TruncatedTmss<f64>;
pub type BipartitePureState64 = BipartitePureState<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type VarianceMatrix64 = VarianceMatrix<f64>;
pub type SymplecticTransform64 = SymplecticTransform<f64>;
pub type SymplecticSpectrum64 = SymplecticSpectrum<f64>;
pub type ComplementarityBudget64 = ComplementarityBudget<f64>;
pub type SweepGrid64 = SweepGrid<f64>;
pub type SweepRow64 = SweepRow<f64>;
pub type SampleBatch64 = SampleBatch<f64>;
pub type VmEstimate64 = VmEstimate<f64>;

pub type TruncatedTmss32 = TruncatedTmss<f32>;
pub type VarianceMatrix32 = VarianceMatrix<f32>;
