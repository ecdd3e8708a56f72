//! Analysis and optimization of dynamical distribution networks on
//! weighted graphs.
//!
//! The crate revolves around the linear network system
//! `xdot = -L_w x + E d`, `y = E^T x`, where `L_w` is the weighted graph
//! Laplacian and `E` collects in/outflow ports. It provides:
//!
//! - [`graph`]: graphs, incidence and Laplacian matrices, connectivity,
//!   and port validation;
//! - [`spectral`]: a deterministic dense symmetric eigensolver,
//!   pseudo-inverse, and PSD tests under one tolerance policy;
//! - [`hinf`]: the H-infinity norm of the network system, the gain LMI
//!   (block and Schur routes), the Riccati test for state-space symmetric
//!   systems, frequency sweeps, and the connectivity-based gain bound;
//! - [`signed`]: signed-Laplacian analysis via effective resistance,
//!   including the two-condition PSD criterion and the critical scaling
//!   of negative weights;
//! - [`allocate`]: optimal weight allocation on the budget simplex by
//!   projected subgradient descent, with a brute-force lattice oracle for
//!   small problems.

pub mod allocate;
pub mod graph;
pub mod hinf;
pub mod signed;
pub mod spectral;

pub use allocate::{
    grid_oracle, objective, project_simplex, solve, subgradient, AllocateError,
    AllocationProblem, AllocationResult, SolverOptions,
};
pub use graph::{
    port_matrix, validate_ports, ComponentMap, Edge, Graph, GraphError, Port, PortMatrix,
    PortValidation,
};
pub use hinf::{
    argmax_c_check, corollary_bound, deflated_system, freq_response, hinf_measured, hinf_network,
    hinf_sweep, hinf_symmetric, lmi_feasible, lmi_feasible_schur, log_grid, riccati_check,
    FrequencyResponse, GainCertificate, HinfError, LmiOutcome, NetworkSystem, RiccatiOutcome,
    SweepResult, SymmetricSystem,
};
pub use signed::{
    critical_scale, effective_resistance, psd_check, split_signed, PsdVerdict, ResistanceMatrix,
    SignedError, SignedSplit,
};
pub use spectral::{
    is_psd, pseudo_inverse, sym_eig, PsdOutcome, SpectralDecomposition, SpectralError,
    TolerancePolicy,
};
