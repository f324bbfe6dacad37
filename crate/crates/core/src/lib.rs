//! Exact fusion-ring computations for quantum subgroups: coset classes,
//! κ-invariants, the central Hecke algebra and its modular element.
#![no_std]

extern crate alloc;

pub mod check;
pub mod constructors;
pub mod cosets;
pub mod error;
pub mod faithful;
pub mod hecke;
pub mod kappa;
pub mod linalg;
pub mod object;
pub mod qdouble;
pub mod ring;
pub mod scalar;
pub mod subgroup;

pub use check::CheckReport;
pub use cosets::{coset_classes, coset_counts, commensurator, is_hecke_pair, ClassStatus, CosetData, HeckeVerdict, Side};
pub use error::{Error, Result};
pub use hecke::{operator_norm_estimate, CentralHeckeElement, HeckePair, OperatorMatrix, StructureTable};
pub use kappa::{check_class_invariance, kappa, kappa_self, rt_scan, KappaTable};
pub use object::{Decomposition, ObjectId, SimpleObject};
pub use ring::{validate_ring, AxiomCheck, FusionRing, RingExt, SharedRing, ValidationReport};
pub use scalar::Scalar;
pub use subgroup::{close_subgroup, ClosureCertificate, SubgroupRule, SubgroupSet, WholeRing};
