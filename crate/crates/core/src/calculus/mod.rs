//! The formal engine that re-executes the constant-term derivations:
//! expansion along the rank-one parabolic, Laurent grading with log terms,
//! bucket extraction, substitution of established identities, and residual
//! checking against closed-form constants.

pub mod atom;
pub mod grade;
pub mod kb;
pub mod verify;

pub use atom::{Atom, SymSeries, SymbolicCoeff};
pub use grade::{constant_term, grade, CoeffTable, ExpansionTerm, Family, GradedExpansion};
pub use kb::{static_pole_order, KnowledgeBase, PoleTable, RuleSet};
pub use verify::{verify_identity, VerificationReport};
