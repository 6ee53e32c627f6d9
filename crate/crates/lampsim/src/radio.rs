//! Propagation, link budget and CSS reception resolution.

pub mod frame;
pub mod link;
pub mod reception;
pub mod tables;

pub use frame::{spectral_overlap, EmitterId, FrameKind, PayloadRef, PhyFrame};
pub use link::{LinkModel, Position};
pub use reception::{
    dbm_to_mw, mw_to_dbm, resolve_reception, CollisionDraws, Interference, LossReason,
    ReceptionOutcome, TargetView, Verdict,
};
pub use tables::{RejectionMatrix, SensitivityTable};
