//! End-node (lighting controller) MAC state machine, message profiles and
//! the switchable firmware defects observed in the field.

pub mod node;
pub mod profile;

pub use node::{
    Device, DeviceAction, DeviceCtx, DeviceEvent, DownlinkMeta, JoinState, RxWindow, TxPlan,
    UplinkMeta, WakeKind,
};
pub use profile::{Activation, DefectFlags, DeviceProfile, MessageKind, PowerWindow};
