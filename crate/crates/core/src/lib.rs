pub mod arith;
pub mod closed_form;
pub mod constants;
pub mod context;
pub mod error;
pub mod hunt;
pub mod partition;
pub mod pslq;
pub mod rational;
pub mod registry;
pub mod series;
pub mod verify;
