//! Open sub-categorical dynamics over finite motors.
//!
//! The modules build on each other: [`category`] for motors and functors,
//! [`dynamics`] for relational dynamics and their property checkers,
//! [`temporal`] for clocks and realizations, [`open`] for multi- and open
//! dynamics, [`family`] for interactions and dynamic families, and
//! [`generation`] for the dynamics a family generates.

pub mod category;
pub mod dynamics;
pub mod family;
pub mod fixtures;
pub mod generation;
pub mod open;
pub mod random;
pub mod temporal;
