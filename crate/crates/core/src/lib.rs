//! Local skew information of bipartite quantum states: its Haar average and
//! variance over local unitaries, its minimum (local quantum uncertainty),
//! and the state families and samplers used to study them.

pub mod channels;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod moments;
pub mod states;
pub mod survey;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, StateVector};
pub use measures::{avsk, lqu_minimize, lqu_two_qubit, MeasureReport, Spectrum};
pub use moments::{second_moment, variance};
pub use states::{make_state, RandomSeed, StateFamily};
