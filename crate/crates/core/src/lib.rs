//! Decision-tree decoding for quantum LDPC codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`sparse`] and [`gf2`]: index sets, sparse check matrices and GF(2) elimination.
//! * [`codes`]: color codes, bivariate bicycle codes, file formats and check colorings.
//! * [`bp`]: min-sum belief propagation with decimation and LPR buffering.
//! * [`bounds`]: cheap lower bounds on the syndrome height and an exact oracle.
//! * [`dtd`]: the decision-tree decoder and its exploration strategies.
//! * [`osd`]: the BP-OSD baseline.
//! * [`logicals`]: minimum-weight logical enumeration and distance certification.
//! * [`harness`]: noise sampling, Monte-Carlo evaluation and statistics.

pub mod bounds;
pub mod bp;
pub mod codes;
pub mod dtd;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod logicals;
pub mod osd;
pub mod sparse;

pub use error::{Error, Result};
pub use sparse::{syndrome_of, weight_of, CheckMatrix, DecodingProblem, FaultSet, IndexSet, Syndrome, WeightVector};
