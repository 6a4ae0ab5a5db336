//! Integer-forcing linear MIMO receiver design.
//!
//! Given a real channel matrix `H` and a transmit power `P`, an
//! integer-forcing receiver picks a full-rank integer matrix `A` whose rows are
//! the lattice equations each decoder recovers, plus the projection `B` that
//! best aligns `B·H` with `A`. The bottleneck equation rate sets the total
//! rate, so the design problem is to make `max_m aₘᵀQaₘ` small.
//!
//! The crate provides:
//!
//! * [`ifcore`]: the quadratic form `Q`, optimal projections, equation
//!   rates and the ZF / MMSE baselines;
//! * [`sdm`]: candidate search along slowest-ascent lines of `aᵀQa`;
//! * [`select`]: greedy full-rank selection and the exhaustive reference;
//! * [`fieldrec`]: message recovery modulo a prime;
//! * [`harness`]: seeded Monte Carlo sweeps with CSV output;
//! * [`cli`] and [`svg`]: the `intforce` command-line tool.
//!
//! ```
//! use intforce::channel::ChannelRealization;
//! use intforce::linalg::RealMatrix;
//! use intforce::sdm::SearchConfig;
//! use intforce::select::{design_if, SearchMethod};
//!
//! let h = RealMatrix::from_rows(&[[1.0, 0.9], [0.8, 1.1]])?;
//! let ch = ChannelRealization::from_snr_db(h, 20.0)?;
//! let design = design_if(&ch, SearchConfig::new(2, 1)?, SearchMethod::Sdm)?;
//! assert!(design.success);
//! assert!(design.a.det()? != 0);
//! # Ok::<(), intforce::Error>(())
//! ```

pub mod channel;
pub mod cli;
mod error;
pub mod fieldrec;
pub mod harness;
pub mod ifcore;
pub mod linalg;
pub mod sdm;
pub mod select;
pub mod svg;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/greedy.md")]
    mod greedy {}
    #[doc = include_str!("../../../book/src/recovery.md")]
    mod recovery {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
