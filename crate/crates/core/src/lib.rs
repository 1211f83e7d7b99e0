// Guards of the form !(x > 0.0) are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod extremum;
pub mod fracops;
pub mod mlf;
pub mod par;
pub mod principles;
pub mod report;
pub mod solver;
pub mod special;
