//! Exact-arithmetic lattice toolkit: integral quadratic forms, short-vector
//! enumeration, a Kummer-surface construction layer and the numerical side of
//! stability conditions, all over arbitrary-precision rationals.

pub mod enumerate;
pub mod exact;
pub mod kummer;
pub mod lattice;
pub mod mat;
pub mod poly;
pub mod serialize;
pub mod stab;
