//! Certified numerics for the fast escaping set of entire functions of the
//! form `z^3 prod (1 + z/a_n)^(2 p_n)` with zeros on the negative real axis.

pub mod xnum;
pub mod entire;
pub mod growth;
pub mod certificate;
pub mod constructor;
pub mod escape;
