pub mod degree;
pub mod energy;
pub mod identities;
pub mod moments;
pub mod radial;
pub mod reduce;
pub mod solve;
