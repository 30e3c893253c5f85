pub mod check_op;
pub mod classical;
pub mod evolve;
pub mod gauge;
pub mod identities;
pub mod spectrum;
