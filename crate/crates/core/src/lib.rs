pub mod arith;
pub mod cubicring;
pub mod expsums;
pub mod primeideals;
pub mod sieve;
pub mod sympoly;
pub mod units;
