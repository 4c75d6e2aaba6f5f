mod rat;

pub mod dyadic;
pub mod primes;
pub mod valuation;

pub use dyadic::{dyadic_index, dyadic_index_of, enumerate_dyadics_gt1, Dyadic};
pub use primes::{ell2, is_prime, partition_primes};
pub use rat::Rat;
pub use valuation::{
    padic_valuation, prime_support, InfValuation, SupportSet, Valuation,
};
