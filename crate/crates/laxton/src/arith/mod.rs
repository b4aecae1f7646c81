//! Exact scalar arithmetic: rationals and their p-adic valuations, checked
//! primes, quadratic-algebra elements, and Hensel-lifted square roots.

pub mod padic;
pub mod prime;
pub mod quad;
pub mod rat;

pub use padic::{splitting_in_field, splitting_of_disc, valuations_above, PadicCtx, SplittingType, Valuations};
pub use prime::{factor, factor_u64, is_prime, primes_below, squarefree_decomp, PrimeP};
pub use quad::QuadElem;
pub use rat::{vp_int, vp_rat, Rat};
