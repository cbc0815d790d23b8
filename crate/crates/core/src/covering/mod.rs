//! Residue-class coverings of `[1, y]`, the Jacobsthal function, and
//! certified runs of consecutive composites.

mod assignment;
mod certificate;
mod exact;
mod greedy;
mod jacobsthal;

pub use assignment::{apply_classes, verify_cover, ResidueAssignment, SieveInterval};
pub use certificate::{check_certificate, crt_assemble, crt_residue, CompositeRunCertificate};
pub use exact::{exact_y, search_cover, CoverSearch, ExactSearch, ExactY, DEFAULT_NODE_BUDGET, MAX_EXACT_Y};
pub use greedy::{greedy_cover, greedy_y, GreedyY, PrimeOrder};
pub use jacobsthal::{jacobsthal, jacobsthal_of_primes, MAX_FACTOR_N, MAX_PERIOD};
