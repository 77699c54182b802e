//! Binary batch and PIR codes: constructions, exact verification, and bounds.
//!
//! A `(n, k, r, t)` batch code stores `k` information bits in `n` coded bits so
//! that any multiset of `t` requested information symbols can be served from
//! `t` pairwise-disjoint recovery sets of at most `r` coded symbols each. PIR
//! codes are the restriction to repeated requests `(x_i, ..., x_i)`.
//!
//! The crate has four parts:
//!
//! * [`gf2`] — dense bit-packed matrices over GF(2): rank, minimum distance,
//!   column sums, structural predicates, and the shared matrix text format.
//! * [`construct`] — generator-matrix constructions for four code families
//!   (`t = 2`; `r = 2`; `r | k`; `t = 3` with `r ∤ k`) plus binary simplex
//!   codes as a reference family.
//! * [`verify`] — exhaustive recovery-set search deciding the batch and PIR
//!   properties of an arbitrary binary generator matrix, with certificates.
//! * [`bounds`] — length lower bounds, construction-backed upper bounds,
//!   recursive dimension bounds, and the embedded table of optimal binary
//!   code dimensions that backs them.
//!
//! ```
//! use batch_codes::{construct, verify, bounds};
//!
//! // a length-10 code serving any 3 requests with recovery sets of size <= 2
//! let code = construct::construct(5, 2, 3).unwrap();
//! assert_eq!(code.params.n, 10);
//! let opts = verify::VerifyOptions::default();
//! assert!(verify::is_batch(&code.matrix, 2, 3, opts).unwrap());
//!
//! // and 10 is one above the availability lower bound at d = t = 3
//! assert_eq!(bounds::table_lower_bound(5, 2, 3).unwrap(), 9);
//! ```

pub mod bounds;
pub mod construct;
pub mod gf2;
pub mod verify;

pub use construct::{CodeParams, Construction, Family, RemainderParams};
pub use gf2::{BitMatrix, BitVector, ColumnSet};
pub use verify::{Mode, QueryMultiset, RecoveryCertificate, VerifyOptions};
