//! Numerical laboratory for the signed spectral projector
//!
//! For an orthonormal Laplacian eigenbasis `φ_1, φ_2, …` on a compact domain,
//! the signed projector kernel is
//!
//! ```text
//! A_n(x, y) = Σ_{k=1}^{n} sgn(φ_k(x)) · φ_k(y),        sgn(0) = 0,
//! ```
//!
//! the sum of the first `n` eigenfunctions with signs flipped so that every
//! term is nonnegative at the base point `x` (terms vanishing at `x` drop
//! out). The kernel concentrates at `x` like an absolute eigenfunction sum,
//! but on structured bases it can also grow linearly at distant points —
//! long-range sign coherence that this crate detects, certifies, and
//! measures.
//!
//! Module map, bottom-up:
//!
//! * [`rng`] — fixed splittable PRNG (bit-reproducible across platforms);
//! * [`specfun`] — Legendre, Bessel (values and zeros), Hermite functions,
//!   and the closed-form cosine partial sum;
//! * [`bases`] — the catalog of explicit eigenbases and random waves;
//! * [`quad`] — deterministic quadrature over every catalog domain;
//! * [`amalg`] — the signed kernel, its diagonal, the classical projector,
//!   sign-flip variants, and mass/diagonal diagnostics;
//! * [`heat`] — truncated heat-kernel expansions and the growth certificate
//!   bounding `φ_{n+1}` at its maximum through heat-weighted integrals;
//! * [`spooky`] — long-range coherence scans, proposition verifiers,
//!   correlation profiles, independence Monte Carlo, scaling fits;
//! * [`graphlap`] — graph Laplacians, a dense symmetric eigensolver, and the
//!   signed kernel on graphs.

pub mod amalg;
pub mod bases;
pub mod graphlap;
pub mod heat;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod spooky;
