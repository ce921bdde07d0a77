//! The signed spectral projector `A_n(x₀, y) = Σ_{k≤n} sgn(φ_k(x₀)) φ_k(y)`,
//! its diagonal `Σ|φ_k(x)|`, the classical projector
//! `Π(x, y) = Σ φ_k(x) φ_k(y)`, the sorted sign-flip family, and the mass /
//! bound diagnostics built on them.
//!
//! Sign convention: `sgn` compares exactly against floating 0.0 with no
//! tolerance band. Boundary and pole nodes of the closed-form bases evaluate
//! to exact zeros; generic points never do. An epsilon band would make the
//! zero count grid-dependent.

use crate::bases::{default_grid, Basis, BasisManifest, DomainPoint, Mode};
use crate::quad;
use rayon::prelude::*;
use serde::Serialize;

/// Sign with `sgn(0) = 0`, by exact comparison against 0.0.
pub fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Compensated (Kahan) accumulator used by every fused oscillatory sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, term: f64) {
        let y = term - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}

/// The sign pattern of the first `n` eigenfunctions at a base point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignVector {
    pub x0: DomainPoint,
    pub n: usize,
    /// `signs[k-1] = sgn(φ_k(x₀)) ∈ {-1, 0, +1}`.
    pub signs: Vec<i8>,
    pub zero_count: usize,
}

/// Extract the sign vector at `x0`.
pub fn sign_vector(basis: &Basis, n: usize, x0: &DomainPoint) -> SignVector {
    let mut signs = Vec::with_capacity(n);
    let mut zero_count = 0usize;
    basis.for_each_eval(n, x0, |_, v| {
        let s = sgn(v) as i8;
        if s == 0 {
            zero_count += 1;
        }
        signs.push(s);
    });
    SignVector {
        x0: *x0,
        n,
        signs,
        zero_count,
    }
}

/// `Σ signs[k] · φ_k(y)` for a precomputed sign vector (compensated sum).
pub fn amalg_eval_with(basis: &Basis, sv: &SignVector, y: &DomainPoint) -> f64 {
    let mut acc = Kahan::default();
    basis.for_each_eval(sv.n, y, |k, v| match sv.signs[k - 1] {
        1 => acc.add(v),
        -1 => acc.add(-v),
        _ => {}
    });
    acc.value()
}

/// `A_n(x₀, y)`: signs at `x₀` applied to the eigenfunction values at `y`,
/// in one fused pass per point with no field allocation.
pub fn amalg_eval(basis: &Basis, n: usize, x0: &DomainPoint, y: &DomainPoint) -> f64 {
    amalg_eval_with(basis, &sign_vector(basis, n, x0), y)
}

/// Diagonal value `A_n(x, x) = Σ_{k≤n} |φ_k(x)|`.
pub fn amalg_diag(basis: &Basis, n: usize, x: &DomainPoint) -> f64 {
    let mut acc = Kahan::default();
    basis.for_each_eval(n, x, |_, v| acc.add(v.abs()));
    acc.value()
}

/// Classical projector `Π(x, y) = Σ_{k≤n} φ_k(x) φ_k(y)`.
pub fn projector_eval(basis: &Basis, n: usize, x: &DomainPoint, y: &DomainPoint) -> f64 {
    if x == y {
        return projector_diag(basis, n, x);
    }
    let mut left = Vec::with_capacity(n);
    basis.for_each_eval(n, x, |_, v| left.push(v));
    let mut acc = Kahan::default();
    basis.for_each_eval(n, y, |k, v| acc.add(left[k - 1] * v));
    acc.value()
}

/// Projector diagonal `Π(x, x) = Σ φ_k(x)²`.
pub fn projector_diag(basis: &Basis, n: usize, x: &DomainPoint) -> f64 {
    let mut acc = Kahan::default();
    basis.for_each_eval(n, x, |_, v| acc.add(v * v));
    acc.value()
}

/// Errors from the kernel operations.
#[derive(Clone, Debug, PartialEq)]
pub enum AmalgError {
    /// The operation is defined for orthonormalized bases only.
    RequiresL2Mode,
    /// The flip list must have exactly ⌊n/3⌋ entries.
    FlipCountMismatch { expected: usize, got: usize },
    /// Doubling the quadrature order still moved the value too much.
    QuadratureNotConverged {
        value: f64,
        doubled_delta: f64,
        tol: f64,
    },
}

impl std::fmt::Display for AmalgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AmalgError::RequiresL2Mode => write!(f, "operation requires a basis in l2 mode"),
            AmalgError::FlipCountMismatch { expected, got } => {
                write!(f, "expected {expected} flips, got {got}")
            }
            AmalgError::QuadratureNotConverged {
                value,
                doubled_delta,
                tol,
            } => write!(
                f,
                "quadrature not converged: value {value}, delta at doubled order {doubled_delta} > {tol}"
            ),
        }
    }
}

impl std::error::Error for AmalgError {}

/// The sorted sign-flip variant: eigenfunctions are ordered by ascending
/// `|φ_k(x₀)|` (ties by ascending index), and the signs of the first ⌊n/3⌋
/// in that order are replaced by the caller's `flips`.
#[derive(Debug)]
pub struct AmalgStar<'a> {
    basis: &'a Basis,
    n: usize,
    /// Effective per-index signs after replacement.
    effective: Vec<f64>,
}

pub fn amalg_star<'a>(
    basis: &'a Basis,
    n: usize,
    x0: &DomainPoint,
    flips: &[i8],
) -> Result<AmalgStar<'a>, AmalgError> {
    let expected = n / 3;
    if flips.len() != expected {
        return Err(AmalgError::FlipCountMismatch {
            expected,
            got: flips.len(),
        });
    }
    let mut mags = Vec::with_capacity(n);
    let mut effective = Vec::with_capacity(n);
    basis.for_each_eval(n, x0, |_, v| {
        mags.push(v.abs());
        effective.push(sgn(v));
    });
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mags[a].partial_cmp(&mags[b]).unwrap().then(a.cmp(&b)));
    for (i, &idx) in order[..expected].iter().enumerate() {
        effective[idx] = flips[i] as f64;
    }
    Ok(AmalgStar {
        basis,
        n,
        effective,
    })
}

impl AmalgStar<'_> {
    pub fn eval(&self, y: &DomainPoint) -> f64 {
        let mut acc = Kahan::default();
        self.basis.for_each_eval(self.n, y, |k, v| {
            let s = self.effective[k - 1];
            if s == 1.0 {
                acc.add(v);
            } else if s == -1.0 {
                acc.add(-v);
            } else if s != 0.0 {
                acc.add(s * v);
            }
        });
        acc.value()
    }
}

/// `∫ A_n(x₀, y)² dy` with a doubled-order convergence certificate. For an
/// orthonormal family this equals `n − zero_count` exactly.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MassReport {
    pub value: f64,
    /// Movement observed when the rule order was doubled.
    pub doubled_delta: f64,
    pub zero_count: usize,
}

pub fn l2_mass(basis: &Basis, n: usize, x0: &DomainPoint) -> Result<MassReport, AmalgError> {
    if basis.mode() != Mode::L2 {
        return Err(AmalgError::RequiresL2Mode);
    }
    let sv = sign_vector(basis, n, x0);
    // The integrand is a product of two sums of wavenumber ≤ √λ_n.
    let order = 2 * basis.max_freq(n);
    let check = quad::integrate_with_refinement(basis.domain(), order, |y| {
        amalg_eval_with(basis, &sv, y).powi(2)
    });
    let tol = 1e-6 * n as f64;
    if check.doubled_delta > tol {
        return Err(AmalgError::QuadratureNotConverged {
            value: check.value,
            doubled_delta: check.doubled_delta,
            tol,
        });
    }
    Ok(MassReport {
        value: check.value,
        doubled_delta: check.doubled_delta,
        zero_count: sv.zero_count,
    })
}

/// Diagonal growth report: the measured `A_n(x, x)` against its analytic
/// companions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiagBounds {
    /// The universal growth rate `n^{(d+1)/(2d)}` with unit constant — a
    /// scale for comparison, not a certified pointwise bound (the true
    /// constant depends on the domain).
    pub lower: f64,
    /// `A_n(x, x) = Σ|φ_k(x)|`.
    pub value: f64,
    /// Cauchy–Schwarz bound `√(n · Π(x, x))`; always ≥ value.
    pub upper: f64,
    /// `Π(x, x) / max_{k≤n} ‖φ_k‖_∞`, sup norms taken over a grid with ≥ 10
    /// points per wavelength; always ≤ value up to grid error.
    pub easylower: f64,
}

pub fn diag_bounds_report(basis: &Basis, n: usize, x: &DomainPoint) -> DiagBounds {
    assert_eq!(
        basis.mode(),
        Mode::L2,
        "diag_bounds_report: bounds are stated for orthonormalized bases"
    );
    let value = amalg_diag(basis, n, x);
    let pi_diag = projector_diag(basis, n, x);
    let grid = default_grid(basis, n, 10);
    let mut sup = vec![0.0f64; n];
    for p in &grid {
        basis.for_each_eval(n, p, |k, v| {
            let a = v.abs();
            if a > sup[k - 1] {
                sup[k - 1] = a;
            }
        });
    }
    let max_sup = sup.iter().cloned().fold(0.0f64, f64::max);
    let d = basis.domain().dimension() as f64;
    DiagBounds {
        lower: (n as f64).powf((d + 1.0) / (2.0 * d)),
        value,
        upper: (n as f64 * pi_diag).sqrt(),
        easylower: pi_diag / max_sup,
    }
}

/// Cumulative `L¹` norms `Σ_{k≤m} ‖φ_k‖₁` for `m = 1..n` (diagnostic).
pub fn l1_partial_sums(basis: &Basis, n: usize) -> Vec<f64> {
    assert_eq!(
        basis.mode(),
        Mode::L2,
        "l1_partial_sums: norms are stated for orthonormalized bases"
    );
    let mut out = Vec::with_capacity(n);
    let mut acc = Kahan::default();
    for k in 1..=n {
        let rule = quad::make_rule(basis.domain(), 2 * basis.max_freq(k));
        acc.add(quad::integrate(&rule, |y| basis.eval(k, y).abs()));
        out.push(acc.value());
    }
    out
}

/// What a batched field evaluation tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FieldKind {
    /// The signed kernel `A_n(x₀, ·)`.
    Amalg,
    /// The classical projector `Π(x₀, ·)`.
    Projector,
    /// The product `A_n(x₀, ·) · φ_{n+1}(·)` — the integrand whose signed
    /// mass drives the growth certificate.
    ProductProfile,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Amalg => "amalg",
            FieldKind::Projector => "projector",
            FieldKind::ProductProfile => "product-profile",
        }
    }

    pub fn parse(s: &str) -> Option<FieldKind> {
        match s {
            "amalg" => Some(FieldKind::Amalg),
            "projector" => Some(FieldKind::Projector),
            "product-profile" => Some(FieldKind::ProductProfile),
            _ => None,
        }
    }
}

/// A kernel tabulated over a grid, with everything needed to reproduce any
/// entry bit-for-bit.
#[derive(Clone, Debug, Serialize)]
pub struct AmalgField {
    pub manifest: BasisManifest,
    pub sign_vector: SignVector,
    pub kind: FieldKind,
    pub n: usize,
    pub grid: Vec<DomainPoint>,
    pub values: Vec<f64>,
}

/// Tabulate a field over `grid`, in parallel. Each entry is an independent
/// compensated sum, so results do not depend on the partitioning.
pub fn amalg_field(
    basis: &Basis,
    n: usize,
    x0: &DomainPoint,
    grid: &[DomainPoint],
    kind: FieldKind,
) -> AmalgField {
    if kind == FieldKind::ProductProfile {
        assert!(
            n + 1 <= basis.n_max(),
            "product-profile needs the (n+1)-th eigenfunction in the basis"
        );
    }
    let sv = sign_vector(basis, n, x0);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|y| match kind {
            FieldKind::Amalg => amalg_eval_with(basis, &sv, y),
            FieldKind::Projector => projector_eval(basis, n, x0, y),
            FieldKind::ProductProfile => amalg_eval_with(basis, &sv, y) * basis.eval(n + 1, y),
        })
        .collect();
    AmalgField {
        manifest: basis.manifest(),
        sign_vector: sv,
        kind,
        n,
        grid: grid.to_vec(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{make_basis, BasisKind};
    use crate::specfun;
    use std::f64::consts::PI;

    fn b(kind: BasisKind, n: usize, mode: Mode) -> Basis {
        let seed = if kind.needs_seed() { Some(0) } else { None };
        make_basis(kind, n, mode, seed).unwrap()
    }

    #[test]
    fn signs_vanish_at_boundary_nodes() {
        let basis = b(BasisKind::IntervalDirichlet, 12, Mode::Raw);
        let sv = sign_vector(&basis, 12, &DomainPoint::Interval(0.0));
        assert!(sv.signs.iter().all(|&s| s == 0));
        assert_eq!(sv.zero_count, 12);
    }

    #[test]
    fn circle_origin_keeps_only_cosine_signs() {
        let basis = b(BasisKind::CircleCanonical, 10, Mode::Raw);
        let sv = sign_vector(&basis, 10, &DomainPoint::Circle(0.0));
        for k in 1..=10usize {
            let expect = if k % 2 == 1 { 0 } else { 1 };
            assert_eq!(sv.signs[k - 1], expect, "k = {k}");
        }
        assert_eq!(sv.zero_count, 5);
    }

    #[test]
    fn zonal_pole_signs_are_all_positive() {
        let basis = b(BasisKind::SphereZonal, 40, Mode::L2);
        let sv = sign_vector(&basis, 40, &DomainPoint::SphereZonal(0.0));
        assert!(sv.signs.iter().all(|&s| s == 1));
    }

    #[test]
    fn diagonal_equals_absolute_sum_bitwise() {
        for kind in [BasisKind::IntervalDirichlet, BasisKind::Hermite, BasisKind::DiskDirichlet] {
            let basis = b(kind, 25, Mode::L2);
            let x = match basis.domain() {
                crate::bases::Domain::Interval => DomainPoint::Interval(1.3),
                crate::bases::Domain::Line => DomainPoint::Line(0.4),
                _ => DomainPoint::Disk(0.55, 2.0),
            };
            let via_eval = amalg_eval(&basis, 25, &x, &x);
            let via_diag = amalg_diag(&basis, 25, &x);
            assert_eq!(via_eval.to_bits(), via_diag.to_bits());
            assert!(via_diag >= 0.0);
        }
    }

    #[test]
    fn circle_third_of_turn_matches_averaged_sign_sum() {
        // At x₀ = 2π/3, y = 0 the sine terms vanish and the cosine signs
        // repeat (−1, −1, +1), so 300 pairs sum to −100 exactly.
        let basis = b(BasisKind::CircleCanonical, 600, Mode::Raw);
        let v = amalg_eval(
            &basis,
            600,
            &DomainPoint::Circle(2.0 * PI / 3.0),
            &DomainPoint::Circle(0.0),
        );
        assert!((v + 100.0).abs() <= 2.0, "value = {v}");
    }

    #[test]
    fn circle_kernel_from_origin_is_a_cosine_sum() {
        let n_pairs = 37;
        let basis = b(BasisKind::CircleCanonical, 2 * n_pairs, Mode::Raw);
        let sv = sign_vector(&basis, 2 * n_pairs, &DomainPoint::Circle(0.0));
        for i in 0..100 {
            let y = 2.0 * PI * i as f64 / 100.0 + 0.011;
            let direct = amalg_eval_with(&basis, &sv, &DomainPoint::Circle(y));
            let closed = specfun::dirichlet_cos_sum(n_pairs, y);
            assert!((direct - closed).abs() < 1e-10, "y = {y}");
        }
    }

    #[test]
    fn circle_diagonal_density_approaches_two_over_pi() {
        let pairs = 100_000;
        let basis = b(BasisKind::CircleCanonical, 2 * pairs, Mode::Raw);
        let diag = amalg_diag(&basis, 2 * pairs, &DomainPoint::Circle(1.2345));
        let density = diag / (2.0 * pairs as f64);
        assert!(
            (density - 2.0 / PI).abs() < 0.01,
            "mean |trig| = {density}"
        );
    }

    #[test]
    fn zonal_pole_diagonal_matches_power_sum() {
        let k_max = 100;
        let basis = b(BasisKind::SphereZonal, k_max, Mode::L2);
        let diag = amalg_diag(&basis, k_max, &DomainPoint::SphereZonal(0.0));
        let direct: f64 = (1..=k_max).map(|k| (k as f64 + 0.5).sqrt()).sum();
        assert!((diag - direct).abs() < 1e-10 * direct);
        let scale = (2.0 / 3.0) * (k_max as f64).powf(1.5);
        assert!((diag / scale - 1.0).abs() < 0.02, "ratio = {}", diag / scale);
    }

    #[test]
    fn projector_diagonal_obeys_local_weyl_density() {
        let basis = b(BasisKind::IntervalDirichlet, 500, Mode::L2);
        let p = projector_diag(&basis, 500, &DomainPoint::Interval(1.0));
        // Density form: Π(x,x) · vol / n → 1.
        let normalized = p * PI / 500.0;
        assert!((normalized - 1.0).abs() < 0.1, "normalized density = {normalized}");
    }

    #[test]
    fn projector_is_symmetric_and_reduces_at_rank_one() {
        let basis = b(BasisKind::SquareDirichlet, 7, Mode::L2);
        let x = DomainPoint::Square(0.8, 1.9);
        let y = DomainPoint::Square(2.1, 0.4);
        assert_eq!(
            projector_eval(&basis, 7, &x, &y).to_bits(),
            projector_eval(&basis, 7, &y, &x).to_bits()
        );
        let one = projector_eval(&basis, 1, &x, &y);
        assert!((one - basis.eval(1, &x) * basis.eval(1, &y)).abs() < 1e-15);
    }

    #[test]
    fn negating_both_signs_and_values_changes_nothing() {
        let basis = b(BasisKind::IntervalDirichlet, 40, Mode::L2);
        let x0 = DomainPoint::Interval(0.77);
        let y = DomainPoint::Interval(2.2);
        let mut vx = Vec::new();
        let mut vy = Vec::new();
        basis.for_each_eval(40, &x0, |_, v| vx.push(v));
        basis.for_each_eval(40, &y, |_, v| vy.push(v));
        let forward: f64 = vx.iter().zip(&vy).map(|(a, b)| sgn(*a) * b).sum();
        let flipped: f64 = vx.iter().zip(&vy).map(|(a, b)| sgn(-*a) * -b).sum();
        assert_eq!(forward.to_bits(), flipped.to_bits());
    }

    #[test]
    fn field_reproduces_pointwise_values_bitwise() {
        let basis = b(BasisKind::IntervalDirichlet, 60, Mode::L2);
        let x0 = DomainPoint::Interval(1.0);
        let grid: Vec<DomainPoint> = (0..300)
            .map(|i| DomainPoint::Interval(PI * i as f64 / 299.0))
            .collect();
        for kind in [FieldKind::Amalg, FieldKind::Projector, FieldKind::ProductProfile] {
            let field = amalg_field(&basis, 59, &x0, &grid, kind);
            let sv = sign_vector(&basis, 59, &x0);
            for (i, y) in grid.iter().enumerate() {
                let direct = match kind {
                    FieldKind::Amalg => amalg_eval_with(&basis, &sv, y),
                    FieldKind::Projector => projector_eval(&basis, 59, &x0, y),
                    FieldKind::ProductProfile => {
                        amalg_eval_with(&basis, &sv, y) * basis.eval(60, y)
                    }
                };
                assert_eq!(field.values[i].to_bits(), direct.to_bits(), "{kind:?} i = {i}");
            }
        }
    }

    #[test]
    fn field_concentrates_near_the_base_point() {
        let basis = b(BasisKind::IntervalDirichlet, 500, Mode::L2);
        let x0 = DomainPoint::Interval(1.0);
        let grid: Vec<DomainPoint> = (0..2000)
            .map(|i| DomainPoint::Interval(PI * i as f64 / 1999.0))
            .collect();
        let field = amalg_field(&basis, 500, &x0, &grid, FieldKind::Amalg);
        let (argmax, _) = field
            .values
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |(ai, av), (i, &v)| {
                if v > av {
                    (i, v)
                } else {
                    (ai, av)
                }
            });
        let (xmax, _) = field.grid[argmax].coords();
        assert!((xmax - 1.0).abs() < 0.05, "peak at {xmax}");
    }

    #[test]
    fn field_with_single_point_grid_is_the_diagonal() {
        let basis = b(BasisKind::CircleCanonical, 16, Mode::L2);
        let x0 = DomainPoint::Circle(2.0);
        let field = amalg_field(&basis, 16, &x0, &[x0], FieldKind::Amalg);
        assert_eq!(
            field.values[0].to_bits(),
            amalg_diag(&basis, 16, &x0).to_bits()
        );
    }

    #[test]
    fn star_with_original_signs_is_the_plain_kernel() {
        let basis = b(BasisKind::IntervalDirichlet, 21, Mode::L2);
        let x0 = DomainPoint::Interval(0.93);
        let sv = sign_vector(&basis, 21, &x0);
        let mut mags = Vec::new();
        basis.for_each_eval(21, &x0, |_, v| mags.push(v.abs()));
        let mut order: Vec<usize> = (0..21).collect();
        order.sort_by(|&a, &c| mags[a].partial_cmp(&mags[c]).unwrap().then(a.cmp(&c)));
        let flips: Vec<i8> = order[..7].iter().map(|&i| sv.signs[i]).collect();
        let star = amalg_star(&basis, 21, &x0, &flips).unwrap();
        for i in 0..40 {
            let y = DomainPoint::Interval(PI * (i as f64 + 0.5) / 40.0);
            assert_eq!(
                star.eval(&y).to_bits(),
                amalg_eval_with(&basis, &sv, &y).to_bits()
            );
        }
    }

    #[test]
    fn star_flip_of_a_zero_sign_keeps_the_diagonal() {
        // At the circle origin every sine component is an exact 0.0, so the
        // smallest magnitudes — the flip targets — contribute nothing to
        // the diagonal no matter which sign replaces them.
        let basis = b(BasisKind::CircleCanonical, 9, Mode::Raw);
        let x0 = DomainPoint::Circle(0.0);
        let star = amalg_star(&basis, 9, &x0, &[-1, 1, -1]).unwrap();
        let diag = amalg_diag(&basis, 9, &x0);
        assert_eq!(star.eval(&x0).to_bits(), diag.to_bits());
        assert_eq!(diag, 4.0);
    }

    #[test]
    fn star_all_negative_matches_the_algebraic_identity() {
        // Find a base point whose three smallest magnitudes all carry sign
        // +1; there the all-(−1) variant is the kernel minus twice those
        // eigenfunctions.
        let basis = b(BasisKind::IntervalDirichlet, 9, Mode::Raw);
        let mut found = None;
        'outer: for i in 1..300 {
            let x0 = DomainPoint::Interval(3.0 * i as f64 / 300.0);
            let sv = sign_vector(&basis, 9, &x0);
            let mut mags = Vec::new();
            basis.for_each_eval(9, &x0, |_, v| mags.push(v.abs()));
            let mut order: Vec<usize> = (0..9).collect();
            order.sort_by(|&a, &c| mags[a].partial_cmp(&mags[c]).unwrap().then(a.cmp(&c)));
            for &idx in &order[..3] {
                if sv.signs[idx] != 1 {
                    continue 'outer;
                }
            }
            found = Some((x0, sv, order));
            break;
        }
        let (x0, sv, order) = found.expect("no base point with three positive small terms");
        let star = amalg_star(&basis, 9, &x0, &[-1, -1, -1]).unwrap();
        for i in 0..50 {
            let y = DomainPoint::Interval(PI * (i as f64 + 0.5) / 50.0);
            let plain = amalg_eval_with(&basis, &sv, &y);
            let correction: f64 = order[..3]
                .iter()
                .map(|&idx| 2.0 * sv.signs[idx] as f64 * basis.eval(idx + 1, &y))
                .sum();
            assert!(
                (star.eval(&y) - (plain - correction)).abs() < 1e-12,
                "identity fails at y index {i}"
            );
        }
    }

    #[test]
    fn star_rejects_wrong_flip_count() {
        let basis = b(BasisKind::IntervalDirichlet, 9, Mode::Raw);
        let err = amalg_star(&basis, 9, &DomainPoint::Interval(1.0), &[1, -1]).unwrap_err();
        assert_eq!(
            err,
            AmalgError::FlipCountMismatch {
                expected: 3,
                got: 2
            }
        );
    }

    #[test]
    fn mass_vanishes_when_all_signs_vanish() {
        let basis = b(BasisKind::IntervalDirichlet, 50, Mode::L2);
        let report = l2_mass(&basis, 50, &DomainPoint::Interval(0.0)).unwrap();
        assert_eq!(report.zero_count, 50);
        assert!(report.value.abs() < 1e-9);
    }

    #[test]
    fn mass_counts_the_nonzero_signs() {
        let basis = b(BasisKind::IntervalDirichlet, 50, Mode::L2);
        let report = l2_mass(&basis, 50, &DomainPoint::Interval(1.1)).unwrap();
        assert_eq!(report.zero_count, 0);
        assert!((report.value - 50.0).abs() < 1e-4, "mass = {}", report.value);
    }

    #[test]
    fn circle_origin_mass_counts_only_cosines() {
        let basis = b(BasisKind::CircleCanonical, 40, Mode::L2);
        let report = l2_mass(&basis, 40, &DomainPoint::Circle(0.0)).unwrap();
        assert_eq!(report.zero_count, 20);
        assert!((report.value - 20.0).abs() < 1e-4, "mass = {}", report.value);
    }

    #[test]
    fn mass_requires_orthonormal_mode() {
        let basis = b(BasisKind::IntervalDirichlet, 10, Mode::Raw);
        assert_eq!(
            l2_mass(&basis, 10, &DomainPoint::Interval(1.0)).unwrap_err(),
            AmalgError::RequiresL2Mode
        );
    }

    #[test]
    fn diag_bounds_are_ordered() {
        let basis = b(BasisKind::IntervalDirichlet, 500, Mode::L2);
        let r = diag_bounds_report(&basis, 500, &DomainPoint::Interval(1.0));
        assert!(r.value <= r.upper * (1.0 + 1e-12));
        assert!(r.value >= r.easylower - 1e-9);
        let normalized = r.value / 500.0;
        assert!(
            (0.5..=1.01).contains(&normalized),
            "value/n = {normalized}"
        );
    }

    #[test]
    fn diag_bounds_collapse_at_rank_one() {
        let basis = b(BasisKind::IntervalDirichlet, 1, Mode::L2);
        let x = DomainPoint::Interval(0.9);
        let r = diag_bounds_report(&basis, 1, &x);
        assert!((r.value - basis.eval(1, &x).abs()).abs() < 1e-15);
        assert!((r.upper - r.value).abs() < 1e-12);
    }

    #[test]
    fn zonal_pole_bounds_are_tight() {
        let basis = b(BasisKind::SphereZonal, 100, Mode::L2);
        let r = diag_bounds_report(&basis, 100, &DomainPoint::SphereZonal(0.0));
        // All mass sits at the pole: the projector-based lower bound is a
        // constant fraction of the value.
        let ratio = r.easylower / r.value;
        assert!((0.7..=0.85).contains(&ratio), "easylower/value = {ratio}");
        assert!(r.value <= r.upper);
    }

    #[test]
    fn first_l1_norm_matches_the_hand_integral() {
        let basis = b(BasisKind::IntervalDirichlet, 6, Mode::L2);
        let sums = l1_partial_sums(&basis, 6);
        let expect = 2.0 * (2.0 / PI).sqrt();
        assert!((sums[0] - expect).abs() < 1e-10, "first norm = {}", sums[0]);
        for w in sums.windows(2) {
            let inc = w[1] - w[0];
            assert!(inc >= 0.0);
            assert!(inc <= PI.sqrt() + 1e-9, "increment = {inc}");
        }
    }

    #[test]
    fn kernel_is_orthogonal_to_the_next_eigenfunction() {
        let basis = b(BasisKind::IntervalDirichlet, 21, Mode::L2);
        let sv = sign_vector(&basis, 20, &DomainPoint::Interval(0.83));
        let rule = quad::make_rule(basis.domain(), 2 * basis.max_freq(21));
        let inner = quad::integrate(&rule, |y| {
            amalg_eval_with(&basis, &sv, y) * basis.eval(21, y)
        });
        assert!(inner.abs() < 1e-8, "inner product = {inner}");
    }
}
