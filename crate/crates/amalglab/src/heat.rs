//! Truncated heat-kernel expansions `p_t(z, y) = Σ e^{-λ_k t} φ_k(z) φ_k(y)`
//! (plus the constant mode where the spectrum has one) and the growth
//! certificate for the next eigenfunction, with every intermediate
//! inequality of the argument checked numerically.
//!
//! The certificate machinery: at the grid argmax `z` of `|φ_{n+1}|`,
//! with `κ = max_w A_n(z, w) / A_n(z, z) ≥ 1`, `α = 1/(4κ)` and
//! `t = α/λ_{n+1}`, the weighted integral
//! `I = ∫ (1 − p_t(z,y)/max_w p_t(z,w)) · A_n(z, y) · φ_{n+1}(y) dy`
//! controls `φ_{n+1}(z)` up to an uncomputed constant; the report carries
//! the measured ratio `R = φ_{n+1}(z)·A_n(z,z) / (2n|I|)` and the explicit
//! inequalities that hold along the way.

use crate::amalg::{self, Kahan};
use crate::bases::{Basis, BasisManifest, DomainPoint, Mode};
use crate::quad;
use rayon::prelude::*;
use serde::Serialize;

/// ln(1e12): a mode is dropped once `λ_k t` exceeds this, making its
/// per-term factor `e^{-λ_k t}` smaller than 1e-12.
const TAIL_LOG: f64 = 27.631021115928547;

/// Failures of the heat operations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum HeatError {
    /// The basis cannot certify a 1e-12 per-term tail at this time scale;
    /// carries the tail the last available mode actually achieves.
    BasisTooShort { achievable_tail: f64 },
    /// Quadrature and the exact eigensum disagreed beyond the budget.
    SandwichMismatch { quadrature: f64, exact: f64 },
    /// Every sign vanishes at the selected base point (or the next
    /// eigenfunction does); nothing to divide by.
    DegenerateCertificate,
    /// `|∫ A_n(z, ·) φ_{n+1}|` exceeded the orthogonality budget.
    OrthogonalityViolation { residue: f64 },
}

impl std::fmt::Display for HeatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HeatError::BasisTooShort { achievable_tail } => write!(
                f,
                "basis too short for a 1e-12 heat tail (achievable per-term tail: {achievable_tail:.3e})"
            ),
            HeatError::SandwichMismatch { quadrature, exact } => write!(
                f,
                "heat overlap mismatch: quadrature {quadrature} vs eigensum {exact}"
            ),
            HeatError::DegenerateCertificate => {
                write!(f, "degenerate certificate: all signs vanish at the base point")
            }
            HeatError::OrthogonalityViolation { residue } => {
                write!(f, "orthogonality residue {residue:.3e} exceeds 1e-6")
            }
        }
    }
}

impl std::error::Error for HeatError {}

/// A heat expansion anchored at `z`: per-mode weights `e^{-λ_k t} φ_k(z)`
/// for the kept modes, plus the constant-mode density where the spectrum
/// has a constant eigenfunction.
#[derive(Clone, Debug)]
pub struct HeatExpansion {
    pub t: f64,
    pub z: DomainPoint,
    /// Number of modes kept (`λ_k t ≤ ln 1e12`).
    pub n_cut: usize,
    weights: Vec<f64>,
    const_term: f64,
}

/// Build the expansion, choosing the truncation so every dropped mode has
/// `e^{-λ_k t} < 1e-12`.
pub fn heat_expansion(
    basis: &Basis,
    t: f64,
    z: &DomainPoint,
) -> Result<HeatExpansion, HeatError> {
    assert!(t > 0.0, "heat_expansion: t must be positive");
    assert_eq!(
        basis.mode(),
        Mode::L2,
        "heat_expansion: the expansion needs an orthonormal basis"
    );
    let n_max = basis.n_max();
    if basis.eigenvalue(n_max) * t <= TAIL_LOG {
        return Err(HeatError::BasisTooShort {
            achievable_tail: (-basis.eigenvalue(n_max) * t).exp(),
        });
    }
    let n_cut = (1..=n_max)
        .take_while(|&k| basis.eigenvalue(k) * t <= TAIL_LOG)
        .count();
    let mut weights = Vec::with_capacity(n_cut);
    if n_cut > 0 {
        basis.for_each_eval(n_cut, z, |k, v| {
            weights.push((-basis.eigenvalue(k) * t).exp() * v);
        });
    }
    let const_term = if basis.kind().has_constant_mode() {
        1.0 / basis.vol()
    } else {
        0.0
    };
    Ok(HeatExpansion {
        t,
        z: *z,
        n_cut,
        weights,
        const_term,
    })
}

impl HeatExpansion {
    /// `p_t(z, y)`, unclamped.
    pub fn eval(&self, basis: &Basis, y: &DomainPoint) -> f64 {
        let mut acc = Kahan::default();
        acc.add(self.const_term);
        if self.n_cut > 0 {
            basis.for_each_eval(self.n_cut, y, |k, v| acc.add(self.weights[k - 1] * v));
        }
        acc.value()
    }

    /// Heuristic scale of the dropped tail: the first omitted per-term
    /// factor times the local Weyl density of the kept window.
    pub fn tail_bound(&self, basis: &Basis) -> f64 {
        let first_dropped = basis.eigenvalue(self.n_cut + 1);
        (-first_dropped * self.t).exp() * 2.0 * (self.n_cut.max(1) as f64) / basis.vol()
    }
}

/// The heat kernel tabulated on a grid: clamped values for use as a weight,
/// raw values logged, the grid max, and a tail estimate.
#[derive(Clone, Debug, Serialize)]
pub struct HeatWeight {
    pub z: DomainPoint,
    pub t: f64,
    pub n_cut: usize,
    pub grid: Vec<DomainPoint>,
    /// `max(p_t, 0)` — truncation can produce tiny negatives and the weight
    /// `1 − p/p_max` must stay ≤ 1.
    pub values: Vec<f64>,
    /// The unclamped values.
    pub raw_values: Vec<f64>,
    pub p_max: f64,
    pub tail_bound: f64,
}

/// Tabulate `p_t(z, ·)` over `grid`.
pub fn heat_kernel(
    basis: &Basis,
    t: f64,
    z: &DomainPoint,
    grid: &[DomainPoint],
) -> Result<HeatWeight, HeatError> {
    let exp = heat_expansion(basis, t, z)?;
    let raw_values: Vec<f64> = grid.par_iter().map(|y| exp.eval(basis, y)).collect();
    let values: Vec<f64> = raw_values.iter().map(|&v| v.max(0.0)).collect();
    let p_max = values.iter().cloned().fold(0.0f64, f64::max);
    let tail_bound = exp.tail_bound(basis);
    Ok(HeatWeight {
        z: *z,
        t,
        n_cut: exp.n_cut,
        grid: grid.to_vec(),
        values,
        raw_values,
        p_max,
        tail_bound,
    })
}

/// The bracketing of the heat-smoothed diagonal at `t = α/λ_n`:
/// `e^{-α} A_n(x,x) ≤ ∫ p_t(x,y) A_n(x,y) dy ≤ A_n(x,x)`.
///
/// The mid value is computed two ways — by quadrature and by the exact
/// eigensum `Σ e^{-λ_k t} |φ_k(x)|` — and the pair must agree within 1e-6.
/// The expansion is truncated at mode `n`: every deeper mode is orthogonal
/// to the kernel, so its contribution to the integral is exactly zero.
pub fn sandwich_check(
    basis: &Basis,
    n: usize,
    x: &DomainPoint,
    alpha: f64,
) -> Result<(f64, f64, f64), HeatError> {
    assert!(alpha > 0.0, "sandwich_check: alpha must be positive");
    assert_eq!(basis.mode(), Mode::L2, "sandwich_check: needs an orthonormal basis");
    let t = alpha / basis.eigenvalue(n);
    let sv = amalg::sign_vector(basis, n, x);
    let diag = amalg::amalg_diag(basis, n, x);

    let mut exact_acc = Kahan::default();
    let mut heat_w = Vec::with_capacity(n);
    basis.for_each_eval(n, x, |k, v| {
        let w = (-basis.eigenvalue(k) * t).exp();
        exact_acc.add(w * v.abs());
        heat_w.push(w * v);
    });
    let exact = exact_acc.value();

    let const_term = if basis.kind().has_constant_mode() {
        1.0 / basis.vol()
    } else {
        0.0
    };
    let rule = quad::make_rule(basis.domain(), 2 * basis.max_freq(n));
    let quadrature = quad::integrate(&rule, |y| {
        let mut p = Kahan::default();
        let mut a = Kahan::default();
        p.add(const_term);
        basis.for_each_eval(n, y, |k, v| {
            p.add(heat_w[k - 1] * v);
            match sv.signs[k - 1] {
                1 => a.add(v),
                -1 => a.add(-v),
                _ => {}
            }
        });
        p.value() * a.value()
    });

    if (quadrature - exact).abs() > 1e-6 * (1.0 + exact.abs()) {
        return Err(HeatError::SandwichMismatch { quadrature, exact });
    }
    Ok(((-alpha).exp() * diag, quadrature, diag))
}

/// The full growth certificate.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub manifest: BasisManifest,
    pub n: usize,
    /// Grid argmax of `|φ_{n+1}|` (ties to the lowest grid index).
    pub z: DomainPoint,
    /// `σ φ_{n+1}(z) > 0` after the sign flip `σ ∈ {±1}`.
    pub phi_next_at_z: f64,
    pub sign_flip: f64,
    /// `A_n(z, z)`.
    pub diag: f64,
    /// `max_w A_n(z, w) / A_n(z, z)` over the grid (includes `z`).
    pub kappa: f64,
    pub alpha: f64,
    pub t: f64,
    /// Modes kept in the heat expansion at the 1e-12 tail rule.
    pub n_cut: usize,
    pub sandwich_lower: f64,
    pub sandwich_mid: f64,
    pub sandwich_upper: f64,
    pub p_max: f64,
    /// `I = ∫ (1 − p/p_max) A_n(z,·) σφ_{n+1}`.
    pub weighted_integral: f64,
    /// `−∫ (p/p_max) A_n(z,·) σφ_{n+1}`; equals `I` up to the
    /// orthogonality residue.
    pub complement_integral: f64,
    /// `∫ A_n(z,·) σφ_{n+1}` — must be < 1e-6 in magnitude.
    pub orthogonality_residue: f64,
    /// `e^{-α}(1 + κ) − κ`; the time window is chosen so this stays ≥ 1/2.
    pub constant_check: f64,
    /// `R = φ_{n+1}(z) · A_n(z,z) / (2n |I|)`.
    pub ratio: f64,
    pub grid_size: usize,
}

/// Run the certificate chain for the `(n+1)`-th eigenfunction over a search
/// grid dense enough for the sup proxies (≥ 10 points per wavelength).
pub fn theorem2_certificate(
    basis: &Basis,
    n: usize,
    search_grid: &[DomainPoint],
) -> Result<Certificate, HeatError> {
    assert_eq!(basis.mode(), Mode::L2, "theorem2_certificate: needs an orthonormal basis");
    assert!(
        n + 1 <= basis.n_max(),
        "theorem2_certificate: basis must contain the (n+1)-th eigenfunction"
    );
    assert!(!search_grid.is_empty(), "theorem2_certificate: empty search grid");

    // Argmax of |φ_{n+1}| with ties to the lowest grid index.
    let next_vals: Vec<f64> = search_grid
        .par_iter()
        .map(|y| basis.eval(n + 1, y))
        .collect();
    let mut zi = 0usize;
    for (i, v) in next_vals.iter().enumerate() {
        if v.abs() > next_vals[zi].abs() {
            zi = i;
        }
    }
    let z = search_grid[zi];
    let sign_flip = amalg::sgn(next_vals[zi]);
    if sign_flip == 0.0 {
        return Err(HeatError::DegenerateCertificate);
    }
    let phi_next_at_z = sign_flip * next_vals[zi];

    let sv = amalg::sign_vector(basis, n, &z);
    if sv.zero_count == n {
        return Err(HeatError::DegenerateCertificate);
    }
    let diag = amalg::amalg_diag(basis, n, &z);

    // κ from the grid max of the signed kernel, including the diagonal.
    let sup = search_grid
        .par_iter()
        .map(|y| amalg::amalg_eval_with(basis, &sv, y))
        .reduce(|| f64::NEG_INFINITY, f64::max)
        .max(diag);
    let kappa = sup / diag;
    let alpha = 1.0 / (4.0 * kappa);
    let t = alpha / basis.eigenvalue(n + 1);

    let expansion = heat_expansion(basis, t, &z)?;
    let n_cut = expansion.n_cut;

    // p_max over the same grid, clamped.
    let p_max = search_grid
        .par_iter()
        .map(|y| expansion.eval(basis, y).max(0.0))
        .reduce(|| 0.0f64, f64::max);

    // One sequential quadrature pass accumulating the four integrals.
    let deep = n_cut.max(n + 1);
    let order = basis.max_freq(deep) + basis.max_freq(n) + basis.max_freq(n + 1);
    let rule = quad::make_rule(basis.domain(), order);
    let mut int_weighted = Kahan::default(); // (1 − p/p_max)·A·σφ
    let mut int_ratio = Kahan::default(); // (p/p_max)·A·σφ
    let mut int_ortho = Kahan::default(); // A·σφ
    let mut int_mid = Kahan::default(); // p_raw·A
    for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
        let mut p = Kahan::default();
        p.add(expansion.const_term);
        let mut a = Kahan::default();
        let mut phi_next = 0.0;
        basis.for_each_eval(deep, node, |k, v| {
            if k <= n_cut {
                p.add(expansion.weights[k - 1] * v);
            }
            if k <= n {
                match sv.signs[k - 1] {
                    1 => a.add(v),
                    -1 => a.add(-v),
                    _ => {}
                }
            }
            if k == n + 1 {
                phi_next = v;
            }
        });
        let p_raw = p.value();
        let a_val = a.value();
        let core = a_val * sign_flip * phi_next;
        let ratio_w = p_raw.max(0.0) / p_max;
        int_weighted.add(w * (1.0 - ratio_w) * core);
        int_ratio.add(w * ratio_w * core);
        int_ortho.add(w * core);
        int_mid.add(w * p_raw * a_val);
    }
    let weighted_integral = int_weighted.value();
    let complement_integral = -int_ratio.value();
    let orthogonality_residue = int_ortho.value();
    if orthogonality_residue.abs() >= 1e-6 {
        return Err(HeatError::OrthogonalityViolation {
            residue: orthogonality_residue,
        });
    }

    // Sandwich: quadrature vs the exact eigensum (constant mode and deep
    // modes drop out of the overlap by orthogonality).
    let mut exact_acc = Kahan::default();
    basis.for_each_eval(n, &z, |k, v| {
        exact_acc.add((-basis.eigenvalue(k) * t).exp() * v.abs());
    });
    let exact_mid = exact_acc.value();
    let sandwich_mid = int_mid.value();
    if (sandwich_mid - exact_mid).abs() > 1e-6 * (1.0 + exact_mid.abs()) {
        return Err(HeatError::SandwichMismatch {
            quadrature: sandwich_mid,
            exact: exact_mid,
        });
    }

    Ok(Certificate {
        manifest: basis.manifest(),
        n,
        z,
        phi_next_at_z,
        sign_flip,
        diag,
        kappa,
        alpha,
        t,
        n_cut,
        sandwich_lower: (-alpha).exp() * diag,
        sandwich_mid,
        sandwich_upper: diag,
        p_max,
        weighted_integral,
        complement_integral,
        orthogonality_residue,
        constant_check: (-alpha).exp() * (1.0 + kappa) - kappa,
        ratio: phi_next_at_z * diag / (2.0 * n as f64 * weighted_integral.abs()),
        grid_size: search_grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{default_grid, make_basis, BasisKind};
    use std::f64::consts::PI;

    fn b(kind: BasisKind, n: usize) -> Basis {
        let seed = if kind.needs_seed() { Some(0) } else { None };
        make_basis(kind, n, Mode::L2, seed).unwrap()
    }

    #[test]
    fn long_time_circle_kernel_is_uniform() {
        let basis = b(BasisKind::CircleCanonical, 40);
        let t = 100.0 / basis.eigenvalue(1);
        let grid: Vec<DomainPoint> = (0..64)
            .map(|i| DomainPoint::Circle(2.0 * PI * i as f64 / 64.0))
            .collect();
        let hw = heat_kernel(&basis, t, &DomainPoint::Circle(1.0), &grid).unwrap();
        assert_eq!(hw.n_cut, 0);
        for v in &hw.values {
            assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-6, "value = {v}");
        }
        assert!(hw.tail_bound < 1e-12);
    }

    #[test]
    fn semigroup_identity_holds_mode_by_mode() {
        let basis = b(BasisKind::IntervalDirichlet, 130);
        let z = DomainPoint::Interval(0.9);
        let t = 1.0 / basis.eigenvalue(10);
        let exp = heat_expansion(&basis, t, &z).unwrap();
        let rule = quad::make_rule(basis.domain(), basis.max_freq(exp.n_cut) + 20);
        for k in 1..=20usize {
            let overlap = quad::integrate(&rule, |y| exp.eval(&basis, y) * basis.eval(k, y));
            let expect = (-basis.eigenvalue(k) * t).exp() * basis.eval(k, &z);
            assert!(
                (overlap - expect).abs() < 1e-6,
                "k = {k}: {overlap} vs {expect}"
            );
        }
    }

    #[test]
    fn mass_is_preserved_when_the_spectrum_has_constants() {
        for kind in [
            BasisKind::IntervalNeumann,
            BasisKind::CircleCanonical,
            BasisKind::CircleRandom,
            BasisKind::SphereZonal,
            BasisKind::QuarterDiskNeumann,
        ] {
            let n_max = if kind == BasisKind::QuarterDiskNeumann { 110 } else { 60 };
            let basis = b(kind, n_max);
            let z = match basis.domain() {
                crate::bases::Domain::Interval => DomainPoint::Interval(1.2),
                crate::bases::Domain::Circle => DomainPoint::Circle(2.7),
                crate::bases::Domain::SphereZonal => DomainPoint::SphereZonal(1.0),
                _ => DomainPoint::QuarterDisk(0.5, 0.7),
            };
            let t = 1.0 / basis.eigenvalue(5);
            let exp = heat_expansion(&basis, t, &z).unwrap();
            let rule = quad::make_rule(basis.domain(), basis.max_freq(exp.n_cut.max(1)) + 4);
            let mass = quad::integrate(&rule, |y| exp.eval(&basis, y));
            assert!(
                (mass - 1.0).abs() < 1e-6,
                "{}: mass = {mass}",
                kind.name()
            );
        }
    }

    #[test]
    fn truncation_negatives_are_tiny_and_clamped() {
        let basis = b(BasisKind::IntervalDirichlet, 130);
        let t = 1.0 / basis.eigenvalue(10);
        let grid: Vec<DomainPoint> = (0..=400)
            .map(|i| DomainPoint::Interval(PI * i as f64 / 400.0))
            .collect();
        let hw = heat_kernel(&basis, t, &DomainPoint::Interval(1.4), &grid).unwrap();
        for (raw, v) in hw.raw_values.iter().zip(&hw.values) {
            assert!(*raw >= -1e-8, "raw value {raw}");
            assert!(*v >= 0.0);
        }
        assert!(hw.p_max > 0.0);
    }

    #[test]
    fn too_short_a_basis_is_reported_with_its_tail() {
        let basis = b(BasisKind::IntervalDirichlet, 10);
        let err = heat_expansion(&basis, 1e-6, &DomainPoint::Interval(1.0)).unwrap_err();
        match err {
            HeatError::BasisTooShort { achievable_tail } => {
                assert!((achievable_tail - (-100.0 * 1e-6f64).exp()).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sandwich_brackets_hold_on_the_interval() {
        let basis = b(BasisKind::IntervalDirichlet, 100);
        let (lower, mid, upper) =
            sandwich_check(&basis, 100, &DomainPoint::Interval(1.0), 0.25).unwrap();
        assert!(lower <= mid * (1.0 + 1e-9), "lower {lower} vs mid {mid}");
        assert!(mid <= upper * (1.0 + 1e-9), "mid {mid} vs upper {upper}");
        assert!((lower - (-0.25f64).exp() * upper).abs() < 1e-12 * upper);
    }

    #[test]
    fn sandwich_mid_approaches_the_diagonal_for_small_alpha() {
        let basis = b(BasisKind::IntervalDirichlet, 60);
        let (_, mid, upper) =
            sandwich_check(&basis, 60, &DomainPoint::Interval(0.7), 1e-6).unwrap();
        assert!((mid / upper - 1.0).abs() < 1e-4, "mid/upper = {}", mid / upper);
    }

    #[test]
    fn rank_one_sandwich_is_exact() {
        let basis = b(BasisKind::IntervalDirichlet, 5);
        let x = DomainPoint::Interval(1.234);
        let alpha = 0.4;
        let (lower, mid, _) = sandwich_check(&basis, 1, &x, alpha).unwrap();
        // With a single mode the mid is e^{−α}|φ_1(x)| = lower exactly.
        assert!((mid - lower).abs() < 1e-9 * lower.abs());
    }

    #[test]
    fn interval_certificate_chain_holds() {
        let n = 25;
        let basis = b(BasisKind::IntervalDirichlet, 13 * (n + 1));
        let grid = default_grid(&basis, n + 1, 10);
        let cert = theorem2_certificate(&basis, n, &grid).unwrap();
        assert!(cert.kappa >= 1.0);
        assert!(cert.kappa < 1.3, "kappa = {}", cert.kappa);
        assert!(cert.phi_next_at_z > 0.0);
        assert!(cert.sandwich_lower <= cert.sandwich_mid * (1.0 + 1e-9));
        assert!(cert.sandwich_mid <= cert.sandwich_upper * (1.0 + 1e-9));
        assert!(cert.orthogonality_residue.abs() < 1e-6);
        assert!(cert.constant_check >= 0.5);
        assert!(
            cert.ratio > 0.02 && cert.ratio < 50.0,
            "ratio = {}",
            cert.ratio
        );
        assert!(
            (cert.weighted_integral - cert.complement_integral).abs()
                < 1e-6 * (1.0 + cert.weighted_integral.abs())
        );
        // The argmax of the highest interval mode sits near a crest of
        // sin((n+1)x), so the measured ratio is O(1).
        assert!((0.3..0.5).contains(&cert.ratio), "ratio = {}", cert.ratio);
    }

    #[test]
    fn circle_certificate_shows_far_field_anticorrelation() {
        // 501 functions: at the origin the kernel is a pure cosine sum and
        // φ_{502} = cos(251·). Pointwise the product oscillates, but its
        // local average is negative everywhere away from the base point.
        let n = 501;
        let basis = b(BasisKind::CircleCanonical, 13 * (n + 1));
        let grid = default_grid(&basis, n + 1, 10);
        let cert = theorem2_certificate(&basis, n, &grid).unwrap();
        let (zx, _) = cert.z.coords();
        assert_eq!(zx, 0.0, "argmax should tie-break to the first grid point");
        assert!(cert.kappa >= 1.0 && cert.kappa < 1.2, "kappa = {}", cert.kappa);
        assert!(cert.constant_check >= 0.5);
        assert!(cert.orthogonality_residue.abs() < 1e-6);

        let sv = amalg::sign_vector(&basis, n, &cert.z);
        let m = 4000usize;
        let vals: Vec<f64> = (0..m)
            .map(|i| {
                let y = 2.0 * PI * i as f64 / m as f64;
                let p = DomainPoint::Circle(y);
                amalg::amalg_eval_with(&basis, &sv, &p)
                    * cert.sign_flip
                    * basis.eval(n + 1, &p)
            })
            .collect();
        // Sliding-window means of width 0.2 are negative at every center
        // with arc distance > 0.5 from the base point…
        let half = (0.1 / (2.0 * PI) * m as f64) as usize;
        for c in (0..m).step_by(7) {
            let y = 2.0 * PI * c as f64 / m as f64;
            let dist = y.min(2.0 * PI - y);
            if dist < 0.5 {
                continue;
            }
            let mut acc = 0.0;
            for k in 0..=2 * half {
                acc += vals[(c + m + k - half) % m];
            }
            let avg = acc / (2 * half + 1) as f64;
            assert!(avg < -0.05, "windowed average {avg} at y = {y}");
        }
        // …and the far-region integral is decisively negative.
        let far: f64 = (0..m)
            .filter(|&i| {
                let y = 2.0 * PI * i as f64 / m as f64;
                y.min(2.0 * PI - y) > 0.5
            })
            .map(|i| vals[i] * 2.0 * PI / m as f64)
            .sum();
        assert!(far < -0.35, "far-region integral = {far}");
    }

    #[test]
    fn degenerate_base_point_is_rejected() {
        let basis = b(BasisKind::IntervalDirichlet, 40);
        // A single-point grid at the boundary: φ_{n+1}(0) = 0 exactly.
        let err = theorem2_certificate(&basis, 20, &[DomainPoint::Interval(0.0)]).unwrap_err();
        assert_eq!(err, HeatError::DegenerateCertificate);
    }

    #[test]
    fn certificate_serializes_to_json() {
        let n = 12;
        let basis = b(BasisKind::IntervalDirichlet, 13 * (n + 1));
        let grid = default_grid(&basis, n + 1, 10);
        let cert = theorem2_certificate(&basis, n, &grid).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("\"kappa\""));
        assert!(text.contains("\"ratio\""));
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["n"], 12);
    }
}
