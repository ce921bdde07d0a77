//! Catalog of explicit Laplacian eigenbases: domain, measure, eigenvalues,
//! evaluators, deterministic ordering, and normalization mode — plus the
//! random-wave surrogate used for null comparisons.
//!
//! Normalization modes: `Raw` evaluates the textbook formulas with unit
//! amplitude (`sin(kx)`, `J_m(j_{m,k} r) cos(mθ)`, …); `L2` divides by the
//! analytic `L²` norm so the family is orthonormal under the domain measure.
//! Every consumer pins its mode explicitly.
//!
//! Ordering is by nondecreasing eigenvalue with pinned tie-breaking:
//! circle — sin before cos, ascending frequency; square — ascending `(m, n)`
//! lexicographic among equal `m² + n²`; disk — ascending angular order,
//! cosine before sine; sector bases — ascending angular order. Volumes are
//! stored as true measures (`π`, `2π`, `π²`, `π`, `π/4`, `2`) and never
//! rescaled to 1; statements normalized to unit volume carry explicit
//! volume factors instead.

use crate::rng::Stream;
use crate::specfun;
use serde::Serialize;
use std::f64::consts::PI;

/// Version tag for the eigenvalue tie-breaking rules documented above;
/// recorded in every manifest so outputs name the ordering they used.
pub const TIE_BREAK_VERSION: u32 = 1;

/// A point of one of the catalog domains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DomainPoint {
    /// `x ∈ [0, π]`.
    Interval(f64),
    /// Angle on the circle (2π-periodic).
    Circle(f64),
    /// `(x, y) ∈ [0, π]²`.
    Square(f64, f64),
    /// Polar `(r, θ)` with `r ∈ [0, 1]`.
    Disk(f64, f64),
    /// Polar `(r, θ)` with `r ∈ [0, 1]`, `θ ∈ [0, π/2]`.
    QuarterDisk(f64, f64),
    /// Colatitude `θ ∈ [0, π]` (zonal coordinate on the 2-sphere).
    SphereZonal(f64),
    /// `x ∈ ℝ`.
    Line(f64),
}

impl DomainPoint {
    pub fn domain(&self) -> Domain {
        match self {
            DomainPoint::Interval(_) => Domain::Interval,
            DomainPoint::Circle(_) => Domain::Circle,
            DomainPoint::Square(..) => Domain::Square,
            DomainPoint::Disk(..) => Domain::Disk,
            DomainPoint::QuarterDisk(..) => Domain::QuarterDisk,
            DomainPoint::SphereZonal(_) => Domain::SphereZonal,
            DomainPoint::Line(_) => Domain::Line,
        }
    }

    /// Coordinates as `(first, optional second)`.
    pub fn coords(&self) -> (f64, Option<f64>) {
        match *self {
            DomainPoint::Interval(x)
            | DomainPoint::Circle(x)
            | DomainPoint::SphereZonal(x)
            | DomainPoint::Line(x) => (x, None),
            DomainPoint::Square(x, y)
            | DomainPoint::Disk(x, y)
            | DomainPoint::QuarterDisk(x, y) => (x, Some(y)),
        }
    }

    /// Euclidean embedding used by random waves and distance computations.
    pub fn euclidean(&self) -> (f64, f64) {
        match *self {
            DomainPoint::Interval(x)
            | DomainPoint::Circle(x)
            | DomainPoint::SphereZonal(x)
            | DomainPoint::Line(x) => (x, 0.0),
            DomainPoint::Square(x, y) => (x, y),
            DomainPoint::Disk(r, th) | DomainPoint::QuarterDisk(r, th) => {
                (r * th.cos(), r * th.sin())
            }
        }
    }
}

/// Intrinsic distance between two points of the same domain (circle:
/// shorter arc; planar domains: Euclidean; sphere ladder: colatitude gap).
pub fn distance(a: &DomainPoint, b: &DomainPoint) -> f64 {
    assert_eq!(a.domain(), b.domain(), "distance: mixed domains");
    match (a, b) {
        (DomainPoint::Circle(x), DomainPoint::Circle(y)) => {
            let d = (x - y).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d)
        }
        _ => {
            let (ax, ay) = a.euclidean();
            let (bx, by) = b.euclidean();
            ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt()
        }
    }
}

/// Domain tags of the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Domain {
    Interval,
    Circle,
    Square,
    Disk,
    QuarterDisk,
    SphereZonal,
    Line,
}

impl Domain {
    /// True measure of the domain (`∫ w`, with the sphere ladder weighted by
    /// `sin θ`). The line is non-compact and has none.
    pub fn vol(self) -> f64 {
        match self {
            Domain::Interval => PI,
            Domain::Circle => 2.0 * PI,
            Domain::Square => PI * PI,
            Domain::Disk => PI,
            Domain::QuarterDisk => PI / 4.0,
            Domain::SphereZonal => 2.0,
            Domain::Line => f64::INFINITY,
        }
    }

    /// Dimension governing Weyl-type exponents (the zonal ladder counts as
    /// the 2-sphere it lives on).
    pub fn dimension(self) -> usize {
        match self {
            Domain::Interval | Domain::Circle | Domain::Line => 1,
            Domain::Square | Domain::Disk | Domain::QuarterDisk | Domain::SphereZonal => 2,
        }
    }

    /// Density of the domain measure at `p` relative to the raw coordinates
    /// (`r` on disks, `sin θ` on the sphere ladder, 1 elsewhere).
    pub fn measure_weight(self, p: &DomainPoint) -> f64 {
        match *p {
            DomainPoint::Disk(r, _) | DomainPoint::QuarterDisk(r, _) => r,
            DomainPoint::SphereZonal(th) => th.sin(),
            _ => 1.0,
        }
    }
}

/// Normalization mode of the evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Raw,
    L2,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Raw => "raw",
            Mode::L2 => "l2",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "raw" => Some(Mode::Raw),
            "l2" => Some(Mode::L2),
            _ => None,
        }
    }
}

/// The ten basis kinds of the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisKind {
    IntervalDirichlet,
    IntervalNeumann,
    CircleCanonical,
    CircleRandom,
    SquareDirichlet,
    DiskDirichlet,
    QuarterDiskDirichlet,
    QuarterDiskNeumann,
    SphereZonal,
    Hermite,
}

impl BasisKind {
    pub const ALL: [BasisKind; 10] = [
        BasisKind::IntervalDirichlet,
        BasisKind::IntervalNeumann,
        BasisKind::CircleCanonical,
        BasisKind::CircleRandom,
        BasisKind::SquareDirichlet,
        BasisKind::DiskDirichlet,
        BasisKind::QuarterDiskDirichlet,
        BasisKind::QuarterDiskNeumann,
        BasisKind::SphereZonal,
        BasisKind::Hermite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisKind::IntervalDirichlet => "interval-dirichlet",
            BasisKind::IntervalNeumann => "interval-neumann",
            BasisKind::CircleCanonical => "circle-canonical",
            BasisKind::CircleRandom => "circle-random",
            BasisKind::SquareDirichlet => "square-dirichlet",
            BasisKind::DiskDirichlet => "disk-dirichlet",
            BasisKind::QuarterDiskDirichlet => "quarterdisk-dirichlet",
            BasisKind::QuarterDiskNeumann => "quarterdisk-neumann",
            BasisKind::SphereZonal => "sphere-zonal",
            BasisKind::Hermite => "hermite",
        }
    }

    pub fn parse(s: &str) -> Option<BasisKind> {
        BasisKind::ALL.iter().copied().find(|k| k.name() == s)
    }

    pub fn domain(self) -> Domain {
        match self {
            BasisKind::IntervalDirichlet | BasisKind::IntervalNeumann => Domain::Interval,
            BasisKind::CircleCanonical | BasisKind::CircleRandom => Domain::Circle,
            BasisKind::SquareDirichlet => Domain::Square,
            BasisKind::DiskDirichlet => Domain::Disk,
            BasisKind::QuarterDiskDirichlet | BasisKind::QuarterDiskNeumann => Domain::QuarterDisk,
            BasisKind::SphereZonal => Domain::SphereZonal,
            BasisKind::Hermite => Domain::Line,
        }
    }

    /// True exactly for the randomized kinds (a seed is then required).
    pub fn needs_seed(self) -> bool {
        matches!(self, BasisKind::CircleRandom)
    }

    /// Whether the domain's Laplacian has a constant eigenfunction that the
    /// basis deliberately omits (heat expansions add it back).
    pub fn has_constant_mode(self) -> bool {
        matches!(
            self,
            BasisKind::IntervalNeumann
                | BasisKind::CircleCanonical
                | BasisKind::CircleRandom
                | BasisKind::QuarterDiskNeumann
                | BasisKind::SphereZonal
        )
    }
}

/// Construction failures.
#[derive(Clone, Debug, PartialEq)]
pub enum BasisError {
    /// The randomized kind was requested without a seed.
    SeedRequired,
    /// A seed was passed for a deterministic kind.
    SeedNotApplicable,
    /// The root tables could not safely cover `n_max` modes.
    ZeroTableExceeded { n_max: usize },
}

impl std::fmt::Display for BasisError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisError::SeedRequired => write!(f, "this basis kind requires a seed"),
            BasisError::SeedNotApplicable => {
                write!(f, "this basis kind is deterministic and takes no seed")
            }
            BasisError::ZeroTableExceeded { n_max } => {
                write!(f, "root tables could not safely cover n_max = {n_max} modes")
            }
        }
    }
}

impl std::error::Error for BasisError {}

/// Angular factor of a planar polar mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AngularPart {
    Cos,
    Sin,
}

/// One radial × angular mode of the disk or sector bases.
#[derive(Clone, Debug)]
struct RadialMode {
    /// Angular wavenumber (`m` on the disk, `2m` on sectors; 0 = radial-only).
    angular: u32,
    /// Radial root: a zero of `J_m` (Dirichlet) or of `J_m'` (Neumann).
    root: f64,
    trig: AngularPart,
    /// Analytic `L²` norm of the raw mode under the domain measure.
    l2_norm: f64,
}

/// An explicit eigenbasis: immutable after construction, shareable, and a
/// pure function of `(kind, n_max, mode, seed)`.
#[derive(Clone, Debug)]
pub struct Basis {
    kind: BasisKind,
    mode: Mode,
    n_max: usize,
    seed: Option<u64>,
    eigenvalues: Vec<f64>,
    /// Circle kinds: phase `x_j` per frequency `j` (index `j - 1`).
    phases: Vec<f64>,
    /// Square kind: `(m, n)` per index.
    square_modes: Vec<(u32, u32)>,
    /// Disk and sector kinds: per-index radial modes.
    radial_modes: Vec<RadialMode>,
}

/// Serializable descriptor embedded in every output artifact.
#[derive(Clone, Debug, Serialize)]
pub struct BasisManifest {
    pub kind: String,
    pub n_max: usize,
    pub mode: String,
    pub seed: Option<u64>,
    pub tie_break_version: u32,
}

/// Build a basis of the first `n_max` eigenfunctions of `kind`.
///
/// `seed` is required exactly for the randomized kinds and rejected
/// otherwise.
pub fn make_basis(
    kind: BasisKind,
    n_max: usize,
    mode: Mode,
    seed: Option<u64>,
) -> Result<Basis, BasisError> {
    assert!(n_max >= 1, "make_basis: n_max must be at least 1");
    match (kind.needs_seed(), seed) {
        (true, None) => return Err(BasisError::SeedRequired),
        (false, Some(_)) => return Err(BasisError::SeedNotApplicable),
        _ => {}
    }

    let mut basis = Basis {
        kind,
        mode,
        n_max,
        seed,
        eigenvalues: Vec::with_capacity(n_max),
        phases: Vec::new(),
        square_modes: Vec::new(),
        radial_modes: Vec::new(),
    };

    match kind {
        BasisKind::IntervalDirichlet | BasisKind::IntervalNeumann => {
            basis.eigenvalues = (1..=n_max).map(|k| (k * k) as f64).collect();
        }
        BasisKind::CircleCanonical | BasisKind::CircleRandom => {
            let freq_max = n_max.div_ceil(2);
            basis.eigenvalues = (1..=n_max)
                .map(|k| {
                    let j = k.div_ceil(2);
                    (j * j) as f64
                })
                .collect();
            basis.phases = (1..=freq_max)
                .map(|j| match seed {
                    // One phase per frequency, keyed by the frequency so the
                    // basis is stable under extension of n_max.
                    Some(s) => 2.0 * PI * Stream::new(s, j as u64).next_f64(),
                    None => 0.0,
                })
                .collect();
        }
        BasisKind::SquareDirichlet => {
            let (modes, lambdas) = square_modes(n_max);
            basis.square_modes = modes;
            basis.eigenvalues = lambdas;
        }
        BasisKind::DiskDirichlet | BasisKind::QuarterDiskDirichlet | BasisKind::QuarterDiskNeumann => {
            let (modes, lambdas) = polar_modes(kind, n_max)?;
            basis.radial_modes = modes;
            basis.eigenvalues = lambdas;
        }
        BasisKind::SphereZonal => {
            basis.eigenvalues = (1..=n_max).map(|k| (k * (k + 1)) as f64).collect();
        }
        BasisKind::Hermite => {
            basis.eigenvalues = (1..=n_max).map(|k| (2 * k - 1) as f64).collect();
        }
    }
    debug_assert!(basis.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    Ok(basis)
}

/// Enumerate square modes `(m, n)`, `λ = m² + n²`, ordered by `(λ, m, n)`.
fn square_modes(n_max: usize) -> (Vec<(u32, u32)>, Vec<f64>) {
    let mut cap = ((4.0 * n_max as f64 / PI).sqrt().ceil() as u32) + 8;
    loop {
        let mut cands: Vec<(u64, u32, u32)> = Vec::with_capacity((cap * cap) as usize);
        for m in 1..=cap {
            for n in 1..=cap {
                cands.push(((m * m + n * n) as u64, m, n));
            }
        }
        cands.sort_unstable();
        // Any mode outside the cap box has λ > cap²; the cut is safe only if
        // the last kept eigenvalue stays strictly below that.
        if cands.len() >= n_max && cands[n_max - 1].0 < (cap as u64) * (cap as u64) {
            let kept = &cands[..n_max];
            return (
                kept.iter().map(|&(_, m, n)| (m, n)).collect(),
                kept.iter().map(|&(l, ..)| l as f64).collect(),
            );
        }
        cap *= 2;
    }
}

/// Enumerate disk / sector modes ordered by `(λ, angular order, cos before
/// sin)`, with root tables grown until the cut is provably below every
/// untabulated root.
fn polar_modes(kind: BasisKind, n_max: usize) -> Result<(Vec<RadialMode>, Vec<f64>), BasisError> {
    let sqrt_n = (n_max as f64).sqrt();
    let mut m_cap = (2.5 * sqrt_n).ceil() as usize + 10;
    let mut k_cap = sqrt_n.ceil() as usize + 12;
    for _ in 0..5 {
        // Angular orders present in each kind: disk m = 0, 1, 2, …;
        // Dirichlet sector 2, 4, …; Neumann sector 0, 2, 4, …
        let orders: Vec<u32> = match kind {
            BasisKind::DiskDirichlet => (0..=m_cap as u32).collect(),
            BasisKind::QuarterDiskDirichlet => (1..=m_cap as u32).map(|m| 2 * m).collect(),
            BasisKind::QuarterDiskNeumann => (0..=m_cap as u32).map(|m| 2 * m).collect(),
            _ => unreachable!(),
        };
        let tables: Vec<specfun::BesselZeroTable> = orders
            .iter()
            .map(|&a| match kind {
                BasisKind::QuarterDiskNeumann => {
                    specfun::bessel_derivative_zeros(a as usize, k_cap + 1)
                }
                _ => specfun::bessel_zeros(a as usize, k_cap + 1),
            })
            .collect();

        // (root, angular, trig rank) sorted gives the (λ, m, cos<sin) order.
        let mut cands: Vec<(f64, u32, u8)> = Vec::new();
        for (ti, &a) in orders.iter().enumerate() {
            for k in 0..k_cap {
                let z = tables[ti].zeros[k];
                if kind == BasisKind::DiskDirichlet && a > 0 {
                    cands.push((z, a, 0));
                    cands.push((z, a, 1));
                } else {
                    cands.push((z, a, 0));
                }
            }
        }
        cands.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());

        if cands.len() >= n_max {
            let cutoff = cands[n_max - 1].0;
            // Roots we never tabulated: deeper radial roots start at each
            // table's (k_cap+1)-th entry; higher angular orders have first
            // roots above the order itself.
            let deeper = tables
                .iter()
                .map(|t| t.zeros[k_cap])
                .fold(f64::INFINITY, f64::min);
            let next_order = *orders.last().unwrap() as f64 + 1.0;
            if cutoff < deeper.min(next_order) {
                let kept = &cands[..n_max];
                let modes = kept
                    .iter()
                    .map(|&(root, angular, trig)| RadialMode {
                        angular,
                        root,
                        trig: if trig == 0 { AngularPart::Cos } else { AngularPart::Sin },
                        l2_norm: polar_l2_norm(kind, angular, root),
                    })
                    .collect();
                let lambdas = kept.iter().map(|&(root, ..)| root * root).collect();
                return Ok((modes, lambdas));
            }
        }
        m_cap += m_cap / 2 + 8;
        k_cap += k_cap / 2 + 8;
    }
    Err(BasisError::ZeroTableExceeded { n_max })
}

/// Analytic `L²` norm (under `r dr dθ`) of a raw polar mode.
fn polar_l2_norm(kind: BasisKind, angular: u32, root: f64) -> f64 {
    let a = angular as usize;
    match kind {
        // ∫₀¹ J_m(jr)² r dr = J_{m+1}(j)²/2 at a zero j of J_m; the angular
        // factor integrates to 2π (m = 0) or π (m ≥ 1) over the full circle.
        BasisKind::DiskDirichlet => {
            let radial = specfun::bessel_j(a + 1, root).powi(2) / 2.0;
            let angular_mass = if angular == 0 { 2.0 * PI } else { PI };
            (radial * angular_mass).sqrt()
        }
        // sin²(2mθ) integrates to π/4 over [0, π/2].
        BasisKind::QuarterDiskDirichlet => {
            let radial = specfun::bessel_j(a + 1, root).powi(2) / 2.0;
            (radial * PI / 4.0).sqrt()
        }
        // ∫₀¹ J_m(αr)² r dr = (1 − m²/α²) J_m(α)²/2 at a zero α of J_m';
        // cos²(2mθ) integrates to π/2 (m = 0) or π/4 (m ≥ 1).
        BasisKind::QuarterDiskNeumann => {
            let mf = angular as f64;
            let radial = (1.0 - mf * mf / (root * root)) * specfun::bessel_j(a, root).powi(2) / 2.0;
            let angular_mass = if angular == 0 { PI / 2.0 } else { PI / 4.0 };
            (radial * angular_mass).sqrt()
        }
        _ => unreachable!(),
    }
}

impl Basis {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn domain(&self) -> Domain {
        self.kind.domain()
    }

    pub fn vol(&self) -> f64 {
        self.domain().vol()
    }

    pub fn manifest(&self) -> BasisManifest {
        BasisManifest {
            kind: self.kind.name().to_string(),
            n_max: self.n_max,
            mode: self.mode.name().to_string(),
            seed: self.seed,
            tie_break_version: TIE_BREAK_VERSION,
        }
    }

    /// Eigenvalue `λ_k` (1-based, nondecreasing).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.n_max, "eigenvalue: index {k} out of range");
        self.eigenvalues[k - 1]
    }

    /// Largest wavenumber present among the first `n` eigenfunctions
    /// (`⌈√λ_n⌉`); the resolution parameter quadrature rules are sized by.
    pub fn max_freq(&self, n: usize) -> usize {
        self.eigenvalue(n).sqrt().ceil() as usize
    }

    /// Evaluate `φ_k(p)` (1-based `k`) under the basis normalization mode.
    pub fn eval(&self, k: usize, p: &DomainPoint) -> f64 {
        assert!(k >= 1 && k <= self.n_max, "eval: index {k} out of range");
        assert_eq!(
            p.domain(),
            self.domain(),
            "eval: point domain does not match basis domain"
        );
        match self.kind {
            BasisKind::Hermite => {
                let mut last = 0.0;
                self.for_each_eval(k, p, |_, v| last = v);
                last
            }
            BasisKind::SphereZonal => {
                let mut last = 0.0;
                self.for_each_eval(k, p, |_, v| last = v);
                last
            }
            _ => self.eval_direct(k, p),
        }
    }

    /// Stream `φ_1(p), …, φ_n(p)` to `visit(k, value)` in one pass, sharing
    /// recurrences where the kind has them. This is the allocation-free
    /// workhorse behind all fused kernel sums.
    pub fn for_each_eval(&self, n: usize, p: &DomainPoint, mut visit: impl FnMut(usize, f64)) {
        assert!(n >= 1 && n <= self.n_max, "for_each_eval: count {n} out of range");
        assert_eq!(
            p.domain(),
            self.domain(),
            "for_each_eval: point domain does not match basis domain"
        );
        match (self.kind, *p) {
            (BasisKind::Hermite, DomainPoint::Line(x)) => {
                // Already orthonormal; both modes use the raw values.
                specfun::hermite_psi_scan(n - 1, x, |deg, v| visit(deg + 1, v));
            }
            (BasisKind::SphereZonal, DomainPoint::SphereZonal(th)) => {
                specfun::legendre_scan(n, th.cos(), |deg, pk| {
                    if deg >= 1 {
                        visit(deg, (deg as f64 + 0.5).sqrt() * pk);
                    }
                });
            }
            _ => {
                for k in 1..=n {
                    visit(k, self.eval_direct(k, p));
                }
            }
        }
    }

    fn eval_direct(&self, k: usize, p: &DomainPoint) -> f64 {
        let factor = match self.mode {
            Mode::Raw => 1.0,
            Mode::L2 => self.l2_factor(k),
        };
        factor
            * match (self.kind, *p) {
                (BasisKind::IntervalDirichlet, DomainPoint::Interval(x)) => (k as f64 * x).sin(),
                (BasisKind::IntervalNeumann, DomainPoint::Interval(x)) => (k as f64 * x).cos(),
                (
                    BasisKind::CircleCanonical | BasisKind::CircleRandom,
                    DomainPoint::Circle(x),
                ) => {
                    let j = k.div_ceil(2);
                    let arg = j as f64 * (x - self.phases[j - 1]);
                    if k % 2 == 1 {
                        arg.sin()
                    } else {
                        arg.cos()
                    }
                }
                (BasisKind::SquareDirichlet, DomainPoint::Square(x, y)) => {
                    let (m, n) = self.square_modes[k - 1];
                    (m as f64 * x).sin() * (n as f64 * y).sin()
                }
                (
                    BasisKind::DiskDirichlet
                    | BasisKind::QuarterDiskDirichlet
                    | BasisKind::QuarterDiskNeumann,
                    DomainPoint::Disk(r, th) | DomainPoint::QuarterDisk(r, th),
                ) => {
                    let mode = &self.radial_modes[k - 1];
                    let radial = specfun::bessel_j(mode.angular as usize, mode.root * r);
                    let ang = mode.angular as f64 * th;
                    radial
                        * match mode.trig {
                            AngularPart::Cos => ang.cos(),
                            AngularPart::Sin => ang.sin(),
                        }
                }
                (BasisKind::SphereZonal, DomainPoint::SphereZonal(th)) => {
                    (k as f64 + 0.5).sqrt() * specfun::legendre_p(k, th.cos())
                }
                (BasisKind::Hermite, DomainPoint::Line(x)) => specfun::hermite_psi(k - 1, x),
                _ => unreachable!("eval_direct: domain mismatch already checked"),
            }
    }

    /// Reciprocal of the raw `L²` norm of `φ_k` (the `L2`-mode prefactor).
    fn l2_factor(&self, k: usize) -> f64 {
        match self.kind {
            BasisKind::IntervalDirichlet | BasisKind::IntervalNeumann => (2.0 / PI).sqrt(),
            BasisKind::CircleCanonical | BasisKind::CircleRandom => 1.0 / PI.sqrt(),
            BasisKind::SquareDirichlet => 2.0 / PI,
            BasisKind::DiskDirichlet
            | BasisKind::QuarterDiskDirichlet
            | BasisKind::QuarterDiskNeumann => 1.0 / self.radial_modes[k - 1].l2_norm,
            // Already orthonormal in raw form.
            BasisKind::SphereZonal | BasisKind::Hermite => 1.0,
        }
    }
}

/// A Berry-type random wave: a superposition of `N` plane waves of fixed
/// wavenumber `√λ` with independent standard-normal amplitudes, uniform
/// phases, and uniform directions.
#[derive(Clone, Debug)]
pub struct RandomWave {
    pub dim: u8,
    pub lambda: f64,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
    /// Unit direction vectors (`(±1, 0)` in dimension 1).
    pub directions: Vec<(f64, f64)>,
    /// Volume entering the `√(2/vol)` normalization, so the pointwise
    /// variance is `1/vol`.
    pub vol: f64,
    pub seed: u64,
}

/// Draw a random wave; each term owns the stream `(seed, term index)`.
pub fn random_wave(dim: u8, lambda: f64, n_terms: usize, seed: u64, vol: f64) -> RandomWave {
    assert!(dim == 1 || dim == 2, "random_wave: dim must be 1 or 2");
    assert!(lambda > 0.0, "random_wave: lambda must be positive");
    assert!(n_terms >= 1, "random_wave: need at least one term");
    let mut amplitudes = Vec::with_capacity(n_terms);
    let mut phases = Vec::with_capacity(n_terms);
    let mut directions = Vec::with_capacity(n_terms);
    for i in 0..n_terms {
        let mut st = Stream::new(seed, i as u64);
        amplitudes.push(st.next_gaussian());
        phases.push(2.0 * PI * st.next_f64());
        directions.push(if dim == 1 {
            if st.next_u64() >> 63 == 0 {
                (1.0, 0.0)
            } else {
                (-1.0, 0.0)
            }
        } else {
            let ang = 2.0 * PI * st.next_f64();
            (ang.cos(), ang.sin())
        });
    }
    RandomWave {
        dim,
        lambda,
        amplitudes,
        phases,
        directions,
        vol,
        seed,
    }
}

/// Evaluate the wave: `√(2/vol) · N^{-1/2} · Σ aₙ cos(√λ ⟨dₙ, p⟩ + εₙ)`.
pub fn eval_wave(w: &RandomWave, p: &DomainPoint) -> f64 {
    let (x, y) = p.euclidean();
    let wavenumber = w.lambda.sqrt();
    let mut sum = 0.0;
    for i in 0..w.amplitudes.len() {
        let (dx, dy) = w.directions[i];
        sum += w.amplitudes[i] * (wavenumber * (dx * x + dy * y) + w.phases[i]).cos();
    }
    (2.0 / w.vol).sqrt() / (w.amplitudes.len() as f64).sqrt() * sum
}

/// Uniformly spaced evaluation grid with at least `pts_per_wavelength`
/// points per shortest wavelength of the first `n` eigenfunctions (and at
/// least a fixed floor). Periodic coordinates omit the duplicate endpoint;
/// 2D grids take the per-axis count from the same rule.
pub fn default_grid(basis: &Basis, n: usize, pts_per_wavelength: usize) -> Vec<DomainPoint> {
    let freq = basis.max_freq(n).max(1);
    let raw = |len: f64| -> usize {
        (pts_per_wavelength as f64 * len * freq as f64 / (2.0 * PI)).ceil() as usize
    };
    // 1D coordinates get a generous floor; 2D axes use a smaller floor so
    // the product stays tractable while still resolving every wavelength.
    let line_1d = |len: f64| raw(len).max(200);
    let axis_2d = |len: f64| raw(len).max(40);
    match basis.domain() {
        Domain::Interval => {
            let m = line_1d(PI);
            (0..=m)
                .map(|i| DomainPoint::Interval(PI * i as f64 / m as f64))
                .collect()
        }
        Domain::Circle => {
            let m = line_1d(2.0 * PI);
            (0..m)
                .map(|i| DomainPoint::Circle(2.0 * PI * i as f64 / m as f64))
                .collect()
        }
        Domain::SphereZonal => {
            let m = line_1d(PI);
            (0..=m)
                .map(|i| DomainPoint::SphereZonal(PI * i as f64 / m as f64))
                .collect()
        }
        Domain::Line => {
            let extent = (2.0 * basis.eigenvalue(n)).sqrt() + 4.0;
            let m = line_1d(2.0 * extent);
            (0..=m)
                .map(|i| DomainPoint::Line(-extent + 2.0 * extent * i as f64 / m as f64))
                .collect()
        }
        Domain::Square => {
            let m = axis_2d(PI);
            let mut pts = Vec::with_capacity((m + 1) * (m + 1));
            for i in 0..=m {
                for j in 0..=m {
                    pts.push(DomainPoint::Square(
                        PI * i as f64 / m as f64,
                        PI * j as f64 / m as f64,
                    ));
                }
            }
            pts
        }
        Domain::Disk => {
            let mr = axis_2d(1.0);
            let mt = axis_2d(2.0 * PI);
            let mut pts = Vec::with_capacity(mr * mt);
            for i in 1..=mr {
                for j in 0..mt {
                    pts.push(DomainPoint::Disk(
                        i as f64 / mr as f64,
                        2.0 * PI * j as f64 / mt as f64,
                    ));
                }
            }
            pts
        }
        Domain::QuarterDisk => {
            let mr = axis_2d(1.0);
            let mt = axis_2d(PI / 2.0);
            let mut pts = Vec::with_capacity(mr * (mt + 1));
            for i in 1..=mr {
                for j in 0..=mt {
                    pts.push(DomainPoint::QuarterDisk(
                        i as f64 / mr as f64,
                        PI / 2.0 * j as f64 / mt as f64,
                    ));
                }
            }
            pts
        }
    }
}
