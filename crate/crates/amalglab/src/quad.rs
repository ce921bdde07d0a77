//! Domain-aware quadrature: composite Gauss–Legendre panels on 1D pieces,
//! tensor constructions in 2D, with measure factors (`r`, `sin θ`) folded
//! into the weights so `integrate` is a plain weighted sum.
//!
//! Rules are sized by an `order` parameter — the largest wavenumber the
//! integrand is expected to contain. Panel counts guarantee at least ten
//! nodes per wavelength at that order; callers integrating products pass
//! the sum of the factors' orders.

use crate::bases::{Domain, DomainPoint};
use crate::specfun;
use std::f64::consts::PI;

/// Nodes per Gauss–Legendre panel. A 16-point panel is exact through
/// polynomial degree 31, so panel counts — not panel size — set resolution.
const PANEL_NODES: usize = 16;

/// A concrete quadrature rule. Weights include all measure factors; the
/// weight sum equals the domain volume (compact domains).
#[derive(Clone, Debug)]
pub struct QuadRule {
    pub domain: Domain,
    pub nodes: Vec<DomainPoint>,
    pub weights: Vec<f64>,
    /// The resolution parameter the rule was built for.
    pub order: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending, via Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre: need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut xi = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = specfun::legendre_p_with_derivative(n, xi);
            dp = d;
            let step = p / d;
            xi -= step;
            if step.abs() < 1e-15 {
                let (_, d) = specfun::legendre_p_with_derivative(n, xi);
                dp = d;
                break;
            }
        }
        let weight = 2.0 / ((1.0 - xi * xi) * dp * dp);
        // The guess enumerates roots descending from +1.
        x[n - 1 - i] = xi;
        w[n - 1 - i] = weight;
        x[i] = -xi;
        w[i] = weight;
    }
    (x, w)
}

/// Panels needed on a segment of length `len` to give ≥ 10 nodes per
/// wavelength of wavenumber `freq` (never fewer than two panels).
fn panels_for(len: f64, freq: usize) -> usize {
    let nodes_needed = 10.0 * len * freq.max(1) as f64 / (2.0 * PI);
    ((nodes_needed / PANEL_NODES as f64).ceil() as usize).max(2)
}

/// Composite Gauss–Legendre nodes and weights on `[a, b]`.
fn composite_gl(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(PANEL_NODES);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * PANEL_NODES);
    let mut weights = Vec::with_capacity(panels * PANEL_NODES);
    for p in 0..panels {
        let center = a + (p as f64 + 0.5) * h;
        for j in 0..PANEL_NODES {
            nodes.push(center + 0.5 * h * gx[j]);
            weights.push(0.5 * h * gw[j]);
        }
    }
    (nodes, weights)
}

/// Build a rule resolving integrands of wavenumber up to `order`.
pub fn make_rule(domain: Domain, order: usize) -> QuadRule {
    assert!(order >= 1, "make_rule: order must be at least 1");
    let (nodes, weights) = match domain {
        Domain::Interval => {
            let (x, w) = composite_gl(0.0, PI, panels_for(PI, order));
            (x.into_iter().map(DomainPoint::Interval).collect(), w)
        }
        Domain::Circle => {
            let (x, w) = composite_gl(0.0, 2.0 * PI, panels_for(2.0 * PI, order));
            (x.into_iter().map(DomainPoint::Circle).collect(), w)
        }
        Domain::Square => {
            let (x, w) = composite_gl(0.0, PI, panels_for(PI, order));
            let mut nodes = Vec::with_capacity(x.len() * x.len());
            let mut weights = Vec::with_capacity(x.len() * x.len());
            for (xi, wi) in x.iter().zip(&w) {
                for (yj, wj) in x.iter().zip(&w) {
                    nodes.push(DomainPoint::Square(*xi, *yj));
                    weights.push(wi * wj);
                }
            }
            (nodes, weights)
        }
        Domain::Disk => {
            let (r, wr) = composite_gl(0.0, 1.0, panels_for(1.0, order));
            // Periodic angular direction: a uniform rectangle rule is
            // exact for harmonics below the node count.
            let nt = 2 * order + 16;
            let ht = 2.0 * PI / nt as f64;
            let mut nodes = Vec::with_capacity(r.len() * nt);
            let mut weights = Vec::with_capacity(r.len() * nt);
            for (ri, wi) in r.iter().zip(&wr) {
                for j in 0..nt {
                    nodes.push(DomainPoint::Disk(*ri, ht * j as f64));
                    weights.push(wi * ri * ht);
                }
            }
            (nodes, weights)
        }
        Domain::QuarterDisk => {
            let (r, wr) = composite_gl(0.0, 1.0, panels_for(1.0, order));
            // Trapezoid on [0, π/2] with half-weight endpoints: exact for
            // the even angular extensions (harmonics below 2·nt).
            let nt = 2 * order + 16;
            let ht = PI / 2.0 / nt as f64;
            let mut nodes = Vec::with_capacity(r.len() * (nt + 1));
            let mut weights = Vec::with_capacity(r.len() * (nt + 1));
            for (ri, wi) in r.iter().zip(&wr) {
                for j in 0..=nt {
                    let end = j == 0 || j == nt;
                    nodes.push(DomainPoint::QuarterDisk(*ri, ht * j as f64));
                    weights.push(wi * ri * ht * if end { 0.5 } else { 1.0 });
                }
            }
            (nodes, weights)
        }
        Domain::SphereZonal => {
            // One Gauss–Legendre rule in u = cos θ absorbs the sin θ
            // measure exactly; zonal integrands are polynomials in u.
            let n = (order + 20).max(32);
            let (u, w) = gauss_legendre(n);
            (
                u.into_iter().map(|ui| DomainPoint::SphereZonal(ui.acos())).collect(),
                w,
            )
        }
        Domain::Line => {
            // Truncate past the classical turning point of the highest
            // mode; the integrand is Gaussian-small beyond.
            let extent = std::f64::consts::SQRT_2 * order as f64 + 10.0;
            let (x, w) = composite_gl(-extent, extent, panels_for(2.0 * extent, order));
            (x.into_iter().map(DomainPoint::Line).collect(), w)
        }
    };
    QuadRule {
        domain,
        nodes,
        weights,
        order,
    }
}

/// Weighted Kahan sum of `f` over the rule. Sequential and deterministic:
/// the same rule and integrand always produce bit-identical results.
pub fn integrate(rule: &QuadRule, mut f: impl FnMut(&DomainPoint) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for (node, &w) in rule.nodes.iter().zip(&rule.weights) {
        let term = w * f(node);
        let y = term - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// An integral together with the change observed when the rule order is
/// doubled — the caller's convergence evidence.
#[derive(Clone, Copy, Debug)]
pub struct CheckedIntegral {
    /// Value at the doubled order.
    pub value: f64,
    /// |value(2·order) − value(order)|.
    pub doubled_delta: f64,
}

/// Integrate at `order` and `2·order` and report the refined value with the
/// observed delta.
pub fn integrate_with_refinement(
    domain: Domain,
    order: usize,
    mut f: impl FnMut(&DomainPoint) -> f64,
) -> CheckedIntegral {
    let coarse = integrate(&make_rule(domain, order), &mut f);
    let fine = integrate(&make_rule(domain, 2 * order), &mut f);
    CheckedIntegral {
        value: fine,
        doubled_delta: (fine - coarse).abs(),
    }
}
