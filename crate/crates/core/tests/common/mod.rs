//! Independent numerical oracle for integration tests.
//!
//! Densities are re-implemented here from the component parameters (Gamma
//! normalizers via `statrs`), and integrals are computed by globally
//! adaptive Gauss-Kronrod (7/15-point) quadrature. Line supports are
//! integrated over `[min(mu - 9 sigma), max(mu + 9 sigma)]`; half-line
//! supports are integrated in `y = ln x` over trimmed ranges whose neglected
//! tails are far below 1e-12.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use tvbounds::{Component, Mixture};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive GK15 over `[edges[0], edges[last]]`. Each segment
/// between consecutive edges starts with pieces of width about `width`;
/// the piece with the largest error estimate is bisected until the summed
/// estimate is below `tol`.
pub fn integrate_segments<F: Fn(f64) -> f64>(f: F, edges: &[f64], width: f64, tol: f64) -> Quadrature {
    let mut heap = BinaryHeap::new();
    for e in edges.windows(2) {
        let (a, b) = (e[0], e[1]);
        let n = (((b - a) / width).ceil() as usize).clamp(1, 4000);
        for i in 0..n {
            let lo = if i == 0 { a } else { a + (b - a) * i as f64 / n as f64 };
            let hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
            let (v, e) = gk15(&f, lo, hi);
            heap.push(Piece { a: lo, b: hi, value: v, error: e });
        }
    }
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    let mut iterations = 0;
    while error > tol && iterations < 2_000_000 {
        let p = heap.pop().expect("non-empty");
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&f, p.a, mid);
        let (v2, e2) = gk15(&f, mid, p.b);
        error += e1 + e2 - p.error;
        heap.push(Piece { a: p.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: p.b, value: v2, error: e2 });
        iterations += 1;
        if iterations % 4096 == 0 {
            // re-sum to shed accumulated rounding in the running total
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let mut pieces: Vec<&Piece> = heap.iter().collect();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    Quadrature {
        value: pieces.iter().map(|p| p.value).sum(),
        error: pieces.iter().map(|p| p.error).sum(),
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, initial: usize, tol: f64) -> Quadrature {
    integrate_segments(f, &[a, b], (b - a) / initial as f64, tol)
}

/// Sign changes of `d` on `[a, b]`, found by scanning `n` equal steps and
/// bisecting each bracket to adjacent floats.
pub fn sign_changes<D: Fn(f64) -> f64>(d: D, a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut d0 = d(a);
    for i in 1..=n {
        let x1 = if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
        let d1 = d(x1);
        if d0 != 0.0 && d1 != 0.0 && (d0 < 0.0) != (d1 < 0.0) {
            let (mut lo, mut hi, neg_lo) = (x0, x1, d0 < 0.0);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let dm = d(mid);
                if dm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (dm < 0.0) == neg_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        d0 = d1;
    }
    roots
}

/// Density of one component, written out from its parameters.
pub fn component_pdf(c: &Component, x: f64) -> f64 {
    match c {
        Component::Gaussian(g) => {
            let z = (x - g.mu()) / g.sigma();
            (-0.5 * z * z).exp() / (g.sigma() * (2.0 * PI).sqrt())
        }
        Component::Gamma(g) => {
            if x <= 0.0 {
                return 0.0;
            }
            let (a, r) = (g.shape(), g.rate());
            let ln = a * r.ln() + (a - 1.0) * x.ln() - r * x - statrs::function::gamma::ln_gamma(a);
            ln.exp()
        }
        Component::Rayleigh(g) => {
            if x <= 0.0 {
                return 0.0;
            }
            let s2 = g.scale() * g.scale();
            x / s2 * (-x * x / (2.0 * s2)).exp()
        }
    }
}

pub fn component_ln_pdf(c: &Component, x: f64) -> f64 {
    match c {
        Component::Gaussian(g) => {
            let z = (x - g.mu()) / g.sigma();
            -0.5 * z * z - g.sigma().ln() - 0.5 * (2.0 * PI).ln()
        }
        Component::Gamma(g) => {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let (a, r) = (g.shape(), g.rate());
            a * r.ln() + (a - 1.0) * x.ln() - r * x - statrs::function::gamma::ln_gamma(a)
        }
        Component::Rayleigh(g) => {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let s2 = g.scale() * g.scale();
            x.ln() - s2.ln() - x * x / (2.0 * s2)
        }
    }
}

pub fn mixture_pdf(m: &Mixture, x: f64) -> f64 {
    m.components()
        .iter()
        .zip(m.weights())
        .map(|(c, w)| w * component_pdf(c, x))
        .sum()
}

pub fn mixture_ln_pdf(m: &Mixture, x: f64) -> f64 {
    let logs: Vec<f64> = m
        .components()
        .iter()
        .zip(m.weights())
        .map(|(c, w)| w.ln() + component_ln_pdf(c, x))
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

/// Trimmed range for `y = ln x` covering a half-line component.
fn log_range(c: &Component) -> (f64, f64) {
    match c {
        Component::Gamma(g) => {
            let (a, r) = (g.shape(), g.rate());
            (((1e-14f64).powf(1.0 / a) / r).ln(), ((60.0 + 2.0 * a) / r).ln())
        }
        Component::Rayleigh(g) => ((g.scale() * 1e-7).ln(), (g.scale() * 70f64.sqrt()).ln()),
        Component::Gaussian(_) => unreachable!("line-support component"),
    }
}

/// `int g(x) dx` over the common support of both mixtures (which must be
/// either all-Gaussian or all half-line). Sign changes of `kink`, if given,
/// become segment edges so that no quadrature piece straddles a kink.
pub fn integrate_support<G: Fn(f64) -> f64>(
    m: &Mixture,
    mp: &Mixture,
    g: G,
    kink: Option<&dyn Fn(f64) -> f64>,
    tol: f64,
) -> Quadrature {
    const SCAN: usize = 20_000;
    let comps: Vec<&Component> = m.components().iter().chain(mp.components()).collect();
    let gaussian = comps.iter().all(|c| matches!(c, Component::Gaussian(_)));
    if gaussian {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut min_sigma = f64::INFINITY;
        for c in &comps {
            if let Component::Gaussian(n) = c {
                lo = lo.min(n.mu() - 9.0 * n.sigma());
                hi = hi.max(n.mu() + 9.0 * n.sigma());
                min_sigma = min_sigma.min(n.sigma());
            }
        }
        let mut edges = vec![lo];
        if let Some(d) = kink {
            edges.extend(sign_changes(d, lo, hi, SCAN));
        }
        edges.push(hi);
        integrate_segments(g, &edges, min_sigma, tol)
    } else {
        assert!(
            comps.iter().all(|c| !matches!(c, Component::Gaussian(_))),
            "oracle does not handle mixed supports"
        );
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &comps {
            let (a, b) = log_range(c);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        let mut edges = vec![lo];
        if let Some(d) = kink {
            edges.extend(sign_changes(|y: f64| d(y.exp()), lo, hi, SCAN));
        }
        edges.push(hi);
        integrate_segments(
            |y| {
                let x = y.exp();
                g(x) * x
            },
            &edges,
            0.125,
            tol,
        )
    }
}

/// Oracle TV with its error estimate.
pub fn oracle_tv_with_error(m: &Mixture, mp: &Mixture) -> Quadrature {
    let d = |x: f64| mixture_pdf(m, x) - mixture_pdf(mp, x);
    integrate_support(m, mp, |x| 0.5 * d(x).abs(), Some(&d), 1e-11)
}

/// Oracle TV; panics if the quadrature error estimate exceeds 1e-8.
pub fn oracle_tv(m: &Mixture, mp: &Mixture) -> f64 {
    let q = oracle_tv_with_error(m, mp);
    assert!(q.error < 1e-8, "oracle error estimate {} too large", q.error);
    q.value
}

/// `int m ln(m / m')` by quadrature (natural log).
pub fn oracle_kl(m: &Mixture, mp: &Mixture) -> f64 {
    let q = integrate_support(
        m,
        mp,
        |x| {
            let p = mixture_pdf(m, x);
            if p == 0.0 {
                0.0
            } else {
                p * (mixture_ln_pdf(m, x) - mixture_ln_pdf(mp, x))
            }
        },
        None,
        1e-10,
    );
    q.value
}

/// Total mass as seen by the oracle (sanity check on trimming).
pub fn oracle_mass(m: &Mixture) -> f64 {
    integrate_support(m, m, |x| mixture_pdf(m, x), None, 1e-12).value
}
