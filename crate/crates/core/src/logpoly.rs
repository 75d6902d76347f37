//! Functions of the form `g(x) = c0 + c1 x + c2 x^2 + cl ln x`.
//!
//! Every weighted log-density handled by the crate, and every difference of
//! two of them, has this shape. Ranges and roots over an interval are found
//! from the (at most two) stationary points: `g` is monotone between them.

/// `constant + linear x + quadratic x^2 + log ln(x)`, defined on `(0, inf)`
/// when `positive` is set and on the whole line otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogPoly {
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
    pub log: f64,
    pub positive: bool,
}

impl LogPoly {
    pub(crate) fn sub(&self, other: &LogPoly) -> LogPoly {
        LogPoly {
            constant: self.constant - other.constant,
            linear: self.linear - other.linear,
            quadratic: self.quadratic - other.quadratic,
            log: self.log - other.log,
            positive: self.positive || other.positive,
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.linear == 0.0 && self.quadratic == 0.0 && self.log == 0.0
    }

    /// Value at an interior point of the domain.
    pub(crate) fn eval(&self, x: f64) -> f64 {
        let mut v = self.constant + x * (self.linear + x * self.quadratic);
        if self.log != 0.0 {
            v += self.log * x.ln();
        }
        v
    }

    fn lower_domain(&self) -> f64 {
        if self.positive {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Limit of `g` at `x` (an endpoint of the interval under study, possibly
    /// `±inf` or the domain boundary 0).
    pub(crate) fn limit(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            let inf = f64::INFINITY;
            return if self.quadratic != 0.0 {
                inf.copysign(self.quadratic)
            } else if self.linear != 0.0 {
                inf.copysign(self.linear)
            } else if self.log != 0.0 {
                inf.copysign(self.log)
            } else {
                self.constant
            };
        }
        if x == f64::NEG_INFINITY {
            debug_assert!(!self.positive);
            let inf = f64::INFINITY;
            return if self.quadratic != 0.0 {
                inf.copysign(self.quadratic)
            } else if self.linear != 0.0 {
                -inf.copysign(self.linear)
            } else {
                self.constant
            };
        }
        if self.positive && x <= 0.0 {
            return if self.log != 0.0 {
                // cl ln x -> -inf * cl as x -> 0+
                -f64::INFINITY.copysign(self.log)
            } else {
                self.constant
            };
        }
        self.eval(x)
    }

    /// Stationary points of `g` inside its domain, ascending.
    pub(crate) fn stationary_points(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2);
        if self.log == 0.0 {
            if self.quadratic != 0.0 {
                // g' = c1 + 2 c2 x
                let x = -self.linear / (2.0 * self.quadratic);
                if !self.positive || x > 0.0 {
                    out.push(x);
                }
            }
            return out;
        }
        // x g'(x) = 2 c2 x^2 + c1 x + cl, x > 0
        for x in quadratic_roots(2.0 * self.quadratic, self.linear, self.log) {
            if x > 0.0 && x.is_finite() {
                out.push(x);
            }
        }
        out
    }

    /// Exact infimum and supremum of `g` over `[a, b]` (endpoints may be
    /// infinite; the interval is clipped to the domain).
    pub(crate) fn range(&self, a: f64, b: f64) -> (f64, f64) {
        let a = a.max(self.lower_domain());
        let mut lo = self.limit(a).min(self.limit(b));
        let mut hi = self.limit(a).max(self.limit(b));
        for x in self.stationary_points() {
            if x > a && x < b {
                let v = self.eval(x);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Points in the open interval `(a, b)` where `g` vanishes, ascending.
    pub(crate) fn roots(&self, a: f64, b: f64) -> Vec<f64> {
        let a = a.max(self.lower_domain());
        if a.is_nan() || b.is_nan() || a >= b || self.is_zero() {
            return Vec::new();
        }
        if self.log == 0.0 {
            let mut roots: Vec<f64> = if self.quadratic != 0.0 {
                quadratic_roots(self.quadratic, self.linear, self.constant)
            } else if self.linear != 0.0 {
                vec![-self.constant / self.linear]
            } else {
                Vec::new()
            };
            roots.retain(|&x| x > a && x < b);
            return roots;
        }
        let mut knots = vec![a];
        knots.extend(self.stationary_points().into_iter().filter(|&x| x > a && x < b));
        knots.push(b);
        let mut roots = Vec::new();
        for w in knots.windows(2) {
            let (p, q) = (w[0], w[1]);
            let (gp, gq) = (self.limit(p), self.limit(q));
            if gp == 0.0 && p > a {
                // touching root exactly at a stationary point
                roots.push(p);
            }
            if gp.signum() != gq.signum() && gp != 0.0 && gq != 0.0 {
                if let Some(r) = self.bisect_monotone(p, q, gp) {
                    roots.push(r);
                }
            }
        }
        roots.dedup();
        roots
    }

    /// Root of `g` on a monotone piece `(p, q)` where the limits at the two
    /// ends have opposite signs and `g(p+)` has the sign of `gp`.
    fn bisect_monotone(&self, p: f64, q: f64, gp: f64) -> Option<f64> {
        let left_sign = gp.signum();
        let matches_left = |x: f64| self.eval(x).signum() == left_sign;
        // finite bracket [lo, hi] with sign(g(lo)) == left_sign != sign(g(hi))
        let mut lo = if p == f64::NEG_INFINITY {
            let base = if q.is_finite() { q } else { 0.0 };
            let mut step = 1.0;
            loop {
                let x = base - step;
                if !x.is_finite() {
                    return None;
                }
                if matches_left(x) {
                    break x;
                }
                step *= 2.0;
            }
        } else if self.positive && p <= 0.0 {
            let mut x = if q.is_finite() { q } else { 1.0 };
            loop {
                x *= 0.5;
                if x == 0.0 {
                    return None;
                }
                if matches_left(x) {
                    break x;
                }
            }
        } else {
            p
        };
        let mut hi = if q.is_finite() {
            q
        } else {
            let base = lo.max(0.0);
            let mut step = 1.0;
            loop {
                let x = base + step;
                if !x.is_finite() {
                    return None;
                }
                if !matches_left(x) {
                    break x;
                }
                step *= 2.0;
            }
        };
        for _ in 0..4096 {
            let mid = if lo > 0.0 && hi / lo > 4.0 {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.eval(mid);
            if v == 0.0 {
                return Some(mid);
            }
            if v.signum() == left_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Real roots of `a x^2 + b x + c` (`a != 0`), ascending, via the
/// cancellation-free form `q = -(b + sign(b) sqrt(D)) / 2`.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + sq.copysign(b));
    if q == 0.0 {
        // b == 0 and c == 0
        return vec![0.0];
    }
    let (r1, r2) = (q / a, c / q);
    if r1 == r2 {
        vec![r1]
    } else if r1 < r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    }
}
