use std::fmt;
use std::sync::Arc;

type SmoothFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function on (a,b), optionally carrying a declared power at its left
/// endpoint: f(x) = (x − anchor)^μ · h(x) with h smooth.
///
/// Quadratures over an interval whose left end equals `anchor` fold the
/// power into the Gauss–Jacobi weight and sample only h, which keeps
/// spectral accuracy for the weakly singular functions that Sonin
/// operators produce.
#[derive(Clone)]
pub struct Integrand {
    smooth: SmoothFn,
    anchor: f64,
    left_exponent: f64,
}

impl Integrand {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Integrand {
            smooth: Arc::new(f),
            anchor: 0.0,
            left_exponent: 0.0,
        }
    }

    /// f(x) = (x − anchor)^exponent · smooth(x).
    pub fn with_left_power<F>(anchor: f64, exponent: f64, smooth: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Integrand {
            smooth: Arc::new(smooth),
            anchor,
            left_exponent: exponent,
        }
    }

    pub fn zero() -> Self {
        Integrand::new(|_| 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let h = (self.smooth)(x);
        if self.left_exponent == 0.0 {
            h
        } else {
            (x - self.anchor).powf(self.left_exponent) * h
        }
    }

    pub fn smooth_part(&self, x: f64) -> f64 {
        (self.smooth)(x)
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn left_exponent(&self) -> f64 {
        self.left_exponent
    }

    /// The same function re-expressed with anchor `a`. A declared power at
    /// another anchor is folded into the smooth part.
    pub fn anchored_at(&self, a: f64) -> Integrand {
        if self.anchor == a {
            return self.clone();
        }
        if self.left_exponent == 0.0 {
            return Integrand {
                smooth: Arc::clone(&self.smooth),
                anchor: a,
                left_exponent: 0.0,
            };
        }
        let f = self.clone();
        Integrand::new(move |x| f.eval(x)).anchored_at(a)
    }

    /// Power usable by a quadrature whose left endpoint is `a`.
    pub(crate) fn exponent_at(&self, a: f64) -> f64 {
        if self.anchor == a {
            self.left_exponent
        } else {
            0.0
        }
    }

    /// The factor left after removing `exponent_at(a)`.
    pub(crate) fn reduced_at(&self, a: f64, x: f64) -> f64 {
        if self.anchor == a {
            (self.smooth)(x)
        } else {
            self.eval(x)
        }
    }

    /// Σ cᵢ fᵢ, keeping the smallest declared power when all terms share an
    /// anchor.
    pub fn linear_combination(terms: &[(f64, Integrand)]) -> Integrand {
        let Some((_, first)) = terms.first() else {
            return Integrand::zero();
        };
        let anchor = first.anchor;
        if terms.iter().all(|(_, t)| t.anchor == anchor) {
            let mu = terms
                .iter()
                .map(|(_, t)| t.left_exponent)
                .fold(f64::INFINITY, f64::min);
            let parts: Vec<(f64, f64, SmoothFn)> = terms
                .iter()
                .map(|(c, t)| (*c, t.left_exponent - mu, Arc::clone(&t.smooth)))
                .collect();
            Integrand::with_left_power(anchor, mu, move |x| {
                parts
                    .iter()
                    .map(|(c, extra, h)| {
                        let w = if *extra == 0.0 {
                            1.0
                        } else {
                            (x - anchor).powf(*extra)
                        };
                        c * w * h(x)
                    })
                    .sum()
            })
        } else {
            let parts: Vec<(f64, Integrand)> = terms.to_vec();
            Integrand::new(move |x| parts.iter().map(|(c, t)| c * t.eval(x)).sum())
        }
    }
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("anchor", &self.anchor)
            .field("left_exponent", &self.left_exponent)
            .finish_non_exhaustive()
    }
}
