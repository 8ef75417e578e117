//! BFGS with a strong-Wolfe line search (Nocedal & Wright, Alg. 3.5/3.6).

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    /// Stop once an accepted step is shorter than this.
    pub step_tolerance: f64,
    pub gradient_tolerance: f64,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            step_tolerance: 1e-6,
            gradient_tolerance: 1e-8,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 40,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    StepTolerance,
    GradientTolerance,
    LineSearchFailed,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::MaxIterations => "max_iterations",
            StopReason::StepTolerance => "step_tolerance",
            StopReason::GradientTolerance => "gradient_tolerance",
            StopReason::LineSearchFailed => "line_search_failed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub iteration: usize,
    pub value: f64,
    pub gradient_norm: f64,
    pub step_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Accepted iterates, starting with the initial point as iteration 0.
    pub trace: Vec<Iterate>,
    pub iterations: usize,
    /// Calls to the value-and-gradient oracle.
    pub evaluations: usize,
    pub reason: StopReason,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Point {
    alpha: f64,
    value: f64,
    slope: f64,
    x: Vec<f64>,
    grad: Vec<f64>,
}

struct LineSearch<'a, F> {
    f: &'a mut F,
    x: &'a [f64],
    dir: &'a [f64],
    value0: f64,
    slope0: f64,
    opts: &'a BfgsOptions,
    evaluations: usize,
    /// Lowest-value trial meeting sufficient decrease, used if Wolfe fails.
    best_armijo: Option<Point>,
}

impl<F> LineSearch<'_, F>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    fn eval(&mut self, alpha: f64) -> Result<Point> {
        let x: Vec<f64> = self.x.iter().zip(self.dir).map(|(a, d)| a + alpha * d).collect();
        let (value, grad) = (self.f)(&x)?;
        self.evaluations += 1;
        let p = Point {
            alpha,
            value,
            slope: dot(&grad, self.dir),
            x,
            grad,
        };
        if self.armijo(&p) && self.best_armijo.as_ref().is_none_or(|b| p.value < b.value) {
            self.best_armijo = Some(Point {
                x: p.x.clone(),
                grad: p.grad.clone(),
                ..p
            });
        }
        Ok(p)
    }

    fn armijo(&self, p: &Point) -> bool {
        p.value <= self.value0 + self.opts.c1 * p.alpha * self.slope0 && p.value < self.value0
    }

    fn curvature(&self, p: &Point) -> bool {
        p.slope.abs() <= -self.opts.c2 * self.slope0
    }

    fn search(&mut self, alpha_init: f64) -> Result<Option<Point>> {
        let mut prev = Point {
            alpha: 0.0,
            value: self.value0,
            slope: self.slope0,
            x: self.x.to_vec(),
            grad: Vec::new(),
        };
        let mut alpha = alpha_init;
        for i in 0..self.opts.max_line_search {
            let cur = self.eval(alpha)?;
            if !self.armijo(&cur) || (i > 0 && cur.value >= prev.value) {
                return self.zoom(prev, cur);
            }
            if self.curvature(&cur) {
                return Ok(Some(cur));
            }
            if cur.slope >= 0.0 {
                return self.zoom(cur, prev);
            }
            alpha *= 2.0;
            prev = cur;
        }
        Ok(self.best_armijo.take())
    }

    fn zoom(&mut self, mut lo: Point, mut hi: Point) -> Result<Option<Point>> {
        for _ in 0..self.opts.max_line_search {
            let alpha = interpolate(&lo, &hi);
            if (hi.alpha - lo.alpha).abs() < 1e-16 {
                break;
            }
            let cur = self.eval(alpha)?;
            if !self.armijo(&cur) || cur.value >= lo.value {
                hi = cur;
            } else {
                if self.curvature(&cur) {
                    return Ok(Some(cur));
                }
                if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = cur;
            }
        }
        Ok(self.best_armijo.take())
    }
}

/// Cubic interpolation between two bracketing points, kept inside the
/// middle 80% of the bracket; bisection when the cubic is unusable.
fn interpolate(a: &Point, b: &Point) -> f64 {
    let (lo, hi) = if a.alpha < b.alpha { (a, b) } else { (b, a) };
    let width = hi.alpha - lo.alpha;
    let mid = 0.5 * (lo.alpha + hi.alpha);
    let d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (lo.alpha - hi.alpha);
    let disc = d1 * d1 - lo.slope * hi.slope;
    if !disc.is_finite() || disc < 0.0 {
        return mid;
    }
    let d2 = disc.sqrt();
    let t = hi.alpha - width * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
    if !t.is_finite() || t < lo.alpha + 0.1 * width || t > hi.alpha - 0.1 * width {
        return mid;
    }
    t
}

/// Minimize `f`, which returns the value and gradient at a point.
pub fn minimize<F>(x0: &[f64], mut f: F, opts: &BfgsOptions) -> Result<BfgsOutcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut value, mut grad) = f(&x)?;
    let mut evaluations = 1;
    let mut trace = vec![Iterate {
        iteration: 0,
        value,
        gradient_norm: norm(&grad),
        step_norm: 0.0,
    }];
    // inverse Hessian, row-major
    let mut hinv = identity(n);
    let mut first_update = true;
    let mut reason = StopReason::MaxIterations;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        if norm(&grad) < opts.gradient_tolerance {
            reason = StopReason::GradientTolerance;
            break;
        }
        let mut dir = matvec(&hinv, &grad, n, -1.0);
        let mut slope = dot(&grad, &dir);
        if slope >= 0.0 {
            hinv = identity(n);
            dir = grad.iter().map(|g| -g).collect();
            slope = dot(&grad, &dir);
        }
        let mut ls = LineSearch {
            f: &mut f,
            x: &x,
            dir: &dir,
            value0: value,
            slope0: slope,
            opts,
            evaluations: 0,
            best_armijo: None,
        };
        let found = ls.search(1.0)?;
        evaluations += ls.evaluations;
        let Some(p) = found else {
            reason = StopReason::LineSearchFailed;
            break;
        };
        iterations += 1;

        let s: Vec<f64> = p.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = p.grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let step_norm = p.alpha.abs() * norm(&dir);
        x = p.x;
        value = p.value;
        grad = p.grad;
        trace.push(Iterate {
            iteration: iterations,
            value,
            gradient_norm: norm(&grad),
            step_norm,
        });
        if step_norm < opts.step_tolerance {
            reason = StopReason::StepTolerance;
            break;
        }

        let ys = dot(&y, &s);
        if ys > 1e-12 * norm(&y) * norm(&s) && ys > 0.0 {
            if first_update {
                let scale = ys / dot(&y, &y);
                hinv.iter_mut().for_each(|v| *v *= scale);
                first_update = false;
            }
            bfgs_update(&mut hinv, &s, &y, ys, n);
        }
    }
    if iterations >= opts.max_iterations && reason == StopReason::MaxIterations && norm(&grad) < opts.gradient_tolerance {
        reason = StopReason::GradientTolerance;
    }

    Ok(BfgsOutcome {
        x,
        value,
        gradient: grad,
        trace,
        iterations,
        evaluations,
        reason,
    })
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn matvec(m: &[f64], v: &[f64], n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|i| scale * dot(&m[i * n..(i + 1) * n], v)).collect()
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], ys: f64, n: usize) {
    let rho = 1.0 / ys;
    let hy = matvec(h, y, n, 1.0);
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
