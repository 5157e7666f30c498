//! Derivative-free bounded maximisation in one to four dimensions.
//!
//! One-dimensional problems are scanned on a uniform grid, refined with
//! Brent's golden-section/parabolic method inside the best grid cell and then
//! polished by bisecting the central-difference derivative. Higher
//! dimensional problems use multistart Nelder-Mead on box-normalised
//! coordinates, with infeasible points mapped to a large negative sentinel.

use serde::Serialize;

use crate::error::{Error, Result};

/// Objective value assigned to infeasible or out-of-box points.
pub const NEG_SENTINEL: f64 = -1e300;

pub const MAX_DIM: usize = 4;
pub const DEFAULT_TOL_X: f64 = 1e-10;
pub const DEFAULT_TOL_F: f64 = 1e-9;
pub const DEFAULT_MAX_EVALS: usize = 100_000;
pub const DEFAULT_SCAN_POINTS: usize = 1024;
pub const DEFAULT_FOC_STEP: f64 = 1e-5;
/// FOC residual threshold, relative to `max(1, |f|)`.
pub const DEFAULT_FOC_TOL: f64 = 1e-4;
pub const DEFAULT_STARTS: usize = 8;

type Objective<'a> = Box<dyn Fn(&[f64]) -> f64 + 'a>;
type Predicate<'a> = Box<dyn Fn(&[f64]) -> bool + 'a>;

pub struct OptProblem<'a> {
    objective: Objective<'a>,
    feasible: Predicate<'a>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Argument tolerance, in the units of each coordinate.
    pub tol_x: f64,
    /// Value tolerance, relative to `max(1, |f|)`.
    pub tol_f: f64,
    pub max_evals: usize,
    pub scan_points: usize,
    pub foc_step: f64,
    pub foc_tol: f64,
}

impl<'a> OptProblem<'a> {
    /// A problem over the box `[lower, upper]`; every point in the box is
    /// feasible until [`OptProblem::with_feasible`] says otherwise.
    pub fn new<F>(lower: Vec<f64>, upper: Vec<f64>, objective: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + 'a,
    {
        if lower.is_empty() || lower.len() > MAX_DIM {
            return Err(Error::Domain(format!(
                "dimension must be in 1..={MAX_DIM}, got {}",
                lower.len()
            )));
        }
        if lower.len() != upper.len() {
            return Err(Error::Domain("bounds have different lengths".into()));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::Domain(format!("invalid box coordinate [{l}, {u}]")));
            }
        }
        Ok(Self {
            objective: Box::new(objective),
            feasible: Box::new(|_| true),
            lower,
            upper,
            tol_x: DEFAULT_TOL_X,
            tol_f: DEFAULT_TOL_F,
            max_evals: DEFAULT_MAX_EVALS,
            scan_points: DEFAULT_SCAN_POINTS,
            foc_step: DEFAULT_FOC_STEP,
            foc_tol: DEFAULT_FOC_TOL,
        })
    }

    pub fn scalar<F>(lower: f64, upper: f64, objective: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + 'a,
    {
        Self::new(vec![lower], vec![upper], move |x: &[f64]| objective(x[0]))
    }

    pub fn with_feasible<G>(mut self, feasible: G) -> Self
    where
        G: Fn(&[f64]) -> bool + 'a,
    {
        self.feasible = Box::new(feasible);
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn in_box(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| v >= l && v <= u)
    }

    /// `None` outside the box, at infeasible points, or where the objective
    /// is not finite.
    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        if !self.in_box(x) || !(self.feasible)(x) {
            return None;
        }
        let v = (self.objective)(x);
        v.is_finite().then_some(v)
    }

    fn tol_f_at(&self, f: f64) -> f64 {
        self.tol_f * f.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptReport {
    pub argmax: Vec<f64>,
    pub value: f64,
    /// Largest central-difference slope at the argmax; `None` when a
    /// difference step leaves the feasible set.
    pub foc_residual: Option<f64>,
    pub evals: usize,
    pub converged: bool,
    pub on_boundary: bool,
}

impl OptReport {
    /// FOC residual divided by `max(1, |value|)`.
    pub fn relative_foc(&self) -> Option<f64> {
        self.foc_residual.map(|r| r / self.value.abs().max(1.0))
    }
}

struct Counter<'p, 'a> {
    problem: &'p OptProblem<'a>,
    evals: usize,
}

impl Counter<'_, '_> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        self.evals += 1;
        self.problem.eval(x)
    }

    fn eval_or_sentinel(&mut self, x: &[f64]) -> f64 {
        self.eval(x).unwrap_or(NEG_SENTINEL)
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.problem.max_evals
    }
}

/// Maximum over coordinates of `|f(x + h e_j) - f(x - h e_j)| / 2h`.
///
/// Returns `None` if any of the probes evaluates to a non-finite value,
/// which callers use to flag an argmax that sits on the feasible boundary.
pub fn foc_residual<F>(f: F, x: &[f64], h: f64) -> Option<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    let mut worst = 0.0f64;
    for j in 0..x.len() {
        probe[j] = x[j] + h;
        let up = f(&probe);
        probe[j] = x[j] - h;
        let down = f(&probe);
        probe[j] = x[j];
        if !(up.is_finite() && down.is_finite()) {
            return None;
        }
        worst = worst.max(((up - down) / (2.0 * h)).abs());
    }
    Some(worst)
}

fn problem_foc(problem: &OptProblem<'_>, x: &[f64]) -> Option<f64> {
    foc_residual(
        |p| problem.eval(p).unwrap_or(f64::NAN),
        x,
        problem.foc_step,
    )
}

fn finish(problem: &OptProblem<'_>, argmax: Vec<f64>, value: f64, evals: usize, near_edge: bool) -> OptReport {
    let foc = problem_foc(problem, &argmax);
    let on_boundary = near_edge || foc.is_none();
    let stationary = foc.is_some_and(|r| r <= problem.foc_tol * value.abs().max(1.0));
    OptReport {
        converged: evals <= problem.max_evals && (stationary || on_boundary),
        argmax,
        value,
        foc_residual: foc,
        evals: evals + 2 * problem.dim(),
        on_boundary,
    }
}

/// Maximise a one-dimensional problem.
pub fn maximize_1d(problem: &OptProblem<'_>) -> Result<OptReport> {
    if problem.dim() != 1 {
        return Err(Error::Domain(format!(
            "maximize_1d needs a 1-D problem, got {}",
            problem.dim()
        )));
    }
    let (lo, hi) = (problem.lower[0], problem.upper[0]);
    let mut counter = Counter { problem, evals: 0 };

    let n = problem.scan_points.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, &x) in grid.iter().enumerate() {
        if let Some(v) = counter.eval(&[x]) {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    let (ib, fb) = best.ok_or_else(|| {
        Error::Infeasible(format!("no feasible point among {n} scan points on [{lo}, {hi}]"))
    })?;

    let a = grid[ib.saturating_sub(1)];
    let b = grid[(ib + 1).min(n - 1)];
    let (mut x, mut fx) = brent_max(&mut counter, a, b, grid[ib], fb, problem.tol_x);
    if let Some((xp, fp)) = polish_stationary(&mut counter, x, fx, a, b, problem.tol_x) {
        x = xp;
        fx = fp;
    }
    let edge_tol = (10.0 * problem.tol_x).max(1e-9 * (hi - lo));
    let near_edge = x - lo <= edge_tol || hi - x <= edge_tol;
    Ok(finish(problem, vec![x], fx, counter.evals, near_edge))
}

/// Brent's method on `[a, b]`, started from an interior point with known
/// value, returning the best point seen.
fn brent_max(counter: &mut Counter<'_, '_>, a: f64, b: f64, x0: f64, f0: f64, tol_x: f64) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105;
    let (mut a, mut b) = (a, b);
    if b - a <= 0.0 {
        return (x0, f0);
    }
    let (mut x, mut w, mut v) = (x0, x0, x0);
    // work with g = -f so the textbook minimisation logic applies
    let (mut gx, mut gw, mut gv) = (-f0, -f0, -f0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        if counter.exhausted() {
            break;
        }
        let xm = 0.5 * (a + b);
        let tol1 = tol_x.max(2.0 * f64::EPSILON * x.abs()) * 0.5 + 1e-300;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (gx - gv);
            let mut q = (x - v) * (gx - gw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let gu = -counter.eval_or_sentinel(&[u]);
        if gu <= gx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            w = x;
            x = u;
            gv = gw;
            gw = gx;
            gx = gu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if gu <= gw || w == x {
                v = w;
                w = u;
                gv = gw;
                gw = gu;
            } else if gu <= gv || v == x || v == w {
                v = u;
                gv = gu;
            }
        }
    }
    (x, -gx)
}

/// Bisect the central-difference derivative around `x` to locate the
/// stationary point more precisely than value comparisons allow.
fn polish_stationary(
    counter: &mut Counter<'_, '_>,
    x: f64,
    fx: f64,
    lo: f64,
    hi: f64,
    tol_x: f64,
) -> Option<(f64, f64)> {
    let scale = x.abs().max(1e-3);
    let hd = 6e-6 * scale;
    let slope = |c: &mut Counter<'_, '_>, t: f64| -> Option<f64> {
        let up = c.eval(&[t + hd])?;
        let down = c.eval(&[t - hd])?;
        Some((up - down) / (2.0 * hd))
    };
    let mut width = (1e-6 * scale).max(4.0 * hd);
    let (mut a, mut b);
    loop {
        a = x - width;
        b = x + width;
        if a - hd < lo || b + hd > hi {
            return None;
        }
        let ga = slope(counter, a)?;
        let gb = slope(counter, b)?;
        if ga > 0.0 && gb < 0.0 {
            break;
        }
        width *= 4.0;
        if width > 1e-2 * scale || counter.exhausted() {
            return None;
        }
    }
    let stop = tol_x.max(4.0 * f64::EPSILON * scale);
    for _ in 0..200 {
        if b - a <= stop || counter.exhausted() {
            break;
        }
        let mid = 0.5 * (a + b);
        match slope(counter, mid) {
            Some(g) if g > 0.0 => a = mid,
            Some(_) => b = mid,
            None => return None,
        }
    }
    let xp = 0.5 * (a + b);
    let fp = counter.eval(&[xp])?;
    (fp >= fx - 8.0 * f64::EPSILON * fx.abs().max(1.0)).then_some((xp, fp))
}

/// Deterministic Latin-hypercube design with `count` points in the box.
///
/// Coordinate `j` of point `i` sits in stratum `(a_j i + j) mod count`,
/// where `a_j` is the `j`-th odd multiplier coprime with `count`.
pub fn latin_hypercube(lower: &[f64], upper: &[f64], count: usize) -> Vec<Vec<f64>> {
    if count == 0 {
        return Vec::new();
    }
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut multipliers = Vec::with_capacity(lower.len());
    let mut cand = 1usize;
    while multipliers.len() < lower.len() {
        if gcd(cand, count) == 1 {
            multipliers.push(cand);
        }
        cand += 2;
        if cand > 4 * count + 8 {
            multipliers.push(1);
        }
    }
    (0..count)
        .map(|i| {
            lower
                .iter()
                .zip(upper)
                .enumerate()
                .map(|(j, (l, u))| {
                    let stratum = (multipliers[j] * i + j) % count;
                    l + (u - l) * (stratum as f64 + 0.5) / count as f64
                })
                .collect()
        })
        .collect()
}

/// Multistart Nelder-Mead maximisation; infeasible starts are skipped.
pub fn maximize_nd(problem: &OptProblem<'_>, starts: &[Vec<f64>]) -> Result<OptReport> {
    let d = problem.dim();
    if starts.iter().any(|s| s.len() != d) {
        return Err(Error::Domain("start point has wrong dimension".into()));
    }
    let feasible: Vec<&Vec<f64>> = starts.iter().filter(|s| problem.eval(s).is_some()).collect();
    if feasible.is_empty() {
        return Err(Error::Infeasible(format!(
            "none of the {} starts is feasible",
            starts.len()
        )));
    }
    let span: Vec<f64> = problem.lower.iter().zip(&problem.upper).map(|(l, u)| u - l).collect();
    let to_x = |u: &[f64]| -> Vec<f64> {
        u.iter()
            .zip(problem.lower.iter().zip(&span))
            .map(|(ui, (l, s))| l + ui * s)
            .collect()
    };
    let tol_u = span
        .iter()
        .map(|s| problem.tol_x / s)
        .fold(f64::INFINITY, f64::min)
        .max(1e-15);
    let budget = (problem.max_evals / feasible.len()).max(50 * (d + 1));

    let mut total_evals = 0usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in feasible {
        let u0: Vec<f64> = start
            .iter()
            .zip(problem.lower.iter().zip(&span))
            .map(|(x, (l, s))| (x - l) / s)
            .collect();
        let mut evals = 0usize;
        let phi = |u: &[f64]| problem.eval(&to_x(u)).unwrap_or(NEG_SENTINEL);
        let (mut u, mut f) = nelder_mead(&phi, &u0, 0.05, tol_u, problem, budget, &mut evals);
        // restart from the incumbent with a fresh, smaller simplex
        for _ in 0..3 {
            if evals >= budget {
                break;
            }
            let (u2, f2) = nelder_mead(&phi, &u, 1e-3, tol_u, problem, budget, &mut evals);
            let improved = f2 - f > problem.tol_f_at(f);
            if f2 >= f {
                u = u2;
                f = f2;
            }
            if !improved {
                break;
            }
        }
        total_evals += evals;
        if best.as_ref().is_none_or(|(_, fb)| f > *fb) {
            best = Some((u, f));
        }
    }
    let (u, f) = best.expect("at least one feasible start");
    if f <= NEG_SENTINEL {
        return Err(Error::Infeasible("search never left the infeasible region".into()));
    }
    let near_edge = u.iter().any(|&ui| ui <= 1e-9 || ui >= 1.0 - 1e-9);
    Ok(finish(problem, to_x(&u), f, total_evals, near_edge))
}

/// Adaptive-parameter Nelder-Mead on normalised coordinates.
fn nelder_mead<F>(
    phi: &F,
    u0: &[f64],
    step: f64,
    tol_u: f64,
    problem: &OptProblem<'_>,
    budget: usize,
    evals: &mut usize,
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let d = u0.len();
    let dn = d as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / dn, 0.75 - 0.5 / dn, 1.0 - 1.0 / dn);
    let eval = |u: &[f64], evals: &mut usize| {
        *evals += 1;
        phi(u)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((u0.to_vec(), eval(u0, evals)));
    for j in 0..d {
        let mut p = u0.to_vec();
        p[j] += if p[j] + step <= 1.0 { step } else { -step };
        let f = eval(&p, evals);
        simplex.push((p, f));
    }

    loop {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let diam = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = simplex[0].1 - simplex[d].1;
        if diam <= tol_u
            || (spread <= problem.tol_f_at(simplex[0].1) && diam <= 1e3 * tol_u)
            || *evals >= budget
        {
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|(p, _)| p[j]).sum::<f64>() / dn)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr, evals);
        if fr > simplex[0].1 {
            let xe = along(alpha * beta);
            let fe = eval(&xe, evals);
            simplex[d] = if fe > fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr > simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr > simplex[d].1 {
            let xc = along(alpha * gamma);
            let fc = eval(&xc, evals);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc, evals);
            (xc, fc)
        };
        if fc > simplex[d].1.max(if fr > simplex[d].1 { fr } else { f64::NEG_INFINITY }) {
            simplex[d] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (p, f) in simplex.iter_mut().skip(1) {
            for (pi, bi) in p.iter_mut().zip(&best) {
                *pi = bi + delta * (*pi - bi);
            }
            *f = eval(p, evals);
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (u, f) = simplex.swap_remove(0);
    (u, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parabola_vertex_1d() {
        let (k, rt) = (1000.0, 1050.0);
        let p = OptProblem::scalar(1e-8, 2.0, move |z| k * z - 0.5 * rt * z * z).unwrap();
        let r = maximize_1d(&p).unwrap();
        assert!((r.argmax[0] - 0.9523809524).abs() < 1e-9, "{:?}", r);
        assert_relative_eq!(r.value, 476.1904762, max_relative = 1e-9);
        assert!(r.converged && !r.on_boundary);
    }

    #[test]
    fn shifted_quadratic_1d() {
        let p = OptProblem::scalar(-1.0, 1.0, |z| -(z - 0.3) * (z - 0.3)).unwrap();
        let r = maximize_1d(&p).unwrap();
        assert!((r.argmax[0] - 0.3).abs() < 1e-9);
        assert!(r.foc_residual.unwrap() <= 1e-8);
    }

    #[test]
    fn boundary_maximum_is_flagged() {
        let p = OptProblem::scalar(0.0, 1.0, |z| z).unwrap();
        let r = maximize_1d(&p).unwrap();
        assert_eq!(r.argmax[0], 1.0);
        assert!(r.on_boundary && r.converged);
    }

    #[test]
    fn infeasible_box_errors() {
        let p = OptProblem::scalar(0.0, 1.0, |z| z).unwrap().with_feasible(|_| false);
        assert!(matches!(maximize_1d(&p), Err(Error::Infeasible(_))));
        let p2 = OptProblem::new(vec![0.0; 2], vec![1.0; 2], |x| x[0]).unwrap().with_feasible(|_| false);
        assert!(matches!(maximize_nd(&p2, &[vec![0.5, 0.5]]), Err(Error::Infeasible(_))));
    }

    #[test]
    fn bimodal_picks_global_peak() {
        // local peak at -0.5 (height 1), global at 0.7 (height 2)
        let f = |x: f64| (-(x + 0.5).powi(2) * 200.0).exp() + 2.0 * (-(x - 0.7).powi(2) * 200.0).exp();
        let p = OptProblem::scalar(-1.0, 1.0, f).unwrap();
        let r = maximize_1d(&p).unwrap();
        assert!((r.argmax[0] - 0.7).abs() < 1e-6);
    }

    #[test]
    fn bowl_2d() {
        let p = OptProblem::new(vec![-1.0, -1.0], vec![1.0, 1.0], |x| -x[0] * x[0] - x[1] * x[1]).unwrap();
        let starts = latin_hypercube(p.lower(), p.upper(), DEFAULT_STARTS);
        let r = maximize_nd(&p, &starts).unwrap();
        assert!(r.argmax.iter().all(|v| v.abs() < 1e-7), "{:?}", r.argmax);
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock_4d() {
        let f = |x: &[f64]| {
            -(0..3)
                .map(|i| 100.0 * (x[i + 1] - x[i] * x[i]).powi(2) + (1.0 - x[i]).powi(2))
                .sum::<f64>()
        };
        let p = OptProblem::new(vec![-2.0; 4], vec![2.0; 4], f).unwrap();
        let starts = latin_hypercube(p.lower(), p.upper(), DEFAULT_STARTS);
        let r = maximize_nd(&p, &starts).unwrap();
        assert!(r.value > -1e-8, "{:?}", r);
    }

    #[test]
    fn penalty_keeps_search_feasible() {
        // maximum of x + y on the disc x² + y² < 1
        let p = OptProblem::new(vec![-2.0, -2.0], vec![2.0, 2.0], |x| x[0] + x[1])
            .unwrap()
            .with_feasible(|x| x[0] * x[0] + x[1] * x[1] < 1.0);
        let r = maximize_nd(&p, &[vec![0.0, 0.0]]).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-6);
        assert!(r.on_boundary);
        assert!(r.foc_residual.is_none());
    }

    #[test]
    fn foc_residual_examples() {
        let q = |x: &[f64]| -(x[0] - 0.2).powi(2) - 3.0 * (x[1] + 1.0).powi(2);
        assert!(foc_residual(q, &[0.2, -1.0], 1e-5).unwrap() <= 1e-8);
        let lin = |x: &[f64]| x[0];
        assert_relative_eq!(foc_residual(lin, &[3.0], 1e-5).unwrap(), 1.0, max_relative = 1e-9);
        let edge = |x: &[f64]| if x[0] > 1.0 { f64::NAN } else { x[0] };
        assert!(foc_residual(edge, &[1.0], 1e-5).is_none());
    }

    #[test]
    fn latin_hypercube_strata() {
        let pts = latin_hypercube(&[0.0, 0.0, 0.0], &[8.0, 8.0, 8.0], 8);
        for j in 0..3 {
            let mut strata: Vec<usize> = pts.iter().map(|p| p[j].floor() as usize).collect();
            strata.sort_unstable();
            assert_eq!(strata, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn deterministic_reports() {
        let mk = || {
            OptProblem::new(vec![-3.0, -3.0], vec![3.0, 3.0], |x| {
                -(x[0] - 1.0).powi(2) - (x[1] - x[0]).powi(2) + 0.1 * (5.0 * x[0]).sin()
            })
            .unwrap()
        };
        let p = mk();
        let starts = latin_hypercube(p.lower(), p.upper(), 8);
        let a = maximize_nd(&p, &starts).unwrap();
        let b = maximize_nd(&mk(), &starts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(OptProblem::new(vec![], vec![], |_| 0.0).is_err());
        assert!(OptProblem::new(vec![0.0; 5], vec![1.0; 5], |_| 0.0).is_err());
        assert!(OptProblem::scalar(1.0, 1.0, |_| 0.0).is_err());
        let p = OptProblem::new(vec![0.0; 2], vec![1.0; 2], |_| 0.0).unwrap();
        assert!(maximize_1d(&p).is_err());
    }
}
