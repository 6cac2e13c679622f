//! Second-order comparison for `u'' − k²u = f`.
//!
//! The solver follows the substitution `u = e^{kr}·c(r)`, for which
//! `c'(r) = e^{−2kr}(e^{2kr₀}c'(r₀) + ∫ e^{kt} f(t) dt)`. Samples of `f` are
//! interpreted as a piecewise-linear function, and both integrals are evaluated
//! exactly for that interpolant, one grid interval at a time with the interval
//! start as the local base point.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{ensure_finite_positive, param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Area,
    BoundaryLength,
    EulerChar,
    Generic,
}

/// A function sampled on a strictly increasing radius grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    kind: ProfileKind,
}

impl ScalarProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        if grid.is_empty() {
            return param("profile grid is empty");
        }
        if grid.len() != values.len() {
            return param(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            ));
        }
        if grid.iter().chain(&values).any(|x| !x.is_finite()) {
            return param("profile contains non-finite entries");
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return param("profile grid must be strictly increasing");
        }
        if kind == ProfileKind::Area
            && (values[0] < 0.0 || values.windows(2).any(|w| w[1] < w[0]))
        {
            return param("area profile must be non-negative and non-decreasing");
        }
        Ok(Self { grid, values, kind })
    }

    /// Samples `f` on `grid`.
    pub fn from_fn(grid: Vec<f64>, kind: ProfileKind, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, values, kind)
    }

    /// Uniform grid of `n` points on `[a, b]`.
    pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        assert!(n >= 2);
        let h = (b - a) / (n - 1) as f64;
        (0..n).map(|i| a + h * i as f64).collect()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn same_grid(&self, other: &ScalarProfile) -> bool {
        self.grid.len() == other.grid.len()
            && self
                .grid
                .iter()
                .zip(&other.grid)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
    }

    /// Derivative by central differences (non-uniform stencil), one-sided at the ends.
    pub fn derivative(&self) -> Vec<f64> {
        let (r, v) = (&self.grid, &self.values);
        let n = r.len();
        if n < 2 {
            return vec![0.0; n];
        }
        (0..n)
            .map(|i| {
                if i == 0 {
                    (v[1] - v[0]) / (r[1] - r[0])
                } else if i == n - 1 {
                    (v[n - 1] - v[n - 2]) / (r[n - 1] - r[n - 2])
                } else {
                    let (hl, hr) = (r[i] - r[i - 1], r[i + 1] - r[i]);
                    (hl * hl * v[i + 1] - hr * hr * v[i - 1] + (hr * hr - hl * hl) * v[i])
                        / (hl * hr * (hl + hr))
                }
            })
            .collect()
    }

    /// Second derivative by three-point differences at interior points (`None` at the ends).
    pub fn second_derivative(&self) -> Vec<Option<f64>> {
        let (r, v) = (&self.grid, &self.values);
        let n = r.len();
        (0..n)
            .map(|i| {
                if i == 0 || i + 1 >= n {
                    return None;
                }
                let (hl, hr) = (r[i] - r[i - 1], r[i + 1] - r[i]);
                Some(
                    2.0 * (hl * v[i + 1] - (hl + hr) * v[i] + hr * v[i - 1])
                        / (hl * hr * (hl + hr)),
                )
            })
            .collect()
    }
}

/// Solution of `u'' − k²u = f` on the grid of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub k: f64,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

impl OdeSolution {
    pub fn profile(&self) -> ScalarProfile {
        ScalarProfile {
            grid: self.grid.clone(),
            values: self.u.clone(),
            kind: ProfileKind::Generic,
        }
    }

    /// `u' − k·u` at every grid point.
    pub fn twisted_derivative(&self) -> Vec<f64> {
        self.u.iter().zip(&self.du).map(|(u, du)| du - self.k * u).collect()
    }
}

/// Solves `u'' − k²u = f` with `u(r_start) = u0`, `u'(r_start) = u0_prime`.
///
/// `r_start` must coincide with the first grid point of `f`.
pub fn solve_linear_ode(
    k: f64,
    r_start: f64,
    u0: f64,
    u0_prime: f64,
    f: &ScalarProfile,
) -> Result<OdeSolution> {
    ensure_finite_positive("k", k)?;
    if !(u0.is_finite() && u0_prime.is_finite() && r_start.is_finite()) {
        return param("initial data must be finite");
    }
    let grid = f.grid();
    if (grid[0] - r_start).abs() > 1e-12 * (1.0 + r_start.abs()) {
        return param(format!(
            "r_start = {r_start} does not match the first grid point {}",
            grid[0]
        ));
    }
    let fv = f.values();
    let n = grid.len();
    let mut u = Vec::with_capacity(n);
    let mut du = Vec::with_capacity(n);
    u.push(u0);
    du.push(u0_prime);
    // v = u' − k u = e^{kr} c'(r)
    let mut ui = u0;
    let mut vi = u0_prime - k * u0;
    for i in 0..n - 1 {
        let h = grid[i + 1] - grid[i];
        let fi = fv[i];
        let slope = (fv[i + 1] - fv[i]) / h;
        let kh = k * h;
        let e = kh.exp();
        let em1 = kh.exp_m1();
        let a1 = -(-kh).exp_m1(); // 1 − e^{−kh}
        let a2 = -(-2.0 * kh).exp_m1(); // 1 − e^{−2kh}

        // J(h) = ∫₀ʰ e^{kt}(fi + slope·t) dt
        let j = fi * em1 / k + slope * (h * e / k - em1 / (k * k));
        // ∫₀ʰ e^{−2kτ} J(τ) dτ, split by the two parts of the forcing
        let int0 = a2 / (2.0 * k);
        let int1 = (a1 / k - a2 / (2.0 * k)) / k;
        let te = (a1 - kh * (-kh).exp()) / (k * k); // ∫₀ʰ τ e^{−kτ} dτ
        let int2 = te / k - int1 / k;

        let c_end = ui + vi * int0 + fi * int1 + slope * int2;
        let u_next = e * c_end;
        let v_next = (vi + j) / e;
        ui = u_next;
        vi = v_next;
        u.push(ui);
        du.push(vi + k * ui);
    }
    Ok(OdeSolution {
        k,
        grid: grid.to_vec(),
        u,
        du,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `ū − u` at each grid point.
    pub value_margin: Vec<f64>,
    /// `(ū' − kū) − (u' − ku)` at each grid point.
    pub derivative_margin: Vec<f64>,
    pub min_value_margin: f64,
    pub min_derivative_margin: f64,
    /// Indices where a margin is below `-tol`.
    pub violations: Vec<usize>,
    pub pass: bool,
}

impl ComparisonReport {
    fn build(value_margin: Vec<f64>, derivative_margin: Vec<f64>, check: &[bool], tol: f64) -> Self {
        let mut min_v = f64::INFINITY;
        let mut min_d = f64::INFINITY;
        let mut violations = Vec::new();
        for i in 0..value_margin.len() {
            if !check[i] {
                continue;
            }
            min_v = min_v.min(value_margin[i]);
            min_d = min_d.min(derivative_margin[i]);
            if value_margin[i] < -tol || derivative_margin[i] < -tol {
                violations.push(i);
            }
        }
        Self {
            value_margin,
            derivative_margin,
            min_value_margin: min_v,
            min_derivative_margin: min_d,
            pass: violations.is_empty(),
            violations,
        }
    }

    /// Margins from two solver outputs, using their exact derivatives at every grid point.
    pub fn from_solutions(u: &OdeSolution, u_bar: &OdeSolution, tol: f64) -> Result<Self> {
        if u.grid != u_bar.grid || u.k != u_bar.k {
            return param("solutions live on different grids or use different k");
        }
        let vm = u_bar.u.iter().zip(&u.u).map(|(b, a)| b - a).collect::<Vec<_>>();
        let dm = u_bar
            .twisted_derivative()
            .iter()
            .zip(u.twisted_derivative())
            .map(|(b, a)| b - a)
            .collect::<Vec<_>>();
        let check = vec![true; vm.len()];
        Ok(Self::build(vm, dm, &check, tol))
    }
}

/// Checks `u ≤ ū` and `u' − ku ≤ ū' − kū` on a shared grid.
///
/// Derivatives come from central differences; the two end points are reported
/// but do not take part in pass/fail.
pub fn check_comparison(
    u: &ScalarProfile,
    u_bar: &ScalarProfile,
    k: f64,
    tol: f64,
) -> Result<ComparisonReport> {
    ensure_finite_positive("k", k)?;
    if !u.same_grid(u_bar) {
        return param("u and u_bar are sampled on different grids");
    }
    let du = u.derivative();
    let dub = u_bar.derivative();
    let n = u.len();
    let vm: Vec<f64> = (0..n).map(|i| u_bar.values[i] - u.values[i]).collect();
    let dm: Vec<f64> = (0..n)
        .map(|i| (dub[i] - k * u_bar.values[i]) - (du[i] - k * u.values[i]))
        .collect();
    let check: Vec<bool> = (0..n).map(|i| i > 0 && i + 1 < n).collect();
    Ok(ComparisonReport::build(vm, dm, &check, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalReport {
    /// `a'' − k²a − 2πχ` at retained grid points (`None` where skipped).
    pub residual: Vec<Option<f64>>,
    pub retained: usize,
    pub skipped: usize,
    pub max_violation: f64,
    pub argmax_radius: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

/// Three-point approximation of `u'' − k²u` at interior index `i` whose
/// weights reproduce it exactly for `e^{kr}`, `e^{−kr}` and constants, hence
/// for every solution of `u'' − k²u = const`. The weights are positive off
/// the centre, so the stencil preserves the inequality `u'' − k²u ≤ g` for
/// constant `g`.
fn fitted_operator(r: &[f64], v: &[f64], i: usize, k: f64) -> f64 {
    let (xl, xr) = (k * (r[i] - r[i - 1]), k * (r[i + 1] - r[i]));
    let ratio = xl.sinh() / xr.sinh();
    let denom = xr.exp_m1() * ratio + (-xl).exp_m1();
    let left = k * k / denom;
    let right = left * ratio;
    left * (v[i - 1] - v[i]) + right * (v[i + 1] - v[i]) - k * k * v[i]
}

/// Checks `a''(r) − k²a(r) ≤ 2πχ(r)` away from the jumps of `χ`.
///
/// The left side uses a three-point stencil that is exact on the model
/// profiles `a'' − k²a = const`. Points within two grid steps of a jump of
/// `χ`, and the two end points, are skipped.
pub fn check_fundamental_inequality(
    a: &ScalarProfile,
    chi: &ScalarProfile,
    k: f64,
    tol: f64,
) -> Result<FundamentalReport> {
    ensure_finite_positive("k", k)?;
    if a.len() < 3 {
        return param("need at least 3 grid points for second differences");
    }
    if !a.same_grid(chi) {
        return param("area and euler characteristic profiles use different grids");
    }
    if a.kind() != ProfileKind::Area {
        return param("first profile must be tagged as an area profile");
    }
    let n = a.len();
    let mut keep = vec![true; n];
    keep[0] = false;
    keep[n - 1] = false;
    for j in 0..n - 1 {
        if chi.values[j] != chi.values[j + 1] {
            let lo = j.saturating_sub(1);
            let hi = (j + 2).min(n - 1);
            keep[lo..=hi].iter_mut().for_each(|x| *x = false);
        }
    }
    let mut residual = vec![None; n];
    let mut max_violation = f64::NEG_INFINITY;
    let mut argmax_radius = None;
    for i in 0..n {
        if !keep[i] {
            continue;
        }
        let res = fitted_operator(&a.grid, &a.values, i, k) - 2.0 * PI * chi.values[i];
        residual[i] = Some(res);
        if res > max_violation {
            max_violation = res;
            argmax_radius = Some(a.grid[i]);
        }
    }
    let retained = residual.iter().filter(|x| x.is_some()).count();
    Ok(FundamentalReport {
        residual,
        retained,
        skipped: n - retained,
        max_violation,
        argmax_radius,
        tol,
        pass: max_violation <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, h: f64) -> Vec<f64> {
        let n = ((b - a) / h).round() as usize + 1;
        ScalarProfile::uniform_grid(a, b, n)
    }

    #[test]
    fn profile_validation() {
        assert!(ScalarProfile::new(vec![], vec![], ProfileKind::Generic).is_err());
        assert!(ScalarProfile::new(vec![0.0, 0.0], vec![1.0, 2.0], ProfileKind::Generic).is_err());
        assert!(ScalarProfile::new(vec![0.0, 1.0], vec![1.0], ProfileKind::Generic).is_err());
        assert!(ScalarProfile::new(vec![0.0, 1.0], vec![2.0, 1.0], ProfileKind::Area).is_err());
        assert!(ScalarProfile::new(vec![0.0, 1.0], vec![2.0, 1.0], ProfileKind::Generic).is_ok());
    }

    #[test]
    fn homogeneous_solution_is_exponential() {
        let k = 1.3;
        let g = grid(0.5, 2.5, 1e-2);
        let f = ScalarProfile::from_fn(g.clone(), ProfileKind::Generic, |_| 0.0).unwrap();
        let sol = solve_linear_ode(k, 0.5, 1.0, k, &f).unwrap();
        for (r, u) in g.iter().zip(&sol.u) {
            let exact = (k * (r - 0.5)).exp();
            assert!((u - exact).abs() < 1e-12 * exact, "{r}: {u} vs {exact}");
        }
    }

    #[test]
    fn constant_forcing_matches_closed_form() {
        // ā(r) = (a0 + 2πχ0/k²) cosh(k(r−r0)) + (ℓ0/k) sinh(k(r−r0)) − 2πχ0/k²
        let (k, r0, a0, l0, chi0) = (1.0, 1.0, 2.0, 3.0, -2.0);
        let g = grid(r0, r0 + 2.0, 1e-3);
        let f = ScalarProfile::from_fn(g.clone(), ProfileKind::Generic, |_| 2.0 * PI * chi0).unwrap();
        let sol = solve_linear_ode(k, r0, a0, l0, &f).unwrap();
        let q = 2.0 * PI * chi0 / (k * k);
        for (r, u) in g.iter().zip(&sol.u) {
            let s = k * (r - r0);
            let exact = (a0 + q) * s.cosh() + l0 / k * s.sinh() - q;
            assert!((u - exact).abs() < 1e-8, "{r}: {u} vs {exact}");
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let f = ScalarProfile::from_fn(grid(0.0, 1.0, 0.1), ProfileKind::Generic, |_| 0.0).unwrap();
        assert!(solve_linear_ode(1.0, 0.3, 0.0, 0.0, &f).is_err());
        assert!(solve_linear_ode(0.0, 0.0, 0.0, 0.0, &f).is_err());
        let g = ScalarProfile::from_fn(grid(0.0, 1.0, 0.05), ProfileKind::Generic, |_| 0.0).unwrap();
        assert!(check_comparison(&f, &g, 1.0, 1e-9).is_err());
    }

    #[test]
    fn comparison_cases() {
        let k = 1.0;
        let g = grid(0.0, 2.0, 1e-2);
        let zero = ScalarProfile::from_fn(g.clone(), ProfileKind::Generic, |_| 0.0).unwrap();
        let one = ScalarProfile::from_fn(g.clone(), ProfileKind::Generic, |_| 1.0).unwrap();
        let u = solve_linear_ode(k, 0.0, 0.3, 0.1, &zero).unwrap();
        let ub = solve_linear_ode(k, 0.0, 0.3, 0.1, &one).unwrap();

        let same = check_comparison(&u.profile(), &u.profile(), k, 1e-12).unwrap();
        assert!(same.pass);
        assert!(same.value_margin.iter().all(|&m| m == 0.0));

        let rep = check_comparison(&u.profile(), &ub.profile(), k, 1e-9).unwrap();
        assert!(rep.pass);
        assert!(rep.value_margin[1..].iter().all(|&m| m > 0.0));
        assert!(rep.derivative_margin[1..g.len() - 1].iter().all(|&m| m > 0.0));

        let halved = ScalarProfile::new(
            g.clone(),
            ub.u.iter().map(|x| 0.5 * x).collect(),
            ProfileKind::Generic,
        )
        .unwrap();
        let rep = check_comparison(&u.profile(), &halved, k, 1e-9).unwrap();
        assert!(!rep.pass);
        assert!(!rep.violations.is_empty());
    }

    #[test]
    fn fundamental_cases() {
        let g = grid(0.05, 3.0, 0.01);
        let chi = ScalarProfile::from_fn(g.clone(), ProfileKind::EulerChar, |_| 1.0).unwrap();
        let hyp =
            ScalarProfile::from_fn(g.clone(), ProfileKind::Area, |r| 2.0 * PI * (r.cosh() - 1.0))
                .unwrap();
        let rep = check_fundamental_inequality(&hyp, &chi, 1.0, 1e-9).unwrap();
        assert!(rep.pass, "{}", rep.max_violation);
        assert!(rep.max_violation.abs() < 1e-9);

        let eucl = ScalarProfile::from_fn(g.clone(), ProfileKind::Area, |r| PI * r * r).unwrap();
        assert!(check_fundamental_inequality(&eucl, &chi, 1.0, 1e-9).unwrap().pass);

        let zero = ScalarProfile::from_fn(g.clone(), ProfileKind::EulerChar, |_| 0.0).unwrap();
        let exp = ScalarProfile::from_fn(g.clone(), ProfileKind::Area, |r| (2.0 * r).exp()).unwrap();
        assert!(!check_fundamental_inequality(&exp, &zero, 1.0, 1e-9).unwrap().pass);

        let short = ScalarProfile::new(vec![0.0, 1.0], vec![0.0, 1.0], ProfileKind::Area).unwrap();
        let short_chi =
            ScalarProfile::new(vec![0.0, 1.0], vec![1.0, 1.0], ProfileKind::EulerChar).unwrap();
        assert!(check_fundamental_inequality(&short, &short_chi, 1.0, 1.0).is_err());
    }

    #[test]
    fn jumps_are_skipped() {
        let g = grid(0.0, 1.0, 0.1);
        let chi = ScalarProfile::from_fn(g.clone(), ProfileKind::EulerChar, |r| {
            if r < 0.45 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        // a profile whose kink sits at the jump
        let a = ScalarProfile::from_fn(g.clone(), ProfileKind::Area, |r| {
            if r < 0.45 {
                r
            } else {
                0.45 + 50.0 * (r - 0.45)
            }
        })
        .unwrap();
        let rep = check_fundamental_inequality(&a, &chi, 1.0, 1e-9).unwrap();
        // jump between indices 4 and 5 removes 3..=6, plus both ends
        assert_eq!(rep.skipped, 6);
        assert!(rep.pass);
    }
}
