//! Grid decision procedures for individual properties.
//!
//! Each check enumerates grid tuples in parallel and keeps the tuple with the
//! largest residual; ties go to the lexicographically smallest index tuple,
//! so reports do not depend on scheduling.

use rayon::prelude::*;

use super::grid::Grid;
use super::report::{CheckParams, PForm, Property, PropertyReport, Witness};
use crate::curves::{check_margin, BisectorTable, SkillCurve};
use crate::error::Result;
use crate::system::{GainQuery, RatingSystem};
use crate::Rating;

pub const ANALYTIC_TOLERANCE: f64 = 1e-9;
pub const TABULATED_TOLERANCE: f64 = 1e-4;

/// Tolerance suited to a curve: looser when values come from interpolation.
pub fn default_tolerance(curve: &SkillCurve) -> f64 {
    match curve {
        SkillCurve::Tabulated(_) => TABULATED_TOLERANCE,
        _ => ANALYTIC_TOLERANCE,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub tolerance: f64,
    pub form: PForm,
    /// Slack applied to both ends of the open P-close interval.
    pub eps_open: f64,
}

impl CheckOptions {
    pub fn tol(tolerance: f64) -> Self {
        Self {
            tolerance,
            form: PForm::ExtremePair,
            eps_open: 0.0,
        }
    }

    pub fn for_curve(curve: &SkillCurve) -> Self {
        Self::tol(default_tolerance(curve))
    }

    pub fn with_form(mut self, form: PForm) -> Self {
        self.form = form;
        self
    }

    pub fn with_eps_open(mut self, eps: f64) -> Self {
        self.eps_open = eps;
        self
    }
}

#[derive(Clone, Copy, Debug)]
struct Worst<const N: usize> {
    residual: f64,
    key: Option<[usize; N]>,
    count: u64,
}

impl<const N: usize> Worst<N> {
    fn empty() -> Self {
        Self {
            residual: 0.0,
            key: None,
            count: 0,
        }
    }

    fn beats(r: f64, key: [usize; N], other: &Self) -> bool {
        match other.key {
            None => true,
            Some(k) => r > other.residual || (r == other.residual && key < k),
        }
    }

    fn offer(&mut self, r: f64, key: [usize; N]) {
        self.count += 1;
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if Self::beats(r, key, self) {
            self.residual = r;
            self.key = Some(key);
        }
    }

    fn merge(a: Self, b: Self) -> Self {
        let count = a.count + b.count;
        let mut best = match (a.key, b.key) {
            (None, _) => b,
            (_, None) => a,
            (Some(ka), _) => {
                if Self::beats(a.residual, ka, &b) {
                    a
                } else {
                    b
                }
            }
        };
        best.count = count;
        best
    }
}

fn par_scan<const N: usize, F>(outer: usize, f: F) -> Worst<N>
where
    F: Fn(usize, &mut Worst<N>) + Sync + Send,
{
    (0..outer)
        .into_par_iter()
        .map(|i| {
            let mut w = Worst::empty();
            f(i, &mut w);
            w
        })
        .reduce(Worst::empty, Worst::merge)
}

/// σ and K precomputed on the grid.
pub(crate) struct Tables {
    pub pts: Vec<Rating>,
    s: Vec<f64>,
    k: Vec<f64>,
}

impl Tables {
    pub fn curve(curve: &SkillCurve, grid: &Grid) -> Result<Self> {
        let pts = grid.points();
        let n = pts.len();
        let mut s = Vec::with_capacity(n * n);
        for &x in &pts {
            for &y in &pts {
                s.push(curve.eval(x, y)?);
            }
        }
        Ok(Self {
            pts,
            s,
            k: Vec::new(),
        })
    }

    pub fn system(sys: &RatingSystem, grid: &Grid) -> Result<Self> {
        let mut t = Self::curve(sys.curve(), grid)?;
        t.k = t
            .pts
            .iter()
            .flat_map(|&x| t.pts.iter().map(move |&y| sys.k(x, y)))
            .collect();
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.pts.len()
    }

    pub fn s(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.pts.len() + j]
    }

    pub fn k(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.pts.len() + j]
    }

    /// γ(x_i, x_j | y_a, y_b) in K-form, bit-identical to
    /// [`RatingSystem::expected_gain`].
    fn gain(&self, ix: usize, ixs: usize, iy: usize, iys: usize) -> f64 {
        self.k(ix, iy) * (self.s(ixs, iys) - self.s(ix, iy))
    }

    pub fn closeness(&self, p: f64, eps_open: f64) -> Closeness {
        let n = self.n();
        let close = self
            .s
            .iter()
            .map(|&v| v > 0.5 - p + eps_open && v < 0.5 + p - eps_open)
            .collect();
        Closeness { n, close }
    }

    fn trivial(&self, tol: f64) -> bool {
        self.s.iter().all(|&v| (v - 0.5).abs() <= tol)
    }
}

pub(crate) struct Closeness {
    n: usize,
    close: Vec<bool>,
}

impl Closeness {
    pub fn pair(&self, i: usize, j: usize) -> bool {
        self.close[i * self.n + j]
    }

    fn tuple(&self, idx: &[usize], form: PForm) -> bool {
        match form {
            PForm::ExtremePair => {
                let lo = *idx.iter().min().unwrap();
                let hi = *idx.iter().max().unwrap();
                self.pair(hi, lo)
            }
            PForm::Pairwise => idx.iter().all(|&a| idx.iter().all(|&b| self.pair(a, b))),
        }
    }

    fn all(&self) -> bool {
        self.close.iter().all(|&c| c)
    }
}

fn params(p: Option<f64>, opts: &CheckOptions, grid: &Grid, with_form: bool) -> CheckParams {
    CheckParams {
        p,
        tolerance: opts.tolerance,
        grid: Some(*grid),
        form: if with_form && p.is_some() {
            Some(opts.form)
        } else {
            None
        },
    }
}

fn over_budget(grid: &Grid, tuples: u64) -> Option<String> {
    (tuples > grid.tuple_budget).then(|| {
        format!(
            "{tuples} tuples exceed the budget of {}; coarsen the grid or raise the budget",
            grid.tuple_budget
        )
    })
}

fn pow(n: usize, e: u32) -> u64 {
    (n as u64).saturating_pow(e)
}

/// `|σ(x, y) + σ(y, x) − 1|` over all grid pairs.
pub fn check_draw_free(
    curve: &SkillCurve,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let prm = params(None, opts, grid, false);
    if let Some(note) = over_budget(grid, pow(grid.len(), 2)) {
        return Ok(PropertyReport::inconclusive(Property::DrawFree, prm, note));
    }
    let t = Tables::curve(curve, grid)?;
    let n = t.n();
    let w = par_scan::<2, _>(n, |i, w| {
        for j in i..n {
            w.offer((t.s(i, j) + t.s(j, i) - 1.0).abs(), [i, j]);
        }
    });
    let witness = w
        .key
        .map(|[i, j]| Witness::new(&[("x", t.pts[i]), ("y", t.pts[j])]));
    Ok(PropertyReport::new(Property::DrawFree, prm)
        .decide(w.residual, witness)
        .metric("tuples", w.count as f64))
}

/// `|γ(x, x | y, y)|` in definitional form over all grid pairs.
pub fn check_fairness(
    sys: &RatingSystem,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let prm = params(None, opts, grid, false);
    if let Some(note) = over_budget(grid, pow(grid.len(), 2)) {
        return Ok(PropertyReport::inconclusive(Property::Fairness, prm, note));
    }
    let pts = grid.points();
    let n = pts.len();
    let residuals = pts
        .iter()
        .flat_map(|&x| pts.iter().map(move |&y| sys.fairness_residual(x, y)))
        .collect::<Result<Vec<f64>>>()?;
    let w = par_scan::<2, _>(n, |i, w| {
        for j in 0..n {
            w.offer(residuals[i * n + j].abs(), [i, j]);
        }
    });
    let witness = w
        .key
        .map(|[i, j]| Witness::new(&[("x", pts[i]), ("y", pts[j])]));
    Ok(PropertyReport::new(Property::Fairness, prm)
        .decide(w.residual, witness)
        .metric("tuples", w.count as f64))
}

fn oi_scan(t: &Tables, close: Option<(&Closeness, PForm)>) -> Worst<4> {
    let n = t.n();
    par_scan::<4, _>(n, |ix, w| {
        for ixs in 0..n {
            for iy1 in 0..n {
                let g1 = t.gain(ix, ixs, iy1, iy1);
                for iy2 in iy1 + 1..n {
                    if let Some((c, form)) = close {
                        if !c.tuple(&[ix, ixs, iy1, iy2], form) {
                            continue;
                        }
                    }
                    w.offer((g1 - t.gain(ix, ixs, iy2, iy2)).abs(), [ix, ixs, iy1, iy2]);
                }
            }
        }
    })
}

fn oi_witness(t: &Tables, key: [usize; 4]) -> Witness {
    let [ix, ixs, iy1, iy2] = key;
    Witness::new(&[
        ("x", t.pts[ix]),
        ("x_star", t.pts[ixs]),
        ("y1", t.pts[iy1]),
        ("y2", t.pts[iy2]),
    ])
}

/// `|γ(x, x* | y1, y1) − γ(x, x* | y2, y2)|` over all grid tuples.
pub fn check_opponent_indifference(
    sys: &RatingSystem,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let prm = params(None, opts, grid, false);
    if let Some(note) = over_budget(grid, pow(grid.len(), 4)) {
        return Ok(PropertyReport::inconclusive(Property::Oi, prm, note));
    }
    let t = Tables::system(sys, grid)?;
    let w = oi_scan(&t, None);
    Ok(PropertyReport::new(Property::Oi, prm)
        .decide(w.residual, w.key.map(|k| oi_witness(&t, k)))
        .metric("tuples", w.count as f64))
}

/// Opponent indifference restricted to P-close tuples.
pub fn check_p_opponent_indifference(
    sys: &RatingSystem,
    p: f64,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    check_margin(p)?;
    let prm = params(Some(p), opts, grid, true);
    if let Some(note) = over_budget(grid, pow(grid.len(), 4)) {
        return Ok(PropertyReport::inconclusive(Property::POi, prm, note));
    }
    let t = Tables::system(sys, grid)?;
    let c = t.closeness(p, opts.eps_open);
    let w = oi_scan(&t, Some((&c, opts.form)));
    Ok(PropertyReport::new(Property::POi, prm)
        .decide(w.residual, w.key.map(|k| oi_witness(&t, k)))
        .metric("tuples", w.count as f64))
}

/// `|γ(x, x* | y1, y1 + δ) − γ(x, x* | y2, y2 + δ)|` over grid tuples, where
/// `δ` is a whole number of grid steps. With `p`, only P-close tuples count.
pub fn check_strong_oi(
    sys: &RatingSystem,
    grid: &Grid,
    p: Option<f64>,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    if let Some(p) = p {
        check_margin(p)?;
    }
    let property = if p.is_some() {
        Property::StrongPOi
    } else {
        Property::StrongOi
    };
    let prm = params(p, opts, grid, true);
    let n = grid.len();
    if let Some(note) = over_budget(grid, pow(n, 4).saturating_mul(2 * n as u64 - 1)) {
        return Ok(PropertyReport::inconclusive(property, prm, note));
    }
    let t = Tables::system(sys, grid)?;
    let close = p.map(|p| t.closeness(p, opts.eps_open));
    let form = opts.form;
    let w = par_scan::<5, _>(n, |ix, w| {
        for ixs in 0..n {
            for d in 0..2 * n - 1 {
                // Offset in grid steps is d − (n − 1).
                let (start, end) = if d < n {
                    (n - 1 - d, n)
                } else {
                    (0, 2 * n - 1 - d)
                };
                let shift = |iy: usize| iy + d + 1 - n;
                for iy1 in start..end {
                    let g1 = t.gain(ix, ixs, iy1, shift(iy1));
                    for iy2 in iy1 + 1..end {
                        if let Some(c) = &close {
                            if !c.tuple(&[ix, ixs, iy1, shift(iy1), iy2, shift(iy2)], form) {
                                continue;
                            }
                        }
                        let g2 = t.gain(ix, ixs, iy2, shift(iy2));
                        w.offer((g1 - g2).abs(), [ix, ixs, d, iy1, iy2]);
                    }
                }
            }
        }
    });
    let witness = w.key.map(|[ix, ixs, d, iy1, iy2]| {
        let shift = |iy: usize| iy + d + 1 - n;
        Witness::new(&[
            ("x", t.pts[ix]),
            ("x_star", t.pts[ixs]),
            ("y1", t.pts[iy1]),
            ("y1_star", t.pts[shift(iy1)]),
            ("y2", t.pts[iy2]),
            ("y2_star", t.pts[shift(iy2)]),
        ])
    });
    Ok(PropertyReport::new(property, prm)
        .decide(w.residual, witness)
        .metric("tuples", w.count as f64))
}

/// Checks `σ(x, y) = β(x) − β(y) + 0.5` on P-close grid pairs.
///
/// `β` is built by chaining adjacent grid points outward from the grid
/// midpoint `m`: `β(m) = 0.5` and `β(x_k) = β(x_{k−1}) + σ(x_k, x_{k−1}) − 0.5`.
/// Near `m` this coincides with `σ(·, m)`; farther out it keeps extending
/// the bisector where `σ(·, m)` itself would leave the P-close region.
/// Adjacent grid points must be P-close for the chain to exist.
///
/// The returned table is the chained bisector. When every grid pair is
/// P-close the curve must be separable on the whole grid, so the bisector's
/// span must also stay within `0.5 + tol`.
pub fn check_p_separable(
    curve: &SkillCurve,
    p: f64,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<(PropertyReport, Option<BisectorTable>)> {
    check_margin(p)?;
    let prm = params(Some(p), opts, grid, false);
    if let Some(note) = over_budget(grid, pow(grid.len(), 2)) {
        return Ok((
            PropertyReport::inconclusive(Property::PSeparable, prm, note),
            None,
        ));
    }
    let t = Tables::curve(curve, grid)?;
    let c = t.closeness(p, opts.eps_open);
    let n = t.n();
    if let Some(k) = (1..n).find(|&k| !c.pair(k, k - 1)) {
        let note = format!(
            "adjacent grid points {} and {} are not P-close; refine the grid",
            t.pts[k - 1],
            t.pts[k]
        );
        return Ok((
            PropertyReport::inconclusive(Property::PSeparable, prm, note),
            None,
        ));
    }
    let mid = (n - 1) / 2;
    let mut beta = vec![0.5; n];
    for k in mid + 1..n {
        beta[k] = beta[k - 1] + t.s(k, k - 1) - 0.5;
    }
    for k in (0..mid).rev() {
        beta[k] = beta[k + 1] - (t.s(k + 1, k) - 0.5);
    }
    let table = BisectorTable::new(
        t.pts.iter().copied().zip(beta.iter().copied()).collect(),
        t.pts[mid],
    )?;

    let w = par_scan::<2, _>(n, |i, w| {
        for j in 0..n {
            if i != j && c.pair(i, j) {
                w.offer((t.s(i, j) - (beta[i] - beta[j] + 0.5)).abs(), [i, j]);
            }
        }
    });
    let span = beta[n - 1] - beta[0];
    let global = c.all();
    let span_excess = if global {
        span - 0.5
    } else {
        f64::NEG_INFINITY
    };

    let mut report = PropertyReport::new(Property::PSeparable, prm);
    if span_excess > w.residual {
        let witness = Witness::new(&[
            ("x", t.pts[0]),
            ("y", t.pts[n - 1]),
            ("beta_x", beta[0]),
            ("beta_y", beta[n - 1]),
        ]);
        report = report
            .decide(span_excess, Some(witness))
            .with_note("bisector span exceeds 0.5");
    } else {
        let witness = w.key.map(|[i, j]| {
            Witness::new(&[
                ("x", t.pts[i]),
                ("y", t.pts[j]),
                ("beta_x", beta[i]),
                ("beta_y", beta[j]),
            ])
        });
        report = report.decide(w.residual, witness);
    }
    let report = report
        .metric("span", span)
        .metric("reference", t.pts[mid])
        .metric("all_pairs_close", if global { 1.0 } else { 0.0 })
        .metric("tuples", w.count as f64);
    Ok((report, Some(table)))
}

/// `max K − min K` over P-close grid pairs. Inconclusive when the curve is
/// trivial on the grid, since then any symmetric K leaves the system
/// indifferent.
pub fn check_p_constant_k(
    sys: &RatingSystem,
    p: f64,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    check_margin(p)?;
    let prm = params(Some(p), opts, grid, false);
    if let Some(note) = over_budget(grid, pow(grid.len(), 2)) {
        return Ok(PropertyReport::inconclusive(
            Property::PConstantK,
            prm,
            note,
        ));
    }
    let t = Tables::system(sys, grid)?;
    if t.trivial(opts.tolerance) {
        return Ok(PropertyReport::inconclusive(
            Property::PConstantK,
            prm,
            "skill curve is trivial on the grid; any symmetric K is admissible",
        ));
    }
    let c = t.closeness(p, opts.eps_open);
    let n = t.n();
    let mut lo: Option<(f64, usize, usize)> = None;
    let mut hi: Option<(f64, usize, usize)> = None;
    let mut count = 0u64;
    for i in 0..n {
        for j in 0..n {
            if !c.pair(i, j) {
                continue;
            }
            count += 1;
            let k = t.k(i, j);
            if lo.is_none_or(|(v, _, _)| k < v) {
                lo = Some((k, i, j));
            }
            if hi.is_none_or(|(v, _, _)| k > v) {
                hi = Some((k, i, j));
            }
        }
    }
    let report = PropertyReport::new(Property::PConstantK, prm);
    let report = match (lo, hi) {
        (Some((kl, il, jl)), Some((kh, ih, jh))) => {
            let witness = Witness::new(&[
                ("x1", t.pts[il]),
                ("y1", t.pts[jl]),
                ("x2", t.pts[ih]),
                ("y2", t.pts[jh]),
            ]);
            report
                .decide(kh - kl, Some(witness))
                .metric("k_min", kl)
                .metric("k_max", kh)
        }
        _ => report.decide(0.0, None),
    };
    Ok(report.metric("tuples", count as f64))
}

/// `|σ(x, y) − σ(x + t, y + t)|` for grid pairs and whole-step shifts `t`.
pub fn check_translation_invariance(
    curve: &SkillCurve,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let prm = params(None, opts, grid, false);
    if let Some(note) = over_budget(grid, pow(grid.len(), 3)) {
        return Ok(PropertyReport::inconclusive(
            Property::TranslationInvariant,
            prm,
            note,
        ));
    }
    let t = Tables::curve(curve, grid)?;
    let n = t.n();
    let w = par_scan::<3, _>(n, |i, w| {
        for j in 0..n {
            for s in 1..n - i.max(j) {
                w.offer((t.s(i, j) - t.s(i + s, j + s)).abs(), [i, j, s]);
            }
        }
    });
    let witness = w.key.map(|[i, j, s]| {
        Witness::new(&[
            ("x", t.pts[i]),
            ("y", t.pts[j]),
            ("x_shift", t.pts[i + s]),
            ("y_shift", t.pts[j + s]),
        ])
    });
    Ok(PropertyReport::new(Property::TranslationInvariant, prm)
        .decide(w.residual, witness)
        .metric("tuples", w.count as f64))
}

/// Additivity and least-squares linearity of a bisector, measured around its
/// reference point `m`: with `f(u) = β(m + u) − β(m)`, additivity is
/// `f(u + v) = f(u) + f(v)`. Only grid points inside the table's sampled
/// range are used.
pub fn check_bisector_linear(
    bisector: &BisectorTable,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<PropertyReport> {
    let prm = params(None, opts, grid, false);
    let (a, b) = bisector.range();
    let pts: Vec<Rating> = grid
        .points()
        .into_iter()
        .filter(|&x| x >= a && x <= b)
        .collect();
    if pts.len() < 3 {
        return Ok(PropertyReport::inconclusive(
            Property::BisectorLinear,
            prm,
            "fewer than three grid points inside the bisector's range",
        ));
    }
    if let Some(note) = over_budget(grid, pow(pts.len(), 2)) {
        return Ok(PropertyReport::inconclusive(
            Property::BisectorLinear,
            prm,
            note,
        ));
    }
    let m = bisector.reference();
    let bm = bisector.value(m);
    let vals: Vec<f64> = pts.iter().map(|&x| bisector.value(x)).collect();
    let n = pts.len();
    let (first, last) = (pts[0], pts[n - 1]);

    let add = par_scan::<2, _>(n, |i, w| {
        for j in i..n {
            let z = pts[i] + pts[j] - m;
            if z >= first && z <= last {
                w.offer((bisector.value(z) + bm - vals[i] - vals[j]).abs(), [i, j]);
            }
        }
    });

    let nf = n as f64;
    let mx = pts.iter().sum::<f64>() / nf;
    let my = vals.iter().sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = pts
        .iter()
        .zip(&vals)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut fit = Worst::<1>::empty();
    for (i, (&x, &y)) in pts.iter().zip(&vals).enumerate() {
        fit.offer((y - (intercept + slope * x)).abs(), [i]);
    }

    let report = PropertyReport::new(Property::BisectorLinear, prm);
    let report = if add.residual >= fit.residual {
        let witness = add.key.map(|[i, j]| {
            let z = pts[i] + pts[j] - m;
            Witness::new(&[
                ("x", pts[i]),
                ("y", pts[j]),
                ("m", m),
                ("beta_x", vals[i]),
                ("beta_y", vals[j]),
                ("beta_x_plus_y", bisector.value(z)),
                ("beta_m", bm),
            ])
        });
        report.decide(add.residual, witness)
    } else {
        let witness = fit.key.map(|[i]| {
            Witness::new(&[
                ("x", pts[i]),
                ("beta_x", vals[i]),
                ("fitted", intercept + slope * pts[i]),
            ])
        });
        report.decide(fit.residual, witness)
    };
    Ok(report
        .metric("slope", slope)
        .metric("intercept", intercept)
        .metric("additivity_residual", add.residual)
        .metric("fit_residual", fit.residual)
        .metric("tuples", add.count as f64))
}

/// Recomputes the residual of a refuted report's witness directly from the
/// system (or, for bisector checks, from the recorded bisector values).
/// Returns `None` when the report has no witness or the property has no
/// pointwise witness.
pub fn witness_residual(sys: &RatingSystem, report: &PropertyReport) -> Option<Result<f64>> {
    let w = report.witness.as_ref()?;
    let g = |name: &str| w.get(name);
    let sigma = |x: f64, y: f64| sys.sigma(x, y);
    let gain = |x, xs, y, ys| sys.expected_gain(&GainQuery::new(x, xs, y, ys));
    let r = match report.property {
        Property::DrawFree => {
            let (x, y) = (g("x")?, g("y")?);
            (|| Ok((sigma(x, y)? + sigma(y, x)? - 1.0).abs()))()
        }
        Property::Fairness => sys.fairness_residual(g("x")?, g("y")?).map(f64::abs),
        Property::Oi | Property::POi => {
            let (x, xs, y1, y2) = (g("x")?, g("x_star")?, g("y1")?, g("y2")?);
            (|| Ok((gain(x, xs, y1, y1)? - gain(x, xs, y2, y2)?).abs()))()
        }
        Property::StrongOi | Property::StrongPOi => {
            let (x, xs) = (g("x")?, g("x_star")?);
            let (y1, y1s, y2, y2s) = (g("y1")?, g("y1_star")?, g("y2")?, g("y2_star")?);
            (|| Ok((gain(x, xs, y1, y1s)? - gain(x, xs, y2, y2s)?).abs()))()
        }
        Property::PSeparable => {
            let (x, y, bx, by) = (g("x")?, g("y")?, g("beta_x")?, g("beta_y")?);
            if report.note.as_deref() == Some("bisector span exceeds 0.5") {
                Ok(by - bx - 0.5)
            } else {
                sigma(x, y).map(|s| (s - (bx - by + 0.5)).abs())
            }
        }
        Property::PConstantK => {
            let (x1, y1, x2, y2) = (g("x1")?, g("y1")?, g("x2")?, g("y2")?);
            Ok((sys.k(x2, y2) - sys.k(x1, y1)).abs())
        }
        Property::TranslationInvariant => {
            let (x, y, xs, ys) = (g("x")?, g("y")?, g("x_shift")?, g("y_shift")?);
            (|| Ok((sigma(x, y)? - sigma(xs, ys)?).abs()))()
        }
        Property::BisectorLinear => match g("fitted") {
            Some(f) => Ok((g("beta_x")? - f).abs()),
            None => Ok((g("beta_x_plus_y")? + g("beta_m")? - g("beta_x")? - g("beta_y")?).abs()),
        },
        Property::ChainIdentity => {
            let (rn, r1, pred) = (g("r_n")?, g("r_1")?, g("predicted")?);
            sigma(rn, r1).map(|s| (s - pred).abs())
        }
        Property::FullScale => {
            let (last, ceiling, p) = (g("r_last")?, g("ceiling")?, g("p")?);
            sigma(ceiling, last).map(|s| p - s)
        }
        Property::Characterization => return None,
    };
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::curves::TabulatedCurve;
    use crate::system::KFunction;
    use crate::verifier::Verdict;

    fn grid() -> Grid {
        Grid::new(1000.0, 2000.0, 50.0).unwrap()
    }

    fn opts() -> CheckOptions {
        CheckOptions::tol(1e-9)
    }

    fn sys(name: &str) -> RatingSystem {
        builtin::by_name(name).unwrap()
    }

    fn assert_witness_reproduces(sys: &RatingSystem, r: &PropertyReport) {
        assert_eq!(r.verdict, Verdict::Refuted, "{}", r.summary());
        let res = witness_residual(sys, r).expect("witness").unwrap();
        assert!(
            res > r.params.tolerance,
            "{} re-evaluates to {res}",
            r.summary()
        );
        assert_eq!(res, r.max_residual, "{}", r.summary());
    }

    #[test]
    fn draw_free_holds_for_analytic_curves() {
        for name in ["sonas", "logistic", "tanh", "trivial"] {
            let r = check_draw_free(sys(name).curve(), &grid(), &opts()).unwrap();
            assert!(r.holds(), "{name}");
            assert_eq!(r.max_residual, 0.0);
        }
    }

    #[test]
    fn corrupted_table_fails_draw_free() {
        let axis = [0.0, 100.0, 200.0];
        let mut cells = Vec::new();
        for &x in &axis {
            for &y in &axis {
                cells.push((x, y, 0.5 + 0.001 * (x - y)));
            }
        }
        cells[3].2 += 0.1;
        let curve = SkillCurve::tabulated(TabulatedCurve::from_cells(&cells, true, false).unwrap());
        let g = Grid::new(0.0, 200.0, 100.0).unwrap();
        let r = check_draw_free(&curve, &g, &CheckOptions::for_curve(&curve)).unwrap();
        assert_eq!(r.witness.as_ref().unwrap().get("x"), Some(0.0));
        assert_eq!(r.witness.as_ref().unwrap().get("y"), Some(100.0));
        let s = RatingSystem::new(curve, KFunction::Constant(32.0));
        assert_witness_reproduces(&s, &r);
        assert!((r.max_residual - 0.1).abs() < 1e-12);
    }

    #[test]
    fn fairness_holds_for_builtins() {
        for (name, s) in builtin::all() {
            let r = check_fairness(&s, &grid(), &CheckOptions::tol(1e-12)).unwrap();
            assert!(r.holds(), "{name}: {}", r.summary());
        }
    }

    #[test]
    fn oi_verdicts() {
        assert!(check_opponent_indifference(&sys("tanh"), &grid(), &opts())
            .unwrap()
            .holds());
        assert!(check_opponent_indifference(&sys("ramp"), &grid(), &opts())
            .unwrap()
            .holds());
        let r = check_opponent_indifference(&sys("trivial"), &grid(), &opts()).unwrap();
        assert!(r.holds() && r.max_residual == 0.0);
        let s = sys("logistic-unclamped");
        let r = check_opponent_indifference(&s, &grid(), &opts()).unwrap();
        assert_witness_reproduces(&s, &r);
    }

    #[test]
    fn p_oi_verdicts() {
        let p = 0.4;
        assert!(
            check_p_opponent_indifference(&sys("sonas"), p, &grid(), &opts())
                .unwrap()
                .holds()
        );
        for name in ["sonas-rating-sum", "logistic-unclamped"] {
            let s = sys(name);
            let r = check_p_opponent_indifference(&s, p, &grid(), &opts()).unwrap();
            assert_witness_reproduces(&s, &r);
        }
    }

    #[test]
    fn p_forms_agree_on_builtins() {
        let g = Grid::new(1000.0, 2000.0, 100.0).unwrap();
        for (name, s) in builtin::all() {
            for p in [0.2, 0.3, 0.4] {
                let a = check_p_opponent_indifference(&s, p, &g, &opts()).unwrap();
                let b =
                    check_p_opponent_indifference(&s, p, &g, &opts().with_form(PForm::Pairwise))
                        .unwrap();
                assert_eq!(a.verdict, b.verdict, "{name} P={p}");
                assert_eq!(a.max_residual, b.max_residual, "{name} P={p}");
                let a = check_strong_oi(&s, &g, Some(p), &opts()).unwrap();
                let b =
                    check_strong_oi(&s, &g, Some(p), &opts().with_form(PForm::Pairwise)).unwrap();
                assert_eq!(a.verdict, b.verdict, "{name} P={p}");
            }
        }
    }

    #[test]
    fn strong_oi_verdicts() {
        assert!(check_strong_oi(&sys("sonas"), &grid(), Some(0.3), &opts())
            .unwrap()
            .holds());
        assert!(check_strong_oi(&sys("trivial"), &grid(), None, &opts())
            .unwrap()
            .holds());
        let s = sys("tanh");
        let r = check_strong_oi(&s, &grid(), Some(0.3), &opts()).unwrap();
        assert_witness_reproduces(&s, &r);
        let w = r.witness.unwrap();
        assert_ne!(w.get("y1_star").unwrap() - w.get("y1").unwrap(), 0.0);
    }

    #[test]
    fn p_separable_verdicts() {
        let (r, b) = check_p_separable(&builtin::sonas_curve(), 0.4, &grid(), &opts()).unwrap();
        assert!(r.holds(), "{}", r.summary());
        let b = b.unwrap();
        for &(x, v) in b.points() {
            assert!((v - (0.5 + 0.001 * (x - 1500.0))).abs() < 1e-12);
        }
        let (r, _) = check_p_separable(&SkillCurve::Trivial, 0.25, &grid(), &opts()).unwrap();
        assert!(r.holds());
        let s = sys("logistic-unclamped");
        let (r, _) = check_p_separable(
            s.curve(),
            0.4,
            &Grid::new(-400.0, 400.0, 50.0).unwrap(),
            &opts(),
        )
        .unwrap();
        assert_witness_reproduces(&s, &r);
    }

    #[test]
    fn p_separable_needs_adjacent_closeness() {
        let g = Grid::new(1000.0, 2000.0, 500.0).unwrap();
        let (r, b) = check_p_separable(&builtin::sonas_curve(), 0.3, &g, &opts()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(b.is_none());
    }

    #[test]
    fn p_constant_k_verdicts() {
        assert!(check_p_constant_k(&sys("sonas"), 0.3, &grid(), &opts())
            .unwrap()
            .holds());
        let s = sys("sonas-rating-sum");
        let r = check_p_constant_k(&s, 0.3, &grid(), &opts()).unwrap();
        assert_witness_reproduces(&s, &r);
        let r = check_p_constant_k(&sys("trivial"), 0.3, &grid(), &opts()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn p_constant_k_ignores_far_pairs() {
        let axis: Vec<f64> = (0..=10).map(|i| 1000.0 + 100.0 * i as f64).collect();
        let values = (0..=10)
            .map(|i: i32| {
                (0..=10)
                    .map(|j: i32| if (i - j).abs() <= 1 { 32.0 } else { 64.0 })
                    .collect()
            })
            .collect();
        let k = KFunction::tabulated(axis, values).unwrap();
        let s = RatingSystem::new(builtin::sonas_curve(), k);
        let g = Grid::new(1000.0, 2000.0, 100.0).unwrap();
        assert!(check_p_constant_k(&s, 0.15, &g, &opts()).unwrap().holds());
        let r = check_p_constant_k(&s, 0.4, &g, &opts()).unwrap();
        assert_witness_reproduces(&s, &r);
    }

    #[test]
    fn translation_invariance_verdicts() {
        for name in ["sonas", "logistic", "logistic-unclamped"] {
            let r = check_translation_invariance(sys(name).curve(), &grid(), &opts()).unwrap();
            assert!(r.holds(), "{name}");
        }
        let s = sys("tanh");
        let r = check_translation_invariance(s.curve(), &grid(), &opts()).unwrap();
        assert_witness_reproduces(&s, &r);
    }

    #[test]
    fn bisector_linearity() {
        let (_, b) = check_p_separable(&builtin::sonas_curve(), 0.3, &grid(), &opts()).unwrap();
        let r = check_bisector_linear(&b.unwrap(), &grid(), &opts()).unwrap();
        assert!(r.holds(), "{}", r.summary());
        assert!((r.metrics["slope"] - 0.001).abs() < 1e-9);

        let flat = BisectorTable::new(vec![(1000.0, 0.5), (2000.0, 0.5)], 1500.0).unwrap();
        let r = check_bisector_linear(&flat, &grid(), &opts()).unwrap();
        assert!(r.holds() && r.metrics["slope"] == 0.0);

        let r = check_bisector_linear(&builtin::tanh_bisector(), &grid(), &opts()).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert!(r.metrics["additivity_residual"] > 1e-3);
        assert_witness_reproduces(&sys("tanh"), &r);
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let g = grid().with_tuple_budget(1000);
        let r = check_opponent_indifference(&sys("sonas"), &g, &opts()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.note.is_some());
    }

    #[test]
    fn reports_are_deterministic_across_thread_counts() {
        let s = sys("logistic-unclamped");
        let a = check_strong_oi(&s, &grid(), Some(0.3), &opts()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| check_strong_oi(&s, &grid(), Some(0.3), &opts()).unwrap());
        assert_eq!(a, b);
    }
}
