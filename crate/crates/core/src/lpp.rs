//! Last-passage percolation on the wedge `W = {(i, j) : j >= 0, i + j >= 0}`.
//!
//! Paths start at the origin and take east `(1, 0)` or northwest `(-1, 1)`
//! steps. In the sheared coordinates `a = i + j`, `b = j` these become the
//! unit steps of the quadrant, so the passage times to a target `(I, J)` live
//! on the rectangle `0 <= a <= I + J`, `0 <= b <= J`: at row `j` the
//! admissible columns are `-j ..= I + J - j`. Every cell of that trapezoid can
//! feed the target (a path may overshoot east and come back northwest), and
//! no cell outside it can.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::env::{DisorderLaw, Environment};
use crate::error::{Error, Result};
use crate::rng::{cell_key, exponential, substream, Stream};
use crate::seed::derive_seed;
use crate::stats::mean_sem;

/// Default cap on the number of cells held by a full [`PassageTable`].
pub const DEFAULT_CELL_BUDGET: u64 = 1 << 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WedgePoint {
    pub i: i64,
    pub j: i64,
}

impl WedgePoint {
    pub fn new(i: i64, j: i64) -> Result<Self> {
        if Self::in_wedge(i, j) {
            Ok(WedgePoint { i, j })
        } else {
            Err(Error::Domain(format!("({i}, {j}) is outside the wedge")))
        }
    }

    pub fn in_wedge(i: i64, j: i64) -> bool {
        j >= 0 && i + j >= 0
    }

    pub const ORIGIN: WedgePoint = WedgePoint { i: 0, j: 0 };

    fn sheared(self) -> (usize, usize) {
        ((self.i + self.j) as usize, self.j as usize)
    }
}

/// Source of the cell weights `Y_ij`.
pub trait WeightField {
    fn weight(&self, i: i64, j: i64) -> f64;

    /// Whether weights are available for every column in `lo..=hi`.
    fn covers_columns(&self, _lo: i64, _hi: i64) -> bool {
        true
    }
}

/// `Y_ij ~ Exp(alpha(i))`, drawn by inverse CDF from the counter cell `(seed, i, j)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpWeights<'a> {
    env: &'a Environment,
    seed: u64,
}

impl<'a> ExpWeights<'a> {
    pub fn new(env: &'a Environment, seed: u64) -> Self {
        ExpWeights { env, seed }
    }

    pub fn env(&self) -> &'a Environment {
        self.env
    }
}

#[inline(always)]
fn exp_weight(seed: u64, alpha: f64, i: i64, j: i64) -> f64 {
    exponential(substream(cell_key(seed, Stream::Weight, i, j), 0), alpha)
}

impl WeightField for ExpWeights<'_> {
    #[inline]
    fn weight(&self, i: i64, j: i64) -> f64 {
        let alpha = self.env.rates()[(i - self.env.i_min()) as usize];
        exp_weight(self.seed, alpha, i, j)
    }

    fn covers_columns(&self, lo: i64, hi: i64) -> bool {
        self.env.contains(lo) && self.env.contains(hi)
    }
}

/// The weight `Y_ij` at a wedge point.
pub fn sample_weight(env: &Environment, weight_seed: u64, i: i64, j: i64) -> Result<f64> {
    if !WedgePoint::in_wedge(i, j) {
        return Err(Error::Domain(format!("({i}, {j}) is outside the wedge")));
    }
    let alpha = env
        .alpha(i)
        .ok_or_else(|| Error::Domain(format!("column {i} is outside the environment")))?;
    Ok(exp_weight(weight_seed, alpha, i, j))
}

/// Explicit weights for tests and small worked examples; unlisted cells weigh 0.
#[derive(Debug, Clone, Default)]
pub struct InjectedWeights {
    cells: HashMap<(i64, i64), f64>,
}

impl InjectedWeights {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, i: i64, j: i64, y: f64) -> Self {
        self.cells.insert((i, j), y);
        self
    }

    pub fn set(&mut self, i: i64, j: i64, y: f64) {
        self.cells.insert((i, j), y);
    }
}

impl WeightField for InjectedWeights {
    fn weight(&self, i: i64, j: i64) -> f64 {
        self.cells.get(&(i, j)).copied().unwrap_or(0.0)
    }
}

impl<F: Fn(i64, i64) -> f64> WeightField for F {
    fn weight(&self, i: i64, j: i64) -> f64 {
        self(i, j)
    }
}

/// Passage times `T(i, j)` over the trapezoid feeding a target.
#[derive(Debug, Clone)]
pub struct PassageTable {
    target: WedgePoint,
    width: usize,
    rows: usize,
    values: Vec<f64>,
}

impl PassageTable {
    pub fn target(&self) -> WedgePoint {
        self.target
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        WedgePoint::in_wedge(i, j) && ((i + j) as usize) < self.width && (j as usize) < self.rows
    }

    pub fn get(&self, i: i64, j: i64) -> Option<f64> {
        if !self.contains(i, j) {
            return None;
        }
        let (a, b) = WedgePoint { i, j }.sheared();
        Some(self.values[b * self.width + a])
    }

    /// `T` at the target.
    pub fn passage_time(&self) -> f64 {
        *self.values.last().expect("table is never empty")
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }
}

fn column_range(target: WedgePoint) -> (i64, i64) {
    (-target.j, target.i + target.j)
}

/// Full-table dynamic programme for `T` up to `target`.
pub fn passage_table<W: WeightField>(weights: &W, target: WedgePoint, cell_budget: u64) -> Result<PassageTable> {
    let target = WedgePoint::new(target.i, target.j)?;
    let (a_max, b_max) = target.sheared();
    let (width, rows) = (a_max + 1, b_max + 1);
    let cells = width as u64 * rows as u64;
    if cells > cell_budget {
        return Err(Error::Resource {
            cells,
            budget: cell_budget,
        });
    }
    let (lo, hi) = column_range(target);
    if !weights.covers_columns(lo, hi) {
        return Err(Error::Domain(format!("weights do not cover columns {lo}..={hi}")));
    }
    let mut values = vec![0.0; width * rows];
    for b in 0..rows {
        let j = b as i64;
        for a in 0..width {
            let y = weights.weight(a as i64 - j, j);
            let east = if a > 0 { values[b * width + a - 1] } else { f64::NEG_INFINITY };
            let north_west = if b > 0 { values[(b - 1) * width + a] } else { f64::NEG_INFINITY };
            let best = east.max(north_west);
            values[b * width + a] = if best == f64::NEG_INFINITY { y } else { y + best };
        }
    }
    Ok(PassageTable {
        target,
        width,
        rows,
        values,
    })
}

/// Row-streaming evaluation of `T` at several targets with one row of memory.
pub fn passage_times<W: WeightField>(weights: &W, targets: &[WedgePoint]) -> Result<Vec<f64>> {
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    for t in targets {
        WedgePoint::new(t.i, t.j)?;
    }
    let a_max = targets.iter().map(|t| t.sheared().0).max().unwrap_or(0);
    let b_max = targets.iter().map(|t| t.sheared().1).max().unwrap_or(0);
    let (lo, hi) = (-(b_max as i64), a_max as i64);
    if !weights.covers_columns(lo, hi) {
        return Err(Error::Domain(format!("weights do not cover columns {lo}..={hi}")));
    }
    let mut row = vec![0.0; a_max + 1];
    let mut out = vec![f64::NAN; targets.len()];
    for b in 0..=b_max {
        let j = b as i64;
        for a in 0..=a_max {
            let y = weights.weight(a as i64 - j, j);
            row[a] = match (a > 0, b > 0) {
                (false, false) => y,
                (true, false) => y + row[a - 1],
                (false, true) => y + row[a],
                (true, true) => y + row[a - 1].max(row[a]),
            };
        }
        for (k, t) in targets.iter().enumerate() {
            let (ta, tb) = t.sheared();
            if tb == b {
                out[k] = row[ta];
            }
        }
    }
    Ok(out)
}

/// A vertex sequence in the wedge with east / northwest steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticePath {
    vertices: Vec<WedgePoint>,
}

impl LatticePath {
    pub fn new(vertices: Vec<WedgePoint>) -> Result<Self> {
        let path = LatticePath { vertices };
        path.validate()?;
        Ok(path)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::Path("empty vertex sequence".into()));
        }
        for v in &self.vertices {
            if !WedgePoint::in_wedge(v.i, v.j) {
                return Err(Error::Path(format!("vertex ({}, {}) leaves the wedge", v.i, v.j)));
            }
        }
        for w in self.vertices.windows(2) {
            let step = (w[1].i - w[0].i, w[1].j - w[0].j);
            if step != (1, 0) && step != (-1, 1) {
                return Err(Error::Path(format!(
                    "step ({}, {}) -> ({}, {}) is neither east nor northwest",
                    w[0].i, w[0].j, w[1].i, w[1].j
                )));
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[WedgePoint] {
        &self.vertices
    }

    pub fn start(&self) -> WedgePoint {
        self.vertices[0]
    }

    pub fn end(&self) -> WedgePoint {
        *self.vertices.last().unwrap()
    }

    pub fn weight<W: WeightField>(&self, weights: &W) -> f64 {
        self.vertices.iter().map(|v| weights.weight(v.i, v.j)).sum()
    }
}

/// Recovers an argmax path from the origin to `target`, preferring the east
/// predecessor `(i - 1, j)` on ties.
pub fn backtrack_path(table: &PassageTable, target: WedgePoint) -> Result<LatticePath> {
    if !table.contains(target.i, target.j) {
        return Err(Error::Domain(format!(
            "({}, {}) is not covered by the table",
            target.i, target.j
        )));
    }
    let mut rev = vec![target];
    let mut cur = target;
    while cur != WedgePoint::ORIGIN {
        let east = table.get(cur.i - 1, cur.j);
        let north_west = if cur.j > 0 { table.get(cur.i + 1, cur.j - 1) } else { None };
        cur = match (east, north_west) {
            (Some(e), Some(nw)) if e >= nw => WedgePoint { i: cur.i - 1, j: cur.j },
            (Some(_), Some(_)) | (None, Some(_)) => WedgePoint { i: cur.i + 1, j: cur.j - 1 },
            (Some(_), None) => WedgePoint { i: cur.i - 1, j: cur.j },
            (None, None) => return Err(Error::Invariant("backtracking stranded before the origin".into())),
        };
        rev.push(cur);
    }
    rev.reverse();
    LatticePath::new(rev)
}

/// The set of columns a path visits.
pub fn column_coverage(path: &LatticePath) -> Result<BTreeSet<i64>> {
    path.validate()?;
    Ok(path.vertices.iter().map(|v| v.i).collect())
}

/// Lattice point `(floor(x n), floor(y n))`, projected onto the wedge edge if
/// rounding pushed it just outside.
pub fn scaled_point(x: f64, y: f64, n: u64) -> WedgePoint {
    let j = (y * n as f64).floor() as i64;
    let i = ((x * n as f64).floor() as i64).max(-j);
    WedgePoint { i, j }
}

pub fn in_continuum_wedge(x: f64, y: f64) -> bool {
    x.is_finite() && y.is_finite() && y >= 0.0 && x + y >= 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeStat {
    pub n: u64,
    pub mean: f64,
    pub sem: f64,
}

/// Monte Carlo estimate of the limit shape at one direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauEstimate {
    pub x: f64,
    pub y: f64,
    pub replicas: usize,
    pub per_size: Vec<SizeStat>,
    /// Mean at the largest size.
    pub point_estimate: f64,
    /// Two-point fit `m(n) = tau + c n^(-2/3)` over the last two sizes. Diagnostic only.
    pub extrapolated: Option<f64>,
}

/// Seeds used by replica `k` of a limit-shape study: (environment, weights).
pub fn replica_seeds(seed: u64, replica: u64) -> (u64, u64) {
    (
        derive_seed(seed, "lpp-tau", replica, "env"),
        derive_seed(seed, "lpp-tau", replica, "Y"),
    )
}

/// `T(floor(xn), floor(yn)) / n` for every `n` in `sizes`, averaged over
/// independent environments and weights. Each replica shares its seeds across
/// the size ladder, and all sizes come from one streaming sweep.
pub fn tau_estimate(
    law: &DisorderLaw,
    x: f64,
    y: f64,
    sizes: &[u64],
    replicas: usize,
    seed: u64,
) -> Result<TauEstimate> {
    law.validate()?;
    if !in_continuum_wedge(x, y) {
        return Err(Error::Domain(format!("({x}, {y}) is outside the continuum wedge")));
    }
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("sizes", "must be positive and strictly increasing"));
    }
    if replicas < 2 {
        return Err(Error::param("replicas", "at least two replicas are needed for a standard error"));
    }
    let targets: Vec<WedgePoint> = sizes.iter().map(|&n| scaled_point(x, y, n)).collect();
    let a_max = targets.iter().map(|t| t.i + t.j).max().unwrap();
    let b_max = targets.iter().map(|t| t.j).max().unwrap();

    let per_replica: Vec<Vec<f64>> = (0..replicas as u64)
        .into_par_iter()
        .map(|k| {
            let (env_seed, weight_seed) = replica_seeds(seed, k);
            let env = Environment::sample(law, env_seed, -b_max, a_max)?;
            let times = passage_times(&ExpWeights::new(&env, weight_seed), &targets)?;
            Ok(times.iter().zip(sizes).map(|(t, &n)| t / n as f64).collect())
        })
        .collect::<Result<_>>()?;

    let per_size: Vec<SizeStat> = sizes
        .iter()
        .enumerate()
        .map(|(s, &n)| {
            let col: Vec<f64> = per_replica.iter().map(|r| r[s]).collect();
            let m = mean_sem(&col);
            SizeStat {
                n,
                mean: m.mean,
                sem: m.sem,
            }
        })
        .collect();
    let point_estimate = per_size.last().unwrap().mean;
    let extrapolated = match per_size.as_slice() {
        [.., p, q] => {
            let (e1, e2) = ((p.n as f64).powf(-2.0 / 3.0), (q.n as f64).powf(-2.0 / 3.0));
            let c = (p.mean - q.mean) / (e1 - e2);
            Some(q.mean - c * e2)
        }
        _ => None,
    };
    Ok(TauEstimate {
        x,
        y,
        replicas,
        per_size,
        point_estimate,
        extrapolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: i64, j: i64) -> WedgePoint {
        WedgePoint::new(i, j).unwrap()
    }

    fn worked_example() -> InjectedWeights {
        InjectedWeights::new()
            .with(0, 0, 1.0)
            .with(1, 0, 2.0)
            .with(2, 0, 5.0)
            .with(0, 1, 3.0)
            .with(1, 1, 1.0)
    }

    #[test]
    fn wedge_membership() {
        assert!(WedgePoint::new(-3, 3).is_ok());
        assert!(WedgePoint::new(-4, 3).is_err());
        assert!(WedgePoint::new(0, -1).is_err());
    }

    #[test]
    fn unique_east_path() {
        let w = InjectedWeights::new().with(0, 0, 1.5).with(1, 0, 2.25);
        let t = passage_table(&w, p(1, 0), DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(t.passage_time(), 3.75);
    }

    #[test]
    fn column_zero_at_row_one_has_two_routes() {
        // (0,0) -> (1,0) -> (0,1) and (0,0) -> (-1,1) -> (0,1) along the wedge edge.
        let w = InjectedWeights::new()
            .with(0, 0, 1.0)
            .with(1, 0, 2.0)
            .with(-1, 1, 0.5)
            .with(0, 1, 3.0);
        assert_eq!(passage_table(&w, p(0, 1), DEFAULT_CELL_BUDGET).unwrap().passage_time(), 6.0);
        let w = w.with(-1, 1, 4.0);
        assert_eq!(passage_table(&w, p(0, 1), DEFAULT_CELL_BUDGET).unwrap().passage_time(), 8.0);
    }

    #[test]
    fn worked_example_value_and_path() {
        let w = worked_example();
        let t = passage_table(&w, p(1, 1), DEFAULT_CELL_BUDGET).unwrap();
        assert_eq!(t.passage_time(), 9.0);
        let path = backtrack_path(&t, p(1, 1)).unwrap();
        assert_eq!(path.vertices(), &[p(0, 0), p(1, 0), p(2, 0), p(1, 1)]);
        assert_eq!(path.weight(&w), 9.0);
    }

    #[test]
    fn ties_prefer_east() {
        // Every weight is 1, so both predecessors of (1,1) tie.
        let ones = |_: i64, _: i64| 1.0;
        let t = passage_table(&ones, p(1, 1), DEFAULT_CELL_BUDGET).unwrap();
        let path = backtrack_path(&t, p(1, 1)).unwrap();
        assert_eq!(path.vertices()[path.vertices().len() - 2], p(0, 1));
    }

    #[test]
    fn row_zero_backtrack_is_all_east() {
        let w = |i: i64, j: i64| ((i * 31 + j * 17) % 7) as f64;
        let t = passage_table(&w, p(5, 0), DEFAULT_CELL_BUDGET).unwrap();
        let path = backtrack_path(&t, p(5, 0)).unwrap();
        let expect: Vec<_> = (0..=5).map(|i| p(i, 0)).collect();
        assert_eq!(path.vertices(), expect.as_slice());
        assert_eq!(column_coverage(&path).unwrap(), (0..=5).collect());
    }

    #[test]
    fn pure_northwest_path() {
        let path = LatticePath::new((0..=3).map(|k| p(-k, k)).collect()).unwrap();
        let cols = column_coverage(&path).unwrap();
        assert!(cols.contains(&0));
        assert!(cols.iter().all(|&c| c <= 0));
    }

    #[test]
    fn invalid_steps_rejected() {
        let bad = LatticePath::new(vec![p(0, 0), p(0, 1)]);
        assert!(matches!(bad, Err(Error::Path(_))));
        let outside = LatticePath::new(vec![WedgePoint { i: 0, j: 0 }, WedgePoint { i: -1, j: 0 }]);
        assert!(matches!(outside, Err(Error::Path(_))));
    }

    #[test]
    fn table_and_stream_agree() {
        let env = Environment::sample(
            &DisorderLaw::TwoPoint {
                slow: 0.5,
                fast: 1.0,
                p_slow: 0.5,
            },
            1,
            -40,
            80,
        )
        .unwrap();
        let w = ExpWeights::new(&env, 9);
        let targets = [p(10, 20), p(-20, 40), p(30, 0), p(0, 0)];
        let streamed = passage_times(&w, &targets).unwrap();
        for (t, s) in targets.iter().zip(&streamed) {
            let full = passage_table(&w, *t, DEFAULT_CELL_BUDGET).unwrap();
            assert_eq!(full.passage_time().to_bits(), s.to_bits());
        }
    }

    #[test]
    fn budget_enforced() {
        let err = passage_table(&|_: i64, _: i64| 1.0, p(100, 100), 1000).unwrap_err();
        assert_eq!(
            err,
            Error::Resource {
                cells: 201 * 101,
                budget: 1000
            }
        );
    }

    #[test]
    fn uncovered_environment_rejected() {
        let env = Environment::sample(&DisorderLaw::PointMass { rate: 1.0 }, 0, 0, 5).unwrap();
        assert!(passage_table(&ExpWeights::new(&env, 0), p(2, 2), DEFAULT_CELL_BUDGET).is_err());
        assert!(sample_weight(&env, 0, 0, -1).is_err());
        assert!(sample_weight(&env, 0, 9, 0).is_err());
    }

    #[test]
    fn weight_means() {
        let n = 100_000;
        for rate in [0.5, 1.0] {
            let env = Environment::sample(&DisorderLaw::PointMass { rate }, 0, 0, 0).unwrap();
            let mean = (0..n).map(|j| sample_weight(&env, 4, 0, j).unwrap()).sum::<f64>() / n as f64;
            let sd = 1.0 / rate;
            assert!((mean - 1.0 / rate).abs() < 3.0 * sd / (n as f64).sqrt(), "{mean}");
        }
        let env = Environment::sample(&DisorderLaw::PointMass { rate: 0.5 }, 0, 0, 0).unwrap();
        assert_eq!(sample_weight(&env, 4, 0, 17).unwrap(), sample_weight(&env, 4, 0, 17).unwrap());
    }

    #[test]
    fn tau_row_zero_law_of_large_numbers() {
        let r = 0.5;
        let est = tau_estimate(&DisorderLaw::PointMass { rate: r }, 0.5, 0.0, &[200, 800, 3200], 20, 3).unwrap();
        let last = est.per_size.last().unwrap();
        // T(floor(xn), 0) sums floor(xn) + 1 exponentials of mean 1/r.
        let expect = (1600.0 + 1.0) / r / 3200.0;
        assert!((last.mean - expect).abs() < 3.0 * last.sem);
        assert!((last.mean - 0.5 / r).abs() < 0.05);
    }

    #[test]
    fn tau_at_origin_vanishes() {
        let est = tau_estimate(&DisorderLaw::PointMass { rate: 1.0 }, 0.0, 0.0, &[10, 1000], 10, 0).unwrap();
        assert!(est.per_size[1].mean < est.per_size[0].mean);
        assert!(est.per_size[1].mean < 0.01);
    }

    #[test]
    fn tau_argument_validation() {
        let law = DisorderLaw::PointMass { rate: 1.0 };
        assert!(matches!(tau_estimate(&law, -2.0, 1.0, &[10], 4, 0), Err(Error::Domain(_))));
        assert!(tau_estimate(&law, 0.0, 1.0, &[20, 10], 4, 0).is_err());
        assert!(tau_estimate(&law, 0.0, 1.0, &[10], 1, 0).is_err());
    }

    #[test]
    fn scaled_point_projects_onto_wedge() {
        let q = scaled_point(-0.3, 0.3, 3);
        assert!(WedgePoint::in_wedge(q.i, q.j));
        assert_eq!(scaled_point(1.0, 1.0, 500), p(500, 500));
    }
}
