//! Wall-clock scaling of the recursion in `n` and `t`.

use std::time::Instant;

use stiknn_core::{Dataset, KnnConfig, Role, StiPlan};

use crate::datagen::random_instance;
use crate::error::{Error, Result};
use crate::parallel::{assemble_in, pool};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    pub ts: Vec<usize>,
    /// `t` used while sweeping `n`.
    pub t_fixed: usize,
    /// `n` used while sweeping `t`.
    pub n_fixed: usize,
    pub k: usize,
    pub reps: usize,
    pub threads: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            ns: vec![250, 500, 1000, 2000],
            ts: vec![50, 100, 200, 400],
            t_fixed: 50,
            n_fixed: 500,
            k: 5,
            reps: 5,
            threads: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    /// `'n'` or `'t'`: which axis this row belongs to.
    pub axis: char,
    pub n: usize,
    pub t: usize,
    /// Fastest sample, per call.
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub timings: Vec<Timing>,
    pub slope_n: f64,
    pub slope_t: f64,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,n,t,seconds\n");
        for r in &self.timings {
            out.push_str(&format!("{},{},{},{:.9}\n", r.axis, r.n, r.t, r.seconds));
        }
        out.push_str(&format!("# slope_n,{:.4}\n# slope_t,{:.4}\n", self.slope_n, self.slope_t));
        out
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Shortest wall time a single sample may cover; faster calls are batched.
const MIN_SAMPLE_SECS: f64 = 0.02;

struct Point {
    axis: char,
    train: Dataset,
    test: Dataset,
    knn: KnnConfig,
}

impl Point {
    fn new(axis: char, n: usize, t: usize, cfg: &BenchConfig) -> Result<Self> {
        let train = random_instance(n, 2, cfg.seed ^ n as u64)?;
        let test = random_instance(t, 2, cfg.seed ^ (t as u64).rotate_left(32))?.with_role(Role::Test);
        Ok(Self { axis, train, test, knn: KnnConfig::new(cfg.k.min(n)) })
    }

    fn call(&self, pool: &rayon::ThreadPool) -> Result<()> {
        let plan = StiPlan::new(&self.train, &self.test, &self.knn)?;
        std::hint::black_box(assemble_in(pool, &plan)?);
        Ok(())
    }

    /// Seconds per call, batching calls until the sample is long enough.
    fn sample(&self, pool: &rayon::ThreadPool) -> Result<f64> {
        let start = Instant::now();
        let mut calls = 0u32;
        loop {
            self.call(pool)?;
            calls += 1;
            let elapsed = start.elapsed().as_secs_f64();
            if elapsed >= MIN_SAMPLE_SECS {
                return Ok(elapsed / calls as f64);
            }
        }
    }
}

/// Times every size once per round, rounds interleaved so slow phases of a
/// shared machine hit all sizes alike, and keeps the fastest sample.
pub fn run(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.ns.len() < 2 || cfg.ts.len() < 2 {
        return Err(Error::Invalid("bench needs at least two sizes on each axis".into()));
    }
    let pool = pool(cfg.threads)?;
    let mut points = Vec::new();
    for &n in &cfg.ns {
        points.push(Point::new('n', n, cfg.t_fixed, cfg)?);
    }
    for &t in &cfg.ts {
        points.push(Point::new('t', cfg.n_fixed, t, cfg)?);
    }
    points[0].sample(&pool)?;
    let mut best = vec![f64::INFINITY; points.len()];
    for _ in 0..cfg.reps.max(1) {
        for (b, p) in best.iter_mut().zip(&points) {
            *b = b.min(p.sample(&pool)?);
        }
    }
    let timings: Vec<Timing> = points
        .iter()
        .zip(&best)
        .map(|(p, &seconds)| Timing { axis: p.axis, n: p.train.len(), t: p.test.len(), seconds })
        .collect();
    let slope = |axis: char| {
        let rows: Vec<&Timing> = timings.iter().filter(|r| r.axis == axis).collect();
        let xs: Vec<f64> = rows.iter().map(|r| if axis == 'n' { r.n } else { r.t } as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.seconds).collect();
        loglog_slope(&xs, &ys)
    };
    let (slope_n, slope_t) = (slope('n'), slope('t'));
    Ok(BenchReport { timings, slope_n, slope_t })
}
