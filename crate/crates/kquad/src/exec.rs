//! Low-level loop drivers shared by the hot paths.
//!
//! Every helper has a sequential and (with the `parallel` feature) a rayon
//! variant computing identical per-element arithmetic, so results are
//! bit-identical regardless of backend and thread count. The unsuffixed
//! functions dispatch at compile time. The suffixed variants stay public so
//! the bench suite can compare the two backends directly.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Compensated (Neumaier) accumulator for long sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn map_range_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_range_par<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

/// Evaluate `f(0..len)` into a vector, element-parallel.
pub fn map_range<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_range_par(len, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_range_seq(len, f)
    }
}

pub fn update_indexed_seq<T, F>(out: &mut [T], f: F)
where
    F: Fn(usize, &mut T),
{
    for (i, v) in out.iter_mut().enumerate() {
        f(i, v);
    }
}

#[cfg(feature = "parallel")]
pub fn update_indexed_par<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    out.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
}

/// Apply `f(i, &mut out[i])` to every element, element-parallel.
pub fn update_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        update_indexed_par(out, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        update_indexed_seq(out, f)
    }
}

fn better(a: (usize, f64), b: (usize, f64)) -> (usize, f64) {
    // Larger score wins; ties break to the lower index. Total order, so the
    // reduction is associative and the parallel result is deterministic.
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

pub fn max_scored_seq<F>(len: usize, score: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> Option<f64>,
{
    (0..len)
        .filter_map(|i| score(i).filter(|s| !s.is_nan()).map(|s| (i, s)))
        .reduce(better)
}

#[cfg(feature = "parallel")]
pub fn max_scored_par<F>(len: usize, score: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> Option<f64> + Sync + Send,
{
    (0..len)
        .into_par_iter()
        .filter_map(|i| score(i).filter(|s| !s.is_nan()).map(|s| (i, s)))
        .reduce_with(better)
}

/// Argmax over scored indices; `None` entries are skipped, ties go to the
/// lowest index.
pub fn max_scored<F>(len: usize, score: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> Option<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        max_scored_par(len, score)
    }
    #[cfg(not(feature = "parallel"))]
    {
        max_scored_seq(len, score)
    }
}

/// Per-index terms computed in parallel, combined in index order with
/// compensated summation. Deterministic independent of thread count.
pub fn sum_ordered<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let terms = map_range(len, f);
    let mut acc = Kahan::new();
    for t in terms {
        acc.add(t);
    }
    acc.total()
}
