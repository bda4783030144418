//! Point-parallel mapping with a sequential fallback.
//!
//! All per-point work in the workbench is embarrassingly parallel and
//! order-independent; results are collected in input order so aggregation
//! is deterministic regardless of thread count. Building without the
//! `parallel` feature swaps in the sequential implementation.

use crate::error::Result;

/// Sequential map over points, collecting in order.
pub fn map_points_seq<T, F>(points: &[Vec<f64>], f: F) -> Vec<T>
where
    F: Fn(usize, &[f64]) -> T + Sync,
    T: Send,
{
    points.iter().enumerate().map(|(i, p)| f(i, p)).collect()
}

/// Parallel map over points via rayon, collecting in input order.
#[cfg(feature = "parallel")]
pub fn map_points_par<T, F>(points: &[Vec<f64>], f: F) -> Vec<T>
where
    F: Fn(usize, &[f64]) -> T + Sync,
    T: Send,
{
    use rayon::prelude::*;
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| f(i, p))
        .collect()
}

/// Map over points with the configured execution mode.
pub fn map_points<T, F>(points: &[Vec<f64>], f: F) -> Vec<T>
where
    F: Fn(usize, &[f64]) -> T + Sync,
    T: Send,
{
    #[cfg(feature = "parallel")]
    {
        map_points_par(points, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_points_seq(points, f)
    }
}

/// Fallible map over points; the first error (in input order) wins.
pub fn try_map_points<T, F>(points: &[Vec<f64>], f: F) -> Result<Vec<T>>
where
    F: Fn(usize, &[f64]) -> Result<T> + Sync,
    T: Send,
{
    map_points(points, f).into_iter().collect()
}
