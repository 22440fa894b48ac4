use rayon::prelude::*;

use crate::{Error, Result};

const MIN_ROWS_PER_TASK: usize = 64;

/// Evaluates `f(row, scratch)` for every row and returns results in row order.
///
/// Each worker owns scratch values created by `init`. Rows never share
/// state, so the output does not depend on `jobs`.
pub(crate) fn map_rows<R, S, I, F>(rows: usize, jobs: usize, init: I, f: F) -> Result<Vec<R>>
where
    R: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(usize, &mut S) -> R + Sync + Send,
{
    if jobs == 0 {
        return Err(Error::InvalidArgument("jobs must be at least 1".into()));
    }
    if jobs == 1 || rows <= MIN_ROWS_PER_TASK {
        let mut scratch = init();
        return Ok((0..rows).map(|r| f(r, &mut scratch)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        (0..rows)
            .into_par_iter()
            .with_min_len(MIN_ROWS_PER_TASK)
            .map_init(&init, |scratch, r| f(r, scratch))
            .collect()
    }))
}

/// Like [`map_rows`] for fallible rows; the first failing row (by index) wins.
pub(crate) fn try_map_rows<R, S, I, F>(rows: usize, jobs: usize, init: I, f: F) -> Result<Vec<R>>
where
    R: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(usize, &mut S) -> Result<R> + Sync + Send,
{
    map_rows(rows, jobs, init, f)?.into_iter().collect()
}
