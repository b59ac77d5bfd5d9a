//! Deterministic parallel map over independent evaluation nodes.

use std::sync::OnceLock;

/// Worker count: `DUNKLKIT_THREADS` if set, else the available parallelism.
pub fn thread_count() -> usize {
    static N: OnceLock<usize> = OnceLock::new();
    *N.get_or_init(|| {
        let hw = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        match std::env::var("DUNKLKIT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
            Some(n) if n >= 1 => n.min(hw.max(1) * 4),
            _ => hw,
        }
    })
}

/// Map `f` over `items`, preserving order. Results do not depend on the thread count.
pub fn par_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], f: F) -> Vec<R> {
    let n = thread_count();
    if n <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(n);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Fallible variant of [`par_map`]; the first error in item order wins.
pub fn try_par_map<T: Sync, R: Send, E: Send, F: Fn(&T) -> Result<R, E> + Sync>(
    items: &[T],
    f: F,
) -> Result<Vec<R>, E> {
    par_map(items, f).into_iter().collect()
}
