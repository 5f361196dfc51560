//! Deterministic fan-out over independent work items.
//!
//! Work is split into contiguous index ranges, one per worker, and results
//! are reassembled in index order, so the output is identical for every
//! worker count. Randomness never crosses items: each item derives its own
//! streams from its index.

/// Resolve a requested worker count; 0 means "all available cores".
pub fn resolve_workers(requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    #[cfg(not(target_arch = "wasm32"))]
    {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }
    #[cfg(target_arch = "wasm32")]
    {
        1
    }
}

/// Apply `f` to every index in `0..n`, returning results in index order.
pub fn parallel_map<T, F>(n: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let workers = resolve_workers(workers).min(n.max(1) as usize);
    #[cfg(target_arch = "wasm32")]
    {
        let _ = workers;
        return (0..n).map(f).collect();
    }
    #[cfg(not(target_arch = "wasm32"))]
    {
        if workers <= 1 || n < 2 {
            return (0..n).map(f).collect();
        }
        let chunk = n.div_ceil(workers as u64);
        let mut pieces: Vec<Vec<T>> = Vec::with_capacity(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    let f = &f;
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(n);
                    scope.spawn(move || (lo..hi).map(f).collect::<Vec<T>>())
                })
                .collect();
            for handle in handles {
                pieces.push(handle.join().expect("worker panicked"));
            }
        });
        let mut out = Vec::with_capacity(n as usize);
        for piece in pieces {
            out.extend(piece);
        }
        out
    }
}
