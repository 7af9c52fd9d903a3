use std::time::{Duration, Instant};

/// Runs `f` `reps` times (at least once) and returns the median wall time
/// with the result of the last run.
pub fn median_time<R>(reps: usize, mut f: impl FnMut() -> R) -> (Duration, R) {
    let mut times = Vec::with_capacity(reps.max(1));
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let r = f();
        times.push(start.elapsed());
        last = Some(r);
    }
    times.sort_unstable();
    (times[times.len() / 2], last.expect("at least one run"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_at_least_once() {
        let mut calls = 0;
        let (_, r) = median_time(0, || {
            calls += 1;
            calls
        });
        assert_eq!((calls, r), (1, 1));
        let (_, r) = median_time(5, || 7);
        assert_eq!(r, 7);
    }
}
