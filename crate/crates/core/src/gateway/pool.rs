//! Bounded worker pool. Results come back in input order regardless of
//! completion order, so downstream stages are independent of scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Runs `work` over `items` on at most `max_parallel` threads.
/// The output vector is ordered by input index.
pub fn run_pool<T, R, F>(items: Vec<T>, max_parallel: usize, work: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    assert!(max_parallel >= 1);
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = max_parallel.min(n);
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let items_ref = &items;
    let work_ref = &work;
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let r = work_ref(&items_ref[i]);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicIsize;

    #[test]
    fn preserves_input_order() {
        let items: Vec<u64> = (0..50).collect();
        let out = run_pool(items.clone(), 8, |&x| x * 2);
        assert_eq!(out, items.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn in_flight_never_exceeds_max_parallel() {
        let in_flight = AtomicIsize::new(0);
        let peak = AtomicIsize::new(0);
        run_pool((0..200).collect::<Vec<i32>>(), 3, |_| {
            let cur = in_flight.fetch_add(1, Ordering::SeqCst) + 1;
            peak.fetch_max(cur, Ordering::SeqCst);
            std::thread::sleep(std::time::Duration::from_micros(200));
            in_flight.fetch_sub(1, Ordering::SeqCst);
        });
        assert!(peak.load(Ordering::SeqCst) <= 3);
    }

    #[test]
    fn empty_input() {
        let out: Vec<i32> = run_pool(Vec::<i32>::new(), 4, |_| 0);
        assert!(out.is_empty());
    }
}
