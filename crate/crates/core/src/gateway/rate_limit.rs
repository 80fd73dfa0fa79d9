//! Sliding-window rate limiter over an injectable clock, so the
//! requests-per-minute contract can be asserted under a simulated clock.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex};

const WINDOW_MS: u64 = 60_000;

/// Monotonic time source. The production clock wraps `std::time::Instant`;
/// tests use [`SimClock`] where `sleep` advances time instantly.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
    fn sleep_ms(&self, ms: u64);
}

pub struct SystemClock {
    start: std::time::Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock {
            start: std::time::Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }
    fn sleep_ms(&self, ms: u64) {
        std::thread::sleep(std::time::Duration::from_millis(ms));
    }
}

/// Simulated clock: sleeping advances time, nothing blocks.
pub struct SimClock {
    now: Mutex<u64>,
}

impl SimClock {
    pub fn new() -> Self {
        SimClock { now: Mutex::new(0) }
    }
}

impl Default for SimClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SimClock {
    fn now_ms(&self) -> u64 {
        *self.now.lock().unwrap()
    }
    fn sleep_ms(&self, ms: u64) {
        *self.now.lock().unwrap() += ms;
    }
}

/// Admits at most `requests_per_minute` acquisitions within any 60 s window.
pub struct RateLimiter {
    rpm: f64,
    clock: Arc<dyn Clock>,
    issued: Mutex<VecDeque<u64>>,
}

impl RateLimiter {
    pub fn new(requests_per_minute: f64, clock: Arc<dyn Clock>) -> Self {
        assert!(requests_per_minute > 0.0);
        RateLimiter {
            rpm: requests_per_minute,
            clock,
            issued: Mutex::new(VecDeque::new()),
        }
    }

    /// Blocks (via the clock) until a request slot is available, then records
    /// the issue timestamp and returns it.
    pub fn acquire(&self) -> u64 {
        let limit = self.rpm.floor() as usize;
        loop {
            let wait = {
                let mut issued = self.issued.lock().unwrap();
                let now = self.clock.now_ms();
                while let Some(&t) = issued.front() {
                    if now.saturating_sub(t) >= WINDOW_MS {
                        issued.pop_front();
                    } else {
                        break;
                    }
                }
                if issued.len() < limit {
                    issued.push_back(now);
                    return now;
                }
                // oldest entry leaves the window at front + WINDOW_MS
                let front = *issued.front().unwrap();
                (front + WINDOW_MS).saturating_sub(now).max(1)
            };
            self.clock.sleep_ms(wait);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn never_exceeds_rpm_in_any_window() {
        let clock = Arc::new(SimClock::new());
        let limiter = RateLimiter::new(10.0, clock.clone());
        let mut stamps = Vec::new();
        for _ in 0..100 {
            stamps.push(limiter.acquire());
        }
        for (i, &t) in stamps.iter().enumerate() {
            let in_window = stamps[i..]
                .iter()
                .take_while(|&&u| u < t + WINDOW_MS)
                .count();
            assert!(in_window <= 10, "window starting at {t} holds {in_window}");
        }
    }

    #[test]
    fn burst_below_limit_is_immediate() {
        let clock = Arc::new(SimClock::new());
        let limiter = RateLimiter::new(5.0, clock.clone());
        for _ in 0..5 {
            limiter.acquire();
        }
        assert_eq!(clock.now_ms(), 0);
        limiter.acquire();
        assert!(clock.now_ms() >= WINDOW_MS);
    }
}
