//! Retry with exponential backoff and jitter. Only transient failure classes
//! (timeouts, 429, 5xx) are retried; everything else is terminal immediately.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 4,
            base_delay_ms: 500,
            max_delay_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_attempts < 1 {
            return Err("retry.max_attempts must be >= 1".into());
        }
        if self.base_delay_ms > self.max_delay_ms {
            return Err("retry.base_delay_ms must be <= retry.max_delay_ms".into());
        }
        Ok(())
    }

    /// Backoff before retry number `attempt` (1-based failed attempt), capped.
    pub fn delay_ms(&self, attempt: u32) -> u64 {
        let exp = self
            .base_delay_ms
            .saturating_mul(1u64 << (attempt - 1).min(32));
        exp.min(self.max_delay_ms)
    }
}

/// A single call outcome, classified for retry purposes.
#[derive(Debug, Error, Clone)]
pub enum CallError {
    /// Timeouts, HTTP 429, HTTP 5xx: worth retrying.
    #[error("transient: {0}")]
    Transient(String),
    /// Auth failures, bad requests, content-policy refusals: never retried.
    #[error("terminal: {0}")]
    Terminal(String),
}

#[derive(Debug, Error)]
#[error("gave up after {attempts} attempt(s): {last}")]
pub struct RetryExhausted {
    pub attempts: u32,
    pub last: CallError,
}

/// Runs `call` under `policy`, sleeping via `sleep` between transient
/// failures. Returns the response and the number of attempts performed.
pub fn with_retry<R>(
    policy: &RetryPolicy,
    mut sleep: impl FnMut(u64),
    mut call: impl FnMut(u32) -> Result<R, CallError>,
) -> Result<(R, u32), RetryExhausted> {
    let mut attempt = 0;
    loop {
        attempt += 1;
        match call(attempt) {
            Ok(r) => return Ok((r, attempt)),
            Err(err @ CallError::Terminal(_)) => {
                return Err(RetryExhausted {
                    attempts: attempt,
                    last: err,
                })
            }
            Err(err @ CallError::Transient(_)) => {
                if attempt >= policy.max_attempts {
                    return Err(RetryExhausted {
                        attempts: attempt,
                        last: err,
                    });
                }
                let delay = policy.delay_ms(attempt);
                // full jitter in [delay/2, delay]
                let jittered = if delay > 1 {
                    rand::thread_rng().gen_range(delay / 2..=delay)
                } else {
                    delay
                };
                sleep(jittered);
            }
        }
    }
}
