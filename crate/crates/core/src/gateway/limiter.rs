//! Sliding-window rate limiter over an injectable clock, so the budget
//! invariant is testable without waiting on wall time.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

/// Monotonic time source. The system clock sleeps for real; tests substitute
/// a virtual clock whose `sleep` just advances `now`.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, duration: Duration);
}

pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock { origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Grants at most `budget` acquisitions in any sliding `window`.
pub struct RateLimiter {
    budget: usize,
    window: Duration,
    clock: Arc<dyn Clock>,
    grants: Mutex<VecDeque<Duration>>,
}

impl RateLimiter {
    pub fn per_minute(budget: u32, clock: Arc<dyn Clock>) -> RateLimiter {
        RateLimiter::new(budget, Duration::from_secs(60), clock)
    }

    pub fn new(budget: u32, window: Duration, clock: Arc<dyn Clock>) -> RateLimiter {
        RateLimiter {
            budget: budget.max(1) as usize,
            window,
            clock,
            grants: Mutex::new(VecDeque::new()),
        }
    }

    /// Grants immediately or reports how long until the oldest grant leaves
    /// the window.
    pub fn try_acquire(&self) -> Result<(), Duration> {
        let now = self.clock.now();
        let mut grants = self.grants.lock().expect("limiter lock");
        while let Some(&oldest) = grants.front() {
            if oldest + self.window <= now {
                grants.pop_front();
            } else {
                break;
            }
        }
        if grants.len() < self.budget {
            grants.push_back(now);
            return Ok(());
        }
        let oldest = *grants.front().expect("budget is positive");
        Err(oldest + self.window - now)
    }

    /// Blocks (via the clock) until a slot is free.
    pub fn acquire(&self) {
        loop {
            match self.try_acquire() {
                Ok(()) => return,
                Err(wait) => self.clock.sleep(wait.max(Duration::from_millis(1))),
            }
        }
    }
}
