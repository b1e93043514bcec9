use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Cooperative wall-clock budget. Strategies call [`Deadline::check`] between
/// pipeline stages and between sampler sweeps; nothing is ever interrupted
/// mid-stage.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    expires_at: Option<Instant>,
}

impl Deadline {
    /// A deadline that never expires.
    pub fn never() -> Self {
        Deadline { expires_at: None }
    }

    /// Expires `seconds` from now. `seconds` must be positive and finite.
    pub fn after_secs(seconds: f64) -> Self {
        assert!(
            seconds.is_finite() && seconds > 0.0,
            "deadline seconds must be positive"
        );
        Deadline {
            expires_at: Some(Instant::now() + Duration::from_secs_f64(seconds)),
        }
    }

    pub fn expired(&self) -> bool {
        match self.expires_at {
            Some(t) => Instant::now() >= t,
            None => false,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.expired() {
            Err(Error::Timeout)
        } else {
            Ok(())
        }
    }
}
