//! Step-size and best-response-tolerance schedules.
//!
//! Only closed-form families are offered. For every admissible parameter
//! choice the step sizes are non-negative, vanish, and have a divergent sum,
//! and the tolerances are non-negative and vanish.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `gamma_t = (t + t0)^(-rho)` with `rho` in `(0, 1]` and `t0 >= 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSizeSchedule {
    /// `1 / (t + 1)`: the running average of play.
    #[default]
    Classical,
    Power {
        rho: f64,
        #[serde(default)]
        t0: f64,
    },
}

impl StepSizeSchedule {
    pub fn power(rho: f64, t0: f64) -> Result<Self> {
        let s = StepSizeSchedule::Power { rho, t0 };
        s.check().map_err(|(field, msg)| Error::invalid(format!("{field}: {msg}")))?;
        Ok(s)
    }

    /// On failure returns the offending parameter name and a message.
    pub fn check(&self) -> Result<(), (&'static str, String)> {
        if let StepSizeSchedule::Power { rho, t0 } = *self {
            if !(rho > 0.0 && rho <= 1.0) {
                return Err((
                    "rho",
                    format!("must lie in (0, 1] so that the step sizes sum to infinity, got {rho}"),
                ));
            }
            if !(t0 >= 0.0 && t0.is_finite()) {
                return Err(("t0", format!("must be finite and >= 0, got {t0}")));
            }
        }
        Ok(())
    }

    fn params(&self) -> (f64, f64) {
        match *self {
            StepSizeSchedule::Classical => (1.0, 1.0),
            StepSizeSchedule::Power { rho, t0 } => (rho, t0),
        }
    }

    /// Step size used to move from iteration `t` to `t + 1` (`t >= 1`).
    pub fn gamma_at(&self, t: u64) -> f64 {
        debug_assert!(t >= 1);
        let (rho, t0) = self.params();
        let base = t as f64 + t0;
        if rho == 1.0 {
            1.0 / base
        } else {
            base.powf(-rho)
        }
    }
}

/// Free-function form of [`StepSizeSchedule::gamma_at`].
pub fn gamma_at(s: &StepSizeSchedule, t: u64) -> f64 {
    s.gamma_at(t)
}

/// `epsilon_t = scale * (t + 1)^(-exponent)`, or identically zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsilonSchedule {
    #[default]
    Zero,
    Power { scale: f64, exponent: f64 },
}

impl EpsilonSchedule {
    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        let s = EpsilonSchedule::Power { scale, exponent };
        s.check().map_err(|(field, msg)| Error::invalid(format!("{field}: {msg}")))?;
        Ok(s)
    }

    pub fn check(&self) -> Result<(), (&'static str, String)> {
        if let EpsilonSchedule::Power { scale, exponent } = *self {
            if !(scale >= 0.0 && scale.is_finite()) {
                return Err(("scale", format!("must be finite and >= 0, got {scale}")));
            }
            if !(exponent > 0.0 && exponent.is_finite()) {
                return Err((
                    "exponent",
                    format!("must be > 0 so that the tolerance vanishes, got {exponent}"),
                ));
            }
        }
        Ok(())
    }

    pub fn epsilon_at(&self, t: u64) -> f64 {
        debug_assert!(t >= 1);
        match *self {
            EpsilonSchedule::Zero => 0.0,
            EpsilonSchedule::Power { scale, exponent } => {
                let base = t as f64 + 1.0;
                if exponent == 1.0 {
                    scale / base
                } else {
                    scale * base.powf(-exponent)
                }
            }
        }
    }
}

pub fn epsilon_at(s: &EpsilonSchedule, t: u64) -> f64 {
    s.epsilon_at(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_size_examples() {
        let c = StepSizeSchedule::Classical;
        assert_eq!(c.gamma_at(1), 0.5);
        assert_eq!(c.gamma_at(9), 0.1);
        assert_eq!(StepSizeSchedule::power(0.7, 0.0).unwrap().gamma_at(1), 1.0);
        assert_eq!(StepSizeSchedule::power(1.0, 1.0).unwrap(), StepSizeSchedule::Power {
            rho: 1.0,
            t0: 1.0
        });
        assert_eq!(
            StepSizeSchedule::power(1.0, 1.0).unwrap().gamma_at(7),
            c.gamma_at(7)
        );
    }

    #[test]
    fn step_size_rejects_non_summable() {
        assert!(StepSizeSchedule::power(1.5, 1.0).is_err());
        assert!(StepSizeSchedule::power(0.0, 1.0).is_err());
        assert!(StepSizeSchedule::power(0.5, -1.0).is_err());
        assert!(StepSizeSchedule::power(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(EpsilonSchedule::Zero.epsilon_at(17), 0.0);
        assert_eq!(EpsilonSchedule::power(1.0, 1.0).unwrap().epsilon_at(1), 0.5);
        assert_eq!(EpsilonSchedule::power(2.0, 0.5).unwrap().epsilon_at(3), 1.0);
        assert!(EpsilonSchedule::power(1.0, 0.0).is_err());
        assert!(EpsilonSchedule::power(-1.0, 1.0).is_err());
    }

    #[test]
    fn schedules_decrease_to_zero() {
        let s = StepSizeSchedule::power(0.6, 2.0).unwrap();
        let e = EpsilonSchedule::power(3.0, 0.3).unwrap();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for t in [1, 10, 100, 1_000, 1_000_000] {
            let cur = (s.gamma_at(t), e.epsilon_at(t));
            assert!(cur.0 > 0.0 && cur.0 <= 1.0 && cur.0 < prev.0);
            assert!(cur.1 >= 0.0 && cur.1 < prev.1);
            prev = cur;
        }
        assert!(prev.0 < 1e-3);
    }

    #[test]
    fn json_shape() {
        let s: StepSizeSchedule =
            serde_json::from_str(r#"{"family":"power","rho":0.7,"t0":1}"#).unwrap();
        assert_eq!(s, StepSizeSchedule::Power { rho: 0.7, t0: 1.0 });
        let s: StepSizeSchedule = serde_json::from_str(r#"{"family":"classical"}"#).unwrap();
        assert_eq!(s, StepSizeSchedule::Classical);
        let e: EpsilonSchedule =
            serde_json::from_str(r#"{"family":"power","scale":1,"exponent":1}"#).unwrap();
        assert_eq!(e, EpsilonSchedule::Power { scale: 1.0, exponent: 1.0 });
    }
}
