//! Structured verification records.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default multiplier for "within k standard errors" rules.
pub const DEFAULT_SE_MULTIPLIER: f64 = 4.0;
/// Default acceptance level for Kolmogorov–Smirnov p-values.
pub const DEFAULT_KS_LEVEL: f64 = 0.01;

/// How a statistic is compared against its theoretical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToleranceRule {
    /// |statistic − theoretical| ≤ k · stderr
    WithinSe(f64),
    /// |statistic − theoretical| ≤ tol
    Abs(f64),
    /// |statistic − theoretical| ≤ tol · |theoretical|
    Rel(f64),
    /// statistic ≤ theoretical (one-sided bound)
    AtMost,
    /// statistic ≥ theoretical (e.g. a p-value against its level)
    AtLeast,
}

impl ToleranceRule {
    pub fn passes(&self, statistic: f64, theoretical: f64, stderr: Option<f64>) -> bool {
        if statistic.is_nan() || theoretical.is_nan() {
            return false;
        }
        match *self {
            ToleranceRule::WithinSe(k) => match stderr {
                Some(se) if se.is_finite() => (statistic - theoretical).abs() <= k * se,
                _ => false,
            },
            ToleranceRule::Abs(tol) => (statistic - theoretical).abs() <= tol,
            ToleranceRule::Rel(tol) => (statistic - theoretical).abs() <= tol * theoretical.abs(),
            ToleranceRule::AtMost => statistic <= theoretical,
            ToleranceRule::AtLeast => statistic >= theoretical,
        }
    }
}

impl fmt::Display for ToleranceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToleranceRule::WithinSe(k) => write!(f, "within {k} SE"),
            ToleranceRule::Abs(t) => write!(f, "abs <= {t:e}"),
            ToleranceRule::Rel(t) => write!(f, "rel <= {t:e}"),
            ToleranceRule::AtMost => write!(f, "statistic <= theoretical"),
            ToleranceRule::AtLeast => write!(f, "statistic >= theoretical"),
        }
    }
}

impl FromStr for ToleranceRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown tolerance rule '{s}'"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        if let Some(rest) = s.strip_prefix("within ") {
            return Ok(ToleranceRule::WithinSe(num(rest.strip_suffix(" SE").ok_or_else(bad)?)?));
        }
        if let Some(rest) = s.strip_prefix("abs <= ") {
            return Ok(ToleranceRule::Abs(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix("rel <= ") {
            return Ok(ToleranceRule::Rel(num(rest)?));
        }
        match s {
            "statistic <= theoretical" => Ok(ToleranceRule::AtMost),
            "statistic >= theoretical" => Ok(ToleranceRule::AtLeast),
            _ => Err(bad()),
        }
    }
}

impl Serialize for ToleranceRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ToleranceRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Non-finite floats are written as `null` and read back as NaN.
mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub check_id: String,
    #[serde(with = "lenient_f64")]
    pub statistic: f64,
    #[serde(with = "lenient_f64")]
    pub theoretical: f64,
    pub stderr: Option<f64>,
    pub tolerance_rule: ToleranceRule,
    pub pass: bool,
    pub runtime_ms: u64,
    pub seed: u64,
    pub stream_count: u64,
}

impl RunReport {
    pub fn new(
        check_id: impl Into<String>,
        statistic: f64,
        theoretical: f64,
        stderr: Option<f64>,
        tolerance_rule: ToleranceRule,
    ) -> Self {
        let stderr = stderr.filter(|s| s.is_finite());
        Self {
            check_id: check_id.into(),
            statistic,
            theoretical,
            stderr,
            tolerance_rule,
            pass: tolerance_rule.passes(statistic, theoretical, stderr),
            runtime_ms: 0,
            seed: 0,
            stream_count: 0,
        }
    }

    /// A check that could not run at all.
    pub fn failed(check_id: impl Into<String>, reason: &str) -> Self {
        log::error!("check failed to run: {reason}");
        let mut r = Self::new(check_id, f64::NAN, f64::NAN, None, ToleranceRule::AtMost);
        r.pass = false;
        r
    }

    pub fn with_run(mut self, seed: u64, stream_count: usize) -> Self {
        self.seed = seed;
        self.stream_count = stream_count as u64;
        self
    }

    pub fn with_runtime(mut self, started: Instant) -> Self {
        self.runtime_ms = started.elapsed().as_millis() as u64;
        self
    }

    /// Re-derives `pass` from the recorded numbers.
    pub fn recomputed_pass(&self) -> bool {
        self.tolerance_rule
            .passes(self.statistic, self.theoretical, self.stderr)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: statistic={:.6e} theoretical={:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_id,
            self.statistic,
            self.theoretical
        )?;
        if let Some(se) = self.stderr {
            write!(f, " se={se:.3e}")?;
        }
        write!(f, " ({})", self.tolerance_rule)
    }
}

pub fn reports_to_json(reports: &[RunReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

pub fn reports_from_json(text: &str) -> Result<Vec<RunReport>> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_round_trip_through_text() {
        for rule in [
            ToleranceRule::WithinSe(4.0),
            ToleranceRule::Abs(1e-6),
            ToleranceRule::Rel(1e-12),
            ToleranceRule::AtMost,
            ToleranceRule::AtLeast,
        ] {
            assert_eq!(rule.to_string().parse::<ToleranceRule>().unwrap(), rule);
        }
        assert!("nonsense".parse::<ToleranceRule>().is_err());
    }

    #[test]
    fn pass_is_derived() {
        let r = RunReport::new("x", 1.0, 1.1, Some(0.03), ToleranceRule::WithinSe(4.0));
        assert!(r.pass);
        let r = RunReport::new("x", 1.0, 1.2, Some(0.03), ToleranceRule::WithinSe(4.0));
        assert!(!r.pass);
        assert!(!RunReport::new("x", f64::NAN, 1.0, None, ToleranceRule::AtMost).pass);
        assert!(!RunReport::new("x", 1.0, 1.0, None, ToleranceRule::WithinSe(4.0)).pass);
    }

    #[test]
    fn json_round_trip_with_nan() {
        let reports = vec![
            RunReport::new("a", 0.5, 0.01, None, ToleranceRule::AtLeast).with_run(42, 8),
            RunReport::failed("b", "boom"),
        ];
        let text = reports_to_json(&reports).unwrap();
        assert!(text.contains("\"check_id\""));
        assert!(text.contains("\"tolerance_rule\": \"statistic >= theoretical\""));
        let back = reports_from_json(&text).unwrap();
        assert_eq!(back[0], reports[0]);
        assert!(back[1].statistic.is_nan());
        assert!(!back[1].pass);
    }
}
