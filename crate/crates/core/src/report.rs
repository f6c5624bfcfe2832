use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub check_id: String,
    pub anchor: String,
    pub norm_type: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Soft checks are reported but do not gate the overall verdict.
    #[serde(default)]
    pub soft: bool,
    #[serde(default)]
    pub runtime_s: f64,
    /// Observed convergence order, where meaningful.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_order: Option<f64>,
    /// Passes when the residual lies above the tolerance (negative controls).
    #[serde(default)]
    pub exceeds: bool,
}

impl Residual {
    pub fn new(check_id: &str, anchor: &str, norm_type: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            check_id: check_id.into(),
            anchor: anchor.into(),
            norm_type: norm_type.into(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            soft: false,
            runtime_s: 0.0,
            order: None,
            min_order: None,
            exceeds: false,
        }
    }

    fn evaluate(&mut self) {
        let value_ok = if self.exceeds {
            !self.residual.is_nan() && self.residual > self.tolerance
        } else {
            self.residual.is_finite() && self.residual <= self.tolerance
        };
        let order_ok = match (self.order, self.min_order) {
            (Some(o), Some(min)) => !o.is_nan() && o >= min,
            _ => true,
        };
        self.pass = value_ok && order_ok;
    }

    /// A check that passes when the residual is above a floor (negative controls).
    pub fn exceeding(check_id: &str, anchor: &str, norm_type: &str, residual: f64, floor: f64) -> Self {
        let mut r = Self::new(check_id, anchor, norm_type, residual, floor);
        r.exceeds = true;
        r.evaluate();
        r
    }

    pub fn soft(mut self) -> Self {
        self.soft = true;
        self
    }

    pub fn with_order(mut self, order: f64, min_order: f64) -> Self {
        self.order = Some(order);
        self.min_order = Some(min_order);
        self.evaluate();
        self
    }

    pub fn timed(mut self, since: Instant) -> Self {
        self.runtime_s = since.elapsed().as_secs_f64();
        self
    }

    pub fn rescaled(mut self, scale: f64) -> Self {
        self.tolerance *= scale;
        self.evaluate();
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.evaluate();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub records: Vec<Residual>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: Residual) {
        self.records.push(r);
    }

    pub fn merge(&mut self, other: ResidualReport) {
        self.records.extend(other.records);
    }

    pub fn get(&self, id: &str) -> Option<&Residual> {
        self.records.iter().find(|r| r.check_id == id)
    }

    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass || r.soft)
    }

    pub fn failures(&self) -> Vec<&Residual> {
        self.records.iter().filter(|r| !r.pass && !r.soft).collect()
    }

    /// CSV with the stable columns; the runtime column is deliberately left
    /// out so repeated runs compare byte for byte.
    pub fn to_csv(&self) -> String {
        let mut rows = self.records.clone();
        rows.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        let with_order = rows.iter().any(|r| r.order.is_some());
        let mut s = String::from("identity_id,paper_anchor,norm_type,residual,tolerance,pass");
        if with_order {
            s.push_str(",order");
        }
        s.push('\n');
        for r in rows {
            let _ = write!(
                s,
                "{},{},{},{:.6e},{:.3e},{}",
                r.check_id,
                csv_escape(&r.anchor),
                r.norm_type,
                r.residual,
                r.tolerance,
                if r.pass { "true" } else if r.soft { "soft" } else { "false" }
            );
            if with_order {
                match r.order {
                    Some(o) => {
                        let _ = write!(s, ",{o:.4}");
                    }
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn summary_json(&self) -> Result<String> {
        let failures: Vec<&str> = self.failures().iter().map(|r| r.check_id.as_str()).collect();
        let v = serde_json::json!({
            "checks": self.records.len(),
            "passed": self.records.iter().filter(|r| r.pass).count(),
            "soft": self.records.iter().filter(|r| r.soft && !r.pass).count(),
            "failures": failures,
            "pass": self.all_pass(),
        });
        Ok(serde_json::to_string_pretty(&v)?)
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
