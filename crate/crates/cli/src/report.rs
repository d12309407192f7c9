use serde::Serialize;

use dynalg::lab::ConvergencePoint;

use crate::config::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Record {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Record {
            name: name.to_string(),
            residual,
            tolerance,
            // NaN never passes
            pass: residual <= tolerance,
        }
    }
}

/// A convergence study: `(dt, residual)` pairs and the fitted order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slope {
    pub name: String,
    pub points: Vec<ConvergencePoint>,
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub records: Vec<Record>,
    pub slopes: Vec<Slope>,
    pub overall: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn new(scenario: Scenario, mut records: Vec<Record>, mut slopes: Vec<Slope>) -> Self {
        records.sort_by(|a, b| a.name.cmp(&b.name));
        slopes.sort_by(|a, b| a.name.cmp(&b.name));
        let overall = records.iter().all(|r| r.pass);
        Report {
            scenario,
            records,
            slopes,
            overall,
            timings: None,
        }
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "{:<4} {:<40} {:.3e} (tol {:.1e})\n",
                if r.pass { "ok" } else { "FAIL" },
                r.name,
                r.residual,
                r.tolerance
            ));
        }
        for s in &self.slopes {
            out.push_str(&format!("     {:<40} order {:.3}\n", s.name, s.order));
        }
        out.push_str(if self.overall { "overall: pass\n" } else { "overall: FAIL\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{HChoice, SignChoice, Suite};

    fn scenario() -> Scenario {
        Scenario {
            suite: Suite::Weyl,
            seed: 1,
            dt: 1e-3,
            n: None,
            tol: None,
            h_convention: HChoice::Consistent,
            sign_convention: SignChoice::S4,
        }
    }

    #[test]
    fn records_sorted_and_overall() {
        let r = Report::new(
            scenario(),
            vec![Record::new("b", 1.0, 2.0), Record::new("a", 3.0, 2.0)],
            vec![],
        );
        assert_eq!(r.records[0].name, "a");
        assert!(!r.overall);
        assert!(!Record::new("nan", f64::NAN, 1.0).pass);
    }

    #[test]
    fn timings_omitted_by_default() {
        let r = Report::new(scenario(), vec![Record::new("a", 0.0, 1.0)], vec![]);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("timings").is_none());
        assert_eq!(json["overall"], true);
    }
}
