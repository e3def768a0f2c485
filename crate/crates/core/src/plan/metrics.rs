use serde::Serialize;

use super::verify::{VerificationReport, COMMONSENSE_CHECKS};
use crate::num::to_f64;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no reports to aggregate")]
    Empty,
}

/// Pass rates over a set of queries. Micro rates count checks, macro rates
/// count plans whose checks all pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub plans: usize,
    pub delivered: usize,
    pub commonsense_passed: usize,
    pub commonsense_total: usize,
    pub hard_passed: usize,
    pub hard_total: usize,
    pub commonsense_macro_passed: usize,
    pub hard_macro_passed: usize,
    pub final_passed: usize,
}

fn ratio(a: usize, b: usize) -> Rational {
    if b == 0 {
        Rational::from_integer(1)
    } else {
        Rational::new(a as i64, b as i64)
    }
}

impl Metrics {
    pub fn delivery_rate(&self) -> Rational {
        ratio(self.delivered, self.plans)
    }

    pub fn commonsense_micro(&self) -> Rational {
        ratio(self.commonsense_passed, self.commonsense_total)
    }

    pub fn commonsense_macro(&self) -> Rational {
        ratio(self.commonsense_macro_passed, self.plans)
    }

    pub fn hard_micro(&self) -> Rational {
        ratio(self.hard_passed, self.hard_total)
    }

    pub fn hard_macro(&self) -> Rational {
        ratio(self.hard_macro_passed, self.plans)
    }

    pub fn final_pass_rate(&self) -> Rational {
        ratio(self.final_passed, self.plans)
    }

    pub fn rates(&self) -> [(&'static str, Rational); 6] {
        [
            ("delivery rate", self.delivery_rate()),
            ("commonsense micro", self.commonsense_micro()),
            ("commonsense macro", self.commonsense_macro()),
            ("hard micro", self.hard_micro()),
            ("hard macro", self.hard_macro()),
            ("final pass rate", self.final_pass_rate()),
        ]
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<20} {:>8}\n", "metric", "percent");
        for (name, r) in self.rates() {
            out.push_str(&format!("{name:<20} {:>7.1}%\n", to_f64(&r) * 100.0));
        }
        out
    }
}

/// Aggregates verification reports. An undelivered entry fails every one of
/// its checks whatever its report says.
pub fn aggregate(reports: &[(VerificationReport, bool)]) -> Result<Metrics, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut m = Metrics {
        plans: reports.len(),
        delivered: 0,
        commonsense_passed: 0,
        commonsense_total: 0,
        hard_passed: 0,
        hard_total: 0,
        commonsense_macro_passed: 0,
        hard_macro_passed: 0,
        final_passed: 0,
    };
    for (r, delivered) in reports {
        m.commonsense_total += r.commonsense.len().max(COMMONSENSE_CHECKS.len());
        m.hard_total += r.hard.len();
        if !delivered {
            continue;
        }
        m.delivered += 1;
        m.commonsense_passed += r.commonsense_passed();
        m.hard_passed += r.hard_passed();
        let (cs, hard) = (r.commonsense_ok(), r.hard_ok());
        m.commonsense_macro_passed += cs as usize;
        m.hard_macro_passed += hard as usize;
        m.final_passed += (cs && hard) as usize;
    }
    Ok(m)
}
