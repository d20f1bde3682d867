//! Reproduces the worked example of the ladder started at α₀ = 3 and checks
//! the ladder against the Machin oracle.

use crate::corrector::{compute_digits, decimal_ladder, TableRow, TruncationPolicy};
use crate::mpfix::Precision;
use crate::series::pi_oracle;

/// `sin α_k` for k = 0, 1, 2, printed to 33 decimals.
pub const SIN_TABLE: [&str; 3] = [
    "0.141120008059867222100744802808110",
    "0.000592653555099468066916718249636",
    "0.000000000089793238462643383279382",
];

/// `(π − α_k)³/6`, as printed to three significant figures.
pub const EPS_TABLE: [f64; 3] = [4.73e-4, 3.47e-11, 1.21e-31];

/// Decimals kept at the next step.
pub const DECIMALS_TABLE: [usize; 3] = [3, 10, 30];

/// α₁, α₂, α₃.
pub const ALPHA_TABLE: [&str; 3] = ["3.141", "3.1415926535", "3.141592653589793238462643383279"];

pub const PI_33: &str = "3.14159265358979323846264338327950";

const ORACLE_DIGITS: usize = 1000;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {}", self.name, self.detail)
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn table_rows() -> Result<Vec<TableRow>, String> {
    decimal_ladder(4, Precision::new(256)).map_err(|e| e.to_string())
}

/// Runs every check; never panics on a mismatch.
pub fn run() -> Vec<Check> {
    let mut checks = Vec::new();
    let rows = match table_rows() {
        Ok(rows) => rows,
        Err(e) => {
            checks.push(Check::new("table", false, e));
            return checks;
        }
    };

    for (k, want) in SIN_TABLE.iter().enumerate() {
        let got = rows[k].sin_alpha.to_decimal(33);
        checks.push(Check::new(format!("sin(alpha_{k})"), got == *want, got));
    }
    for (k, want) in EPS_TABLE.iter().enumerate() {
        let got = rows[k].eps.to_f64();
        let rel = (got / want - 1.0).abs();
        checks.push(Check::new(
            format!("eps_{k}"),
            rel <= 0.01,
            format!("{got:.4e} vs {want:.2e}"),
        ));
    }
    for (k, want) in DECIMALS_TABLE.iter().enumerate() {
        let got = rows[k].next_decimals;
        checks.push(Check::new(format!("n_{k}"), got == *want, got.to_string()));
    }
    for (k, want) in ALPHA_TABLE.iter().enumerate() {
        let row = &rows[k + 1];
        let got = row.alpha.to_decimal(row.alpha_decimals);
        checks.push(Check::new(format!("alpha_{}", k + 1), got == *want, got));
    }

    let oracle = pi_oracle(Precision::new(3400));
    let oracle_33 = oracle.to_decimal(32);
    checks.push(Check::new(
        "oracle pi to 32 decimals",
        oracle_33 == PI_33,
        oracle_33,
    ));

    let (digits, _) = compute_digits(ORACLE_DIGITS, TruncationPolicy::default());
    let want = oracle.to_decimal(ORACLE_DIGITS);
    let detail = match digits.bytes().zip(want.bytes()).position(|(a, b)| a != b) {
        None if digits.len() == want.len() => format!("{ORACLE_DIGITS} decimals agree"),
        None => "length differs".into(),
        Some(i) => format!("first difference at char {i}"),
    };
    checks.push(Check::new("ladder vs Machin", digits == want, detail));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        let checks = run();
        for c in &checks {
            assert!(c.passed, "{}", c.line());
        }
        assert_eq!(checks.len(), 14);
    }
}
