//! Orbits of `a ↦ a + sin a`.
//!
//! Write `a₀ = 2nπ + b₀` with `n = ⌊(a₀ + π)/2π⌋` and `−π < b₀ ≤ π`. The map
//! commutes with shifts by 2π and with negation, so the orbit of `a₀` is the
//! orbit of `b₀` shifted by `2nπ`. For `0 < b₀ < π` the orbit increases to
//! π; for `−π < b₀ < 0` it decreases to −π. The limit is therefore
//! `(2n + 1)π` or `(2n − 1)π`, except for `b₀ = 0` where the orbit is
//! constant. Iteration runs on `b_k` so every sine argument stays in
//! `(−π, π]`.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::mpfix::{FixedReal, Precision};
use crate::series::{pi_oracle, sin_full};

pub const DEFAULT_TOL_BITS: u64 = 64;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub k: usize,
    pub a_k: FixedReal,
    /// `sin a_k`, so that `a_{k+1} = a_k + step`.
    pub step: FixedReal,
    /// `|sin a_k|`.
    pub residual: FixedReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LimitClass {
    /// Shift count: `a₀ = 2nπ + b₀`.
    pub n: i64,
    /// Limit as a multiple of π: `2n ± 1`, or `2n` for a degenerate start.
    pub odd_multiple: i64,
    /// `a₀ ≡ 0 (mod 2π)` to working precision: the orbit never moves.
    pub degenerate: bool,
}

#[derive(Clone, Debug)]
pub struct Orbit {
    pub records: Vec<OrbitRecord>,
    pub class: LimitClass,
    /// `b₀` is so small (below `2^-(bits/2)`) that it cannot be told apart
    /// from a degenerate start with any confidence.
    pub near_degenerate: bool,
}

impl Orbit {
    pub fn last(&self) -> &OrbitRecord {
        self.records
            .last()
            .expect("orbits hold at least one record")
    }

    /// `k,a_k,sin_a_k,log2_residual` with 30 decimals per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,a_k,sin_a_k,log2_residual\n");
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{:.3}",
                r.k,
                r.a_k.to_decimal(30),
                r.step.to_decimal(30),
                r.residual.log2_abs()
            )
            .unwrap();
        }
        out
    }
}

fn pi_for(a: &FixedReal, p: Precision) -> FixedReal {
    // 2nπ multiplies the error of π by about |a|.
    let int_bits = a.floor().bits() + 4;
    pi_oracle(p.widened(int_bits + 8))
}

/// `a = 2nπ + b` with `−π < b ≤ π`; `b` carries `p.working()` bits.
pub fn reduce_mod_2pi(a: &FixedReal, p: Precision) -> Result<(FixedReal, i64)> {
    let pi = pi_for(a, p);
    let two_pi = pi.mul_int(2);
    let estimate = (a + &pi).div(&two_pi, Precision::with_guard(8, 0))?.floor();
    let mut n = estimate
        .to_i64()
        .ok_or_else(|| Error::ArgumentOutOfRange("|a| too large to reduce".into()))?;
    let mut b = a - &two_pi.mul_int(n);
    let neg_pi = -&pi;
    while b <= neg_pi {
        n -= 1;
        b = &b + &two_pi;
    }
    while b > pi {
        n += 1;
        b = &b - &two_pi;
    }
    Ok((b.rescale(p.working()), n))
}

/// Limit predicted from `a₀` alone.
pub fn classify(a0: &FixedReal, p: Precision) -> Result<LimitClass> {
    let (b0, n) = reduce_mod_2pi(a0, p)?;
    Ok(class_of(&b0, n, p))
}

fn class_of(b0: &FixedReal, n: i64, p: Precision) -> LimitClass {
    let degenerate = b0.abs() < FixedReal::pow2_neg(p.bits().saturating_sub(2));
    let odd_multiple = if degenerate {
        2 * n
    } else if b0.is_positive() {
        2 * n + 1
    } else {
        2 * n - 1
    };
    LimitClass {
        n,
        odd_multiple,
        degenerate,
    }
}

/// Iterates from `a0` until `|sin a_k| < 2^-tol_bits` or `max_iter` records.
///
/// The limit is classified from `a0` first and then checked against the
/// orbit tail: `|a_final − odd_multiple·π| < 2^-(tol_bits − 1)`. A
/// disagreement is an error, never a silent re-classification. `p.bits()`
/// should exceed `tol_bits` by a few bits for the tolerance to be reachable.
pub fn iterate_orbit(
    a0: &FixedReal,
    p: Precision,
    max_iter: usize,
    tol_bits: u64,
) -> Result<Orbit> {
    if max_iter == 0 {
        return Err(Error::ArgumentOutOfRange(
            "max_iter must be at least 1".into(),
        ));
    }
    let (b0, n) = reduce_mod_2pi(a0, p)?;
    let class = class_of(&b0, n, p);
    let pi = pi_for(a0, p);
    let shift = pi.mul_int(2 * n);
    let tol = FixedReal::pow2_neg(tol_bits);
    let near_degenerate = b0.abs() < FixedReal::pow2_neg(p.bits() / 2);

    let mut records = Vec::new();
    let mut b = b0;
    let mut converged = false;
    for k in 0..max_iter {
        let step = sin_full(&b, p)?;
        let residual = step.abs();
        let done = residual < tol;
        records.push(OrbitRecord {
            k,
            a_k: &b + &shift,
            step: step.clone(),
            residual,
        });
        if done || class.degenerate {
            converged = done;
            break;
        }
        b = &b + &step;
    }

    let orbit = Orbit {
        records,
        class,
        near_degenerate,
    };
    if class.degenerate {
        return Ok(orbit);
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: orbit.records.len(),
            log2_residual: orbit.last().residual.log2_abs(),
        });
    }
    let miss = (&orbit.last().a_k - &pi.mul_int(class.odd_multiple)).abs();
    if miss >= FixedReal::pow2_neg(tol_bits.saturating_sub(1)) {
        return Err(Error::ClassificationMismatch {
            odd_multiple: class.odd_multiple,
        });
    }
    Ok(orbit)
}

/// Parses a starting point: a decimal numeral, optionally followed by `pi`
/// (`"7"`, `"-1.5"`, `"2pi"`, `"-pi"`).
pub fn parse_start(s: &str, p: Precision) -> Result<FixedReal> {
    let s = s.trim();
    match s.strip_suffix("pi") {
        Some(coeff) => {
            let coeff = match coeff {
                "" | "+" => FixedReal::from_int(1),
                "-" => FixedReal::from_int(-1),
                c => FixedReal::from_decimal(c, p.widened(8))?,
            };
            let pi = pi_oracle(p.widened(coeff.floor().bits() + 8));
            Ok(coeff.mul(&pi, p))
        }
        None => FixedReal::from_decimal(s, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::new(128)
    }

    #[test]
    fn reduce_examples() {
        let (b, n) = reduce_mod_2pi(&FixedReal::from_int(7), p()).unwrap();
        assert_eq!(n, 1);
        assert_eq!(b.to_decimal(8), "0.71681469");
        let (b, n) = reduce_mod_2pi(&FixedReal::zero(), p()).unwrap();
        assert!(b.is_zero());
        assert_eq!(n, 0);
        let pi = pi_oracle(p());
        let (b, n) = reduce_mod_2pi(&pi, p()).unwrap();
        assert_eq!(n, 0);
        assert_eq!(b, pi);
        // The stored π sits just below π, so its negation is inside (−π, π].
        let (b, n) = reduce_mod_2pi(&-&pi, p()).unwrap();
        assert_eq!(n, 0);
        assert_eq!(b, -pi);
    }

    #[test]
    fn unit_start_goes_to_pi() {
        let orbit = iterate_orbit(&FixedReal::from_int(1), p(), 200, 64).unwrap();
        assert_eq!(orbit.class.odd_multiple, 1);
        assert!(!orbit.class.degenerate);
        // b_k strictly increases toward π
        for w in orbit.records.windows(2) {
            assert!(w[1].a_k > w[0].a_k);
        }
        assert_eq!(orbit.last().a_k.to_decimal(15), "3.141592653589793");
    }

    #[test]
    fn shifted_and_negative_starts() {
        let o = iterate_orbit(&FixedReal::from_int(7), p(), 200, 64).unwrap();
        assert_eq!(o.class.n, 1);
        assert_eq!(o.class.odd_multiple, 3);
        assert_eq!(o.last().a_k.to_decimal(8), "9.42477796");
        let o = iterate_orbit(&FixedReal::from_int(-1), p(), 200, 64).unwrap();
        assert_eq!(o.class.n, 0);
        assert_eq!(o.class.odd_multiple, -1);
    }

    #[test]
    fn two_pi_is_degenerate() {
        let two_pi = parse_start("2pi", p()).unwrap();
        let o = iterate_orbit(&two_pi, p(), 200, 64).unwrap();
        assert!(o.class.degenerate);
        assert_eq!(o.class.odd_multiple, 2);
        assert_eq!(o.records.len(), 1);
    }

    #[test]
    fn step_identity() {
        let o = iterate_orbit(&FixedReal::from_int(2), p(), 200, 64).unwrap();
        for w in o.records.windows(2) {
            assert_eq!(&w[1].a_k - &w[0].a_k, w[0].step);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let r = iterate_orbit(&FixedReal::new(1, 40), p(), 5, 64);
        assert!(matches!(
            r,
            Err(Error::NonConvergence { iterations: 5, .. })
        ));
        assert!(iterate_orbit(&FixedReal::from_int(1), p(), 0, 64).is_err());
    }

    #[test]
    fn parse_start_forms() {
        assert_eq!(parse_start("7", p()).unwrap(), FixedReal::from_int(7));
        let minus_pi = parse_start("-pi", p()).unwrap();
        assert_eq!(minus_pi.to_decimal(10), "-3.1415926535");
        let x = parse_start("1.5pi", p()).unwrap();
        assert_eq!(x.to_decimal(10), "4.7123889803");
        assert!(parse_start("two", p()).is_err());
    }

    #[test]
    fn csv_shape() {
        let o = iterate_orbit(&FixedReal::from_int(3), p(), 200, 64).unwrap();
        let csv = o.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,a_k,sin_a_k,log2_residual"));
        let first: Vec<_> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[1], "3.000000000000000000000000000000");
        assert_eq!(first[2], "0.141120008059867222100744802808");
    }
}
