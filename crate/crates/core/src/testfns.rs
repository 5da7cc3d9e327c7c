//! Test functions on the cylinder.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Analytic,
    /// continuous with a gradient singularity
    Lipschitz,
    /// twice differentiable, third derivatives singular
    C2,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    /// Franke-type sum of exponentials.
    F1,
    /// Distance to `(0.4, 0.4, 0.4)`.
    F2,
    F3,
    /// Runge function.
    F4,
    F5,
    F6,
    /// The constant 1, for sanity runs.
    Const1,
}

impl TestFunction {
    pub const STANDARD_SET: [TestFunction; 6] = [
        TestFunction::F1,
        TestFunction::F2,
        TestFunction::F3,
        TestFunction::F4,
        TestFunction::F5,
        TestFunction::F6,
    ];

    pub fn eval(self, p: Point3) -> f64 {
        let Point3 { x, y, z } = p;
        match self {
            TestFunction::F1 => {
                let (a, b, c) = (9.0 * x, 9.0 * y, 9.0 * z);
                // The second term is linear in (9y+1) and (9z+1) on purpose.
                0.75 * (-((a - 2.0).powi(2) + (b - 2.0).powi(2) + (c - 2.0).powi(2)) / 4.0).exp()
                    + 0.75 * (-(a + 1.0).powi(2) / 49.0 - (b + 1.0) / 10.0 - (c + 1.0) / 10.0).exp()
                    + 0.5
                        * (-((a - 7.0).powi(2) + (b - 3.0).powi(2) + (c - 5.0).powi(2)) / 4.0).exp()
                    - 0.2 * (-(a - 4.0).powi(2) - (b - 7.0).powi(2) - (c - 5.0).powi(2)).exp()
            }
            TestFunction::F2 => ((x - 0.4).powi(2) + (y - 0.4).powi(2) + (z - 0.4).powi(2)).sqrt(),
            TestFunction::F3 => (4.0 * (x + y + z)).cos(),
            TestFunction::F4 => 1.0 / (1.0 + 16.0 * (x * x + y * y + z * z)),
            TestFunction::F5 => (x * x + y * y + z * z).powi(3).sqrt(),
            TestFunction::F6 => (x * x + y * y + z * z).cos(),
            TestFunction::Const1 => 1.0,
        }
    }

    /// Tolerance used when computing the reference integral.
    pub fn oracle_tol(self) -> f64 {
        match self {
            TestFunction::F3 | TestFunction::F6 | TestFunction::Const1 => 1e-12,
            _ => 1e-10,
        }
    }

    pub fn smoothness(self) -> Smoothness {
        match self {
            TestFunction::F1 | TestFunction::F3 | TestFunction::F4 | TestFunction::F6 => {
                Smoothness::Analytic
            }
            TestFunction::F2 => Smoothness::Lipschitz,
            TestFunction::F5 => Smoothness::C2,
            TestFunction::Const1 => Smoothness::Constant,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::F1 => "f1",
            TestFunction::F2 => "f2",
            TestFunction::F3 => "f3",
            TestFunction::F4 => "f4",
            TestFunction::F5 => "f5",
            TestFunction::F6 => "f6",
            TestFunction::Const1 => "const1",
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        TestFunction::STANDARD_SET
            .into_iter()
            .chain([TestFunction::Const1])
            .find(|f| f.name() == lower)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown test function '{s}'")))
    }
}

/// Evaluates test function `id` at `p`.
pub fn eval_test(id: TestFunction, p: Point3) -> f64 {
    id.eval(p)
}
