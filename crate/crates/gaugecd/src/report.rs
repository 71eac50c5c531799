//! Structured outcomes of numerical checks, with deterministic JSON and CSV
//! serialization.
//!
//! A [`VerificationReport`] collects per-check records (each check is an
//! inequality `lhs >= rhs - tolerance`, recorded with its inputs and the
//! deficit `lhs - rhs`), fitted exponents with error bands, Monte Carlo
//! confidence radii, and bookkeeping about excluded or inconclusive cases.
//! The pass flag is `true` iff every deficit is `>= -tolerance`, every fit
//! lies inside its stated band, and the report was not marked failed
//! explicitly.
//!
//! Serialization is hand-rolled (no external serde dependency) so that the
//! output format is under full control: floating-point numbers are emitted
//! with 17 significant digits, and the extended-real sentinels `+inf`/`-inf`
//! are emitted as the strings `"inf"`/`"-inf"`.

/// One record of an inequality check `lhs >= rhs` (deficit = lhs - rhs).
#[derive(Debug, Clone)]
pub struct CheckRecord {
    /// Human-readable label for the check.
    pub label: String,
    /// Named numeric inputs/outputs of the check (also the CSV columns).
    pub inputs: Vec<(String, f64)>,
    /// Left-hand side of the inequality under test.
    pub lhs: f64,
    /// Right-hand side of the inequality under test.
    pub rhs: f64,
    /// `lhs - rhs`; the check passes when this is `>= -tolerance`.
    pub deficit: f64,
}

/// A fitted exponent (least-squares slope) with its acceptance band.
#[derive(Debug, Clone)]
pub struct FittedExponent {
    /// Name of the fitted quantity.
    pub name: String,
    /// Fitted value.
    pub value: f64,
    /// Standard error of the fit.
    pub std_error: f64,
    /// Expected value.
    pub expected: f64,
    /// Half-width of the acceptance band around `expected`.
    pub band: f64,
}

impl FittedExponent {
    /// Whether the fitted value lies inside the acceptance band.
    pub fn within_band(&self) -> bool {
        (self.value - self.expected).abs() <= self.band
    }
}

/// A Monte Carlo confidence radius (3-sigma band of an estimator).
#[derive(Debug, Clone)]
pub struct ConfidenceRadius {
    /// Name of the estimated quantity.
    pub name: String,
    /// Standard error (sigma) of the estimator.
    pub sigma: f64,
    /// Confidence radius actually used by the check (usually `3 * sigma`).
    pub radius: f64,
}

/// Structured outcome of a verification suite.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Suite name.
    pub suite: String,
    /// Tolerance applied to all deficits in this report.
    pub tolerance: f64,
    /// Per-check records.
    pub checks: Vec<CheckRecord>,
    /// Minimum deficit over all checks (`+inf` when there are none).
    pub min_deficit: f64,
    /// Number of checks with deficit `< -tolerance`.
    pub violations: usize,
    /// Fitted exponents with acceptance bands.
    pub fits: Vec<FittedExponent>,
    /// Monte Carlo confidence radii.
    pub mc_radii: Vec<ConfidenceRadius>,
    /// Free-form notes (exclusion bands, open discrepancies, etc.).
    pub notes: Vec<String>,
    /// Number of sample points excluded because the solver failed on them.
    pub excluded: usize,
    /// Marked when the data cannot decide the check (degenerate input);
    /// an inconclusive report still passes.
    pub inconclusive: bool,
    /// Set by [`VerificationReport::fail`] for failures that are not
    /// expressible as a deficit (e.g. a violated strict monotonicity).
    explicit_failure: bool,
    /// Overall pass flag, computed by [`VerificationReport::finalize`].
    pub pass: bool,
}

impl VerificationReport {
    /// New empty report for `suite` with deficit tolerance `tolerance`.
    pub fn new(suite: impl Into<String>, tolerance: f64) -> Self {
        VerificationReport {
            suite: suite.into(),
            tolerance,
            checks: Vec::new(),
            min_deficit: f64::INFINITY,
            violations: 0,
            fits: Vec::new(),
            mc_radii: Vec::new(),
            notes: Vec::new(),
            excluded: 0,
            inconclusive: false,
            explicit_failure: false,
            pass: false,
        }
    }

    /// Record the inequality check `lhs >= rhs`.
    pub fn push_check(
        &mut self,
        label: impl Into<String>,
        inputs: Vec<(String, f64)>,
        lhs: f64,
        rhs: f64,
    ) {
        self.checks.push(CheckRecord {
            label: label.into(),
            inputs,
            lhs,
            rhs,
            deficit: lhs - rhs,
        });
    }

    /// Record a failure that is not a numeric deficit.
    pub fn fail(&mut self, note: impl Into<String>) {
        self.explicit_failure = true;
        self.notes.push(note.into());
    }

    /// Compute the summary fields and the pass flag.
    pub fn finalize(&mut self) {
        self.min_deficit = self
            .checks
            .iter()
            .map(|c| c.deficit)
            .fold(f64::INFINITY, f64::min);
        self.violations = self
            .checks
            .iter()
            .filter(|c| c.deficit < -self.tolerance)
            .count();
        let fits_ok = self.fits.iter().all(FittedExponent::within_band);
        self.pass = self.violations == 0 && fits_ok && !self.explicit_failure;
    }

    /// JSON serialization (17 significant digits, `"inf"`/`"-inf"`
    /// sentinels for non-finite values).
    pub fn to_json(&self) -> String {
        let mut out = String::with_capacity(4096);
        out.push_str("{\n");
        out.push_str(&format!("  \"suite\": {},\n", json_str(&self.suite)));
        out.push_str(&format!("  \"tolerance\": {},\n", json_num(self.tolerance)));
        out.push_str(&format!("  \"pass\": {},\n", self.pass));
        out.push_str(&format!("  \"min_deficit\": {},\n", json_num(self.min_deficit)));
        out.push_str(&format!("  \"violations\": {},\n", self.violations));
        out.push_str(&format!("  \"excluded\": {},\n", self.excluded));
        out.push_str(&format!("  \"inconclusive\": {},\n", self.inconclusive));
        out.push_str("  \"fits\": [");
        for (i, f) in self.fits.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "\n    {{\"name\": {}, \"value\": {}, \"std_error\": {}, \"expected\": {}, \"band\": {}}}",
                json_str(&f.name),
                json_num(f.value),
                json_num(f.std_error),
                json_num(f.expected),
                json_num(f.band)
            ));
        }
        out.push_str(if self.fits.is_empty() { "],\n" } else { "\n  ],\n" });
        out.push_str("  \"mc_radii\": [");
        for (i, r) in self.mc_radii.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "\n    {{\"name\": {}, \"sigma\": {}, \"radius\": {}}}",
                json_str(&r.name),
                json_num(r.sigma),
                json_num(r.radius)
            ));
        }
        out.push_str(if self.mc_radii.is_empty() { "],\n" } else { "\n  ],\n" });
        out.push_str("  \"notes\": [");
        for (i, n) in self.notes.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&json_str(n));
        }
        out.push_str("],\n");
        out.push_str("  \"checks\": [");
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("\n    {");
            out.push_str(&format!("\"label\": {}, ", json_str(&c.label)));
            for (name, value) in &c.inputs {
                out.push_str(&format!("{}: {}, ", json_str(name), json_num(*value)));
            }
            out.push_str(&format!(
                "\"lhs\": {}, \"rhs\": {}, \"deficit\": {}}}",
                json_num(c.lhs),
                json_num(c.rhs),
                json_num(c.deficit)
            ));
        }
        out.push_str(if self.checks.is_empty() { "]\n" } else { "\n  ]\n" });
        out.push_str("}\n");
        out
    }

    /// CSV serialization of the per-check records. `columns` names the
    /// fields to emit, looked up among each record's named inputs (with
    /// `lhs`, `rhs` and `deficit` always available under those names).
    /// Missing fields are emitted as empty cells.
    pub fn to_csv(&self, columns: &[&str]) -> String {
        self.csv_rows(None, columns)
    }

    /// Like [`to_csv`](Self::to_csv), restricted to checks with the given
    /// label (useful when a suite mixes record shapes).
    pub fn to_csv_filtered(&self, label: &str, columns: &[&str]) -> String {
        self.csv_rows(Some(label), columns)
    }

    fn csv_rows(&self, label: Option<&str>, columns: &[&str]) -> String {
        let mut out = String::with_capacity(4096);
        out.push_str(&columns.join(","));
        out.push('\n');
        for c in self
            .checks
            .iter()
            .filter(|c| label.is_none_or(|l| c.label == l))
        {
            let mut row = Vec::with_capacity(columns.len());
            for &col in columns {
                let v = match col {
                    "lhs" => Some(c.lhs),
                    "rhs" => Some(c.rhs),
                    "deficit" => Some(c.deficit),
                    _ => c
                        .inputs
                        .iter()
                        .find(|(name, _)| name == col)
                        .map(|(_, v)| *v),
                };
                row.push(v.map(csv_num).unwrap_or_default());
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Format a float for JSON with 17 significant digits; non-finite values
/// become the string sentinels `"inf"`, `"-inf"`, `"nan"`.
pub fn json_num(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".into()
    } else if x == f64::INFINITY {
        "\"inf\"".into()
    } else if x == f64::NEG_INFINITY {
        "\"-inf\"".into()
    } else {
        format!("{:.16e}", x)
    }
}

/// Format a float for CSV cells (same digit convention, unquoted sentinels).
pub fn csv_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{:.16e}", x)
    }
}

/// Escape a string as a JSON string literal.
fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Least-squares line fit `y = a + b x`; returns `(slope, std_error)`.
///
/// The standard error is the usual OLS estimate from the residual variance;
/// it is reported alongside fitted exponents in verification reports.
pub fn linear_fit_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (xs.len().max(3) - 2) as f64;
    let se = (ss_res / dof / sxx).sqrt();
    (slope, se)
}
