use serde::Serialize;

use crate::config::RunConfig;

/// One verified identity. `measured` is compared against `threshold` with
/// `<=` unless the check is a boolean one, in which case both are 0 or 1.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub identity: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn residual(suite: &'static str, name: &str, identity: &str, measured: f64, threshold: f64) -> Self {
        Check {
            suite,
            name: name.to_string(),
            identity: identity.to_string(),
            measured,
            threshold,
            pass: measured <= threshold,
            informational: false,
            detail: None,
        }
    }

    pub fn holds(suite: &'static str, name: &str, identity: &str, ok: bool) -> Self {
        Check {
            suite,
            name: name.to_string(),
            identity: identity.to_string(),
            measured: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            pass: ok,
            informational: false,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(suite: &str, config: RunConfig, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass || c.informational);
        VerifyReport {
            suite: suite.to_string(),
            config,
            checks,
            pass,
        }
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass && !c.informational)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("# verify {}\n\n", self.suite);
        s.push_str(&format!(
            "n = {}, signature = ({}, {}), seed = {}, trials = {}, tol = {:e}\n\n",
            self.config.n, self.config.signature.0, self.config.signature.1, self.config.seed, self.config.trials, self.config.tol
        ));
        s.push_str("| suite | check | identity | measured | threshold | status |\n|---|---|---|---|---|---|\n");
        for c in &self.checks {
            let status = match (c.pass, c.informational) {
                (true, _) => "pass",
                (false, true) => "info",
                (false, false) => "FAIL",
            };
            s.push_str(&format!(
                "| {} | {} | {} | {:.3e} | {:.1e} | {} |\n",
                c.suite,
                c.name,
                c.identity.replace('|', "\\|"),
                c.measured,
                c.threshold,
                status
            ));
        }
        let notes: Vec<&Check> = self.checks.iter().filter(|c| c.detail.is_some()).collect();
        if !notes.is_empty() {
            s.push_str("\n## Details\n\n");
            for c in notes {
                s.push_str(&format!("- {}: {}\n", c.name, c.detail.as_deref().unwrap_or_default()));
            }
        }
        s.push_str(&format!("\nresult: {}\n", if self.pass { "pass" } else { "FAIL" }));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Format;

    fn config() -> RunConfig {
        RunConfig {
            n: 1,
            signature: (1, 0),
            seed: 0,
            tol: 1e-9,
            hbar: 1.0,
            trials: 1,
            output_path: None,
            format: Format::Json,
        }
    }

    #[test]
    fn informational_failures_do_not_fail_the_report() {
        let checks = vec![
            Check::residual("s", "a", "x = x", 0.0, 1e-9),
            Check::holds("s", "b", "y", false).informational(),
        ];
        let r = VerifyReport::new("s", config(), checks);
        assert!(r.pass);
        assert!(r.first_failure().is_none());
        assert!(r.to_markdown().contains("| info |"));
    }

    #[test]
    fn first_failure_is_named() {
        let checks = vec![
            Check::residual("s", "a", "x", 1.0, 1e-9),
            Check::residual("s", "b", "y", 2.0, 1e-9),
        ];
        let r = VerifyReport::new("s", config(), checks);
        assert!(!r.pass);
        assert_eq!(r.first_failure().unwrap().name, "a");
    }
}
