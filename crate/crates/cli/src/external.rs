//! A backend that runs an external program: the instance goes to its
//! stdin as JSON, and it prints `NO`, `EXCEPTION` or an assignment.

use std::io::Write;
use std::process::{Command, Stdio};

use hidden_csp::format::{instance_to_json, parse_assignment};
use hidden_csp::transfer::SolverBackend;
use hidden_csp::{CspError, Instance, Outcome, Result};

pub struct ExternalBackend {
    path: String,
    name: String,
}

impl ExternalBackend {
    pub fn new(path: &str) -> Self {
        Self {
            path: path.to_string(),
            name: format!("custom:{path}"),
        }
    }
}

fn contract(msg: String) -> CspError {
    CspError::Contract(msg)
}

impl SolverBackend for ExternalBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn solve(&self, inst: &Instance) -> Result<Outcome> {
        let mut child = Command::new(&self.path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| CspError::Input(format!("cannot run {}: {e}", self.path)))?;
        let json = instance_to_json(inst);
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            stdin
                .write_all(json.as_bytes())
                .map_err(|e| contract(format!("{} closed its input: {e}", self.path)))?;
        }
        let out = child
            .wait_with_output()
            .map_err(|e| contract(format!("{} failed: {e}", self.path)))?;
        if !out.status.success() {
            return Err(contract(format!("{} exited with {}", self.path, out.status)));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        let outcome = match text.trim() {
            "NO" => Outcome::No,
            "EXCEPTION" => Outcome::Exception,
            other => Outcome::Solution(
                parse_assignment(other).map_err(|e| contract(format!("{}: {e}", self.path)))?,
            ),
        };
        if let Outcome::Solution(a) = &outcome {
            inst.verify_solution(a, &self.name)?;
        }
        Ok(outcome)
    }
}
