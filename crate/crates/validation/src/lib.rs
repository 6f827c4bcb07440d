//! Pass/fail bookkeeping for the acceptance run (`cargo test -p
//! qroutesim-validation --test acceptance`).

use std::time::{Duration, Instant};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

#[derive(Default)]
pub struct Report {
    results: Vec<(String, bool)>,
}

impl Report {
    /// Runs one criterion, failing it if it panics or exceeds `limit`, and
    /// prints a single result line.
    pub fn check(&mut self, id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
            .unwrap_or_else(|e| {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                Outcome::new(false, format!("panicked: {}", msg.unwrap_or_default()))
            });
        let took = start.elapsed();
        let in_time = took <= limit;
        let pass = out.pass && in_time;
        let timing = if in_time { String::new() } else { format!(" [over the {:?} limit]", limit) };
        println!(
            "{} criterion {id:>2} {name}: {} ({:.2?}){timing}",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took
        );
        self.results.push((name.to_string(), pass));
    }

    pub fn failed(&self) -> usize {
        self.results.iter().filter(|r| !r.1).count()
    }

    pub fn total(&self) -> usize {
        self.results.len()
    }
}
