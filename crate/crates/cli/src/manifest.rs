use serde::Serialize;
use serde_json::Value;
use trichain::rng::RNG_NAME;

/// Provenance block embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub tool_version: &'static str,
    pub rng: &'static str,
    pub wall_time_secs: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: Value) -> Self {
        RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION"),
            rng: RNG_NAME,
            wall_time_secs: 0.0,
        }
    }

    /// Single-line JSON, used as a `#` comment at the top of CSV output.
    pub fn csv_comment(&self) -> String {
        format!(
            "# manifest: {}\n",
            serde_json::to_string(self).expect("manifest serializes")
        )
    }
}
