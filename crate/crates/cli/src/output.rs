//! Result tables and the JSON summary, held in memory until the run ends.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::series_file::Column;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "RETRADE_OUT";

/// `--out` if given, else `$RETRADE_OUT/<command>`, else `retrade-out/<command>`.
pub fn output_dir(flag: Option<&Path>, command: &str) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("retrade-out"))
            .join(command),
    }
}

/// Formats a float so that parsing it back gives the same bits.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub struct Output {
    command: &'static str,
    config_text: String,
    config_hash: String,
    seed: Option<u64>,
    inputs: Vec<(String, String)>,
    files: Vec<(String, Vec<u8>)>,
    results: Map<String, Value>,
    check: Option<(bool, String)>,
}

impl Output {
    pub fn new(command: &'static str, config_text: String, config_hash: String, seed: Option<u64>) -> Self {
        Output {
            command,
            config_text,
            config_hash,
            seed,
            inputs: Vec::new(),
            files: Vec::new(),
            results: Map::new(),
            check: None,
        }
    }

    /// Records an input file by path and content hash.
    pub fn input(&mut self, path: &Path, sha256: String) {
        self.inputs.push((path.display().to_string(), sha256));
    }

    fn provenance(&self) -> String {
        let mut s = format!(
            "# retrade {}\n# command: {}\n# config-sha256: {}\n# seed: {}\n# retrade-core: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.config_hash,
            self.seed.map_or_else(|| "none".to_string(), |s| s.to_string()),
            retrade_core::VERSION,
        );
        for (path, hash) in &self.inputs {
            s.push_str(&format!("# input: {path} sha256 {hash}\n"));
        }
        s
    }

    pub fn table<R, I>(&mut self, name: &str, header: &[&str], rows: R)
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = String>,
    {
        let mut buf = self.provenance().into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).expect("write to memory");
            for row in rows {
                w.write_record(row).expect("write to memory");
            }
            w.flush().expect("write to memory");
        }
        self.files.push((name.to_string(), buf));
    }

    /// A series table that `load_series` reads back unchanged.
    pub fn series(&mut self, name: &str, column: Column, t0: i64, values: &[f64]) {
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, &v)| [(t0 + i as i64).to_string(), num(v)]);
        self.table(name, &["t", column.name()], rows);
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("results are plain data");
        self.results.insert(key.to_string(), v);
    }

    pub fn check(&mut self, passed: bool, detail: String) {
        self.check = Some((passed, detail));
    }

    pub fn check_outcome(&self) -> Option<&(bool, String)> {
        self.check.as_ref()
    }

    fn summary(&self) -> String {
        let mut m = Map::new();
        m.insert("command".into(), self.command.into());
        m.insert("retrade_version".into(), env!("CARGO_PKG_VERSION").into());
        m.insert("core_version".into(), retrade_core::VERSION.into());
        m.insert("config_sha256".into(), self.config_hash.clone().into());
        m.insert("seed".into(), self.seed.into());
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .map(|(p, h)| serde_json::json!({ "path": p, "sha256": h }))
            .collect();
        m.insert("inputs".into(), inputs.into());
        m.insert("results".into(), Value::Object(self.results.clone()));
        if let Some((passed, detail)) = &self.check {
            m.insert(
                "check".into(),
                serde_json::json!({ "passed": passed, "detail": detail }),
            );
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json");
        s.push('\n');
        s
    }

    /// Writes every table, `config.toml` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, bytes: &[u8]| -> std::io::Result<()> {
            let p = dir.join(name);
            std::fs::write(&p, bytes)?;
            written.push(p);
            Ok(())
        };
        put("config.toml", self.config_text.as_bytes())?;
        for (name, bytes) in &self.files {
            put(name, bytes)?;
        }
        put("summary.json", self.summary().as_bytes())?;
        Ok(written)
    }
}
