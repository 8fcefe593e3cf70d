use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;

use crate::Usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

/// Where a command writes its result and in which format.
pub struct Sink {
    path: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    /// The format follows the extension of `path`; standard output gets `default`.
    pub fn new(path: Option<&Path>, default: Format, allowed: &[Format]) -> anyhow::Result<Self> {
        let format = match path {
            None => default,
            Some(p) => match p.extension().and_then(|e| e.to_str()) {
                Some("csv") => Format::Csv,
                Some("json") => Format::Json,
                Some("md") => Format::Markdown,
                _ => anyhow::bail!(Usage(format!("cannot infer the output format of {}", p.display()))),
            },
        };
        if !allowed.contains(&format) {
            anyhow::bail!(Usage(format!("this command cannot write {format:?} output")));
        }
        Ok(Self { path: path.map(Path::to_path_buf), format })
    }

    pub fn write(&self, body: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>) -> anyhow::Result<()> {
        match &self.path {
            Some(p) => {
                let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
                let mut w = BufWriter::new(file);
                body(&mut w)?;
                w.flush().with_context(|| format!("writing {}", p.display()))?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                body(&mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }

    pub fn write_str(&self, text: &str) -> anyhow::Result<()> {
        self.write(|w| {
            w.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                w.write_all(b"\n")?;
            }
            Ok(())
        })
    }
}
