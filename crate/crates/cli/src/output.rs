use std::io::{self, Write};

use serde::Serialize;

/// Stdout writer; every command emits a single document.
pub struct Emit {
    out: io::Stdout,
}

impl Emit {
    pub fn stdout() -> Self {
        Emit { out: io::stdout() }
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, value: &T) -> anyhow::Result<()> {
        let mut lock = self.out.lock();
        serde_json::to_writer_pretty(&mut lock, value)?;
        writeln!(lock)?;
        Ok(())
    }

    pub fn raw(&mut self, text: &str) -> anyhow::Result<()> {
        let mut lock = self.out.lock();
        lock.write_all(text.as_bytes())?;
        lock.flush()?;
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn csv_value(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}
