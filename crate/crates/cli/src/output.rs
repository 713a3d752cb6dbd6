use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::CliError;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub(crate) fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(io_err(path))
}

/// Writes `# cfg=<hash>`, the header, then one line per row.
pub(crate) fn write_csv<I>(path: &Path, cfg_hash: &str, header: &str, rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = String>,
{
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let go = || -> std::io::Result<()> {
        writeln!(w, "# cfg={cfg_hash}")?;
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{row}")?;
        }
        w.flush()
    };
    go().map_err(io_err(path))
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(io_err(path))
}
