use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::args::Format;

/// One table cell. Floats print in their shortest round-trip form so that
/// equal values always give equal bytes.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Uint(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Uint(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Uint(x as u64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(x) => x.to_string(),
            Cell::Uint(x) => x.to_string(),
            // Adding zero turns -0 into 0.
            Cell::Float(x) if x.is_finite() => (x + 0.0).to_string(),
            Cell::Float(_) | Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(x) => (*x).into(),
            Cell::Uint(x) => (*x).into(),
            Cell::Float(x) => serde_json::Number::from_f64(x + 0.0).map_or(serde_json::Value::Null, Into::into),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// Unwrap the I/O error inside a csv error so its kind survives.
fn csv_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// Open `path` for reading, naming it in any error.
pub fn open_input(path: &Path) -> io::Result<File> {
    File::open(path).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Open `path` for writing, or stdout.
pub fn open(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Row-at-a-time table writer.
pub struct TableWriter {
    format: Format,
    columns: Vec<String>,
    csv: Option<csv::Writer<Box<dyn Write>>>,
    jsonl: Option<Box<dyn Write>>,
    pub rows: usize,
}

impl TableWriter {
    pub fn new(format: Format, sink: Box<dyn Write>, columns: Vec<String>) -> io::Result<Self> {
        let mut w = TableWriter {
            format,
            columns,
            csv: None,
            jsonl: None,
            rows: 0,
        };
        match format {
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(sink);
                csv.write_record(&w.columns).map_err(csv_io)?;
                w.csv = Some(csv);
            }
            Format::Jsonl => w.jsonl = Some(sink),
        }
        Ok(w)
    }

    pub fn row(&mut self, cells: &[Cell]) -> io::Result<()> {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows += 1;
        match self.format {
            Format::Csv => {
                let csv = self.csv.as_mut().expect("csv writer");
                csv.write_record(cells.iter().map(Cell::text)).map_err(csv_io)?;
            }
            Format::Jsonl => {
                let out = self.jsonl.as_mut().expect("jsonl writer");
                out.write_all(b"{")?;
                for (k, (name, cell)) in self.columns.iter().zip(cells).enumerate() {
                    if k > 0 {
                        out.write_all(b",")?;
                    }
                    serde_json::to_writer(&mut *out, name)?;
                    out.write_all(b":")?;
                    serde_json::to_writer(&mut *out, &cell.json())?;
                }
                out.write_all(b"}\n")?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> io::Result<usize> {
        if let Some(mut csv) = self.csv {
            csv.flush()?;
        }
        if let Some(mut out) = self.jsonl {
            out.flush()?;
        }
        Ok(self.rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::{Arc, Mutex};

    #[derive(Clone, Default)]
    struct Shared(Arc<Mutex<Vec<u8>>>);

    impl Write for Shared {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    fn render(format: Format) -> String {
        let buf = Shared::default();
        let mut w = TableWriter::new(format, Box::new(buf.clone()), vec!["id".into(), "score".into()]).unwrap();
        w.row(&[Cell::Uint(1), Cell::Float(0.1)]).unwrap();
        w.row(&[Cell::Uint(2), Cell::Empty]).unwrap();
        w.row(&[Cell::Uint(3), Cell::Float(-0.0)]).unwrap();
        assert_eq!(w.finish().unwrap(), 3);
        let bytes = buf.0.lock().unwrap().clone();
        String::from_utf8(bytes).unwrap()
    }

    #[test]
    fn csv_and_jsonl() {
        assert_eq!(render(Format::Csv), "id,score\n1,0.1\n2,\n3,0\n");
        assert_eq!(
            render(Format::Jsonl),
            "{\"id\":1,\"score\":0.1}\n{\"id\":2,\"score\":null}\n{\"id\":3,\"score\":0.0}\n"
        );
    }
}
