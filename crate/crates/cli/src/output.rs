use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::SCHEMA;

/// Writes one JSON object per line, each tagged with the schema version.
pub struct Emitter {
    sink: Box<dyn Write>,
    error: Option<io::Error>,
}

impl Emitter {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self { sink, error: None })
    }

    pub fn emit(&mut self, record: Value) {
        let mut obj = Map::new();
        obj.insert("schema".into(), SCHEMA.into());
        if let Value::Object(fields) = record {
            obj.extend(fields);
        }
        if self.error.is_none() {
            if let Err(e) = writeln!(self.sink, "{}", Value::Object(obj)) {
                self.error = Some(e);
            }
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.sink.flush()
    }
}
