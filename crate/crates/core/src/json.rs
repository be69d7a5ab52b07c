//! JSON helpers shared by every document the crate reads or writes.
//!
//! Output floats are written with exactly 17 significant digits so that equal
//! runs produce byte-identical files.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::SCHEMA;

/// Accepts a missing tag or the current one.
pub fn check_schema(tag: Option<&str>) -> Result<()> {
    match tag {
        None => Ok(()),
        Some(t) if t == SCHEMA => Ok(()),
        Some(t) => Err(Error::invalid(format!(
            "unsupported schema \"{t}\" (expected \"{SCHEMA}\")"
        ))),
    }
}

/// Pretty printer that renders every `f64` as `d.dddddddddddddddde±x`.
pub struct FixedDigits<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for FixedDigits<'_> {
    fn default() -> Self {
        FixedDigits {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        // normalise -0.0
        return "0.0000000000000000e0".to_string();
    }
    format!("{v:.16e}")
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    forward! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

/// Serialises with [`FixedDigits`]. Non-finite floats become `null`.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits::default());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Numerical(format!("JSON serialisation failed: {e}")))?;
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    Ok(s)
}
