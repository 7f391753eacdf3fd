//! JSON rendering with a fixed float format: every finite float is written
//! with 17 significant digits in exponent notation, non-finite ones as
//! `null`.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

struct FixedFloats<'a>(PrettyFormatter<'a>);

impl FixedFloats<'_> {
    fn write_float<W: ?Sized + Write>(writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        Self::write_float(writer, value)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        Self::write_float(writer, f64::from(value))
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

/// Pretty-printed JSON followed by a newline.
pub fn render<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::with_indent(b"  ")));
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_digits() {
        assert_eq!(render(&1.0), "1.0000000000000000e0\n");
        assert_eq!(render(&0.1), "1.0000000000000001e-1\n");
        assert_eq!(render(&f64::NAN), "null\n");
        let back: f64 = serde_json::from_str(render(&(2.0f64).sqrt()).trim()).unwrap();
        assert_eq!(back, 2f64.sqrt());
    }

    #[test]
    fn structure_is_pretty() {
        #[derive(Serialize)]
        struct S {
            a: Vec<f64>,
            b: bool,
        }
        let text = render(&S { a: vec![0.5], b: true });
        assert_eq!(text, "{\n  \"a\": [\n    5.0000000000000000e-1\n  ],\n  \"b\": true\n}\n");
    }
}
