//! Serde helpers: complex numbers as `[re, im]`, also accepting `"re+imj"` strings on input.

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use std::fmt;

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    d.deserialize_any(CVisitor)
}

struct CVisitor;

impl<'de> Visitor<'de> for CVisitor {
    type Value = Complex64;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("[re, im], a number, or a string like \"1.5-2j\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Complex64, E> {
        Ok(Complex64::new(v, 0.0))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Complex64, E> {
        Ok(Complex64::new(v as f64, 0.0))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Complex64, E> {
        Ok(Complex64::new(v as f64, 0.0))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Complex64, E> {
        parse_complex(v).map_err(E::custom)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Complex64, A::Error> {
        let re: f64 = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let im: f64 = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
        if seq.next_element::<f64>()?.is_some() {
            return Err(de::Error::invalid_length(3, &self));
        }
        Ok(Complex64::new(re, im))
    }
}

/// Parses `"1"`, `"2j"`, `"1.5-0.25j"`, `"-3e-2+1j"` (also accepts `i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = || format!("cannot parse complex literal {s:?}");
    if let Some(body) = t.strip_suffix('j').or_else(|| t.strip_suffix('i')) {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
    } else {
        Ok(Complex64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0))
    }
}

/// `Option<Complex64>` as `null` or `[re, im]`; use with `#[serde(default, with = "crate::cplx::opt")]`.
pub mod opt {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "crate::cplx")] Complex64);

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}
