//! Many-valued contexts over [-1, 1] and interval scaling.

use std::collections::HashSet;
use std::io::{Read, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::fca::FormalContext;
use crate::weight::Weight;

/// Separator between a base feature and its interval index.
pub const SCALE_SEPARATOR: char = '#';

#[derive(Debug, Clone, PartialEq)]
pub struct ManyValuedContext {
    objects: Vec<String>,
    features: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl ManyValuedContext {
    pub fn new(objects: Vec<String>, features: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        for (kind, ids) in [("object", &objects), ("feature", &features)] {
            let mut seen = HashSet::new();
            for id in ids.iter() {
                if !seen.insert(id) {
                    return Err(Error::DuplicateId { kind, id: id.clone() });
                }
            }
        }
        if values.len() != objects.len() {
            return Err(Error::Dimension {
                expected: objects.len(),
                actual: values.len(),
            });
        }
        for (o, row) in values.iter().enumerate() {
            if row.len() != features.len() {
                return Err(Error::Dimension {
                    expected: features.len(),
                    actual: row.len(),
                });
            }
            for (f, &v) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::ValueOutOfRange {
                        object: objects[o].clone(),
                        feature: features[f].clone(),
                        value: v,
                    });
                }
            }
        }
        Ok(ManyValuedContext {
            objects,
            features,
            values,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, object: usize, feature: usize) -> f64 {
        self.values[object][feature]
    }

    pub fn feature_index(&self, id: &str) -> Option<usize> {
        self.features.iter().position(|f| f == id)
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == id)
    }

    /// Reads `object,<feature1>,...`; empty cells are 0.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.is_empty() {
            return Err(Error::Parse("missing header".into()));
        }
        let features: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut objects = Vec::new();
        let mut values = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let object = record.get(0).unwrap_or_default().to_string();
            let mut row = Vec::with_capacity(features.len());
            for (i, feature) in features.iter().enumerate() {
                let cell = record.get(i + 1).unwrap_or("");
                let v = if cell.is_empty() {
                    0.0
                } else {
                    cell.parse::<f64>().map_err(|_| {
                        Error::Parse(format!("object {object}, feature {feature}: not a number: {cell:?}"))
                    })?
                };
                row.push(v);
            }
            objects.push(object);
            values.push(row);
        }
        Self::new(objects, features, values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["object".to_string()];
        header.extend(self.features.iter().cloned());
        wtr.write_record(&header)?;
        for (object, row) in self.objects.iter().zip(&self.values) {
            let mut record = vec![object.clone()];
            record.extend(row.iter().map(|v| format_value(*v)));
            wtr.write_record(&record)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Shortest round-trip text, with `-0` printed as `0`.
fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

/// Number of intervals per feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingSpec {
    s: usize,
}

impl ScalingSpec {
    pub fn new(s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidScale(s));
        }
        Ok(ScalingSpec { s })
    }

    pub fn s(&self) -> usize {
        self.s
    }
}

/// 1-based interval of `v` among `s` equal bins of [-1, 1]; bins are
/// `[lo, hi)` except the last, which is closed. Exact for any decimal input.
pub fn interval_index(v: &BigRational, s: usize) -> usize {
    // k = floor((v + 1) * s / 2) + 1, clamped to s for v = 1
    let one = BigRational::from_integer(BigInt::from(1));
    let scaled = (v + &one) * BigRational::from_integer(BigInt::from(s)) / BigRational::from_integer(BigInt::from(2));
    let floor = scaled.numer().div_floor(scaled.denom());
    let k = floor.to_usize().unwrap_or(0) + 1;
    k.min(s)
}

/// Interval index of a float, read through its shortest decimal form.
pub fn interval_index_f64(v: f64, s: usize) -> usize {
    interval_index(&BigRational::from_f64(v), s)
}

pub fn scaled_attribute(feature: &str, k: usize) -> String {
    format!("{feature}{SCALE_SEPARATOR}{k}")
}

/// Scaled attribute ids for `features`, feature-major: `f#1..f#s` for each `f`.
pub fn scaled_attributes(features: &[String], spec: ScalingSpec) -> Vec<String> {
    features
        .iter()
        .flat_map(|f| (1..=spec.s).map(move |k| scaled_attribute(f, k)))
        .collect()
}

pub fn interval_scale(mvc: &ManyValuedContext, spec: ScalingSpec) -> FormalContext {
    let s = spec.s;
    let attributes = scaled_attributes(&mvc.features, spec);
    let rows = mvc
        .values
        .iter()
        .map(|row| {
            BitSet::from_indices(
                attributes.len(),
                row.iter().enumerate().map(|(f, &v)| f * s + interval_index_f64(v, s) - 1),
            )
        })
        .collect();
    FormalContext::from_rows(mvc.objects.clone(), attributes, rows).expect("scaled ids are unique")
}

/// Splits `"<feature>#k"` into `(feature, k)`.
pub fn base_feature_of(attr: &str) -> Result<(String, usize)> {
    let malformed = || Error::MalformedAttributeId(attr.to_string());
    let (feature, k) = attr.rsplit_once(SCALE_SEPARATOR).ok_or_else(malformed)?;
    if feature.is_empty() || k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let k: usize = k.parse().map_err(|_| malformed())?;
    if k == 0 {
        return Err(malformed());
    }
    Ok((feature.to_string(), k))
}

/// Lower and upper bound of interval `k` (1-based) as exact rationals.
pub fn interval_bounds(k: usize, s: usize) -> (BigRational, BigRational) {
    let lo = BigRational::new(BigInt::from(2 * (k as i64 - 1)), BigInt::from(s)) - BigRational::from_integer(1.into());
    let hi = BigRational::new(BigInt::from(2 * k as i64), BigInt::from(s)) - BigRational::from_integer(1.into());
    (lo, hi)
}

/// True when `v` is an interior grid point for `s` intervals.
pub fn on_interior_boundary(v: &BigRational, s: usize) -> bool {
    (1..s).any(|k| {
        let (_, hi) = interval_bounds(k, s);
        (&hi - v).is_zero()
    })
}
