//! TSPLIB instance loading and synthetic instance generation.
//!
//! Two encodings are understood: `EXPLICIT` weights in `FULL_MATRIX` layout
//! (the asymmetric `.atsp` files) and `EUC_2D` node coordinates. Everything
//! else is rejected with a [`ParseError`] rather than guessed at.

use std::fmt::Write as _;
use std::io::{self, BufRead, BufReader, Read};
use std::ops::RangeInclusive;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Edge weights and tour lengths. 64 bits leave plenty of headroom for
/// 171-city tours over large weights.
pub type Cost = u64;

/// Largest instance [`random_instance`] will generate.
pub const RANDOM_INSTANCE_MAX: usize = 64;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("I/O error while reading instance: {0}")]
    Io(#[from] io::Error),
    #[error("missing DIMENSION keyword")]
    MissingDimension,
    #[error("line {line}: invalid DIMENSION value {value:?} (need an integer >= 2)")]
    InvalidDimension { line: usize, value: String },
    #[error("line {line}: unsupported EDGE_WEIGHT_TYPE {value:?} (supported: EXPLICIT, EUC_2D)")]
    UnsupportedWeightType { line: usize, value: String },
    #[error("missing EDGE_WEIGHT_TYPE keyword")]
    MissingWeightType,
    #[error("line {line}: unsupported EDGE_WEIGHT_FORMAT {value:?} (supported: FULL_MATRIX)")]
    UnsupportedWeightFormat { line: usize, value: String },
    #[error("EDGE_WEIGHT_TYPE EXPLICIT requires EDGE_WEIGHT_FORMAT")]
    MissingWeightFormat,
    #[error("line {line}: {keyword} appears before DIMENSION")]
    SectionBeforeDimension { line: usize, keyword: &'static str },
    #[error("missing {0}")]
    MissingSection(&'static str),
    #[error("EDGE_WEIGHT_SECTION holds {found} weights, expected {expected} (DIMENSION squared)")]
    TokenCount { expected: usize, found: usize },
    #[error("line {line}: non-numeric token {token:?} in {keyword}")]
    NonNumeric {
        line: usize,
        keyword: &'static str,
        token: String,
    },
    #[error("line {line}: edge weight {token:?} is negative, non-finite or fractional")]
    BadWeight { line: usize, token: String },
    #[error("line {line}: malformed NODE_COORD_SECTION entry {text:?}")]
    BadCoordinate { line: usize, text: String },
    #[error("NODE_COORD_SECTION lists {found} nodes, expected {expected}")]
    CoordinateCount { expected: usize, found: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance size {n} outside supported range [{min}, {max}]")]
    SizeOutOfBounds { n: usize, min: usize, max: usize },
    #[error("weight range is empty")]
    EmptyRange,
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
}

/// A TSP instance with a full, possibly asymmetric, distance matrix.
///
/// Entry `(i, j)` is the cost of the directed edge `i -> j`. Diagonal entries
/// are kept as read but never used by a tour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    dimension: usize,
    distances: Vec<Cost>,
    /// Reference optimum, only ever filled from the optima registry.
    pub known_optimum: Option<Cost>,
}

impl Instance {
    pub fn from_rows(name: impl Into<String>, rows: Vec<Vec<Cost>>) -> Result<Self, InstanceError> {
        let n = rows.len();
        if n < 2 {
            return Err(InstanceError::SizeOutOfBounds {
                n,
                min: 2,
                max: usize::MAX,
            });
        }
        let mut distances = Vec::with_capacity(n * n);
        for (row, values) in rows.into_iter().enumerate() {
            if values.len() != n {
                return Err(InstanceError::NotSquare {
                    row,
                    len: values.len(),
                    expected: n,
                });
            }
            distances.extend(values);
        }
        Ok(Self {
            name: name.into(),
            dimension: n,
            distances,
            known_optimum: None,
        })
    }

    fn from_flat(name: String, dimension: usize, distances: Vec<Cost>) -> Self {
        debug_assert_eq!(distances.len(), dimension * dimension);
        Self {
            name,
            dimension,
            distances,
            known_optimum: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of cities.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Cost of the directed edge `from -> to`.
    #[inline]
    pub fn distance(&self, from: usize, to: usize) -> Cost {
        self.distances[from * self.dimension + to]
    }

    pub fn row(&self, from: usize) -> &[Cost] {
        &self.distances[from * self.dimension..(from + 1) * self.dimension]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Cost]> {
        self.distances.chunks_exact(self.dimension)
    }

    /// True when some off-diagonal pair differs in its two directions.
    pub fn is_asymmetric(&self) -> bool {
        let n = self.dimension;
        (0..n).any(|i| (i + 1..n).any(|j| self.distance(i, j) != self.distance(j, i)))
    }

    /// Renders the instance as a TSPLIB `EXPLICIT` / `FULL_MATRIX` file.
    pub fn to_full_matrix(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME: {}", self.name);
        let _ = writeln!(out, "TYPE: ATSP");
        let _ = writeln!(out, "DIMENSION: {}", self.dimension);
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE: EXPLICIT");
        let _ = writeln!(out, "EDGE_WEIGHT_FORMAT: FULL_MATRIX");
        let _ = writeln!(out, "EDGE_WEIGHT_SECTION");
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|w| w.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        let _ = writeln!(out, "EOF");
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum WeightType {
    Explicit,
    Euc2d,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    EdgeWeights,
    NodeCoords,
    Skipped,
}

/// Parses TSPLIB text from any buffered reader.
pub fn parse_instance<R: BufRead>(source: R) -> Result<Instance, ParseError> {
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<(usize, WeightType)> = None;
    let mut weight_format: Option<String> = None;
    let mut weights: Option<Vec<Cost>> = None;
    let mut coords: Option<Vec<Option<(f64, f64)>>> = None;
    let mut coord_count = 0usize;
    let mut section = Section::Header;

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }

        // Keyword lines end whatever data section is open.
        let first_key = trimmed
            .split(|c: char| c == ':' || c.is_whitespace())
            .next()
            .unwrap_or("");
        if is_keyword(first_key) {
            if first_key == "EOF" {
                break;
            }
            if first_key.ends_with("_SECTION") {
                match first_key {
                    "EDGE_WEIGHT_SECTION" => {
                        let n = dimension.ok_or(ParseError::SectionBeforeDimension {
                            line: lineno,
                            keyword: "EDGE_WEIGHT_SECTION",
                        })?;
                        section = Section::EdgeWeights;
                        let buf = weights.get_or_insert_with(|| Vec::with_capacity(n * n));
                        let rest = header_value(trimmed, first_key);
                        push_weights(buf, rest, lineno)?;
                    }
                    "NODE_COORD_SECTION" => {
                        let n = dimension.ok_or(ParseError::SectionBeforeDimension {
                            line: lineno,
                            keyword: "NODE_COORD_SECTION",
                        })?;
                        section = Section::NodeCoords;
                        coords.get_or_insert_with(|| vec![None; n]);
                    }
                    _ => section = Section::Skipped,
                }
                continue;
            }
            section = Section::Header;
            let value = header_value(trimmed, first_key);
            match first_key {
                "NAME" => name = value.to_string(),
                "DIMENSION" => {
                    let n = value
                        .parse::<usize>()
                        .ok()
                        .filter(|&n| n >= 2)
                        .ok_or_else(|| ParseError::InvalidDimension {
                            line: lineno,
                            value: value.to_string(),
                        })?;
                    dimension = Some(n);
                }
                "EDGE_WEIGHT_TYPE" => {
                    let kind = match value {
                        "EXPLICIT" => WeightType::Explicit,
                        "EUC_2D" => WeightType::Euc2d,
                        other => {
                            return Err(ParseError::UnsupportedWeightType {
                                line: lineno,
                                value: other.to_string(),
                            })
                        }
                    };
                    weight_type = Some((lineno, kind));
                }
                "EDGE_WEIGHT_FORMAT" => {
                    if value != "FULL_MATRIX" {
                        return Err(ParseError::UnsupportedWeightFormat {
                            line: lineno,
                            value: value.to_string(),
                        });
                    }
                    weight_format = Some(value.to_string());
                }
                _ => {}
            }
            continue;
        }

        match section {
            Section::EdgeWeights => {
                let buf = weights.as_mut().expect("section opened");
                push_weights(buf, trimmed, lineno)?;
            }
            Section::NodeCoords => {
                let slots = coords.as_mut().expect("section opened");
                let parts: Vec<&str> = trimmed.split_whitespace().collect();
                let bad = || ParseError::BadCoordinate {
                    line: lineno,
                    text: trimmed.to_string(),
                };
                if parts.len() != 3 {
                    return Err(bad());
                }
                let id: usize = parts[0].parse().map_err(|_| bad())?;
                let x: f64 = parts[1].parse().map_err(|_| bad())?;
                let y: f64 = parts[2].parse().map_err(|_| bad())?;
                if id == 0 || id > slots.len() || !x.is_finite() || !y.is_finite() {
                    return Err(bad());
                }
                if slots[id - 1].replace((x, y)).is_none() {
                    coord_count += 1;
                }
            }
            Section::Skipped => {}
            Section::Header => {
                return Err(ParseError::NonNumeric {
                    line: lineno,
                    keyword: "header",
                    token: first_key.to_string(),
                })
            }
        }
    }

    let n = dimension.ok_or(ParseError::MissingDimension)?;
    let (_, kind) = weight_type.ok_or(ParseError::MissingWeightType)?;
    if name.is_empty() {
        name = "unnamed".to_string();
    }
    let distances = match kind {
        WeightType::Explicit => {
            if weight_format.is_none() {
                return Err(ParseError::MissingWeightFormat);
            }
            let w = weights.ok_or(ParseError::MissingSection("EDGE_WEIGHT_SECTION"))?;
            if w.len() != n * n {
                return Err(ParseError::TokenCount {
                    expected: n * n,
                    found: w.len(),
                });
            }
            w
        }
        WeightType::Euc2d => {
            let slots = coords.ok_or(ParseError::MissingSection("NODE_COORD_SECTION"))?;
            if coord_count != n {
                return Err(ParseError::CoordinateCount {
                    expected: n,
                    found: coord_count,
                });
            }
            let pts: Vec<(f64, f64)> = slots.into_iter().flatten().collect();
            let mut d = Vec::with_capacity(n * n);
            for &(xi, yi) in &pts {
                for &(xj, yj) in &pts {
                    d.push(nint(((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt()));
                }
            }
            d
        }
    };
    Ok(Instance::from_flat(name, n, distances))
}

pub fn parse_str(text: &str) -> Result<Instance, ParseError> {
    parse_instance(text.as_bytes())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, ParseError> {
    let file = std::fs::File::open(path)?;
    parse_instance(BufReader::new(file))
}

/// Reads an instance from an arbitrary byte stream.
pub fn read_instance<R: Read>(reader: R) -> Result<Instance, ParseError> {
    parse_instance(BufReader::new(reader))
}

const KEYWORDS: &[&str] = &[
    "NAME",
    "TYPE",
    "COMMENT",
    "DIMENSION",
    "CAPACITY",
    "EDGE_WEIGHT_TYPE",
    "EDGE_WEIGHT_FORMAT",
    "EDGE_DATA_FORMAT",
    "NODE_COORD_TYPE",
    "DISPLAY_DATA_TYPE",
    "EOF",
];

fn is_keyword(token: &str) -> bool {
    KEYWORDS.contains(&token)
        || (token.ends_with("_SECTION")
            && token.chars().all(|c| c.is_ascii_uppercase() || c == '_'))
}

fn header_value<'a>(line: &'a str, key: &str) -> &'a str {
    let rest = &line[key.len()..];
    rest.trim_start().trim_start_matches(':').trim()
}

fn push_weights(buf: &mut Vec<Cost>, text: &str, line: usize) -> Result<(), ParseError> {
    for token in text.split_whitespace() {
        buf.push(parse_weight(token, line)?);
    }
    Ok(())
}

fn parse_weight(token: &str, line: usize) -> Result<Cost, ParseError> {
    if let Ok(v) = token.parse::<Cost>() {
        return Ok(v);
    }
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= Cost::MAX as f64 => {
            Ok(v as Cost)
        }
        Ok(_) => Err(ParseError::BadWeight {
            line,
            token: token.to_string(),
        }),
        Err(_) => Err(ParseError::NonNumeric {
            line,
            keyword: "EDGE_WEIGHT_SECTION",
            token: token.to_string(),
        }),
    }
}

/// TSPLIB `nint`: round half up.
fn nint(x: f64) -> Cost {
    (x + 0.5).floor() as Cost
}

/// Uniformly random asymmetric instance for oracle tests.
///
/// Off-diagonal weights are drawn row-major from `weights`; the diagonal is 0.
pub fn random_instance(
    n: usize,
    weights: RangeInclusive<Cost>,
    seed: u64,
) -> Result<Instance, InstanceError> {
    if !(2..=RANDOM_INSTANCE_MAX).contains(&n) {
        return Err(InstanceError::SizeOutOfBounds {
            n,
            min: 2,
            max: RANDOM_INSTANCE_MAX,
        });
    }
    if weights.is_empty() {
        return Err(InstanceError::EmptyRange);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i * n + j] = rng.random_range(weights.clone());
            }
        }
    }
    Ok(Instance::from_flat(format!("rand{n}-s{seed}"), n, d))
}

/// Asymmetric instance with geometric structure: cities scattered on a
/// 1000x1000 plane, each directed edge costing its rounded Euclidean length
/// plus a per-direction surcharge of up to 40% of that length.
///
/// Used to build the larger benchmark instances that uniform random
/// matrices model poorly.
pub fn geometric_asymmetric_instance(
    name: impl Into<String>,
    n: usize,
    seed: u64,
) -> Result<Instance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::SizeOutOfBounds {
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0)))
        .collect();
    let mut d = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let base = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
            let surcharge = rng.random_range(0.0..0.4) * base;
            d[i * n + j] = nint(base + surcharge);
        }
    }
    Ok(Instance::from_flat(name.into(), n, d))
}
