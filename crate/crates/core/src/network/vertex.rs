use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Canonical vertex encoding.
///
/// Textual forms: `5`, `(2,1)` for a (level, index) pair and `[1,0,-1]` for a
/// lattice point. The derived order compares the tag first, so integers sort
/// before pairs and pairs before points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    Int(i64),
    Pair(i64, i64),
    Point { dim: u8, coords: [i64; 3] },
}

impl VertexId {
    pub fn point(coords: &[i64]) -> VertexId {
        assert!(!coords.is_empty() && coords.len() <= 3, "lattice points have 1 to 3 coordinates");
        let mut c = [0; 3];
        c[..coords.len()].copy_from_slice(coords);
        VertexId::Point { dim: coords.len() as u8, coords: c }
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self {
            VertexId::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(i64, i64)> {
        match *self {
            VertexId::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn coords(&self) -> Option<&[i64]> {
        match self {
            VertexId::Point { dim, coords } => Some(&coords[..*dim as usize]),
            _ => None,
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Int(n) => write!(f, "{n}"),
            VertexId::Pair(a, b) => write!(f, "({a},{b})"),
            VertexId::Point { .. } => {
                let parts: Vec<String> = self.coords().unwrap().iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

fn parse_list(body: &str, text: &str) -> Result<Vec<i64>, Error> {
    body.split(',').map(|p| p.trim().parse::<i64>().map_err(|e| Error::InvalidVertex { vertex: text.to_string(), reason: e.to_string() })).collect()
}

impl FromStr for VertexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = |reason: &str| Error::InvalidVertex { vertex: s.to_string(), reason: reason.to_string() };
        if let Some(body) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let v = parse_list(body, s)?;
            if v.len() != 2 {
                return Err(bad("a pair needs exactly two entries"));
            }
            Ok(VertexId::Pair(v[0], v[1]))
        } else if let Some(body) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let v = parse_list(body, s)?;
            if v.is_empty() || v.len() > 3 {
                return Err(bad("a point needs 1 to 3 coordinates"));
            }
            Ok(VertexId::point(&v))
        } else {
            t.parse::<i64>().map(VertexId::Int).map_err(|e| bad(&e.to_string()))
        }
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match v {
            serde_json::Value::Number(n) => n.as_i64().map(VertexId::Int).ok_or_else(|| serde::de::Error::custom("vertex integers must fit in i64")),
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Array(items) => {
                let coords: Option<Vec<i64>> = items.iter().map(|x| x.as_i64()).collect();
                match coords {
                    Some(c) if !c.is_empty() && c.len() <= 3 => Ok(VertexId::point(&c)),
                    _ => Err(serde::de::Error::custom("lattice point must have 1 to 3 integer coordinates")),
                }
            }
            _ => Err(serde::de::Error::custom("expected an integer, string or array vertex")),
        }
    }
}
