//! KL divergence between an original and a pruned cell distribution.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::entropy::Histogram;
use crate::error::{Error, Result};

/// A KL divergence in nats, or the divergent case where `Q` has no mass on
/// a cell `P` occupies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KlValue {
    Finite(f64),
    Infinite,
}

impl KlValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, KlValue::Infinite)
    }

    /// The value as an `f64`, with `Infinite` mapped to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match *self {
            KlValue::Finite(v) => v,
            KlValue::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            KlValue::Finite(v) => Some(v),
            KlValue::Infinite => None,
        }
    }
}

impl fmt::Display for KlValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KlValue::Finite(v) => write!(f, "{v:.6}"),
            KlValue::Infinite => f.write_str("inf"),
        }
    }
}

// JSON has no infinity, so the divergent case is the string "inf".
impl Serialize for KlValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            KlValue::Finite(v) => s.serialize_f64(v),
            KlValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for KlValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(KlValue::Finite(v)),
            Repr::Str(s) if s == "inf" => Ok(KlValue::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Half a pseudo-count of `q`, as a probability: `1 / (2·q.total)`.
pub fn default_epsilon(q: &Histogram) -> f64 {
    if q.total() == 0 {
        1.0
    } else {
        1.0 / (2.0 * q.total() as f64)
    }
}

/// `D(P‖Q) = Σ P_i ln(P_i / Q_i)` over the union of both supports.
///
/// With `epsilon = 0` the result is [`KlValue::Infinite`] whenever some cell
/// occupied by `p` is empty in `q`. With `epsilon > 0` every `Q_i` is raised
/// to at least `epsilon` and `Q` is renormalized, which always gives a
/// finite value.
pub fn kl_divergence(p: &Histogram, q: &Histogram, epsilon: f64) -> Result<KlValue> {
    if p.total() == 0 {
        return Err(Error::UndefinedDistribution(
            "KL reference distribution has no mass",
        ));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::Config(format!(
            "epsilon must be a finite non-negative number, got {epsilon}"
        )));
    }
    let p_total = p.total() as f64;
    let q_total = q.total() as f64;
    let q_prob = |n: u64| {
        if q.total() == 0 {
            0.0
        } else {
            n as f64 / q_total
        }
    };

    let p_cells = p.sorted();
    if epsilon == 0.0 {
        if p_cells.iter().any(|(c, _)| !q.contains(c)) {
            return Ok(KlValue::Infinite);
        }
        let kl: f64 = p_cells
            .iter()
            .map(|&(c, n)| {
                let pi = n as f64 / p_total;
                pi * (pi / q_prob(q.get(&c))).ln()
            })
            .sum();
        return Ok(KlValue::Finite(kl.max(0.0)));
    }

    // Normalizer of the floored Q over the union support.
    let missing = p_cells.iter().filter(|(c, _)| !q.contains(c)).count();
    let z: f64 = q
        .sorted()
        .into_iter()
        .map(|(_, n)| q_prob(n).max(epsilon))
        .sum::<f64>()
        + epsilon * missing as f64;
    let kl: f64 = p_cells
        .iter()
        .map(|&(c, n)| {
            let pi = n as f64 / p_total;
            let qi = q_prob(q.get(&c)).max(epsilon) / z;
            pi * (pi / qi).ln()
        })
        .sum();
    Ok(KlValue::Finite(kl.max(0.0)))
}
