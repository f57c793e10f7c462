//! Self-contained per-index certificates and their JSON form.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::compact::{CompactStep, ConvergenceDiagnostics};
use crate::error::{Error, Result};
use crate::geometry::LorentzForm;
use crate::interval::DistanceInterval;
use crate::noncompact::{Decomposition, SeparationReport};
use crate::quad::QuadElem;
use crate::rational::{serde_bigint, serde_canonical, Rational};
use crate::smooth::Factorization;
use crate::tracering::TraceRingBound;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Noncompact,
    Compact,
}

/// Explicit certificates carry the full vector `w`; analytic ones only `α, β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Explicit,
}

/// Conditions recorded on a certificate that are not failures of the certificate itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    SeparationFailed,
    NotUltraparallel,
    NotSmooth,
    ThreeSquaresBudgetExhausted,
    EpsilonNotTotallyPositive,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum Target {
    /// `f(w) = r`; `prime` is set for targets `p^k`.
    Integer {
        #[serde(with = "serde_bigint")]
        r: BigInt,
        prime: Option<u64>,
    },
    /// `f(w) = ρ^k`.
    Quadratic { rho: QuadElem, rho_k: QuadElem },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum Construction {
    Decomposition(Decomposition),
    CompactStep(CompactStep),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Smoothness {
    #[serde(rename = "T")]
    pub t: u64,
    pub verdict: bool,
    pub factorization: Factorization,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FamilyCertificate {
    pub schema_version: u32,
    pub case: Case,
    pub ambient_group_key: String,
    pub form: LorentzForm,
    pub k: u32,
    pub target: Target,
    pub w: Option<Vec<QuadElem>>,
    pub construction: Construction,
    pub separation: SeparationReport,
    pub cosh_sq: QuadElem,
    pub distance: Option<DistanceInterval>,
    #[serde(with = "serde_canonical")]
    pub width: Rational,
    pub systole_upper_bound: Option<DistanceInterval>,
    pub smoothness: Option<Smoothness>,
    pub trace_ring_bound: TraceRingBound,
    pub diagnostics: Option<ConvergenceDiagnostics>,
    pub mode: Mode,
    pub flags: Vec<Flag>,
}

impl FamilyCertificate {
    /// Short rendering of the target, `r` or `ρ^k`.
    pub fn target_string(&self) -> String {
        match &self.target {
            Target::Integer { r, .. } => r.to_string(),
            Target::Quadratic { rho_k, .. } => rho_k.to_string(),
        }
    }
}

/// Pretty JSON with fixed key order and a trailing newline.
pub fn to_json(certs: &[FamilyCertificate]) -> String {
    let mut s = serde_json::to_string_pretty(certs).expect("certificates serialize");
    s.push('\n');
    s
}

/// Parses a certificate array, rejecting unknown schema versions before decoding.
pub fn from_json(text: &str) -> Result<Vec<FamilyCertificate>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let items = value.as_array().ok_or_else(|| Error::Parse("expected a JSON array of certificates".into()))?;
    items
        .iter()
        .map(|item| {
            let version = item
                .get("schemaVersion")
                .and_then(serde_json::Value::as_u64)
                .ok_or_else(|| Error::Parse("missing schemaVersion".into()))?;
            if version != u64::from(SCHEMA_VERSION) {
                return Err(Error::UnsupportedSchema(version.min(u64::from(u32::MAX)) as u32));
            }
            serde_json::from_value(item.clone()).map_err(|e| Error::Parse(e.to_string()))
        })
        .collect()
}

/// One class of the pigeonhole partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PigeonholeClass {
    pub bound: TraceRingBound,
    pub indices: Vec<usize>,
}

/// Partition of certificate positions by trace-ring bound, classes in order of first appearance.
pub fn pigeonhole_groups(certs: &[FamilyCertificate]) -> Result<Vec<PigeonholeClass>> {
    if let Some(first) = certs.first() {
        if let Some(other) = certs.iter().find(|c| c.ambient_group_key != first.ambient_group_key) {
            return Err(Error::MixedAmbientGroups(first.ambient_group_key.clone(), other.ambient_group_key.clone()));
        }
    }
    let mut classes: Vec<PigeonholeClass> = Vec::new();
    for (i, c) in certs.iter().enumerate() {
        match classes.iter_mut().find(|cl| cl.bound == c.trace_ring_bound) {
            Some(cl) => cl.indices.push(i),
            None => classes.push(PigeonholeClass { bound: c.trace_ring_bound.clone(), indices: vec![i] }),
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::default_width;
    use crate::noncompact::{gen_noncompact_family, gen_noncompact_from_targets};
    use num_bigint::BigUint;

    #[test]
    fn json_round_trip() {
        let fam = gen_noncompact_family(2, 3, 3, &default_width()).unwrap();
        let text = to_json(&fam);
        assert_eq!(from_json(&text).unwrap(), fam);
        assert!(text.contains("\"schemaVersion\": 1"));
        let bumped = text.replacen("\"schemaVersion\": 1", "\"schemaVersion\": 2", 1);
        assert_eq!(from_json(&bumped), Err(Error::UnsupportedSchema(2)));
        assert!(from_json("{}").is_err());
        assert!(from_json(&text.replacen("\"k\": 1", "\"k\": 1, \"extra\": 0", 1)).is_err());
    }

    #[test]
    fn pigeonhole() {
        let w = default_width();
        let fam = gen_noncompact_family(2, 10, 3, &w).unwrap();
        let g = pigeonhole_groups(&fam).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].indices.len(), 10);
        assert!(pigeonhole_groups(&[]).unwrap().is_empty());

        let t: Vec<BigUint> = [6u32, 12, 5].iter().map(|&x| BigUint::from(x)).collect();
        let fam = gen_noncompact_from_targets(&t, 7, 3, &w).unwrap();
        let g = pigeonhole_groups(&fam).unwrap();
        let summary: Vec<(String, usize)> = g.iter().map(|c| (c.bound.to_string(), c.indices.len())).collect();
        assert_eq!(summary, [("Z[1/6]".to_string(), 2), ("Z[1/5]".to_string(), 1)]);

        let mut mixed = gen_noncompact_family(2, 1, 3, &w).unwrap();
        mixed.extend(gen_noncompact_family(2, 1, 4, &w).unwrap());
        assert!(matches!(pigeonhole_groups(&mixed), Err(Error::MixedAmbientGroups(..))));
    }
}
