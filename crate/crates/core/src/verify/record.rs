//! Report types shared by every suite.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `f64` that serializes non-finite values as the strings `"inf"`,
/// `"-inf"` and `"nan"` (JSON has no literal for them).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            ser.serialize_f64(v)
        } else if v.is_nan() {
            ser.serialize_str("nan")
        } else if v > 0.0 {
            ser.serialize_str("inf")
        } else {
            ser.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            F(f64),
            S(String),
        }
        match Raw::deserialize(de)? {
            Raw::F(v) => Ok(Num(v)),
            Raw::S(s) => match s.as_str() {
                "inf" => Ok(Num(f64::INFINITY)),
                "-inf" => Ok(Num(f64::NEG_INFINITY)),
                "nan" => Ok(Num(f64::NAN)),
                _ => Err(serde::de::Error::custom(format!("bad number `{s}`"))),
            },
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// `0/0`: the inequality holds trivially and says nothing.
    Vacuous,
    /// Diagnostic value with no threshold.
    Recorded,
}

impl Verdict {
    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

/// Comparison a check asserts between its value and bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    /// NaN never satisfies a relation.
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Relation::Le => value <= bound,
            Relation::Lt => value < bound,
            Relation::Ge => value >= bound,
            Relation::Gt => value > bound,
        }
    }

    pub fn judge(self, value: f64, bound: f64) -> Verdict {
        if self.holds(value, bound) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One evaluated case: inputs plus measured quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub label: String,
    pub inputs: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lhs: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratio: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<Num>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub extra: BTreeMap<String, Num>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CaseRecord {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            inputs: BTreeMap::new(),
            lhs: None,
            rhs: None,
            ratio: None,
            residual: None,
            tolerance: None,
            extra: BTreeMap::new(),
            verdict: Verdict::Recorded,
            note: None,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn sides(mut self, lhs: f64, rhs: f64) -> Self {
        self.lhs = Some(Num(lhs));
        self.rhs = Some(Num(rhs));
        self
    }

    pub fn ratio(mut self, r: f64) -> Self {
        self.ratio = Some(Num(r));
        self
    }

    pub fn extra(mut self, key: &str, v: f64) -> Self {
        self.extra.insert(key.to_string(), Num(v));
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }

    pub fn with_verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }

    /// Sets `residual` and the verdict `residual <= tolerance`.
    pub fn judged(mut self, residual: f64, tolerance: f64) -> Self {
        self.residual = Some(Num(residual));
        self.tolerance = Some(Num(tolerance));
        self.verdict = Relation::Le.judge(residual, tolerance);
        self
    }
}

/// An aggregate assertion over several cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Num,
    pub relation: Relation,
    pub bound: Num,
    pub verdict: Verdict,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Self {
        Self {
            name: name.into(),
            value: Num(value),
            relation,
            bound: Num(bound),
            verdict: relation.judge(value, bound),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub config: serde_json::Value,
    pub cases: Vec<CaseRecord>,
    pub checks: Vec<Check>,
    pub fits: BTreeMap<String, Num>,
    pub orders: BTreeMap<String, Num>,
    pub warnings: Vec<String>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn new(suite: &str, config: serde_json::Value) -> Self {
        Self {
            suite: suite.to_string(),
            config,
            cases: Vec::new(),
            checks: Vec::new(),
            fits: BTreeMap::new(),
            orders: BTreeMap::new(),
            warnings: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn check(&mut self, name: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Verdict {
        let c = Check::new(name, value, relation, bound);
        let v = c.verdict;
        self.checks.push(c);
        v
    }

    pub fn fit(&mut self, key: impl Into<String>, v: f64) {
        self.fits.insert(key.into(), Num(v));
    }

    pub fn order(&mut self, key: impl Into<String>, v: f64) {
        self.orders.insert(key.into(), Num(v));
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Fails iff any case or check fails; vacuous and recorded entries
    /// never decide the outcome.
    pub fn finish(mut self) -> Self {
        let failed = self.cases.iter().any(|c| c.verdict.is_fail()) || self.checks.iter().any(|c| c.verdict.is_fail());
        self.verdict = if failed { Verdict::Fail } else { Verdict::Pass };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_round_trip() {
        let v = vec![Num(1.5), Num(f64::INFINITY), Num(f64::NEG_INFINITY)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.5,"inf","-inf"]"#);
        let back: Vec<Num> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let nan: Num = serde_json::from_str(r#""nan""#).unwrap();
        assert!(nan.0.is_nan());
    }

    #[test]
    fn nan_fails_every_relation() {
        for r in [Relation::Le, Relation::Lt, Relation::Ge, Relation::Gt] {
            assert_eq!(r.judge(f64::NAN, 1.0), Verdict::Fail);
        }
    }

    #[test]
    fn vacuous_cases_do_not_fail_a_report() {
        let mut r = VerificationReport::new("x", serde_json::Value::Null);
        r.cases.push(CaseRecord::new("c").with_verdict(Verdict::Vacuous));
        assert!(r.finish().passed());
    }
}
