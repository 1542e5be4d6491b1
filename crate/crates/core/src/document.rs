//! Weights documents: `{"alpha": …, "rule": …, "weights": {label: value}}`.
//!
//! Exact weights are written as `"p/q"` strings and floats as JSON numbers,
//! so reading a document back gives the same vector bit for bit.

use serde_json::{json, Map, Value as Json};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational, Q};
use crate::weights::WeightVector;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightsDocument {
    /// Absent for graph-level rules.
    pub alpha: Option<f64>,
    pub rule: String,
    pub labels: Vec<String>,
    pub weights: WeightVector,
}

impl WeightsDocument {
    pub fn new(alpha: Option<f64>, rule: impl Into<String>, labels: Vec<String>, weights: WeightVector) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::Schema(format!("{} labels for {} weights", labels.len(), weights.len())));
        }
        Ok(WeightsDocument { alpha, rule: rule.into(), labels, weights })
    }

    pub fn to_json(&self) -> Json {
        let mut w = Map::new();
        for (i, l) in self.labels.iter().enumerate() {
            let v = match &self.weights {
                WeightVector::Exact(x) => Json::String(format_rational(&x[i])),
                WeightVector::Float(x) => json!(x[i]),
            };
            w.insert(l.clone(), v);
        }
        let mut doc = Map::new();
        if let Some(a) = self.alpha {
            doc.insert("alpha".into(), json!(a));
        }
        doc.insert("rule".into(), json!(self.rule));
        doc.insert("weights".into(), Json::Object(w));
        Json::Object(doc)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("documents always serialize")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Json = serde_json::from_str(text)?;
        let obj = doc.as_object().ok_or_else(|| Error::Schema("weights document must be an object".into()))?;
        let alpha = match obj.get("alpha") {
            None | Some(Json::Null) => None,
            Some(a) => Some(a.as_f64().ok_or_else(|| Error::Schema("`alpha` must be a number".into()))?),
        };
        let rule = obj.get("rule").and_then(Json::as_str).ok_or_else(|| Error::Schema("missing `rule`".into()))?;
        let entries = obj
            .get("weights")
            .and_then(Json::as_object)
            .ok_or_else(|| Error::Schema("missing `weights` object".into()))?;
        let labels: Vec<String> = entries.keys().cloned().collect();
        let weights = if entries.values().all(Json::is_string) {
            WeightVector::Exact(entries.values().map(|v| parse_rational(v.as_str().unwrap_or_default())).collect::<Result<Vec<Q>>>()?)
        } else {
            let floats = entries
                .iter()
                .map(|(l, v)| v.as_f64().ok_or_else(|| Error::Schema(format!("weight of `{l}` is not a number"))))
                .collect::<Result<Vec<f64>>>()?;
            WeightVector::Float(floats)
        };
        Self::new(alpha, rule, labels, weights)
    }

    /// `label,weight` rows; rule and alpha are not carried.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "weight"])?;
        for (i, l) in self.labels.iter().enumerate() {
            w.write_record([l.as_str(), self.weights.format_entry(i).as_str()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Schema(e.to_string()))
    }

    /// Exact when every entry is written `p/q`.
    pub fn from_csv(text: &str, rule: impl Into<String>, alpha: Option<f64>) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut labels = Vec::new();
        let mut raw = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::Schema(format!("expected `label,weight`, got {} fields", rec.len())));
            }
            labels.push(rec[0].to_string());
            raw.push(rec[1].trim().to_string());
        }
        let weights = if raw.iter().all(|s| s.contains('/')) {
            WeightVector::Exact(raw.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)
        } else {
            WeightVector::Float(
                raw.iter()
                    .map(|s| s.parse::<f64>().map_err(|_| Error::Schema(format!("not a number: `{s}`"))))
                    .collect::<Result<_>>()?,
            )
        };
        Self::new(alpha, rule, labels, weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::q;
    use proptest::prelude::*;

    fn exact() -> WeightsDocument {
        let w = WeightVector::Exact(vec![q(17, 60), q(17, 60), q(13, 30)]);
        WeightsDocument::new(Some(1.0), "cu", vec!["p".into(), "q".into(), "r".into()], w).unwrap()
    }

    #[test]
    fn json_layout() {
        let text = exact().to_json_string();
        let v: Json = serde_json::from_str(&text).unwrap();
        assert_eq!(v["weights"]["r"], "13/30");
        assert_eq!(v["alpha"], 1.0);
        assert_eq!(v["rule"], "cu");
        assert!(text.find("\"p\"").unwrap() < text.find("\"r\"").unwrap());
    }

    #[test]
    fn exact_round_trips() {
        let d = exact();
        assert_eq!(WeightsDocument::from_json_str(&d.to_json_string()).unwrap(), d);
        assert_eq!(WeightsDocument::from_csv(&d.to_csv().unwrap(), "cu", Some(1.0)).unwrap(), d);
    }

    #[test]
    fn malformed_documents_are_schema_errors() {
        for bad in ["[]", r#"{"weights":{}}"#, r#"{"rule":"cu","weights":{"a":true}}"#, r#"{"rule":"cu"}"#] {
            assert!(matches!(WeightsDocument::from_json_str(bad), Err(Error::Schema(_))), "{bad}");
        }
        assert!(WeightsDocument::from_csv("label,weight\na,b,c\n", "cu", None).is_err());
        assert!(WeightsDocument::new(None, "cu", vec![], WeightVector::uniform(2)).is_err());
    }

    proptest! {
        #[test]
        fn float_round_trips(ws in prop::collection::vec(0.0f64..1.0, 1..12)) {
            let labels = (0..ws.len()).map(|i| format!("e{i}")).collect();
            let d = WeightsDocument::new(None, "entropy", labels, WeightVector::Float(ws)).unwrap();
            prop_assert_eq!(&WeightsDocument::from_json_str(&d.to_json_string()).unwrap(), &d);
            prop_assert_eq!(&WeightsDocument::from_csv(&d.to_csv().unwrap(), "entropy", None).unwrap(), &d);
        }

        #[test]
        fn rational_round_trips(parts in prop::collection::vec((0i64..1000, 1i64..1000), 1..12)) {
            let labels = (0..parts.len()).map(|i| format!("e{i}")).collect();
            let w = WeightVector::Exact(parts.iter().map(|&(a, b)| q(a, b)).collect());
            let d = WeightsDocument::new(Some(0.5), "mcca", labels, w).unwrap();
            prop_assert_eq!(&WeightsDocument::from_json_str(&d.to_json_string()).unwrap(), &d);
        }
    }
}
