//! The raw admissions market as users write it down, and its JSON form.
//!
//! A [`Market`] is exactly what the interchange format carries: an outside
//! option `t0`, a budget, and schools in input order. Solvers never see it
//! directly; they work on a [`CanonicalMarket`](crate::CanonicalMarket)
//! produced by [`canonicalize`](crate::canonicalize).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct School {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Utility of attending.
    pub t: f64,
    /// Admission probability.
    pub f: f64,
    /// Application cost.
    pub g: f64,
}

impl School {
    pub fn new(t: f64, f: f64, g: f64) -> Self {
        School {
            label: None,
            t,
            f,
            g,
        }
    }

    pub fn labeled(label: impl Into<String>, t: f64, f: f64, g: f64) -> Self {
        School {
            label: Some(label.into()),
            t,
            f,
            g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Market {
    /// Utility of not attending any school.
    #[serde(default)]
    pub t0: f64,
    pub budget: f64,
    pub schools: Vec<School>,
}

impl Market {
    pub fn new(t0: f64, budget: f64, schools: Vec<School>) -> Self {
        Market {
            t0,
            budget,
            schools,
        }
    }

    /// Builds an unlabeled market from parallel columns.
    ///
    /// Panics if the columns differ in length.
    pub fn from_columns(t0: f64, t: &[f64], f: &[f64], g: &[f64], budget: f64) -> Self {
        assert!(
            t.len() == f.len() && f.len() == g.len(),
            "column lengths differ"
        );
        let schools = t
            .iter()
            .zip(f)
            .zip(g)
            .map(|((&t, &f), &g)| School::new(t, f, g))
            .collect();
        Market::new(t0, budget, schools)
    }

    /// Unit costs with a cardinality limit `h`.
    pub fn homogeneous(t: &[f64], f: &[f64], h: usize) -> Self {
        let g = vec![1.0; t.len()];
        Market::from_columns(0.0, t, f, &g, h as f64)
    }

    pub fn len(&self) -> usize {
        self.schools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schools.is_empty()
    }

    /// Checks the schema-level invariants: finite numbers, `f` in (0, 1],
    /// `g > 0`, `budget > 0`.
    pub fn validate(&self) -> Result<()> {
        if !self.t0.is_finite() {
            return Err(Error::invalid_at("t0", "must be a finite number"));
        }
        if !self.budget.is_finite() || self.budget <= 0.0 {
            return Err(Error::invalid_at(
                "budget",
                "must be a positive finite number",
            ));
        }
        for (i, s) in self.schools.iter().enumerate() {
            if !s.t.is_finite() {
                return Err(Error::invalid_at(
                    format!("schools[{i}].t"),
                    "must be a finite number",
                ));
            }
            if !(s.f.is_finite() && s.f > 0.0 && s.f <= 1.0) {
                return Err(Error::invalid_at(
                    format!("schools[{i}].f"),
                    format!("admission probability must lie in (0, 1], got {}", s.f),
                ));
            }
            if !(s.g.is_finite() && s.g > 0.0) {
                return Err(Error::invalid_at(
                    format!("schools[{i}].g"),
                    format!("application cost must be positive, got {}", s.g),
                ));
            }
        }
        Ok(())
    }

    /// Total cost of the schools at `members` (input indices).
    pub fn cost(&self, members: &[usize]) -> f64 {
        members.iter().map(|&i| self.schools[i].g).sum()
    }

    /// Expected utility of applying to `members` (input indices), including
    /// the outside option. Works on raw, unsorted markets.
    pub fn valuate(&self, members: &[usize]) -> Result<f64> {
        let mut order: Vec<usize> = members.to_vec();
        for &i in &order {
            if i >= self.schools.len() {
                return Err(Error::invalid(format!(
                    "school index {i} out of range for a market of {} schools",
                    self.schools.len()
                )));
            }
        }
        order.sort_unstable();
        order.dedup();
        order.sort_by(|&a, &b| {
            self.schools[a]
                .t
                .total_cmp(&self.schools[b].t)
                .then(a.cmp(&b))
        });
        let mut value = self.t0;
        for i in order {
            let s = &self.schools[i];
            if s.t > self.t0 {
                value = (1.0 - s.f) * value + s.f * s.t;
            }
        }
        Ok(value)
    }

    /// Display name of the school at input index `i` (1-based fallback).
    pub fn name(&self, i: usize) -> String {
        match &self.schools[i].label {
            Some(l) => l.clone(),
            None => format!("school {}", i + 1),
        }
    }
}

/// Parses a market from JSON, reporting the failing field path on error.
pub fn read_market(json: &str) -> Result<Market> {
    let mut de = serde_json::Deserializer::from_str(json);
    let market: Market = serde_path_to_error::deserialize(&mut de).map_err(path_error)?;
    de.end().map_err(|e| Error::invalid(e.to_string()))?;
    market.validate()?;
    Ok(market)
}

/// Serializes a market as pretty JSON with a trailing newline.
pub fn write_market(market: &Market) -> String {
    let mut s = serde_json::to_string_pretty(market).expect("market serialization cannot fail");
    s.push('\n');
    s
}

/// Converts a path-tracking serde failure into an [`Error::Invalid`].
pub fn path_error(err: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = err.path().to_string();
    let inner = err.into_inner();
    Error::Invalid {
        path: if path == "." { None } else { Some(path) },
        message: inner.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_probability_above_one_with_path() {
        let json = r#"{"t0":0,"budget":2,"schools":[{"t":1,"f":0.5,"g":1},{"t":2,"f":1.2,"g":1}]}"#;
        let err = read_market(json).unwrap_err();
        assert_eq!(err.path(), Some("schools[1].f"));
    }

    #[test]
    fn rejects_unknown_fields() {
        let json = r#"{"t0":0,"budget":2,"schools":[{"t":1,"f":0.5,"g":1,"rank":3}]}"#;
        let err = read_market(json).unwrap_err();
        assert!(err.path().unwrap().starts_with("schools[0]"), "{err:?}");
    }

    #[test]
    fn reports_type_errors_with_path() {
        let json = r#"{"t0":0,"budget":2,"schools":[{"t":"high","f":0.5,"g":1}]}"#;
        let err = read_market(json).unwrap_err();
        assert_eq!(err.path(), Some("schools[0].t"));
    }

    #[test]
    fn accepts_empty_school_list() {
        let m = read_market(r#"{"t0":0,"budget":1,"schools":[]}"#).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn rejects_nonpositive_budget() {
        let err = read_market(r#"{"t0":0,"budget":0,"schools":[]}"#).unwrap_err();
        assert_eq!(err.path(), Some("budget"));
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert!(read_market(r#"{"t0":0,"budget":1,"schools":[]} x"#).is_err());
    }

    #[test]
    fn raw_valuation_ignores_schools_below_outside_option() {
        let m = Market::from_columns(5.0, &[3.0, 10.0], &[0.5, 0.5], &[1.0, 1.0], 2.0);
        assert_eq!(m.valuate(&[0]).unwrap(), 5.0);
        assert_eq!(m.valuate(&[0, 1]).unwrap(), 7.5);
    }
}
