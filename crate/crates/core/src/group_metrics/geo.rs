use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Population and GDP of one country.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoDenominator {
    pub country: String,
    pub population: f64,
    pub gdp_usd: f64,
}

/// Per-country denominators read from a CSV with header
/// `country,population,gdp_usd`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeoDenominators {
    by_country: BTreeMap<String, GeoDenominator>,
}

impl GeoDenominators {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut by_country = BTreeMap::new();
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        for (line, row) in csv.deserialize::<GeoDenominator>().enumerate() {
            let mut row = row?;
            row.country = row.country.to_ascii_uppercase();
            if !(row.population > 0.0 && row.gdp_usd > 0.0) {
                return Err(Error::Malformed {
                    line: line as u64 + 2,
                    message: format!("country {} needs positive population and GDP", row.country),
                });
            }
            if by_country.insert(row.country.clone(), row).is_some() {
                return Err(Error::Malformed {
                    line: line as u64 + 2,
                    message: "repeated country".into(),
                });
            }
        }
        Ok(GeoDenominators { by_country })
    }

    pub fn get(&self, country: &str) -> Option<&GeoDenominator> {
        self.by_country.get(&country.to_ascii_uppercase())
    }

    pub fn len(&self) -> usize {
        self.by_country.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_country.is_empty()
    }

    /// `value` per million inhabitants of `country`.
    pub fn per_million_people(&self, country: &str, value: f64) -> Option<f64> {
        self.get(country).map(|g| value * 1e6 / g.population)
    }

    /// `value` per billion USD of `country`'s GDP.
    pub fn per_billion_usd(&self, country: &str, value: f64) -> Option<f64> {
        self.get(country).map(|g| value * 1e9 / g.gdp_usd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_normalizes() {
        let text = "country,population,gdp_usd\nit,60000000,2.0e12\nCH, 8000000, 8e11\n";
        let g = GeoDenominators::from_reader(text.as_bytes()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.per_million_people("IT", 120.0), Some(2.0));
        assert_eq!(g.per_billion_usd("ch", 800.0), Some(1.0));
        assert_eq!(g.get("FR"), None);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(GeoDenominators::from_reader("country,population,gdp_usd\nIT,0,1\n".as_bytes()).is_err());
        assert!(GeoDenominators::from_reader("country,population,gdp_usd\nIT,1,x\n".as_bytes()).is_err());
        assert!(GeoDenominators::from_reader("country,population,gdp_usd\nIT,1,1\nit,2,2\n".as_bytes()).is_err());
    }
}
