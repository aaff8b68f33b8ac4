//! Finite discrete distributions and code-length tables over symbols, plus the
//! JSON file format `{ "symbols": [...], "mass" | "bits": [...] }`.

use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::bits::{bits_from_probability, BitLength};
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar};
use crate::symbol::SymbolId;

fn check_support(support: &[SymbolId]) -> Result<()> {
    if support.is_empty() {
        return Err(Error::InvalidDistribution("empty support".into()));
    }
    let mut seen = HashSet::with_capacity(support.len());
    for s in support {
        if !seen.insert(s) {
            return Err(Error::InvalidDistribution(format!(
                "duplicate symbol {s:?} in support"
            )));
        }
    }
    Ok(())
}

/// Probability masses over an ordered, duplicate-free support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<S> {
    support: Vec<SymbolId>,
    mass: Vec<S>,
}

impl<S: Scalar> DiscreteDistribution<S> {
    pub fn new(support: Vec<SymbolId>, mass: Vec<S>) -> Result<Self> {
        check_support(&support)?;
        if support.len() != mass.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} symbols but {} masses",
                support.len(),
                mass.len()
            )));
        }
        if let Some(bad) = mass.iter().find(|m| !(**m >= S::zero() && **m <= S::one())) {
            return Err(Error::InvalidProbability {
                value: bad.to_f64_lossy(),
            });
        }
        let sum = compensated_sum(mass.iter().copied());
        if (sum - S::one()).abs() > S::tolerance() {
            return Err(Error::ImproperDistribution {
                sum: sum.to_f64_lossy(),
            });
        }
        Ok(DiscreteDistribution { support, mass })
    }

    /// Uniform distribution over the given support.
    pub fn uniform(support: Vec<SymbolId>) -> Result<Self> {
        let n = S::of_usize(support.len());
        let mass = vec![S::one() / n; support.len()];
        Self::new(support, mass)
    }

    /// Normalises nonnegative weights into a distribution.
    pub fn from_weights(support: Vec<SymbolId>, weights: Vec<S>) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= S::zero()) || !w.is_finite()) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total = compensated_sum(weights.iter().copied());
        if total <= S::zero() {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        let mass = weights.into_iter().map(|w| w / total).collect();
        Self::new(support, mass)
    }

    pub fn support(&self) -> &[SymbolId] {
        &self.support
    }

    pub fn masses(&self) -> &[S] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn mass_of(&self, symbol: &str) -> Option<S> {
        self.support
            .iter()
            .position(|s| s.as_str() == symbol)
            .map(|i| self.mass[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SymbolId, S)> + '_ {
        self.support.iter().zip(self.mass.iter().copied())
    }

    /// Per-symbol information `log2(1/p)`.
    pub fn information(&self) -> Vec<BitLength<S>> {
        self.mass
            .iter()
            .map(|&p| bits_from_probability(p).expect("masses validated"))
            .collect()
    }
}

/// Per-symbol code lengths in bits. All lengths are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeLengthTable<S> {
    support: Vec<SymbolId>,
    length: Vec<BitLength<S>>,
}

impl<S: Scalar> CodeLengthTable<S> {
    pub fn new(support: Vec<SymbolId>, lengths: Vec<S>) -> Result<Self> {
        check_support(&support)?;
        if support.len() != lengths.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} symbols but {} lengths",
                support.len(),
                lengths.len()
            )));
        }
        let mut length = Vec::with_capacity(lengths.len());
        for l in lengths {
            let b = BitLength::new(l)?;
            if !b.is_finite() {
                return Err(Error::InvalidBitLength {
                    value: l.to_f64_lossy(),
                });
            }
            length.push(b);
        }
        Ok(CodeLengthTable { support, length })
    }

    /// Optimal (Shannon) code lengths `log2(1/p)` for a distribution with full support.
    pub fn optimal_for(dist: &DiscreteDistribution<S>) -> Result<Self> {
        let lengths = dist.information().into_iter().map(|b| b.value()).collect();
        Self::new(dist.support().to_vec(), lengths)
    }

    pub fn support(&self) -> &[SymbolId] {
        &self.support
    }

    pub fn lengths(&self) -> &[BitLength<S>] {
        &self.length
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `sum_i 2^-length_i`.
    pub fn kraft_sum(&self) -> S {
        compensated_sum(self.length.iter().map(|l| l.to_probability()))
    }

    /// Kraft inequality holds within tolerance, so the lengths admit a prefix code.
    pub fn is_proper(&self) -> bool {
        self.kraft_sum() <= S::one() + S::tolerance()
    }

    /// Kraft sum equals one within tolerance.
    pub fn is_complete(&self) -> bool {
        (self.kraft_sum() - S::one()).abs() <= S::tolerance()
    }

    pub fn require_proper(self) -> Result<Self> {
        let sum = self.kraft_sum();
        if sum > S::one() + S::tolerance() {
            return Err(Error::KraftViolation {
                sum: sum.to_f64_lossy(),
            });
        }
        Ok(self)
    }

    /// Reorders the table to follow `order`; both must hold the same symbol set.
    pub fn aligned_to(&self, order: &[SymbolId]) -> Result<Self> {
        if order.len() != self.support.len() {
            return Err(Error::SupportMismatch(format!(
                "{} symbols vs {} symbols",
                order.len(),
                self.support.len()
            )));
        }
        let mut length = Vec::with_capacity(order.len());
        for s in order {
            let i = self
                .support
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| Error::SupportMismatch(format!("symbol {s:?} missing from code table")))?;
            length.push(self.length[i]);
        }
        Ok(CodeLengthTable {
            support: order.to_vec(),
            length,
        })
    }
}

/// Masses `2^-length_i`, optionally renormalised to sum to one.
pub fn distribution_from_code<S: Scalar>(
    table: &CodeLengthTable<S>,
    normalize: bool,
) -> Result<DiscreteDistribution<S>> {
    let raw: Vec<S> = table.length.iter().map(|l| l.to_probability()).collect();
    let sum = compensated_sum(raw.iter().copied());
    if normalize {
        let mass = raw.into_iter().map(|d| d / sum).collect();
        return DiscreteDistribution::new(table.support.clone(), mass);
    }
    if sum > S::one() + S::tolerance() {
        return Err(Error::KraftViolation {
            sum: sum.to_f64_lossy(),
        });
    }
    if (sum - S::one()).abs() > S::tolerance() {
        return Err(Error::ImproperDistribution {
            sum: sum.to_f64_lossy(),
        });
    }
    DiscreteDistribution::new(table.support.clone(), raw)
}

/// On-disk form shared by world distributions and mind code tables.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub symbols: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<Vec<f64>>,
}

impl DistributionFile {
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let file: DistributionFile = serde_json::from_reader(reader)?;
        match (&file.mass, &file.bits) {
            (Some(_), Some(_)) => Err(Error::InvalidDistribution(
                "give either \"mass\" or \"bits\", not both".into(),
            )),
            (None, None) => Err(Error::InvalidDistribution(
                "missing \"mass\" or \"bits\" array".into(),
            )),
            _ => Ok(file),
        }
    }

    fn symbols(&self) -> Vec<SymbolId> {
        self.symbols.iter().map(SymbolId::new).collect()
    }

    /// Reads a probability distribution; a `bits` file is mapped through `2^-bits`.
    pub fn to_distribution<S: Scalar>(&self) -> Result<DiscreteDistribution<S>> {
        match (&self.mass, &self.bits) {
            (Some(mass), _) => {
                DiscreteDistribution::new(self.symbols(), mass.iter().map(|&m| S::of(m)).collect())
            }
            (None, Some(bits)) => {
                let table = CodeLengthTable::new(self.symbols(), bits.iter().map(|&b| S::of(b)).collect())?;
                distribution_from_code(&table, false)
            }
            (None, None) => unreachable!("validated on load"),
        }
    }

    /// Reads a code-length table; a `mass` file is mapped through `log2(1/p)`.
    pub fn to_code_table<S: Scalar>(&self) -> Result<CodeLengthTable<S>> {
        match (&self.mass, &self.bits) {
            (_, Some(bits)) => {
                CodeLengthTable::new(self.symbols(), bits.iter().map(|&b| S::of(b)).collect())
            }
            (Some(mass), None) => {
                let lengths = mass
                    .iter()
                    .map(|&m| bits_from_probability(S::of(m)).map(|b| b.value()))
                    .collect::<Result<Vec<_>>>()?;
                CodeLengthTable::new(self.symbols(), lengths)
            }
            (None, None) => unreachable!("validated on load"),
        }
    }

    pub fn from_distribution<S: Scalar>(dist: &DiscreteDistribution<S>) -> Self {
        DistributionFile {
            symbols: dist.support().iter().map(|s| s.to_string()).collect(),
            mass: Some(dist.masses().iter().map(|m| m.to_f64_lossy()).collect()),
            bits: None,
        }
    }

    pub fn from_code_table<S: Scalar>(table: &CodeLengthTable<S>) -> Self {
        DistributionFile {
            symbols: table.support().iter().map(|s| s.to_string()).collect(),
            mass: None,
            bits: Some(table.lengths().iter().map(|l| l.value().to_f64_lossy()).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn syms(n: usize) -> Vec<SymbolId> {
        (0..n).map(|i| SymbolId::new(i.to_string())).collect()
    }

    #[test]
    fn two_one_bit_codes() {
        let t = CodeLengthTable::new(syms(2), vec![1.0, 1.0]).unwrap();
        let d = distribution_from_code(&t, false).unwrap();
        assert_eq!(d.masses(), &[0.5, 0.5]);
    }

    #[test]
    fn complete_binary_code() {
        let t = CodeLengthTable::new(syms(3), vec![1.0, 2.0, 2.0]).unwrap();
        let d = distribution_from_code(&t, false).unwrap();
        assert_eq!(d.masses(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn kraft_violation_unless_normalized() {
        let t = CodeLengthTable::new(syms(3), vec![1.0f64, 1.0, 1.0]).unwrap();
        // Kraft sum = 3 * 0.5 = 1.5
        assert_eq!(t.kraft_sum(), 1.5);
        match distribution_from_code(&t, false) {
            Err(Error::KraftViolation { sum }) => assert_eq!(sum, 1.5),
            other => panic!("expected kraft-violation, got {other:?}"),
        }
        let d = distribution_from_code(&t, true).unwrap();
        for m in d.masses() {
            assert!((m - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn incomplete_code_is_improper_without_normalize() {
        let t = CodeLengthTable::new(syms(2), vec![1.0f64, 2.0]).unwrap();
        assert!(t.is_proper());
        assert!(matches!(
            distribution_from_code(&t, false),
            Err(Error::ImproperDistribution { .. })
        ));
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteDistribution::new(syms(2), vec![0.5f64, 0.6]).is_err());
        assert!(DiscreteDistribution::new(syms(2), vec![-0.5f64, 1.5]).is_err());
        let dup = vec![SymbolId::new("a"), SymbolId::new("a")];
        assert!(DiscreteDistribution::new(dup, vec![0.5f64, 0.5]).is_err());
        assert!(CodeLengthTable::new(syms(1), vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn file_round_trip_and_conversion() {
        let json = r#"{"symbols":["a","b"],"mass":[0.25,0.75]}"#;
        let f = DistributionFile::from_reader(json.as_bytes()).unwrap();
        let d: DiscreteDistribution<f64> = f.to_distribution().unwrap();
        assert_eq!(d.mass_of("b"), Some(0.75));
        let t: CodeLengthTable<f64> = f.to_code_table().unwrap();
        assert_eq!(t.lengths()[0].value(), 2.0);

        let both = r#"{"symbols":["a"],"mass":[1.0],"bits":[0.0]}"#;
        assert!(DistributionFile::from_reader(both.as_bytes()).is_err());
        let neither = r#"{"symbols":["a"]}"#;
        assert!(DistributionFile::from_reader(neither.as_bytes()).is_err());
    }

    #[test]
    fn align_reorders_by_symbol() {
        let t = CodeLengthTable::new(vec!["b".into(), "a".into()], vec![2.0f64, 1.0]).unwrap();
        let a = t.aligned_to(&["a".into(), "b".into()]).unwrap();
        assert_eq!(a.lengths()[0].value(), 1.0);
        assert!(t.aligned_to(&["a".into(), "c".into()]).is_err());
    }

    proptest! {
        // Complete codes: lengths of a full binary tree built by repeated splitting.
        #[test]
        fn complete_code_lengths_recovered(splits in proptest::collection::vec(0usize..32, 0..20)) {
            let mut lengths: Vec<u32> = vec![0];
            for s in splits {
                let i = s % lengths.len();
                let l = lengths.remove(i);
                lengths.push(l + 1);
                lengths.push(l + 1);
            }
            let table = CodeLengthTable::new(
                syms(lengths.len()),
                lengths.iter().map(|&l| l as f64).collect(),
            ).unwrap();
            prop_assert!(table.is_complete());
            let d = distribution_from_code(&table, false).unwrap();
            for (m, l) in d.masses().iter().zip(table.lengths()) {
                let back = bits_from_probability(*m).unwrap().value();
                prop_assert!((back - l.value()).abs() < 1e-9);
            }
        }
    }
}
