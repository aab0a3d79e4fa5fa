use std::fmt;

use crate::linalg::C64;
use crate::multipliers::{
    apply_multiplier, leray_complement, leray_projection, leray_symbol, riesz_complement, riesz_projection, Symbol,
};
use crate::ncmeasure::{GridSpec, MatrixField};
use crate::{Error, Result};

/// Operators the experiments run on.
///
/// Tags: `riesz`, `riesz_complement`, `leray`, `leray_complement` and `leray_ij` with
/// 1-based axes, e.g. `leray_12` for the multiplier `ρ_{12}(n) = −n₁n₂/|n|²`.
#[derive(Clone, Debug)]
pub enum Operator {
    Riesz,
    RieszComplement,
    /// Scalar entry `ρ_ij` of the Leray symbol (0-based axes).
    LerayEntry { i: usize, j: usize },
    Leray,
    LerayComplement,
    Multiplier(Symbol),
}

impl Operator {
    pub fn parse(tag: &str) -> Result<Self> {
        match tag {
            "riesz" => return Ok(Operator::Riesz),
            "riesz_complement" => return Ok(Operator::RieszComplement),
            "leray" => return Ok(Operator::Leray),
            "leray_complement" => return Ok(Operator::LerayComplement),
            _ => {}
        }
        if let Some(rest) = tag.strip_prefix("leray_") {
            let digits: Vec<u32> = rest.chars().filter_map(|c| c.to_digit(10)).collect();
            if rest.len() == 2 && digits.len() == 2 && digits.iter().all(|&v| (1..=3).contains(&v)) {
                return Ok(Operator::LerayEntry {
                    i: digits[0] as usize - 1,
                    j: digits[1] as usize - 1,
                });
            }
        }
        Err(Error::UnknownOperator(tag.into()))
    }

    pub fn tag(&self) -> String {
        match self {
            Operator::Riesz => "riesz".into(),
            Operator::RieszComplement => "riesz_complement".into(),
            Operator::LerayEntry { i, j } => format!("leray_{}{}", i + 1, j + 1),
            Operator::Leray => "leray".into(),
            Operator::LerayComplement => "leray_complement".into(),
            Operator::Multiplier(s) => format!("multiplier_{}", s.name),
        }
    }

    /// Number of components the operator acts on: `d` for the tuple projections, else 1.
    pub fn components(&self, d: usize) -> usize {
        match self {
            Operator::Leray | Operator::LerayComplement => d,
            _ => 1,
        }
    }

    pub fn is_projection(&self) -> bool {
        match self {
            Operator::LerayEntry { .. } => false,
            Operator::Multiplier(s) => s.is_projection(),
            _ => true,
        }
    }

    /// Checks that the operator is defined on `spec`.
    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        match self {
            Operator::Riesz | Operator::RieszComplement if spec.d != 1 => {
                Err(Error::arg("operator", format!("{} needs d = 1, got d = {}", self.tag(), spec.d)))
            }
            Operator::Leray | Operator::LerayComplement if spec.d < 2 => {
                Err(Error::arg("operator", format!("{} needs d ≥ 2, got d = {}", self.tag(), spec.d)))
            }
            Operator::LerayEntry { i, j } if spec.d < 2 || *i >= spec.d || *j >= spec.d => Err(Error::arg(
                "operator",
                format!("{} is not defined for d = {}", self.tag(), spec.d),
            )),
            Operator::Multiplier(s) if s.dim() != spec.d || s.level() != spec.level => Err(Error::arg(
                "operator",
                format!("symbol grid (d = {}, L = {}) does not match the field grid", s.dim(), s.level()),
            )),
            _ => Ok(()),
        }
    }

    fn entry_symbol(spec: &GridSpec, i: usize, j: usize) -> Symbol {
        Symbol::from_fn(format!("leray_{}{}", i + 1, j + 1), spec.d, spec.level, |n| {
            C64::new(leray_symbol(n)[(i, j)], 0.0)
        })
    }

    /// The scalar operator applied to one field.
    pub fn apply(&self, f: &MatrixField) -> Result<MatrixField> {
        self.validate(f.spec())?;
        match self {
            Operator::Riesz => riesz_projection(f),
            Operator::RieszComplement => riesz_complement(f),
            Operator::LerayEntry { i, j } => apply_multiplier(&Self::entry_symbol(f.spec(), *i, *j), f),
            Operator::Multiplier(s) => apply_multiplier(s, f),
            Operator::Leray | Operator::LerayComplement => Err(Error::arg(
                "operator",
                format!("{} acts on d-tuples; use `project`", self.tag()),
            )),
        }
    }

    /// The operator on a tuple of `components(d)` fields.
    pub fn project(&self, fields: &[MatrixField]) -> Result<Vec<MatrixField>> {
        let spec = *fields
            .first()
            .ok_or_else(|| Error::arg("fields", "empty tuple"))?
            .spec();
        self.validate(&spec)?;
        if fields.len() != self.components(spec.d) {
            return Err(Error::arg(
                "fields",
                format!("{} expects {} components, got {}", self.tag(), self.components(spec.d), fields.len()),
            ));
        }
        match self {
            Operator::Leray => leray_projection(fields),
            Operator::LerayComplement => leray_complement(fields),
            _ => Ok(vec![self.apply(&fields[0])?]),
        }
    }

    /// `‖T‖_{L₂ → L₂}`: the largest symbol modulus on the frequency box.
    pub fn l2_norm(&self, spec: &GridSpec) -> f64 {
        match self {
            Operator::LerayEntry { i, j } => Self::entry_symbol(spec, *i, *j).sup(),
            Operator::Multiplier(s) => s.sup(),
            _ => 1.0,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}
