//! Experiments built on the Calderón–Zygmund decomposition: weak type `(1,1)` of singular
//! integrals, the constructive K-closedness of `(H_1(P), H_2(P))` and the Sobolev
//! K-functional equivalence, over reproducible random instance families.
//!
//! Every experiment emits [`ReportRow`]s. Each row carries the measured quantities and the
//! inequalities of the underlying proof with both sides; [`Inequality::holds`] is the
//! hard check.

mod instances;
mod kclosed;
mod operator;
mod sobolev;
mod weak_type;

pub use instances::{Instance, InstanceGen, InstanceKind};
pub use kclosed::{kclosed_decompose, kclosed_row, kclosed_sweep, KClosedResult, KClosedSweep, KCLOSED_TOL};
pub use operator::Operator;
pub use sobolev::{sobolev_k_experiment, sobolev_witness, SobolevWitness};
pub use weak_type::{weak_type_experiment, WeakTypeReport};

use serde::{Deserialize, Serialize};

use crate::czd::{cz_decompose, cz_decompose_vector};
use crate::ncmeasure::{GridSpec, MatrixField};
use crate::Result;

/// Additive slack of the hard inequality checks, scaled by `max(1, |rhs|)`.
pub const SLACK: f64 = 1e-9;

/// `lhs ≤ rhs`, as measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Inequality {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + SLACK * self.rhs.abs().max(1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
}

/// One measurement: an instance at one parameter value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub operator: String,
    pub d: usize,
    pub level: u32,
    pub m: usize,
    pub instance: usize,
    pub seed: u64,
    /// `"s"` or `"t"`.
    pub parameter: String,
    pub value: f64,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Inequality>,
}

impl ReportRow {
    pub fn new(experiment: &str, operator: &str, spec: &GridSpec, instance: usize, seed: u64, parameter: &str, value: f64) -> Self {
        ReportRow {
            experiment: experiment.into(),
            operator: operator.into(),
            d: spec.d,
            level: spec.level,
            m: spec.m,
            instance,
            seed,
            parameter: parameter.into(),
            value,
            quantities: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, value: f64) {
        self.quantities.push(Quantity {
            name: name.into(),
            value,
        });
    }

    pub fn check(&mut self, name: &str, lhs: f64, rhs: f64) {
        self.checks.push(Inequality::new(name, lhs, rhs));
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.iter().find(|q| q.name == name).map(|q| q.value)
    }

    pub fn violations(&self) -> Vec<&Inequality> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }
}

/// Sort key used before writing: instance, then parameter.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| {
        (a.level, a.instance)
            .cmp(&(b.level, b.instance))
            .then(a.value.total_cmp(&b.value))
    });
}

/// `c_{L+1} / c_L`; stability within a factor 2 means a ratio in `[1/2, 2]`.
pub fn refinement_ratio(coarse: f64, fine: f64) -> f64 {
    if coarse == 0.0 && fine == 0.0 {
        1.0
    } else {
        fine / coarse
    }
}

pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub(crate) fn tuple_l1(fields: &[MatrixField]) -> f64 {
    fields.iter().map(MatrixField::l1_norm).sum()
}

pub(crate) fn tuple_l2(fields: &[MatrixField]) -> f64 {
    fields.iter().map(|f| f.l2_norm().powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn tuple_sub(a: &[MatrixField], b: &[MatrixField]) -> Vec<MatrixField> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub(crate) fn tuple_add(a: &[MatrixField], b: &[MatrixField]) -> Vec<MatrixField> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

/// Which decomposition produced a [`Split`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `y = 0`: nothing to decompose.
    Guard,
    /// `s` below the total mass: `a = 0`, `b = y`, `p = 0`.
    Trivial,
    /// Calderón–Zygmund decomposition.
    Cz,
}

impl Branch {
    pub fn code(&self) -> f64 {
        match self {
            Branch::Guard => 0.0,
            Branch::Trivial => 1.0,
            Branch::Cz => 2.0,
        }
    }
}

/// Decomposition `y = a + b_d + b_o` of a tuple with a shared projection `p`.
#[derive(Clone, Debug)]
pub struct Split {
    pub a: Vec<MatrixField>,
    pub b_d: Vec<MatrixField>,
    pub b_o: Vec<MatrixField>,
    pub p: MatrixField,
    pub branch: Branch,
}

impl Split {
    pub fn b(&self) -> Vec<MatrixField> {
        tuple_add(&self.b_d, &self.b_o)
    }

    /// Trace of `1 − p` on the direct sum.
    pub fn p_perp_trace(&self) -> f64 {
        let spec = *self.p.spec();
        self.a.len() as f64 * MatrixField::identity(spec).sub(&self.p).trace().re
    }
}

/// Decomposition of `y` at threshold `s`. Below the total mass `s < Σ_k ‖y_k‖₁` the whole
/// torus is a bad cube and the trivial decomposition `a = 0`, `b = y`, `p = 0` is used; above
/// it every top-cube mean `E_0 y_k` has norm at most `s`.
pub fn bourgain_split(fields: &[MatrixField], s: f64) -> Result<Split> {
    let spec = *fields[0].spec();
    let zeros = || vec![MatrixField::zeros(spec); fields.len()];
    if s < tuple_l1(fields) {
        return Ok(Split {
            a: zeros(),
            b_d: fields.to_vec(),
            b_o: zeros(),
            p: MatrixField::zeros(spec),
            branch: Branch::Trivial,
        });
    }
    if fields.len() == 1 {
        let cz = cz_decompose(&fields[0], s)?;
        Ok(Split {
            a: vec![cz.a],
            b_d: vec![cz.b_d],
            b_o: vec![cz.b_o],
            p: cz.p,
            branch: Branch::Cz,
        })
    } else {
        let cz = cz_decompose_vector(fields, s)?;
        Ok(Split {
            a: cz.components.iter().map(|c| c.a.clone()).collect(),
            b_d: cz.components.iter().map(|c| c.b_d.clone()).collect(),
            b_o: cz.components.iter().map(|c| c.b_o.clone()).collect(),
            p: cz.p,
            branch: Branch::Cz,
        })
    }
}
