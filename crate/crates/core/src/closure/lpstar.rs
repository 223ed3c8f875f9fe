use crate::error::{Error, Result};
use crate::instance::{IlpInstance, InstanceClass};
use crate::lp::{LpModel, LpResult};
use crate::rational::Rational;

/// Columns with some coefficient larger than its row's right-hand side.
pub fn oversized_columns(inst: &IlpInstance) -> Vec<usize> {
    (0..inst.n())
        .filter(|&j| inst.rows.iter().any(|r| r.coeffs[j] > r.rhs))
        .collect()
}

/// Packing LP with every oversized column fixed to zero.
pub fn lp_star(inst: &IlpInstance) -> Result<LpResult> {
    let class = inst.classify()?;
    if class != InstanceClass::Packing {
        return Err(Error::Class(format!(
            "pre-processed LP needs a packing instance, got {class}"
        )));
    }
    let mut lp = LpModel::from_instance(inst);
    for j in oversized_columns(inst) {
        lp.set_var_bounds(j, Some(Rational::zero()), Some(Rational::zero()));
    }
    Ok(lp.solve())
}
