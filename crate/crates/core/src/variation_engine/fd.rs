use super::path::PathIntegrator;
use crate::bakry_emery::KahlerState;
use crate::error::{contract, Result};
use crate::spectral_fields::{linf, TensorField};

/// Central differences on an eps ladder with Richardson extrapolation.
#[derive(Clone, Debug)]
pub struct FdDerivative {
    /// Extrapolated derivative at t = 0.
    pub value: TensorField,
    /// Raw central differences, one per ladder entry.
    pub central: Vec<TensorField>,
    /// Empirical convergence order of the raw differences; infinite when
    /// they already agree to rounding (quantities affine in t).
    pub order: f64,
}

/// d/dt Q(state_t) at t = 0 along the integrated path. The ladder must halve
/// at each step (the default one does).
pub fn fd_derivative(
    path: &PathIntegrator,
    quantity: impl Fn(&KahlerState) -> Result<TensorField>,
) -> Result<FdDerivative> {
    let ladder = path.ladder.clone();
    if ladder.len() < 2 {
        return contract("an eps ladder needs at least two entries");
    }
    let mut central = Vec::with_capacity(ladder.len());
    for &eps in &ladder {
        let qp = quantity(&path.state_at(eps)?)?;
        let qm = quantity(&path.state_at(-eps)?)?;
        central.push(qp.sub(&qm)?.scale(0.5 / eps));
    }
    // Richardson tableau for an even error expansion in eps
    let mut level = central.clone();
    let mut factor = 4.0;
    while level.len() > 1 {
        level = level
            .windows(2)
            .map(|w| w[1].scale(factor / (factor - 1.0)).sub(&w[0].scale(1.0 / (factor - 1.0))))
            .collect::<Result<_>>()?;
        factor *= 4.0;
    }
    let value = level.pop().expect("ladder is non-empty");
    let order = if central.len() >= 3 {
        let size = linf(&central[central.len() - 1]).max(1.0);
        let d1 = linf(&central[central.len() - 3].sub(&central[central.len() - 2])?);
        let d2 = linf(&central[central.len() - 2].sub(&central[central.len() - 1])?);
        if d1 <= 1e-12 * size && d2 <= 1e-12 * size {
            f64::INFINITY
        } else {
            (d1 / d2).log2() / (ladder[ladder.len() - 3] / ladder[ladder.len() - 2]).log2()
        }
    } else {
        f64::NAN
    };
    Ok(FdDerivative { value, central, order })
}
