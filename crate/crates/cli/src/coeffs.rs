use wdistill::WCoefficients;

use crate::CliError;

/// Drift in `a² + b² + c²` that is silently absorbed.
const SILENT_DRIFT: f64 = 1e-12;
/// Drift above this is rejected instead of renormalized.
pub const MAX_DRIFT: f64 = 1e-6;

/// Parses a number or a fraction such as `1/3`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            num / den
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

/// Parses `x,y,z`.
pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_number(part)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub enum CoefficientInput {
    Amplitudes([f64; 3]),
    Squares([f64; 3]),
}

/// Validated coefficients plus what was done to get them.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub w: WCoefficients,
    /// `permutation[i]` is the input position of the i-th sorted coefficient.
    pub permutation: Option<[usize; 3]>,
    pub warnings: Vec<String>,
}

pub fn resolve(input: CoefficientInput, allow_unsorted: bool) -> Result<Resolved, CliError> {
    let squares = match input {
        CoefficientInput::Amplitudes(v) => {
            if let Some(x) = v.iter().find(|x| **x < 0.0) {
                return Err(CliError::Usage(format!("amplitude {x} is negative")));
            }
            v.map(|x| x * x)
        }
        CoefficientInput::Squares(v) => {
            if let Some(x) = v.iter().find(|x| **x < 0.0) {
                return Err(CliError::Usage(format!("squared coefficient {x} is negative")));
            }
            v
        }
    };
    let mut warnings = Vec::new();

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| squares[j].total_cmp(&squares[i]));
    let permutation = if order == [0, 1, 2] {
        None
    } else if allow_unsorted {
        warnings.push(format!(
            "coefficients reordered to a >= b >= c (sorted position i takes input {order:?}[i])"
        ));
        Some(order)
    } else {
        return Err(CliError::Usage(format!(
            "coefficients must satisfy a >= b >= c, got squares {squares:?} (pass --allow-unsorted to reorder)"
        )));
    };
    let sorted = order.map(|i| squares[i]);

    let total: f64 = sorted.iter().sum();
    let drift = (total - 1.0).abs();
    if drift > MAX_DRIFT {
        return Err(CliError::Usage(format!(
            "a^2 + b^2 + c^2 = {total}, off by {drift:e} (more than {MAX_DRIFT:e})"
        )));
    }
    if drift > SILENT_DRIFT {
        warnings.push(format!("renormalized coefficients (a^2 + b^2 + c^2 was {total})"));
    }
    let [a2, b2, c2] = sorted.map(|x| x / total);
    if c2 == 0.0 {
        warnings.push("c = 0: the W state is never produced".to_owned());
    }
    let w = WCoefficients::from_squares(a2, b2, c2).map_err(CliError::Core)?;
    Ok(Resolved {
        w,
        permutation,
        warnings,
    })
}
