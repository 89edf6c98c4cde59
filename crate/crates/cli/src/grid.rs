//! Sweep-grid expressions: either an explicit comma-separated list
//! (`1e-5,1e-4,0.1,1`) or a linear range `start:stop:steps` with inclusive
//! endpoints.

use crate::CliError;

pub fn parse_grid(expr: &str) -> Result<Vec<f64>, CliError> {
    let expr = expr.trim();
    if expr.is_empty() {
        return Err(CliError::Usage("empty sweep grid".into()));
    }
    let values = if expr.contains(':') {
        let parts: Vec<&str> = expr.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!(
                "range grid must be start:stop:steps, got {expr}"
            )));
        }
        let start: f64 = parse_num(parts[0])?;
        let stop: f64 = parse_num(parts[1])?;
        let steps: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid step count {}", parts[2])))?;
        if steps < 2 {
            return Err(CliError::Usage("range grid needs at least 2 steps".into()));
        }
        if stop < start {
            return Err(CliError::Usage(format!("grid stop {stop} below start {start}")));
        }
        (0..steps)
            .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
            .collect()
    } else {
        expr.split(',').map(parse_num).collect::<Result<Vec<f64>, _>>()?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage("grid values must be finite".into()));
    }
    Ok(values)
}

fn parse_num(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid grid value {s}")))
}

/// Comma-separated shift list for the synthetic generator; values fill the
/// leading features, the remainder stays unshifted.
pub fn parse_shift(expr: &str, n_features: usize) -> Result<Vec<f64>, CliError> {
    let given = parse_grid(expr)?;
    if given.len() > n_features {
        return Err(CliError::Usage(format!(
            "{} shift values for {n_features} features",
            given.len()
        )));
    }
    let mut shift = vec![0.0; n_features];
    shift[..given.len()].copy_from_slice(&given);
    Ok(shift)
}
