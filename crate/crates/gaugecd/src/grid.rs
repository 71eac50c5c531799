//! Small grid utilities shared by the library and the CLI.

/// `n` equally spaced points from `a` to `b` inclusive (`n >= 1`).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + step * i as f64).collect()
}

/// Parse the grid syntax `a:b:n` (inclusive endpoints, `n` points).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{s}' must have the form a:b:n"));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad grid start '{}'", parts[0]))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad grid end '{}'", parts[1]))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad grid count '{}'", parts[2]))?;
    if n == 0 {
        return Err("grid count must be positive".into());
    }
    Ok(linspace(a, b, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints_inclusive() {
        let g = linspace(0.0, 1.0, 5);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn parse_grid_roundtrip() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }
}
