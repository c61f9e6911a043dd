use super::DslError;

pub const ALIAS_HELP: &str =
    "KdV, MKdV, MKdV6, K22, Knm:n,m, Knn:n, NLS:n, SG, K212, CurvKdV (or a literal equation)";

/// Expand a family alias to its canonical equation text. Text that already
/// contains `=` is returned unchanged.
pub fn expand_alias(name: &str) -> Result<String, DslError> {
    if name.contains('=') {
        return Ok(name.to_string());
    }
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let ints = |a: Option<&str>, count: usize| -> Result<Vec<u32>, DslError> {
        let a = a.ok_or_else(|| DslError::UnknownAlias(name.to_string()))?;
        let v: Vec<u32> = a
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| DslError::UnknownAlias(name.to_string()))?;
        if v.len() != count || v.iter().any(|&n| n == 0 || n > 16) {
            return Err(DslError::UnknownAlias(name.to_string()));
        }
        Ok(v)
    };
    let text = match (head.to_ascii_lowercase().as_str(), args) {
        ("kdv", None) => "u_t + 6*u*u_x + u_xxx = 0".to_string(),
        ("mkdv", None) => "u_t + u^2*u_x + u_xxx = 0".to_string(),
        ("mkdv6", None) => "u_t + 6*u^2*u_x + u_xxx = 0".to_string(),
        ("k22", None) => "u_t + (u^2)_x + (u^2)_xxx = 0".to_string(),
        ("knm", a) => {
            let v = ints(a, 2)?;
            knm(v[0], v[1])
        }
        ("knn", a) => {
            let v = ints(a, 1)?;
            knm(v[0], v[0])
        }
        ("nls", a) => {
            let v = ints(a, 1)?;
            format!("u_t + u_xx + {} = 0", power("u", v[0]))
        }
        ("sg", None) => "u_xt - sin(u) = 0".to_string(),
        ("k212", None) => "u_t + (u^2)_x + u_xxx + eps*(u^2)_xxx = 0".to_string(),
        ("curvkdv", None) => "u_t + u*u_x + u_xxx + eps*(u_xx^2)_x = 0".to_string(),
        _ => return Err(DslError::UnknownAlias(name.to_string())),
    };
    Ok(text)
}

fn power(base: &str, n: u32) -> String {
    if n == 1 {
        base.to_string()
    } else {
        format!("{base}^{n}")
    }
}

fn knm(n: u32, m: u32) -> String {
    let convect = if n == 1 { "u_x".to_string() } else { format!("({})_x", power("u", n)) };
    let disperse = if m == 1 { "u_xxx".to_string() } else { format!("({})_xxx", power("u", m)) };
    format!("u_t + {convect} + {disperse} = 0")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_expansions() {
        assert_eq!(expand_alias("Knm:2,2").unwrap(), expand_alias("K22").unwrap());
        assert_eq!(expand_alias("Knn:3").unwrap(), "u_t + (u^3)_x + (u^3)_xxx = 0");
        assert_eq!(expand_alias("NLS:3").unwrap(), "u_t + u_xx + u^3 = 0");
        assert_eq!(expand_alias("u_t = 0").unwrap(), "u_t = 0");
        assert!(expand_alias("Knm:2").is_err());
        assert!(expand_alias("Foo").is_err());
    }
}
