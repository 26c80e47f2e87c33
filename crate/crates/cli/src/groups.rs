//! Group specifications: `m^d`, `m^d x t`, `5,5`, `q8 x p^3`.

use biaslab::grouphom::FiniteAbelianGroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Abelian(Vec<u64>),
    /// `Q8 × (Z/p)^3`.
    Q8P(u64),
}

fn parse_power(tok: &str) -> Result<Vec<u64>, String> {
    let (base, exp) = match tok.split_once('^') {
        Some((b, e)) => (b, e.parse::<usize>().map_err(|_| format!("bad exponent in '{tok}'"))?),
        None => (tok, 1),
    };
    let m = base.parse::<u64>().map_err(|_| format!("bad cyclic order '{base}'"))?;
    if m < 2 {
        return Err(format!("cyclic order must be at least 2, got {m}"));
    }
    Ok(vec![m; exp])
}

pub fn parse_group(text: &str) -> Result<GroupSpec, String> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if cleaned.is_empty() {
        return Err("empty group".into());
    }
    let parts: Vec<&str> = cleaned.split(['x', '*', ',']).collect();
    if parts[0] == "q8" {
        match parts.len() {
            2 => {
                let orders = parse_power(parts[1])?;
                if orders.len() != 3 {
                    return Err("only q8 x p^3 is supported".into());
                }
                return Ok(GroupSpec::Q8P(orders[0]));
            }
            _ => return Err("only q8 x p^3 is supported".into()),
        }
    }
    let mut orders = Vec::new();
    for p in parts {
        if p == "q8" {
            return Err("q8 must come first".into());
        }
        orders.extend(parse_power(p)?);
    }
    Ok(GroupSpec::Abelian(orders))
}

pub fn abelian(orders: &[u64]) -> Result<FiniteAbelianGroup, String> {
    FiniteAbelianGroup::new(orders).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert_eq!(parse_group("5^3").unwrap(), GroupSpec::Abelian(vec![5, 5, 5]));
        assert_eq!(parse_group("3^2 x 9").unwrap(), GroupSpec::Abelian(vec![3, 3, 9]));
        assert_eq!(parse_group("5,5").unwrap(), GroupSpec::Abelian(vec![5, 5]));
        assert_eq!(parse_group("q8x17^3").unwrap(), GroupSpec::Q8P(17));
        assert_eq!(parse_group("Q8 x 17^3").unwrap(), GroupSpec::Q8P(17));
        assert!(parse_group("q8x17^2").is_err());
        assert!(parse_group("1^3").is_err());
        assert!(parse_group("").is_err());
    }
}
