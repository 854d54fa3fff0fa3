//! Integer grids: `8,16,32`, `3:10`, `3..10`, `10:100:+10`, `8:2048:x2`.

/// Parses a grid; ranges are inclusive and the result keeps the written order.
pub fn parse_grid(text: &str) -> Result<Vec<u64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty grid".into());
    }
    if text.contains(',') {
        return text.split(',').map(|t| parse_int(t.trim())).collect();
    }
    if let Some((a, b)) = text.split_once("..") {
        return arithmetic(parse_int(a)?, parse_int(b)?, 1);
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_int(single)?]),
        [a, b] => arithmetic(parse_int(a)?, parse_int(b)?, 1),
        [a, b, step] => {
            let (a, b) = (parse_int(a)?, parse_int(b)?);
            if let Some(s) = step.strip_prefix('+') {
                arithmetic(a, b, parse_int(s)?)
            } else if let Some(s) = step.strip_prefix('x') {
                geometric(a, b, parse_int(s)?)
            } else {
                Err(format!("step {step:?} must be +s or xq"))
            }
        }
        _ => Err(format!("cannot parse grid {text:?}")),
    }
}

fn parse_int(t: &str) -> Result<u64, String> {
    t.parse().map_err(|_| format!("{t:?} is not a nonnegative integer"))
}

fn arithmetic(a: u64, b: u64, step: u64) -> Result<Vec<u64>, String> {
    if step == 0 {
        return Err("arithmetic step must be positive".into());
    }
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a..=b).step_by(step as usize).collect())
}

fn geometric(a: u64, b: u64, q: u64) -> Result<Vec<u64>, String> {
    if q < 2 || a == 0 {
        return Err("geometric grids need a start >= 1 and a ratio >= 2".into());
    }
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    let mut out = Vec::new();
    let mut v = a;
    while v <= b {
        out.push(v);
        match v.checked_mul(q) {
            Some(next) => v = next,
            None => break,
        }
    }
    Ok(out)
}

/// A grid of reals given as a comma-separated list.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("{t:?} is not a number")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("8,16,32").unwrap(), vec![8, 16, 32]);
        assert_eq!(parse_grid("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_grid("3:6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_grid("10:40:+10").unwrap(), vec![10, 20, 30, 40]);
        assert_eq!(parse_grid("8:2048:x2").unwrap().len(), 9);
        assert_eq!(parse_grid("64:2048:x2").unwrap(), vec![64, 128, 256, 512, 1024, 2048]);
        assert_eq!(parse_grid("7").unwrap(), vec![7]);
    }

    #[test]
    fn grid_errors() {
        for bad in ["", "a", "5..3", "1:10:x1", "1:10:*2", "1:10:+0", "0:8:x2", "1,,2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
        assert!(parse_real_list("1,1.5,x").is_err());
        assert_eq!(parse_real_list("1, 1.5").unwrap(), vec![1.0, 1.5]);
    }
}
