//! Point files: a header line `n <count>` followed by one `(re,im)` line per
//! coordinate. Lines starting with `#` are comments.

use sertrack::{Complex, Real};

pub fn format_points<R: Real>(x: &[Complex<R>]) -> String {
    let mut s = format!("n {}\n", x.len());
    for z in x {
        s.push_str(&format!("({},{})\n", z.re.to_decimal(), z.im.to_decimal()));
    }
    s
}

pub fn parse_points<R: Real>(text: &str) -> Result<Vec<Complex<R>>, String> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or("empty point file")?;
    let count: usize = header
        .strip_prefix('n')
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| format!("expected a header `n <count>`, got {header:?}"))?;
    let mut x = Vec::with_capacity(count);
    for (line, l) in lines {
        let inner = l
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|r| r.split_once(','))
            .ok_or_else(|| format!("line {line}: expected (re,im)"))?;
        let re = R::parse_decimal(inner.0.trim()).map_err(|e| format!("line {line}: {e}"))?;
        let im = R::parse_decimal(inner.1.trim()).map_err(|e| format!("line {line}: {e}"))?;
        x.push(Complex::new(re, im));
    }
    if x.len() != count {
        return Err(format!("header announces {count} coordinates, found {}", x.len()));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sertrack::polysys::random_point;
    use sertrack::QuadDouble;

    #[test]
    fn round_trip_is_exact() {
        let x = random_point::<QuadDouble>(5, 3);
        let text = format_points(&x);
        assert!(text.starts_with("n 5\n"));
        assert_eq!(parse_points::<QuadDouble>(&text).unwrap(), x);
    }

    #[test]
    fn comments_and_errors() {
        let x = parse_points::<f64>("# start\nn 2\n(1,-1)\n\n(0.5, 2e-3)\n").unwrap();
        assert_eq!(x, vec![Complex::new(1.0, -1.0), Complex::new(0.5, 2e-3)]);
        assert!(parse_points::<f64>("n 2\n(1,0)\n").is_err());
        assert!(parse_points::<f64>("(1,0)\n").is_err());
        assert!(parse_points::<f64>("n 1\n1,0\n").is_err());
        assert!(parse_points::<f64>("").is_err());
    }
}
