//! Parameter range syntax: a scalar (`10`), a comma list (`10,20,40`), or a
//! geometric range `start:end:xFACTOR` (`10:40:x2`).

pub fn parse_f64_range(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty range".into());
    }
    if s.contains(',') {
        return s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
            .collect();
    }
    if let Some((rest, factor)) = s.rsplit_once(":x") {
        let (start, end) = rest
            .split_once(':')
            .ok_or_else(|| format!("bad geometric range {s:?}, expected start:end:xFACTOR"))?;
        let start: f64 = start.trim().parse().map_err(|e| format!("bad start: {e}"))?;
        let end: f64 = end.trim().parse().map_err(|e| format!("bad end: {e}"))?;
        let factor: f64 = factor.trim().parse().map_err(|e| format!("bad factor: {e}"))?;
        if !(factor > 1.0) || !(start > 0.0) || end < start {
            return Err(format!("bad geometric range {s:?}: need start > 0, end >= start, factor > 1"));
        }
        let mut out = Vec::new();
        let mut v = start;
        while v <= end * (1.0 + 1e-12) {
            out.push(v);
            v *= factor;
        }
        return Ok(out);
    }
    s.parse::<f64>().map(|v| vec![v]).map_err(|e| format!("bad number {s:?}: {e}"))
}

pub fn parse_usize_range(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty range".into());
    }
    if s.contains(":x") {
        // Geometric ranges reuse the float path; rounded endpoints must be
        // exact integers.
        return parse_f64_range(s)?
            .into_iter()
            .map(|v| {
                let r = v.round();
                if (v - r).abs() > 1e-9 || r < 0.0 {
                    Err(format!("geometric range produced non-integer value {v}"))
                } else {
                    Ok(r as usize)
                }
            })
            .collect();
    }
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad integer {p:?}: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_lists_and_geometric() {
        assert_eq!(parse_f64_range("10").unwrap(), vec![10.0]);
        assert_eq!(parse_f64_range("10,20,40").unwrap(), vec![10.0, 20.0, 40.0]);
        assert_eq!(parse_f64_range("10:40:x2").unwrap(), vec![10.0, 20.0, 40.0]);
        assert_eq!(parse_usize_range("1,2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_usize_range("10:40:x2").unwrap(), vec![10, 20, 40]);
        assert!(parse_usize_range("10:40:x1.5").is_err());
        assert!(parse_f64_range("").is_err());
        assert!(parse_f64_range("10:5:x2").is_err());
        assert!(parse_usize_range("1,x").is_err());
    }
}
