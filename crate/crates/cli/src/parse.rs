//! Argument mini-languages: slope lists, seed maps and complex literals.

use std::collections::BTreeMap;

use dehnfill::classify::OrientedSlope;
use dehnfill::io::parse_float;
use dehnfill::{BigComplex, FillingSlope, Slope};

fn int(s: &str, what: &str) -> Result<i64, String> {
    s.trim().parse().map_err(|_| format!("bad integer {s:?} in {what}"))
}

fn pq(s: &str) -> Result<(i64, i64), String> {
    let (p, q) = s.split_once('/').ok_or_else(|| format!("slope {s:?} is not of the form p/q"))?;
    Ok((int(p, s)?, int(q, s)?))
}

/// `"p1/q1[,p2/q2]"`, canonicalized and completed.
pub fn filling_slopes(s: &str) -> Result<Vec<FillingSlope>, String> {
    s.split(',')
        .map(|part| {
            let (p, q) = pq(part)?;
            let c = Slope::new(p, q).map_err(|e| format!("{part}: {e}"))?;
            if (c.p, c.q) != (p, q) && (c.p, c.q) != (-p, -q) {
                return Err(format!("slope {part} is not coprime"));
            }
            FillingSlope::with_canonical_completion(c.p, c.q).map_err(|e| e.to_string())
        })
        .collect()
}

/// `"p1/q1,p2/q2;p1'/q1',p2'/q2'"` as canonical slopes.
pub fn slope_pair(s: &str) -> Result<([Slope; 2], [Slope; 2]), String> {
    let (a, b) = s.split_once(';').ok_or_else(|| format!("pair {s:?} needs ';' between the two fillings"))?;
    let side = |x: &str| -> Result<[Slope; 2], String> {
        let v: Vec<Slope> = filling_slopes(x)?.iter().map(|f| f.slope()).collect();
        <[Slope; 2]>::try_from(v).map_err(|_| format!("{x:?} must list two slopes"))
    };
    Ok((side(a)?, side(b)?))
}

/// Same shape as [`slope_pair`] but keeps the orientation as written.
pub fn oriented_pair(s: &str) -> Result<([OrientedSlope; 2], [OrientedSlope; 2]), String> {
    let (a, b) = s.split_once(';').ok_or_else(|| format!("pair {s:?} needs ';' between the two fillings"))?;
    let side = |x: &str| -> Result<[OrientedSlope; 2], String> {
        let v = x.split(',').map(|p| pq(p).map(|(p, q)| OrientedSlope::new(p, q))).collect::<Result<Vec<_>, _>>()?;
        <[OrientedSlope; 2]>::try_from(v).map_err(|_| format!("{x:?} must list two slopes"))
    };
    Ok((side(a)?, side(b)?))
}

/// Complex literal: `x`, `yi`, `x+yi`, `x-yi`, `i`, `-i`.
pub fn complex(s: &str, prec: u32) -> Result<BigComplex, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("bad complex number {s:?}");
    if t.is_empty() {
        return Err(bad());
    }
    let f = |x: &str| parse_float(x, prec).map_err(|_| bad());
    let Some(body) = t.strip_suffix('i') else {
        return Ok(BigComplex::from_real(f(&t)?));
    };
    // split at the last sign that does not belong to an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    Ok(BigComplex::from_floats(f(re)?, f(im)?))
}

/// `"3=1,7=0.5+0.25i"`.
pub fn seeds(s: &str, prec: u32) -> Result<BTreeMap<u32, BigComplex>, String> {
    let mut out = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("seed {part:?} is not order=coeff"))?;
        let k: u32 = k.trim().parse().map_err(|_| format!("bad seed order {k:?}"))?;
        if out.insert(k, complex(v, prec)?).is_some() {
            return Err(format!("seed order {k} given twice"));
        }
    }
    Ok(out)
}
