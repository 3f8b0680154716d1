//! Text syntax for maps on the command line.
//!
//! Plane maps: `exp_baker:A`, `sine:A`, `mcmullen:M,L,RE,IM`.
//! Circle maps: `rotation:T`, `power:D`, `hyperbolic:S` (disk translation by
//! hyperbolic distance `S`), `blaschke:A` (the Baker basin product),
//! `pommerenke:A`. Sequences for `spread`: `pommerenke-summable:N`
//! (`a_n = 1 − 1/(n+1)²`) and `pommerenke-divergent:N[,A]` (constant `A`,
//! default 0.5).

use std::sync::Arc;

use fatoulab::{BlaschkeProduct, CircleMap, Complex64, MapSpec, Mobius};

use crate::error::{invalid, CliError};

fn split(s: &str) -> Result<(&str, Vec<&str>), CliError> {
    let (name, args) = s
        .split_once(':')
        .ok_or_else(|| invalid(format!("map `{s}` must look like name:params")))?;
    Ok((name, args.split(',').map(str::trim).collect()))
}

pub fn num(s: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .parse()
        .map_err(|_| invalid(format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(invalid(format!("`{s}` is not finite")));
    }
    Ok(v)
}

fn int(s: &str) -> Result<u32, CliError> {
    s.parse()
        .map_err(|_| invalid(format!("`{s}` is not a non-negative integer")))
}

fn arity<'a>(name: &str, args: &'a [&'a str], n: usize) -> Result<&'a [&'a str], CliError> {
    if args.len() != n {
        return Err(invalid(format!("map `{name}` takes {n} parameter(s)")));
    }
    Ok(args)
}

pub fn plane_map(s: &str) -> Result<MapSpec, CliError> {
    let (name, args) = split(s)?;
    Ok(match name {
        "exp_baker" => MapSpec::exp_baker(num(arity(name, &args, 1)?[0])?)?,
        "sine" => MapSpec::sine_model(num(arity(name, &args, 1)?[0])?)?,
        "mcmullen" => {
            let a = arity(name, &args, 4)?;
            MapSpec::mcmullen(
                int(a[0])?,
                int(a[1])?,
                Complex64::new(num(a[2])?, num(a[3])?),
            )?
        }
        _ => return Err(invalid(format!("unknown plane map `{name}`"))),
    })
}

pub fn circle_map(s: &str) -> Result<CircleMap, CliError> {
    let (name, args) = split(s)?;
    Ok(match name {
        "rotation" => CircleMap::Rotation(num(arity(name, &args, 1)?[0])?),
        "power" => {
            let d = int(arity(name, &args, 1)?[0])?;
            if d < 2 {
                return Err(invalid("power degree must be at least 2"));
            }
            CircleMap::Power(d)
        }
        "hyperbolic" => {
            let shift = num(arity(name, &args, 1)?[0])?;
            if shift == 0.0 {
                return Err(invalid("hyperbolic shift must be non-zero"));
            }
            CircleMap::mobius(Mobius::disk_translation(shift))?
        }
        "blaschke" => {
            let b = BlaschkeProduct::from_alpha(num(arity(name, &args, 1)?[0])?)?;
            CircleMap::BlaschkeBoundary(Arc::new(b), 1e-12)
        }
        "pommerenke" => CircleMap::pommerenke_factor(num(arity(name, &args, 1)?[0])?)?,
        _ => return Err(invalid(format!("unknown circle map `{name}`"))),
    })
}

/// A map sequence for `spread`, or `None` if `s` names a single map.
pub fn circle_sequence(s: &str) -> Result<Option<Vec<CircleMap>>, CliError> {
    let (name, args) = split(s)?;
    let len = |a: &str| -> Result<usize, CliError> {
        let n = int(a)? as usize;
        if n == 0 {
            return Err(invalid("sequence length must be positive"));
        }
        Ok(n)
    };
    Ok(match name {
        "pommerenke-summable" => {
            let n = len(arity(name, &args, 1)?[0])?;
            Some(
                (1..=n)
                    .map(|k| CircleMap::pommerenke_factor(1.0 - 1.0 / ((k + 1) as f64).powi(2)))
                    .collect::<Result<_, _>>()?,
            )
        }
        "pommerenke-divergent" => {
            if args.is_empty() || args.len() > 2 {
                return Err(invalid("pommerenke-divergent takes N[,A]"));
            }
            let n = len(args[0])?;
            let a = if args.len() == 2 { num(args[1])? } else { 0.5 };
            let f = CircleMap::pommerenke_factor(a)?;
            Some(vec![f; n])
        }
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_maps() {
        assert!(plane_map("exp_baker:0.4").is_ok());
        assert!(plane_map("mcmullen:3,3,0.0001,0").is_ok());
        assert!(matches!(
            plane_map("exp_baker:0.7"),
            Err(CliError::Validation(_))
        ));
        assert!(matches!(
            plane_map("exp_baker"),
            Err(CliError::Validation(_))
        ));
        assert!(matches!(plane_map("sine:x"), Err(CliError::Validation(_))));
        assert_eq!(circle_map("power:2").unwrap(), CircleMap::Power(2));
        assert!(circle_map("power:1").is_err());
        assert!(circle_map("hyperbolic:0.5").is_ok());
        assert!(circle_map("nope:1").is_err());
        assert_eq!(
            circle_sequence("pommerenke-summable:10")
                .unwrap()
                .unwrap()
                .len(),
            10
        );
        assert_eq!(
            circle_sequence("pommerenke-divergent:5,0.3")
                .unwrap()
                .unwrap()
                .len(),
            5
        );
        assert!(circle_sequence("power:2").unwrap().is_none());
    }
}
