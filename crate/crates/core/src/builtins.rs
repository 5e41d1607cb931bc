//! Built-in named rings, resolvable without files.

use num_traits::Zero;

use crate::biquotient::rp_cohomology;
use crate::matrix::Int;
use crate::ring::{CohomologyRing, PairBasis, SymCoeffVector};
use crate::Error;

fn rel(k: usize, entries: &[((usize, usize), i64)]) -> SymCoeffVector {
    let basis = PairBasis::new(k);
    let mut v = SymCoeffVector(vec![Int::zero(); basis.len()]);
    for &((i, j), c) in entries {
        v.0[basis.index(i - 1, j - 1)] = Int::from(c);
    }
    v
}

/// `Z[u,v]/<u^2 - v^2, uv>`, the connected sum of two complex projective
/// planes.
pub fn cp2cp2() -> CohomologyRing {
    CohomologyRing::new(
        2,
        vec![rel(2, &[((1, 1), 1), ((2, 2), -1)]), rel(2, &[((1, 2), 1)])],
        Some("CP^2 # CP^2".into()),
        Some(vec!["u".into(), "v".into()]),
    )
    .expect("builtin")
}

/// `Z[u,v]/<v^2 - u^2 - uv>`, the inhomogeneous flag SU(3)//T^2 truncated at
/// degree 4 (the cubic relation of the full presentation is outside the
/// model).
pub fn eschenburg() -> CohomologyRing {
    CohomologyRing::new(
        2,
        vec![rel(2, &[((2, 2), 1), ((1, 1), -1), ((1, 2), -1)])],
        Some("SU(3)//T^2".into()),
        Some(vec!["u".into(), "v".into()]),
    )
    .expect("builtin")
}

/// `Z[u,v]/<u^2, v^2>`, the product of two 2-spheres; the standard negative
/// control for the vanishing-squares property.
pub fn s2xs2() -> CohomologyRing {
    CohomologyRing::new(
        2,
        vec![rel(2, &[((1, 1), 1)]), rel(2, &[((2, 2), 1)])],
        Some("S^2 x S^2".into()),
        Some(vec!["u".into(), "v".into()]),
    )
    .expect("builtin")
}

/// Resolve a built-in ring name: `cp2cp2`, `eschenburg`, `s2xs2`, or
/// `rp:<p>:<k>`.
pub fn resolve(name: &str) -> Result<CohomologyRing, Error> {
    match name {
        "cp2cp2" => Ok(cp2cp2()),
        "eschenburg" => Ok(eschenburg()),
        "s2xs2" => Ok(s2xs2()),
        _ => {
            if let Some(rest) = name.strip_prefix("rp:") {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() == 2 {
                    if let (Ok(p), Ok(k)) = (parts[0].parse::<i64>(), parts[1].parse::<usize>())
                    {
                        return rp_cohomology(p, k);
                    }
                }
            }
            Err(Error::UnknownBuiltin(name.to_string()))
        }
    }
}
