//! Quick invariant checks run by `minkpoly selftest`.

use minkpoly::algebra::{su11_coords, su11_embed, su2_coords, su2_embed, MinkVector};
use minkpoly::correspond::{minkowski_to_zs, unpermute, zs_to_minkowski};
use minkpoly::gauge::{kempf_ness_normalize, KnOptions};
use minkpoly::hyperpolygon::{level_residual, sample_complex_level, SubsetMask, WeightVector};
use minkpoly::involution::{census, classify_fixed, involve, sample_zs_complex_level, FixedPointClass};
use minkpoly::minkowski::{noncompact_witness, normalize_su11, validate};
use serde_json::{json, Value};

fn lie_brackets() -> f64 {
    let a = [0.3, -1.2, 0.7];
    let b = [1.1, 0.4, -0.5];
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let br = su2_coords(&su2_embed(a).commutator(&su2_embed(b)));
    let e1 = (0..3).fold(0.0f64, |m, i| m.max((br[i] - cross[i]).abs()));
    let u = MinkVector::new(0.2, -0.9, 1.4);
    let v = MinkVector::new(-0.6, 0.3, 0.8);
    let mb = su11_coords(&su11_embed(u).commutator(&su11_embed(v)));
    e1.max((mb - u.cross(&v)).max_abs())
}

fn census_count() -> minkpoly::Result<f64> {
    let c = census(&WeightVector::new(vec![1.0, 1.0, 2.0, 1.0])?)?;
    let ok = c.components.len() == 4 && c.compact_count == 1;
    Ok(if ok { 0.0 } else { 1.0 })
}

fn kn_level(seed: u64) -> minkpoly::Result<f64> {
    let a = WeightVector::new(vec![0.7, 1.21, 1.33, 0.96, 2.15, 1.47])?;
    let raw = sample_complex_level(&a, seed)?;
    Ok(level_residual(&kempf_ness_normalize(&raw, &KnOptions::default())?.cfg))
}

fn involution_square(seed: u64) -> minkpoly::Result<f64> {
    let a = WeightVector::new(vec![1.0, 1.3, 0.8, 1.7, 0.9])?;
    let cfg = sample_complex_level(&a, seed)?;
    Ok(involve(&involve(&cfg)).distance_inf(&cfg))
}

fn zs_round_trip(seed: u64) -> minkpoly::Result<f64> {
    let a = WeightVector::new(vec![0.7, 1.21, 1.33, 0.96, 2.15, 1.47])?;
    let s = SubsetMask::from_indices(&[1, 3, 5]);
    let raw = sample_zs_complex_level(&a, s, true, seed)?;
    let cfg = kempf_ness_normalize(&raw, &KnOptions::default())?.cfg;
    let FixedPointClass::ZComponent { s, canonical, .. } = classify_fixed(&cfg)? else {
        return Err(minkpoly::Error::NotFixed);
    };
    let (poly, order) = zs_to_minkowski(&canonical, s)?;
    let (norm, _) = normalize_su11(&poly)?;
    let back = unpermute(&minkowski_to_zs(&norm)?, &order);
    Ok(validate(&poly).closure_residual.max(level_residual(&back)))
}

fn witness_closure() -> minkpoly::Result<f64> {
    let seq = noncompact_witness(&[1.0, 1.5, 2.0, 1.2, 0.8, 1.1], 3, 12)?;
    Ok(seq.iter().fold(0.0f64, |m, p| {
        let r = validate(p);
        let scale = 1.0 + p.sides.iter().fold(0.0f64, |s, u| s.max(u.max_abs()));
        m.max(r.closure_residual.max(r.max_norm_error()) / scale)
    }))
}

/// Runs every check. Returns whether all passed and a JSON summary.
pub fn run(seed: u64) -> (bool, Value) {
    let results: [(&str, minkpoly::Result<f64>, f64); 6] = [
        ("lie_brackets", Ok(lie_brackets()), 1e-14),
        ("census", census_count(), 0.5),
        ("kempf_ness_level", kn_level(seed), 1e-8),
        ("involution_square", involution_square(seed), 1e-15),
        ("zs_round_trip", zs_round_trip(seed), 1e-9),
        ("witness_closure", witness_closure(), 1e-12),
    ];
    let mut all = true;
    let rows: Vec<Value> = results
        .into_iter()
        .map(|(name, r, tol)| match r {
            Ok(value) => {
                let pass = value <= tol;
                all &= pass;
                json!({ "name": name, "pass": pass, "value": value, "tol": tol })
            }
            Err(e) => {
                all = false;
                json!({ "name": name, "pass": false, "error": e.to_string() })
            }
        })
        .collect();
    (all, json!({ "pass": all, "checks": rows }))
}
