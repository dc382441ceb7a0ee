//! Canonical JSON documents for records, graph lists and certificates.
//!
//! Objects use sorted keys, fractions are reduced `"a/b"` strings, spin
//! structures are bitstrings over the even generators (first bit first),
//! and zero cup entries are omitted.

use crate::decide::Certificate;
use crate::error::{Error, Result};
use crate::fgab::{FgAbelianGroup, Homomorphism};
use crate::invariants::{CupTable, InvariantRecord, LinkingPairing, QmodZ, QuadFn};
use crate::spin::{PullbackP, SpinSpace};
use crate::surgery::FormalYGraph;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

fn bad(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} should be a list")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(format!("{what} should be an object")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(format!("{what} should be a nonnegative integer")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(format!("{what} should be an integer")))
}

fn as_fraction(v: &Value, what: &str) -> Result<QmodZ> {
    v.as_str().ok_or_else(|| bad(format!("{what} should be a fraction string")))?.parse()
}

fn int_list(v: &Value, what: &str) -> Result<Vec<i64>> {
    as_array(v, what)?.iter().map(|x| as_i64(x, what)).collect()
}

pub fn group_to_json(h: &FgAbelianGroup) -> Value {
    json!({ "orders": h.orders() })
}

pub fn group_from_json(v: &Value) -> Result<FgAbelianGroup> {
    let orders =
        as_array(field(v, "orders")?, "orders")?.iter().map(|x| as_u64(x, "order")).collect::<Result<Vec<_>>>()?;
    if orders.contains(&1) {
        return Err(bad("orders must not contain 1"));
    }
    Ok(FgAbelianGroup::new(orders))
}

pub fn record_to_json(r: &InvariantRecord) -> Value {
    let linking: Vec<Vec<String>> =
        r.linking.matrix().iter().map(|row| row.iter().map(|q| q.to_string()).collect()).collect();
    let quadratic: Map<String, Value> = r
        .spin
        .spin_structures()
        .map(|s| {
            let vals: Vec<String> = r.quadratic[s as usize].values().iter().map(|q| q.to_string()).collect();
            (r.spin.bitstring(s), json!(vals))
        })
        .collect();
    let rochlin: Map<String, Value> =
        r.spin.spin_structures().map(|s| (r.spin.bitstring(s), json!(r.rochlin[s as usize]))).collect();
    let cup: Map<String, Value> = r
        .cup
        .iter()
        .map(|(n, t)| {
            let entries: Map<String, Value> =
                t.entries().map(|([i, j, k], v)| (format!("{i},{j},{k}"), json!(v))).collect();
            (n.to_string(), Value::Object(entries))
        })
        .collect();
    json!({
        "group": group_to_json(&r.homology),
        "linking": linking,
        "quadratic": quadratic,
        "cup": cup,
        "rochlin": rochlin,
        "moduli": r.moduli(),
    })
}

fn spin_keyed<'a>(space: &SpinSpace, v: &'a Value, what: &str) -> Result<Vec<&'a Value>> {
    let obj = as_object(v, what)?;
    if obj.len() as u64 != space.count() {
        return Err(bad(format!("{what} should have {} entries, found {}", space.count(), obj.len())));
    }
    let mut out = vec![None; space.count() as usize];
    for (k, x) in obj {
        out[space.parse_bitstring(k)? as usize] = Some(x);
    }
    Ok(out.into_iter().map(|x| x.expect("all keys distinct and in range")).collect())
}

fn parse_triple(key: &str, rank: usize) -> Result<[usize; 3]> {
    let parts: Vec<usize> = key
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad(format!("cup key {key:?} is not \"i,j,k\""))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [i, j, k] if i <= j && j <= k && k < rank => Ok([i, j, k]),
        _ => Err(bad(format!("cup key {key:?} should be i <= j <= k below {rank}"))),
    }
}

pub fn record_from_json(v: &Value) -> Result<InvariantRecord> {
    let homology = group_from_json(field(v, "group")?)?;
    let spin = SpinSpace::new(&homology)?;
    let matrix = as_array(field(v, "linking")?, "linking")?
        .iter()
        .map(|row| as_array(row, "linking row")?.iter().map(|x| as_fraction(x, "linking entry")).collect())
        .collect::<Result<Vec<Vec<QmodZ>>>>()?;
    let linking = LinkingPairing::new(&homology, matrix)?;
    let quadratic = spin_keyed(&spin, field(v, "quadratic")?, "quadratic")?
        .into_iter()
        .map(|x| {
            Ok(QuadFn::new(
                as_array(x, "quadratic values")?
                    .iter()
                    .map(|q| as_fraction(q, "quadratic value"))
                    .collect::<Result<_>>()?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let rochlin = spin_keyed(&spin, field(v, "rochlin")?, "rochlin")?
        .into_iter()
        .map(|x| match as_u64(x, "Rochlin value")? {
            r if r < 16 => Ok(r as u8),
            r => Err(bad(format!("Rochlin value {r} outside 0..15"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let moduli =
        as_array(field(v, "moduli")?, "moduli")?.iter().map(|x| as_u64(x, "modulus")).collect::<Result<Vec<_>>>()?;
    let cups = as_object(field(v, "cup")?, "cup")?;
    let mut cup = BTreeMap::new();
    for &n in &moduli {
        cup.insert(n, CupTable::zero(n));
    }
    for (key, entries) in cups {
        let n: u64 = key.parse().map_err(|_| bad(format!("cup modulus {key:?} is not an integer")))?;
        let table = cup.get_mut(&n).ok_or_else(|| bad(format!("cup modulus {n} not listed in moduli")))?;
        for (t, x) in as_object(entries, "cup table")? {
            table.set(parse_triple(t, homology.rank())?, as_i64(x, "cup value")?);
        }
    }
    let r = InvariantRecord { homology, spin, linking, quadratic, cup, rochlin };
    r.check_shape()?;
    Ok(r)
}

pub fn record_to_string(r: &InvariantRecord) -> String {
    serde_json::to_string_pretty(&record_to_json(r)).expect("serializable") + "\n"
}

pub fn record_from_str(s: &str) -> Result<InvariantRecord> {
    record_from_json(&serde_json::from_str(s).map_err(|e| bad(format!("JSON: {e}")))?)
}

pub fn graphs_to_json(space: &SpinSpace, graphs: &[FormalYGraph]) -> Value {
    let d = space.dimension();
    Value::Array(
        graphs
            .iter()
            .map(|g| {
                let leaves: Vec<Value> = g
                    .leaves
                    .iter()
                    .map(|l| {
                        let mut f = vec![l.f.constant() as i64];
                        f.extend((0..d).map(|t| (l.f.slope() >> t & 1) as i64));
                        json!([l.h.coeffs(), f])
                    })
                    .collect();
                json!({ "sign": g.sign, "leaves": leaves })
            })
            .collect(),
    )
}

/// Parses a graph list, validating the pull-back constraint on every leaf.
pub fn graphs_from_json(space: &SpinSpace, v: &Value) -> Result<Vec<FormalYGraph>> {
    let p = PullbackP::new(space);
    as_array(v, "graph list")?
        .iter()
        .map(|g| {
            let sign = as_i64(field(g, "sign")?, "sign")?;
            let leaves = as_array(field(g, "leaves")?, "leaves")?;
            if leaves.len() != 3 {
                return Err(bad("a graph has exactly three leaves"));
            }
            let parsed = leaves
                .iter()
                .map(|leaf| {
                    let parts = as_array(leaf, "leaf")?;
                    if parts.len() != 2 {
                        return Err(bad("a leaf is [h-coefficients, [constant, slope bits...]]"));
                    }
                    let h = space.homology().element(&int_list(&parts[0], "leaf homology")?)?;
                    let f = int_list(&parts[1], "leaf function")?;
                    if f.len() != space.dimension() + 1 || f.iter().any(|&b| b != 0 && b != 1) {
                        return Err(bad(format!("leaf function should be {} bits", space.dimension() + 1)));
                    }
                    let slope = f[1..].iter().enumerate().fold(0u64, |acc, (t, &b)| acc | (b as u64) << t);
                    p.element(h, space.affine(f[0] as u8, slope)?)
                })
                .collect::<Result<Vec<_>>>()?;
            let leaves: [_; 3] = parsed.try_into().expect("three leaves");
            FormalYGraph::new(sign, leaves)
        })
        .collect()
}

pub fn homomorphism_to_json(psi: &Homomorphism) -> Value {
    json!(psi.images().iter().map(|x| x.coeffs().to_vec()).collect::<Vec<_>>())
}

/// A homomorphism given as the list of images of the generators.
pub fn homomorphism_from_json(source: &FgAbelianGroup, target: &FgAbelianGroup, v: &Value) -> Result<Homomorphism> {
    let columns = as_array(v, "homomorphism")?.iter().map(|c| int_list(c, "image")).collect::<Result<Vec<_>>>()?;
    Homomorphism::from_columns(source.clone(), target.clone(), &columns)
}

pub fn certificate_to_json(space: &SpinSpace, c: &Certificate) -> Value {
    json!({
        "psi": homomorphism_to_json(&c.psi),
        "offset": c.offset.map(|t| space.bitstring(t)),
        "moduli_checked": c.moduli_checked,
        "report": c.report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::default_moduli;

    fn sample() -> InvariantRecord {
        let h = FgAbelianGroup::new([2, 0]);
        let l = LinkingPairing::new(&h, vec![vec!["1/2".parse().unwrap()]]).unwrap();
        let q = |s: &str| QuadFn::new(vec![s.parse().unwrap()]);
        let mut r = InvariantRecord::new(
            h.clone(),
            l,
            vec![q("1/4"), q("3/4"), q("1/4"), q("3/4")],
            &default_moduli(&h),
            vec![0, 8, 1, 15],
        )
        .unwrap();
        r.cup.get_mut(&2).unwrap().set([0, 0, 1], 1);
        r
    }

    #[test]
    fn round_trip_is_canonical() {
        let r = sample();
        let s = record_to_string(&r);
        let back = record_from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(record_to_string(&back), s);
        let v = record_to_json(&r);
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["cup", "group", "linking", "moduli", "quadratic", "rochlin"]);
        assert!(s.contains("\"0,0,1\": 1"));
    }

    #[test]
    fn rejects_malformed() {
        let mut v = record_to_json(&sample());
        v["rochlin"]["00"] = json!(16);
        assert!(record_from_json(&v).is_err());
        let mut v = record_to_json(&sample());
        v["cup"]["2"] = json!({"1,0,0": 1});
        assert!(record_from_json(&v).is_err());
        assert!(record_from_str("{").is_err());
    }

    #[test]
    fn graphs_round_trip_and_constraint() {
        let r = sample();
        let p = PullbackP::new(&r.spin);
        let g = FormalYGraph::new(-1, [p.basis_element(0), p.special(), p.basis_element(1)]).unwrap();
        let v = graphs_to_json(&r.spin, std::slice::from_ref(&g));
        assert_eq!(graphs_from_json(&r.spin, &v).unwrap(), vec![g]);
        let bad_leaf =
            json!([{ "sign": 1, "leaves": [[[1, 0], [0, 0, 0]], [[0, 0], [0, 0, 0]], [[0, 0], [0, 0, 0]]] }]);
        assert!(matches!(graphs_from_json(&r.spin, &bad_leaf), Err(Error::ConstraintViolation(_))));
    }
}
