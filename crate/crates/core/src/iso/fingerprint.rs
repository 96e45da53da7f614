//! Bounded-depth isomorphism invariants.
//!
//! Each refinement round replaces an element's color by a digest of its old
//! color and the sorted colors of everything it is related to. Digests depend
//! only on structure, never on indices, so isomorphic inputs agree.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::OrbitStructure;
use crate::coarse::CoarseStructure;
use crate::error::{Error, Result};

pub const MAX_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Fingerprint {
    pub depth: usize,
    /// Hex SHA-256 of the canonical color multiset.
    pub value: String,
}

type Color = [u8; 32];

fn digest(parts: &[&[u8]]) -> Color {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().into()
}

fn hex(c: &Color) -> String {
    c.iter().map(|b| format!("{b:02x}")).collect()
}

fn check_depth(depth: usize) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::bound("fingerprint depth", depth, MAX_DEPTH));
    }
    Ok(())
}

fn finish(kind: &[u8], header: &[usize], mut colors: Vec<Color>, depth: usize) -> Fingerprint {
    colors.sort_unstable();
    let head: Vec<u8> = header.iter().flat_map(|x| (*x as u64).to_le_bytes()).collect();
    let body: Vec<u8> = colors.concat();
    Fingerprint {
        depth,
        value: hex(&digest(&[kind, &head, &body])),
    }
}

pub fn ef_fingerprint(m: &CoarseStructure, depth: usize) -> Result<Fingerprint> {
    check_depth(depth)?;
    let n = m.size();
    let mut colors: Vec<Color> = (0..n).map(|a| digest(&[&[m.relation(a, a, a) as u8]])).collect();
    for _ in 0..depth {
        let mut seen: Vec<Vec<[u8; 65]>> = vec![Vec::new(); n];
        for (a, b, c) in m.triples() {
            for (pos, x, (y, z)) in [(0u8, a, (b, c)), (1, b, (a, c)), (2, c, (a, b))] {
                let mut e = [0u8; 65];
                e[0] = pos;
                e[1..33].copy_from_slice(&colors[y]);
                e[33..].copy_from_slice(&colors[z]);
                seen[x].push(e);
            }
        }
        colors = seen
            .into_iter()
            .enumerate()
            .map(|(a, mut e)| {
                e.sort_unstable();
                digest(&[&colors[a], &e.concat()])
            })
            .collect();
    }
    Ok(finish(b"coarse", &[n, m.num_triples()], colors, depth))
}

pub fn orbit_fingerprint(s: &OrbitStructure, depth: usize) -> Result<Fingerprint> {
    check_depth(depth)?;
    let n = s.degree;
    let mut colors: Vec<Color> = vec![digest(&[b"point"]); n];
    let orbit_shapes = |colors: &[Color]| -> Vec<Vec<Color>> {
        s.arities
            .iter()
            .map(|o| {
                let mut members: Vec<Vec<Vec<u8>>> = vec![Vec::new(); o.labels.len()];
                for (t, &l) in o.labels.iter().enumerate() {
                    members[l].push(o.decode(t).iter().flat_map(|&p| colors[p]).collect());
                }
                members
                    .into_iter()
                    .map(|mut v| {
                        v.sort_unstable();
                        digest(&[&v.concat()])
                    })
                    .collect()
            })
            .collect()
    };
    for _ in 0..depth {
        let shapes = orbit_shapes(&colors);
        let mut seen: Vec<Vec<Vec<u8>>> = vec![Vec::new(); n];
        for (k, o) in s.arities.iter().enumerate() {
            for (t, &l) in o.labels.iter().enumerate() {
                let tuple = o.decode(t);
                for (i, &p) in tuple.iter().enumerate() {
                    let mut e = vec![k as u8, i as u8];
                    e.extend_from_slice(&shapes[k][l]);
                    seen[p].push(e);
                }
            }
        }
        colors = seen
            .into_iter()
            .enumerate()
            .map(|(p, mut e)| {
                e.sort_unstable();
                digest(&[&colors[p], &e.concat()])
            })
            .collect();
    }
    let shapes = orbit_shapes(&colors);
    let mut all = colors;
    for (k, per) in shapes.into_iter().enumerate() {
        let mut distinct: Vec<Color> = Vec::new();
        for (t, c) in per.into_iter().enumerate() {
            if s.arities[k].labels[t] == t {
                distinct.push(digest(&[&[k as u8], &c]));
            }
        }
        all.extend(distinct);
    }
    Ok(finish(b"orbit", &[n, s.max_arity()], all, depth))
}
