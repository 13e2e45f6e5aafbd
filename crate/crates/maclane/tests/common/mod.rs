//! Brute-force cluster data for polynomials with integer roots, computed from
//! pairwise p-adic distances only.

#![allow(dead_code)]

use std::collections::BTreeSet;

use maclane::arith::{BaseField, ExtRat, KPoly, K, Q};
use maclane::clusters::ClusterTree;
use num_traits::ToPrimitive;

pub fn vp(p: i64, mut n: i128) -> i64 {
    assert!(n != 0);
    let mut k = 0;
    while n % p as i128 == 0 {
        n /= p as i128;
        k += 1;
    }
    k
}

/// (sorted roots, radius) for every disc around a root holding two or more
/// roots; the radius is the least pairwise valuation inside the set.
pub fn rational_clusters(p: i64, roots: &[i64]) -> BTreeSet<(Vec<i64>, Q)> {
    let mut out = BTreeSet::new();
    for &a in roots {
        for &b in roots {
            if a == b {
                continue;
            }
            let d = vp(p, a as i128 - b as i128);
            let mut s: Vec<i64> =
                roots.iter().copied().filter(|&c| c == a || vp(p, c as i128 - a as i128) >= d).collect();
            s.sort();
            let mut r = i64::MAX;
            for &x in &s {
                for &y in &s {
                    if x != y {
                        r = r.min(vp(p, x as i128 - y as i128));
                    }
                }
            }
            out.insert((s, Q::from_integer(r.into())));
        }
    }
    out
}

pub fn product_of_linears(k: &K, roots: &[i64]) -> KPoly {
    let mut f = k.poly_i64(&[1]);
    for &a in roots {
        f = k.pmul(&f, &k.poly_i64(&[-a, 1]));
    }
    f
}

/// The same data read from a MacLane cluster tree whose leaves are exact
/// linear factors; `None` if some leaf is only an approximant.
pub fn tree_clusters(t: &ClusterTree) -> Option<BTreeSet<(Vec<i64>, Q)>> {
    let k = &t.k;
    let mut out = BTreeSet::new();
    for n in t.proper_nodes() {
        let mut s = vec![];
        for l in t.leaves_below(n.id) {
            let leaf = t.node(l);
            if !leaf.exact || leaf.degree != 1 {
                return None;
            }
            let a = k.as_rational(&k.neg(&leaf.centre[0]))?;
            s.push(a.to_integer().to_i64()?);
        }
        s.sort();
        let ExtRat::Fin(r) = n.radius.clone() else { return None };
        if n.degree != 1 {
            return None;
        }
        out.insert((s, r));
    }
    Some(out)
}

pub fn rational(p: u64) -> K {
    BaseField::rational(p).unwrap()
}

/// Minimal unimodular descent from x to y found by breadth-first search over
/// all fractions in [y, x] whose denominator is at most that of x or y.
pub fn bfs_chain(x: &Q, y: &Q) -> Vec<Q> {
    use std::collections::{HashMap, VecDeque};
    let dmax = x.denom().max(y.denom()).to_i64().unwrap();
    let mut prev: HashMap<Q, Q> = HashMap::new();
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(c) = queue.pop_front() {
        if &c == y {
            let mut path = vec![c.clone()];
            let mut cur = c;
            while let Some(p) = prev.get(&cur) {
                path.push(p.clone());
                cur = p.clone();
            }
            path.reverse();
            return path;
        }
        let (n, d) = (c.numer().to_i64().unwrap(), c.denom().to_i64().unwrap());
        // every m/e below c with n·e − m·d = 1
        for e in 1..=dmax {
            if (n * e - 1).rem_euclid(d) != 0 {
                continue;
            }
            let next = Q::new(((n * e - 1) / d).into(), e.into());
            if next.denom().to_i64() == Some(e) && &next >= y && !prev.contains_key(&next) && &next != x {
                prev.insert(next.clone(), c.clone());
                queue.push_back(next);
            }
        }
    }
    panic!("no unimodular path from {x} to {y} within denominator {dmax}");
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn oracle_mults(alpha: i64, a: &Q, b: &Q) -> Vec<i64> {
    let path = bfs_chain(&(a * q(alpha)), &(b * q(alpha)));
    path[1..path.len() - 1].iter().map(|f| alpha * f.denom().to_i64().unwrap()).collect()
}

/// The dual graph of the special fibre for a polynomial c·∏(x − a_i) with
/// integer roots of positive valuation, from pairwise distances alone: every
/// cluster has degree 1, so e = b = ε = f = 1 and ℓ = 0.
pub fn degree_one_fibre(p: i64, roots: &[i64], lc_val: i64) -> maclane::fibre::FibreGraph {
    use maclane::fibre::FibreGraph;
    let clusters: Vec<(Vec<i64>, Q)> = rational_clusters(p, roots).into_iter().collect();
    let n = clusters.len();
    let parent: Vec<Option<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    j != i
                        && clusters[j].0.len() > clusters[i].0.len()
                        && clusters[i].0.iter().all(|r| clusters[j].0.contains(r))
                })
                .min_by_key(|&j| clusters[j].0.len())
        })
        .collect();
    let floor_div2 = |x: &Q| (x / q(2)).floor().to_integer().to_i64().unwrap();
    let mut g = FibreGraph::default();
    struct Node {
        verts: Vec<usize>,
    }
    let mut comp: Vec<Node> = vec![];
    let mut data = vec![];
    for (i, (s, lam)) in clusters.iter().enumerate() {
        let c = s[0];
        let mut nu = q(lc_val);
        for &r in roots {
            let d = if r == c { lam.clone() } else { q(vp(p, r as i128 - c as i128)).min(lam.clone()) };
            nu += d;
        }
        let children: Vec<usize> = (0..n).filter(|&j| parent[j] == Some(i)).collect();
        let size = s.len() as i64;
        let sum_t: i64 = children.iter().map(|&j| clusters[j].0.len() as i64).sum();
        let nn = if nu.numer().to_i64().unwrap() % 2 != 0 { 1 } else { 2 };
        let pp = if size % 2 == 1 { 1 } else { 2 };
        let s_v = (q(size) * lam + q(pp) * lam - &nu) / q(2);
        let gamma = if pp == 2 && ((&nu - q(size) * lam).to_integer().to_i64().unwrap()) % 2 != 0 { 2 } else { 1 };
        let delta = children.is_empty() as i64;
        let p0 = if delta == 1 { 1 } else { 2 };
        let s0 = -&nu / q(2) + lam;
        let gamma0 = if p0 == 2 && nu.numer().to_i64().unwrap() % 2 != 0 { 2 } else { 1 };
        let c0 = (2 - p0) % 2;
        let odd_children = children.iter().filter(|&&j| clusters[j].0.len() % 2 == 1).count() as i64;
        let u = size - sum_t - (2 - p0) + odd_children + delta * c0;
        let genus = if nn == 1 { 0 } else { floor_div2(&q(u - 1)).max(0) as usize };
        let split = nn == 2 && u == 0;
        let m = 2 / nn;
        let verts = if split { vec![g.add(m, 0), g.add(m, 0)] } else { vec![g.add(m, genus)] };
        comp.push(Node { verts });
        data.push((lam.clone(), nn, pp, gamma, s_v, delta, p0, gamma0, s0, size, sum_t));
    }
    let side = |c: &Node, k: usize| if c.verts.len() == 2 { c.verts[k] } else { c.verts[0] };
    let path = |g: &mut FibreGraph, from: usize, to: Option<usize>, mults: &[i64]| {
        let mut prev = from;
        for &m in mults {
            let x = g.add(m, 0);
            g.join(prev, x);
            prev = x;
        }
        if let Some(t) = to {
            g.join(prev, t);
        }
    };
    for i in 0..n {
        let (lam, nn, pp, gamma, s_v, delta, p0, gamma0, s0, size, sum_t) = data[i].clone();
        if nn == 1 {
            for _ in 0..(size - sum_t + p0 - 2) {
                let x = g.add(1, 0);
                g.join(comp[i].verts[0], x);
            }
        }
        let copies = (pp / gamma) as usize;
        match parent[i] {
            Some(w) => {
                let lw = &clusters[w].1;
                let b = &s_v - q(pp) / q(2) * (&lam - lw);
                let mults = oracle_mults(gamma, &s_v, &b);
                for k in 0..copies {
                    let (f, t) = (side(&comp[i], k), side(&comp[w], k));
                    path(&mut g, f, Some(t), &mults);
                }
            }
            None => {
                let b = Q::from_integer((&s_v * q(gamma) - q(1)).floor().to_integer()) / q(gamma);
                let mults = oracle_mults(gamma, &s_v, &b);
                for k in 0..copies {
                    path(&mut g, side(&comp[i], k), None, &mults);
                }
            }
        }
        if delta == 1 {
            let a = -s0.clone();
            let b = Q::from_integer((&a * q(gamma0) - q(1)).floor().to_integer()) / q(gamma0);
            let mults = oracle_mults(gamma0, &a, &b);
            for k in 0..(p0 / gamma0) as usize {
                path(&mut g, side(&comp[i], k), None, &mults);
            }
        }
    }
    g
}
