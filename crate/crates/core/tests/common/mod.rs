//! Brute-force oracles shared by the integration tests. None of these call
//! into the library's search code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use keyrel_core::{OperationTable, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every relation over `k` elements of arity `n`, as member-index masks.
pub fn all_relations(k: usize, n: usize) -> impl Iterator<Item = Relation> {
    let size = k.pow(n as u32);
    assert!(size <= 16, "exhaustive enumeration only for tiny universes");
    (0u64..1 << size).map(move |mask| {
        Relation::from_predicate(k, n, |t| mask >> index(k, t) & 1 == 1).unwrap()
    })
}

pub fn index(k: usize, t: &[u8]) -> usize {
    t.iter().fold(0, |acc, &x| acc * k + x as usize)
}

pub fn tuples(k: usize, n: usize) -> Vec<Vec<u8>> {
    (0..k.pow(n as u32))
        .map(|mut idx| {
            let mut t = vec![0u8; n];
            for slot in t.iter_mut().rev() {
                *slot = (idx % k) as u8;
                idx /= k;
            }
            t
        })
        .collect()
}

/// All unary vector-functions on `k` elements and arity `n`.
pub fn all_vector_functions(k: usize, n: usize) -> Vec<Vec<Vec<u8>>> {
    let maps = tuples(k, k);
    let mut out: Vec<Vec<Vec<u8>>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                maps.iter().map(move |m| {
                    let mut p = prefix.clone();
                    p.push(m.clone());
                    p
                })
            })
            .collect();
    }
    out
}

pub fn apply(psi: &[Vec<u8>], t: &[u8]) -> Vec<u8> {
    t.iter().zip(psi).map(|(&x, m)| m[x as usize]).collect()
}

pub fn preserving_vector_functions(rel: &Relation) -> Vec<Vec<Vec<u8>>> {
    let members: Vec<Vec<u8>> = rel.members().map(|t| t.0).collect();
    all_vector_functions(rel.domain_size(), rel.arity())
        .into_iter()
        .filter(|psi| members.iter().all(|t| rel.contains(&apply(psi, t))))
        .collect()
}

/// Key tuples straight from the definition: `β ∉ ρ` reachable from every
/// `α ∉ ρ` by some preserving vector-function.
pub fn brute_key_tuples(rel: &Relation) -> BTreeSet<Vec<u8>> {
    let k = rel.domain_size();
    let n = rel.arity();
    let outside: Vec<Vec<u8>> = tuples(k, n).into_iter().filter(|t| !rel.contains(t)).collect();
    let vfs = preserving_vector_functions(rel);
    let mut reach = vec![BTreeSet::new(); outside.len()];
    for psi in &vfs {
        for (a, set) in outside.iter().zip(reach.iter_mut()) {
            set.insert(apply(psi, a));
        }
    }
    outside
        .iter()
        .filter(|b| reach.iter().all(|set| set.contains(*b)))
        .cloned()
        .collect()
}

pub fn brute_is_key(rel: &Relation) -> bool {
    !brute_key_tuples(rel).is_empty()
}

/// `i ≁ j` iff some `α ∉ ρ` has its three `{i,j}`-substitutions in `ρ`.
pub fn pattern_oracle(rel: &Relation) -> Vec<Vec<bool>> {
    let k = rel.domain_size();
    let n = rel.arity();
    let all = tuples(k, n);
    let mut related = vec![vec![true; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            related[i][j] = !all.iter().filter(|a| !rel.contains(a)).any(|a| {
                (0..k as u8).any(|ci| {
                    (0..k as u8).any(|cj| {
                        let mut t1 = a.clone();
                        t1[i] = ci;
                        let mut t2 = a.clone();
                        t2[j] = cj;
                        let mut t3 = a.clone();
                        t3[i] = ci;
                        t3[j] = cj;
                        rel.contains(&t1) && rel.contains(&t2) && rel.contains(&t3)
                    })
                })
            });
        }
    }
    related
}

/// Equivalence classes of a pattern matrix, or `None` when it is not
/// transitive.
pub fn pattern_classes(m: &[Vec<bool>]) -> Option<Vec<Vec<usize>>> {
    let n = m.len();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                if m[i][j] && m[j][l] && !m[i][l] {
                    return None;
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if !classes.iter().any(|c| c.contains(&i)) {
            classes.push((i..n).filter(|&j| m[i][j]).collect());
        }
    }
    Some(classes)
}

pub fn at_most_one_big_class(m: &[Vec<bool>]) -> bool {
    pattern_classes(m).is_some_and(|cs| cs.iter().filter(|c| c.len() > 1).count() <= 1)
}

/// `ρ̃(x) = ∃y_1..y_n ⋀_j ρ(x_1,..,y_j,..,x_n)`.
pub fn rho_tilde_oracle(rel: &Relation) -> Relation {
    let k = rel.domain_size();
    Relation::from_predicate(k, rel.arity(), |x| {
        (0..x.len()).all(|j| {
            (0..k as u8).any(|y| {
                let mut t = x.to_vec();
                t[j] = y;
                rel.contains(&t)
            })
        })
    })
    .unwrap()
}

/// Number of affine subspaces of GF(2)^n, via Gaussian binomials.
pub fn affine_subspace_count(n: u32) -> u64 {
    let gauss = |n: u32, d: u32| -> u64 {
        let mut num = 1u64;
        let mut den = 1u64;
        for i in 0..d {
            num *= (1u64 << (n - i)) - 1;
            den *= (1u64 << (i + 1)) - 1;
        }
        num / den
    };
    (0..=n).map(|d| gauss(n, d) << (n - d)).sum()
}

/// Smallest relation containing `seed` and closed under `f`.
pub fn closure(k: usize, n: usize, seed: &[Vec<u8>], f: &OperationTable) -> Relation {
    let mut members: BTreeSet<Vec<u8>> = seed.iter().cloned().collect();
    let m = f.arity();
    loop {
        let current: Vec<Vec<u8>> = members.iter().cloned().collect();
        let mut added = false;
        let mut pick = vec![0usize; m];
        'outer: loop {
            let t: Vec<u8> = (0..n)
                .map(|c| {
                    let args: Vec<u8> = pick.iter().map(|&r| current[r][c]).collect();
                    f.eval(&args)
                })
                .collect();
            added |= members.insert(t);
            for slot in pick.iter_mut().rev() {
                *slot += 1;
                if *slot < current.len() {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
        if !added {
            break;
        }
    }
    Relation::from_tuples(k, n, members).unwrap()
}

pub fn random_tuples(rng: &mut ChaCha8Rng, k: usize, n: usize, count: usize) -> Vec<Vec<u8>> {
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(0..k as u8)).collect())
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn median3() -> OperationTable {
    OperationTable::from_fn(3, 3, |a| {
        let mut s = a.to_vec();
        s.sort_unstable();
        s[1]
    })
    .unwrap()
}

pub fn min3(k: usize) -> OperationTable {
    OperationTable::from_fn(k, 3, |a| *a.iter().min().unwrap()).unwrap()
}

pub fn max3(k: usize) -> OperationTable {
    OperationTable::from_fn(k, 3, |a| *a.iter().max().unwrap()).unwrap()
}

/// Meet of the order with bottom 0 and `1`, `2` incomparable.
pub fn tree_meet() -> OperationTable {
    OperationTable::from_fn(3, 2, |a| if a[0] == a[1] { a[0] } else { 0 }).unwrap()
}

/// Rock-paper-scissors: `1` beats `0`, `2` beats `1`, `0` beats `2`.
pub fn rock_paper_scissors() -> OperationTable {
    OperationTable::from_fn(3, 2, |a| {
        let (x, y) = (a[0], a[1]);
        if x == y || (x + 2) % 3 == y {
            x
        } else {
            y
        }
    })
    .unwrap()
}

/// Seeded arity-`n` relation over three elements, drawn from families that
/// are often key and essential: punctured cubes, disjunctions of unary
/// constraints, linear equations with escape values, closures and plain
/// random relations. Closures also return their generating operation.
pub fn sample_k3(seed: u64, n: usize) -> (Relation, Option<OperationTable>) {
    let mut r = rng(seed);
    let k = 3;
    match seed % 5 {
        0 => {
            let holes = random_tuples(&mut r, k, n, 1 + (seed as usize / 5) % 3);
            (Relation::from_predicate(k, n, |t| !holes.iter().any(|h| h == t)).unwrap(), None)
        }
        1 => {
            let sets: Vec<Vec<u8>> = (0..n)
                .map(|_| {
                    let mask = r.gen_range(1u8..7);
                    (0..3u8).filter(|c| mask >> c & 1 == 1).collect()
                })
                .collect();
            (Relation::from_predicate(k, n, |t| t.iter().zip(&sets).any(|(x, s)| s.contains(x))).unwrap(), None)
        }
        2 => {
            let escapes: Vec<Option<u8>> = (0..n)
                .map(|_| r.gen_bool(0.4).then(|| r.gen_range(0..3u8)))
                .collect();
            let target = r.gen_range(0..3u32);
            let rel = Relation::from_predicate(k, n, |t| {
                t.iter().map(|&x| x as u32).sum::<u32>() % 3 == target
                    || t.iter().zip(&escapes).any(|(x, e)| Some(*x) == *e)
            })
            .unwrap();
            (rel, None)
        }
        3 => {
            let ops = [OperationTable::majority(3).unwrap(), median3(), min3(3), max3(3)];
            let f = ops[(seed as usize / 5) % ops.len()].clone();
            let seed_tuples = random_tuples(&mut r, k, n, 2 + (seed as usize / 20) % 4);
            (closure(k, n, &seed_tuples, &f), Some(f))
        }
        _ => (keyrel_core::corpus::generate(&keyrel_core::corpus::GeneratorSpec::Random {
            k,
            n,
            density: 0.7,
            seed,
        })
        .unwrap(), None),
    }
}
