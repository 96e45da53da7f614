//! Small named groups used by tests, benchmarks and the CLI battery.

use super::group::PermGroup;
use super::perm::Perm;

fn cyc(degree: usize, cycles: &[&[usize]]) -> Perm {
    Perm::from_cycles(degree, cycles).expect("catalog permutations are valid")
}

fn build(name: &str, degree: usize, gens: Vec<Perm>) -> PermGroup {
    PermGroup::generate(name, degree, gens).expect("catalog groups are small")
}

pub fn trivial(degree: usize) -> PermGroup {
    build("1", degree, vec![])
}

/// Cyclic group of order `n` acting regularly on `n` points.
pub fn cyclic(n: usize) -> PermGroup {
    let points: Vec<usize> = (0..n).collect();
    let gens = if n > 1 { vec![cyc(n, &[&points])] } else { vec![] };
    build(&format!("Z{n}"), n, gens)
}

/// Z2 x Z2 acting regularly on 4 points.
pub fn klein_four() -> PermGroup {
    build(
        "Z2xZ2",
        4,
        vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])],
    )
}

pub fn symmetric(n: usize) -> PermGroup {
    let points: Vec<usize> = (0..n).collect();
    let gens = match n {
        0 | 1 => vec![],
        2 => vec![cyc(2, &[&[0, 1]])],
        _ => vec![cyc(n, &[&[0, 1]]), cyc(n, &[&points])],
    };
    build(&format!("S{n}"), n.max(1), gens)
}

/// Alternating group on `n >= 3` points, generated by the 3-cycles `(0 1 k)`.
pub fn alternating(n: usize) -> PermGroup {
    assert!(n >= 3, "alternating group needs at least 3 points");
    let gens = (2..n).map(|k| cyc(n, &[&[0, 1, k]])).collect();
    build(&format!("A{n}"), n, gens)
}

/// Symmetries of the regular `n`-gon in its natural action on the vertices.
pub fn dihedral(n: usize) -> PermGroup {
    assert!(n >= 3, "dihedral group needs at least 3 vertices");
    let rotation: Vec<usize> = (0..n).collect();
    let reflection = Perm::from_images((0..n).map(|i| (n - i) % n).collect()).expect("valid");
    build(&format!("D{n}"), n, vec![cyc(n, &[&rotation]), reflection])
}

/// Quaternion group in its regular representation on 8 points.
pub fn quaternion() -> PermGroup {
    build(
        "Q8",
        8,
        vec![
            cyc(8, &[&[0, 1, 3, 6], &[2, 5, 7, 4]]),
            cyc(8, &[&[0, 2, 3, 7], &[1, 4, 6, 5]]),
        ],
    )
}

/// The same abstract group on relabelled points with generators in reverse order,
/// so element indices differ from the original.
pub fn relabeled(g: &PermGroup, alpha: &Perm) -> PermGroup {
    let gens = g.generators().iter().rev().map(|p| p.conjugate_by(alpha)).collect();
    build(&format!("{}'", g.name()), g.degree(), gens)
}

/// The test battery of groups of order at most 12.
pub fn battery() -> Vec<PermGroup> {
    vec![
        cyclic(2),
        cyclic(3),
        cyclic(4),
        klein_four(),
        cyclic(5),
        cyclic(6),
        symmetric(3),
        dihedral(4),
        quaternion(),
        cyclic(8),
        alternating(4),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn involutions(g: &PermGroup) -> usize {
        g.elements().iter().filter(|p| p.order() == 2).count()
    }

    #[test]
    fn orders_and_involution_counts() {
        let expected = [
            ("Z2", 2, 1),
            ("Z3", 3, 0),
            ("Z4", 4, 1),
            ("Z2xZ2", 4, 3),
            ("Z5", 5, 0),
            ("Z6", 6, 1),
            ("S3", 6, 3),
            ("D4", 8, 5),
            ("Q8", 8, 1),
            ("Z8", 8, 1),
            ("A4", 12, 3),
        ];
        for (g, (name, order, inv)) in battery().iter().zip(expected) {
            assert_eq!(g.name(), name);
            assert_eq!(g.order(), order, "{name}");
            assert_eq!(involutions(g), inv, "{name}");
        }
    }

    #[test]
    fn lagrange_on_symmetric_group() {
        for g in battery() {
            let factorial: usize = (1..=g.degree()).product();
            assert_eq!(factorial % g.order(), 0, "{}", g.name());
        }
    }
}
