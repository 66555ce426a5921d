mod common;

use common::{assert_numerically_zero, integrate, vertex_integral, wk};
use taut_core::algebra::{int, rat};
use taut_core::relations::{printed_trr, trr_report, Eliminator, Monomial, RelationDb};
use taut_core::strata::{BoundaryDivisor, TautClass};

fn mono(text: &str, n: u32) -> Monomial {
    Monomial::parse(text, n).unwrap()
}

/// μ minus its boundary expression pairs to zero with everything.
fn check_sound(e: &mut Eliminator, g: u32, mu: &Monomial) -> TautClass {
    let x = e.boundary_expression(g, mu).unwrap();
    let diff = mu.class(g).unwrap().sub(&x.value).unwrap();
    assert!(assert_numerically_zero(&diff, mu.degree()) > 0);
    x.value
}

#[test]
fn oracle_reproduces_known_numbers() {
    assert_eq!(wk(1, &[1]), rat(1, 24));
    assert_eq!(wk(2, &[4]), rat(1, 1152));
    assert_eq!(wk(0, &[1, 0, 0, 0]), int(1));
    assert_eq!(wk(1, &[1, 1]), rat(1, 24));
    assert_eq!(wk(2, &[2, 3]), rat(29, 5760));
    assert_eq!(vertex_integral(1, &[0], &[1]), rat(1, 24));
    assert_eq!(vertex_integral(0, &[0, 0, 0, 0, 0], &[1, 1]), int(5));
    assert_eq!(integrate(&TautClass::delta_irr(1, 1).unwrap()), rat(1, 2));
}

#[test]
fn genus_one_divisors() {
    let mut e = Eliminator::new();
    let expected = TautClass::delta_irr(1, 1).unwrap().scale(&rat(1, 12));
    assert_eq!(check_sound(&mut e, 1, &mono("psi1", 1)), expected);
    assert_eq!(check_sound(&mut e, 1, &mono("kappa1", 1)), expected);
    for (text, n) in [("psi1", 2), ("psi2", 2), ("kappa1", 2), ("psi3", 3), ("kappa1", 3)] {
        check_sound(&mut e, 1, &mono(text, n));
    }
    assert!(e.verify_relations().unwrap() > 0);
}

#[test]
fn genus_one_higher_degree() {
    let mut e = Eliminator::new();
    for (text, n) in [("psi1^2", 2), ("psi1*psi2", 2), ("kappa2", 2), ("kappa1^2", 2), ("psi1*kappa1", 2), ("psi1*psi2*psi3", 3)] {
        check_sound(&mut e, 1, &mono(text, n));
    }
}

#[test]
fn psi_lemma_in_genus_one() {
    let mut e = Eliminator::new();
    let records = e.psi_boundary_lemma(1).unwrap();
    assert_eq!(records.len(), 15);
    assert!(records.iter().all(|r| r.expression.value.terms().all(|(s, _)| s.num_edges() > 0)));
    assert!(e.verify_relations().unwrap() >= 15);
}

#[test]
fn genus_zero_from_pullback() {
    let mut e = Eliminator::new();
    let psi = check_sound(&mut e, 0, &mono("psi1", 4));
    assert_eq!(psi, TautClass::divisor(0, 4, &BoundaryDivisor::separating(0, &[1, 4])).unwrap());
    for (text, n) in [("psi2", 5), ("psi1*psi2", 5), ("kappa1", 5), ("kappa2", 5)] {
        check_sound(&mut e, 0, &mono(text, n));
    }
}

#[test]
fn literal_genus_zero_sum_has_wrong_degree() {
    let mut e = Eliminator::new();
    let report = trr_report(&mut e, 4, 1).unwrap();
    assert!(!report.agrees());
    assert_eq!(integrate(&report.derived), int(1));
    assert_eq!(integrate(&printed_trr(4, 1).unwrap()), int(3));
}

#[test]
fn below_threshold_is_rejected() {
    let mut e = Eliminator::new();
    assert!(e.boundary_expression(2, &mono("psi1", 1)).is_err());
    assert!(e.boundary_expression(1, &mono("1", 2)).is_err());
}

#[test]
fn star_reduction_in_genus_one() {
    let mut e = Eliminator::new();
    let c = TautClass::psi(1, 2, 1).unwrap().mul_psi(2).unwrap();
    let r = e.theorem_star_reduce(&c).unwrap();
    assert!(assert_numerically_zero(&c.sub(&r).unwrap(), 2) > 0);
    for (s, _) in r.terms() {
        assert!((0..s.num_vertices()).all(|v| s.vertex_degree(v) == 0));
    }
}

#[test]
fn database_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rel.jsonl");
    let mut e = Eliminator::new().with_db(RelationDb::open(&path).unwrap());
    let first = e.boundary_expression(1, &mono("psi1*psi2", 2)).unwrap();
    let stored = e.db().unwrap().len();
    assert!(stored >= 2);
    let mut again = Eliminator::new().with_db(RelationDb::open(&path).unwrap());
    assert_eq!(again.boundary_expression(1, &mono("psi1*psi2", 2)).unwrap(), first);
    assert_eq!(again.db().unwrap().len(), stored);
}

#[test]
fn database_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rel.jsonl");
    let mut e = Eliminator::new().with_db(RelationDb::open(&path).unwrap());
    e.boundary_expression(1, &mono("psi1", 1)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("1/24", "1/23", 1)).unwrap();
    assert!(matches!(RelationDb::open(&path), Err(taut_core::Error::Integrity(_))));
}

#[test]
fn genus_two_psi_squared() {
    let mut e = Eliminator::new();
    let x = check_sound(&mut e, 2, &mono("psi1^2", 1));
    let r = e.theorem_star_reduce(&x).unwrap();
    assert!(assert_numerically_zero(&x.sub(&r).unwrap(), 2) > 0);
    assert!(e.verify_relations().unwrap() > 0);
}

