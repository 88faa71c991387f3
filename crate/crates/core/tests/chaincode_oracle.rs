mod common;

use common::{all_exponents, span_of, Span};
use ringpir::chaincode::{factor_xn_minus_1, ChainRingCode};

fn every_code(p: u64, e: u32, n: usize) -> Vec<ChainRingCode> {
    let k = factor_xn_minus_1(n, p, e).unwrap().len();
    all_exponents(k, e)
        .iter()
        .map(|a| ChainRingCode::from_exponents(p, e, n, a).unwrap())
        .collect()
}

fn check_ring(p: u64, e: u32, n: usize, with_dual: bool, pairs: bool) {
    let q = p.pow(e);
    let codes = every_code(p, e, n);
    let spans: Vec<Span> = codes.iter().map(span_of).collect();
    for (code, span) in codes.iter().zip(&spans) {
        let ty = code.module_type();
        assert_eq!(ty.ks, span.module_type(p, e), "{:?}", code.exponents());
        assert_eq!(span.count(), (p as usize).pow(ty.log_size() as u32));
        assert_eq!(code.howell().log_size(), ty.log_size());
        assert_eq!(code.is_hensel_lift(), ty.is_free());
        for i in 0..span.size() {
            let w = span.word(i);
            assert_eq!(code.contains(&w), span.contains(&w));
        }
        if with_dual {
            let dual = code.dual().unwrap();
            assert_eq!(span_of(&dual), span.dual());
            assert_eq!(dual.dual().unwrap(), *code);
            assert_eq!(span.count() * span_of(&dual).count(), (q as usize).pow(n as u32));
        }
    }
    if !pairs {
        return;
    }
    for (a, sa) in codes.iter().zip(&spans) {
        for (b, sb) in codes.iter().zip(&spans) {
            let meet = a.intersect(b).unwrap();
            assert_eq!(span_of(&meet), sa.and(sb));
            assert_eq!(a.is_subcode_of(b), sa.and(sb) == *sa);
        }
    }
}

#[test]
fn z4_length_7() {
    check_ring(2, 2, 7, true, true);
}

#[test]
fn z8_length_7_module_types() {
    for code in every_code(2, 3, 7) {
        let span = span_of(&code);
        assert_eq!(code.module_type().ks, span.module_type(2, 3), "{:?}", code.exponents());
        assert_eq!(span.count(), 1 << code.howell().log_size());
    }
}

#[test]
fn z9_length_4() {
    check_ring(3, 2, 4, true, true);
}

#[test]
fn z9_length_7() {
    check_ring(3, 2, 7, false, true);
}

#[test]
fn fields_length_7() {
    check_ring(3, 1, 7, true, true);
    check_ring(5, 1, 7, true, true);
}

#[test]
fn z25_length_3() {
    check_ring(5, 2, 3, true, true);
}

#[test]
fn sum_is_span_of_union() {
    let codes = every_code(2, 2, 7);
    for a in &codes {
        for b in &codes {
            let sum = a.sum(b).unwrap();
            let mut gens: Vec<Vec<u64>> = Vec::new();
            for c in [a, b] {
                gens.extend(c.howell().rows().iter().cloned());
            }
            assert_eq!(span_of(&sum), Span::closure(4, 7, &gens));
        }
    }
}

#[test]
fn torsion_part_is_p_torsion_closure() {
    // nf(C): zero on free codes, C ∩ pR otherwise
    for code in every_code(3, 2, 4) {
        let nf = code.torsion_part().unwrap();
        let span = span_of(&code);
        if code.is_hensel_lift() {
            assert!(nf.is_zero());
        } else {
            let expected: Vec<Vec<u64>> = span.members().filter(|w| w.iter().all(|x| x % 3 == 0)).collect();
            let nf_span = span_of(&nf);
            assert_eq!(nf_span.count(), expected.len());
            assert!(expected.iter().all(|w| nf_span.contains(w)));
        }
    }
}
