use diffam::amd::{eval_strong_optimum, eval_weak_optimum, weak_bounds, AmdCode, Source};
use diffam::diffcore::{external_difference_multiset, incoming_differences, outgoing_differences, SetFamily};
use diffam::families::{verify, FamilyKind, VerifyOptions};
use diffam::group::FiniteAbelianGroup;
use diffam::Rational;
use proptest::prelude::*;

fn group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::collection::vec(2u64..=7, 1..=3).prop_map(|o| FiniteAbelianGroup::product(&o).unwrap())
}

/// A group with a disjoint family of `m >= 2` nonempty sets.
fn family() -> impl Strategy<Value = SetFamily> {
    (group(), 2usize..=5).prop_flat_map(|(g, m)| {
        let n = g.order();
        prop::collection::vec(0..=m, n).prop_filter_map("too few nonempty sets", move |labels| {
            let sets: Vec<Vec<usize>> = (0..m)
                .map(|s| (0..n).filter(|&x| labels[x] == s).collect::<Vec<_>>())
                .filter(|s| !s.is_empty())
                .collect();
            (sets.len() >= 2).then(|| SetFamily::from_indices(g.clone(), &sets).unwrap())
        })
    })
}

fn translate(f: &SetFamily, by: usize) -> SetFamily {
    let g = f.group();
    let sets: Vec<Vec<usize>> = f.index_sets().iter().map(|s| s.iter().map(|&x| g.add_index(x, by)).collect()).collect();
    SetFamily::from_indices(g.clone(), &sets).unwrap()
}

fn code(f: &SetFamily) -> AmdCode {
    let sources = f
        .sets()
        .iter()
        .enumerate()
        .map(|(i, s)| Source::equiprobable(format!("s{}", i + 1), s.clone()))
        .collect();
    AmdCode::new(f.group().clone(), sources).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn index_round_trip(g in group(), seed in any::<u64>()) {
        let n = g.order();
        let i = (seed % n as u64) as usize;
        let j = ((seed >> 20) % n as u64) as usize;
        let e = g.element_at(i);
        prop_assert_eq!(g.index_of(&e).unwrap(), i);
        let sum = g.add(&e, &g.element_at(j)).unwrap();
        prop_assert_eq!(g.index_of(&sum).unwrap(), g.add_index(i, j));
        prop_assert_eq!(g.sub_index(g.add_index(i, j), j), i);
        prop_assert_eq!(g.add_index(i, g.neg_index(i)), 0);
    }

    #[test]
    fn external_total_counts_ordered_cross_pairs(f in family()) {
        let ext = external_difference_multiset(&f).unwrap();
        let a = f.total_size() as u64;
        let sq: u64 = f.sizes().iter().map(|&k| (k * k) as u64).sum();
        prop_assert_eq!(ext.total(), a * a - sq);
        prop_assert_eq!(ext.get_index(0), 0);
        prop_assert!(ext.is_negation_symmetric());

        let mut out = outgoing_differences(&f, 0).unwrap();
        let mut inc = incoming_differences(&f, 0).unwrap();
        for i in 1..f.len() {
            out.merge(&outgoing_differences(&f, i).unwrap());
            inc.merge(&incoming_differences(&f, i).unwrap());
        }
        prop_assert_eq!(out.counts(), ext.counts());
        prop_assert_eq!(inc.counts(), ext.counts());
    }

    #[test]
    fn translation_preserves_differences_and_verdicts(f in family(), shift in any::<usize>()) {
        let t = translate(&f, shift % f.group().order());
        let (ef, et) = (external_difference_multiset(&f).unwrap(), external_difference_multiset(&t).unwrap());
        prop_assert_eq!(ef.counts(), et.counts());
        let opts = VerifyOptions::default();
        for kind in [FamilyKind::Edf, FamilyKind::Sedf, FamilyKind::Gedf, FamilyKind::Gsedf, FamilyKind::Pedf] {
            match (verify(&f, kind, &opts), verify(&t, kind, &opts)) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(a.verdict, b.verdict);
                    prop_assert_eq!(a.witnessed, b.witnessed);
                }
                (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
                (a, b) => prop_assert!(false, "{kind:?}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn weak_success_sums_to_the_collision_mass(f in family()) {
        let c = code(&f);
        let opt = eval_weak_optimum(&c);
        let (a, m) = (c.a() as i128, c.m() as i128);
        let sum: Rational = opt.table.iter().map(|d| d.value).sum();
        prop_assert_eq!(sum, Rational::new(a * (m - 1), m));
        prop_assert!(opt.value >= weak_bounds(&c).rand);
        prop_assert!(opt.table.iter().all(|d| d.value <= opt.value));
    }

    #[test]
    fn strong_success_sums_per_source(f in family()) {
        let c = code(&f);
        let strong = eval_strong_optimum(&c);
        let a = c.a() as i128;
        for (src, k) in strong.per_source.iter().zip(c.sizes()) {
            let sum: Rational = src.optimum.table.iter().map(|d| d.value).sum();
            prop_assert_eq!(sum, Rational::from_integer(a - k as i128));
            prop_assert!(src.optimum.value <= strong.value);
        }
        prop_assert!(eval_weak_optimum(&c).value <= strong.value);
    }

    #[test]
    fn rational_text_round_trip(num in -1_000_000i128..1_000_000, den in 1i128..1_000_000) {
        let r = Rational::new(num, den);
        let back: Rational = r.to_string().parse().unwrap();
        prop_assert_eq!(back, r);
        let json = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r);
        prop_assert_eq!((r.numer(), r.denom()), (back.numer(), back.denom()));
    }
}
