use std::sync::OnceLock;

use permmap::compose::standard;
use permmap::pa::CodeOrigin;
use permmap::tables::shipped;
use permmap::{
    build_pa, check_constraints, hamming_distance, project_out, search, swap_values, verify,
    ConstraintSet, DistanceMode, IndexSet, Mapping, MappingTable, Permutation, SearchProblem,
    TernaryCode, TernaryWord, VerificationJob,
};
use proptest::prelude::*;

fn trits(n: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..3, n)
}

fn permutation(len: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=len as u8).collect::<Vec<u8>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

/// A random injective table on `Z_3^n` into `S_{n+k}`.
fn random_table(n: usize, k: usize) -> impl Strategy<Value = MappingTable> {
    let width = n + k;
    let all: Vec<Vec<u8>> = {
        let mut out = Vec::new();
        let mut p: Vec<u8> = (1..=width as u8).collect();
        permute(&mut p, 0, &mut out);
        out
    };
    let rows = 3usize.pow(n as u32);
    Just(all).prop_shuffle().prop_map(move |perms| {
        let flat = perms.into_iter().take(rows).flatten().collect();
        MappingTable::from_rows("random", n, k, flat).unwrap()
    })
}

fn permute(p: &mut Vec<u8>, i: usize, out: &mut Vec<Vec<u8>>) {
    if i == p.len() {
        out.push(p.clone());
        return;
    }
    for j in i..p.len() {
        p.swap(i, j);
        permute(p, i + 1, out);
        p.swap(i, j);
    }
}

fn p91() -> &'static Mapping {
    static M: OnceLock<Mapping> = OnceLock::new();
    M.get_or_init(|| standard::p91().unwrap().materialized().unwrap())
}

fn p130() -> &'static Mapping {
    static M: OnceLock<Mapping> = OnceLock::new();
    M.get_or_init(|| standard::p130().unwrap())
}

proptest! {
    #[test]
    fn hamming_is_a_metric(x in trits(8), y in trits(8), z in trits(8)) {
        let d = |a: &[u8], b: &[u8]| hamming_distance(a, b).unwrap();
        prop_assert_eq!(d(&x, &x), 0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
        prop_assert_eq!(d(&x, &y) == 0, x == y);
    }

    #[test]
    fn swaps_are_involutions(p in permutation(9), a in 1u8..=9, b in 1u8..=9) {
        prop_assume!(a != b);
        let once = swap_values(&p, &[(a, b)]).unwrap();
        prop_assert_eq!(swap_values(&once, &[(a, b)]).unwrap(), p.clone());
        prop_assert!(p.distance(&once).unwrap() == 2);
    }

    #[test]
    fn projection_drops_exactly_the_removed(v in trits(10), removed in proptest::collection::btree_set(1usize..=10, 0..10)) {
        let set = IndexSet::new(removed.iter().copied());
        let kept = project_out(&v, &set).unwrap();
        prop_assert_eq!(kept.len(), 10 - removed.len());
        let expected: Vec<u8> = (1..=10).filter(|i| !removed.contains(i)).map(|i| v[i - 1]).collect();
        prop_assert_eq!(kept, expected);
    }

    #[test]
    fn table_text_round_trips(t in random_table(2, 2)) {
        let back = MappingTable::parse("random", &t.to_text()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn increase_implies_preserve(t in random_table(2, 3)) {
        let m = Mapping::from(t);
        let inc = verify(&VerificationJob::new(m.clone(), DistanceMode::Increase)).unwrap();
        let pre = verify(&VerificationJob::new(m, DistanceMode::Preserve)).unwrap();
        prop_assert!(!inc.passed() || pre.passed());
        prop_assert!(pre.violations_total <= inc.violations_total);
    }

    #[test]
    fn p91_preserves_sampled_pairs(x in trits(9), y in trits(9)) {
        let (x, y) = (TernaryWord::new(x).unwrap(), TernaryWord::new(y).unwrap());
        let f = p91();
        let dout = f.eval(&x).unwrap().distance(&f.eval(&y).unwrap()).unwrap();
        prop_assert!(dout >= x.distance(&y).unwrap());
    }

    #[test]
    fn p130_preserves_sampled_pairs(x in trits(13), y in trits(13)) {
        let (x, y) = (TernaryWord::new(x).unwrap(), TernaryWord::new(y).unwrap());
        let f = p130();
        let (fx, fy) = (f.eval(&x).unwrap(), f.eval(&y).unwrap());
        prop_assert!(fx.distance(&fy).unwrap() >= x.distance(&y).unwrap());
        prop_assert!(fx.values()[12] != 9 && fx.values()[12] != 10);
    }

    #[test]
    fn pa_size_equals_code_size(words in proptest::collection::btree_set(0usize..27, 1..27)) {
        let code = TernaryCode::new(
            3,
            words.iter().map(|&i| TernaryWord::from_index(3, i)).collect(),
            1,
            CodeOrigin::Repetition,
        ).unwrap();
        let pa = build_pa(&code, &Mapping::from(shipped("F").unwrap())).unwrap();
        prop_assert_eq!(pa.len(), code.len());
        if code.len() > 1 {
            prop_assert!(pa.min_distance().unwrap() > code.min_distance().unwrap());
        }
    }

    #[test]
    fn sampled_reports_depend_only_on_seed(seed in any::<u64>(), workers in 1usize..4) {
        let job = VerificationJob::new(Mapping::from(shipped("G").unwrap()), DistanceMode::Preserve)
            .strategy(permmap::Strategy::Sampled { count: 70_000, seed })
            .projection(IndexSet::new([7]));
        let a = verify(&job).unwrap();
        let b = verify(&job.clone().workers(workers)).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert!(a.passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn search_output_passes_its_constraints(
        n in 1usize..=2,
        extra in 1usize..=3,
        member in proptest::option::of((1u8..=5, proptest::collection::btree_set(1usize..=5, 1..4))),
        removed in proptest::collection::btree_set(1usize..=5, 0..3),
        strict in any::<bool>(),
        seed in proptest::option::of(any::<u64>()),
    ) {
        let width = n + extra;
        let mut c = ConstraintSet::new();
        if let Some((v, pos)) = member {
            if v as usize <= width && pos.iter().all(|&p| p <= width) {
                c = c.member(v, pos);
            }
        }
        let removed: Vec<usize> = removed.into_iter().filter(|&p| p <= width).collect();
        let mode = if strict { DistanceMode::Increase } else { DistanceMode::Preserve };
        c = c.projected(removed, mode);
        let mut p = SearchProblem::new(n, extra, c.clone()).budget(200_000);
        if let Some(s) = seed {
            p = p.shuffled(s);
        }
        let run = search(&p).unwrap();
        prop_assert!(run.stats.expansions <= 200_000);
        if let Some(t) = run.outcome.table() {
            prop_assert!(check_constraints(t, &c).unwrap().passed());
            prop_assert_eq!(run.stats.deepest_row, t.len());
        }
    }
}
