use proptest::prelude::*;

use s2d_core::lattice::LatticeBasis;
use s2d_core::rational::{parse_rational, rat, Rational, RationalVector};
use s2d_core::solvers::{cvp_exact, lambda1_sq, EnumerationBudget};

use s2d_harness::corpus::{corpus_dir, default_corpus, load_corpus, load_corpus_strict, write_corpus};
use s2d_harness::instance::{generate_instance, Instance, InstanceKind, GENERATOR_RANK_CAP};
use s2d_harness::HarnessError;

fn budget() -> EnumerationBudget {
    EnumerationBudget::default()
}

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn files_round_trip_exactly(
        rows in prop::collection::vec(prop::collection::vec(rational(), 3), 1..=3),
        target in prop::option::of(prop::collection::vec(rational(), 3)),
    ) {
        let Ok(basis) = LatticeBasis::new(rows.into_iter().map(RationalVector).collect()) else {
            return Ok(());
        };
        let inst = Instance {
            name: "prop".into(),
            basis,
            target: target.map(RationalVector),
            comments: vec!["generated".into()],
        };
        let text = inst.to_string();
        prop_assert_eq!(Instance::parse("prop", &text).unwrap(), inst);
    }
}

#[test]
fn diagonal_example() {
    let inst = Instance::parse("d", "3 3\n1 0 0\n0 2 0\n0 0 4\n").unwrap();
    assert_eq!(lambda1_sq(&inst.basis, &budget()).unwrap(), rat(1, 1));
}

#[test]
fn generated_diagonals_have_the_smallest_entry_as_lambda1() {
    for seed in 0..4 {
        let inst = generate_instance(InstanceKind::Diagonal, 5, seed).unwrap();
        let smallest = inst.basis.rows().iter().map(|r| r.norm_sq()).min().unwrap();
        assert_eq!(lambda1_sq(&inst.basis, &budget()).unwrap(), smallest);
    }
}

#[test]
fn scrambles_of_the_integer_lattice_keep_lambda1_one() {
    for seed in 0..8 {
        let inst = generate_instance(InstanceKind::UnimodularScramble, 4, seed).unwrap();
        assert!(inst.basis.same_lattice(&LatticeBasis::identity(4)));
        assert_eq!(lambda1_sq(&inst.basis, &budget()).unwrap(), rat(1, 1));
    }
}

fn planted_offset(inst: &Instance) -> Rational {
    let c = inst
        .comments
        .iter()
        .find_map(|c| c.strip_prefix("planted offset norm_sq="))
        .expect("planted-close instances record their offset");
    parse_rational(c).unwrap()
}

#[test]
fn planted_close_targets_sit_at_the_offset() {
    let mut confirmed = 0;
    for rank in 2..=6 {
        for seed in 0..4 {
            let inst = generate_instance(InstanceKind::PlantedClose, rank, seed).unwrap();
            let delta = planted_offset(&inst);
            let l1 = lambda1_sq(&inst.basis, &budget()).unwrap();
            let dist = cvp_exact(&inst.basis, inst.target.as_ref().unwrap(), &budget()).unwrap().dist_sq;
            assert!(dist <= delta);
            // below half the packing radius the plant is the unique closest point
            if delta * rat(16, 1) < l1 {
                assert_eq!(dist, planted_offset(&inst));
                confirmed += 1;
            }
        }
    }
    assert!(confirmed > 10, "{confirmed}");
}

#[test]
fn generation_is_deterministic_and_capped() {
    for kind in InstanceKind::ALL {
        assert_eq!(generate_instance(kind, 6, 3).unwrap(), generate_instance(kind, 6, 3).unwrap());
        assert_ne!(generate_instance(kind, 6, 3).unwrap(), generate_instance(kind, 6, 4).unwrap());
    }
    assert!(matches!(
        generate_instance(InstanceKind::Random, GENERATOR_RANK_CAP + 1, 0),
        Err(HarnessError::CapExceeded { .. })
    ));
    assert!(generate_instance(InstanceKind::Random, 0, 0).is_err());
}

#[test]
fn kinds_parse_by_name() {
    for kind in InstanceKind::ALL {
        assert_eq!(kind.name().parse::<InstanceKind>().unwrap(), kind);
    }
    assert!("hexagonal".parse::<InstanceKind>().is_err());
}

#[test]
fn malformed_files_name_the_line() {
    let cases = [
        ("2 2\n1 0\n0 x\n", 3),
        ("2 2\n1 0\n", 0),
        ("2 2\n1 0 0\n0 1\n", 2),
        ("2\n1 0\n", 1),
        ("2 2\n1 0\n0 1\nt: 1 2\nt: 1 2\n", 5),
        ("", 0),
    ];
    for (text, line) in cases {
        match Instance::parse("bad", text) {
            Err(HarnessError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    // dependent rows parse but do not form a basis
    assert!(matches!(Instance::parse("dep", "2 2\n1 1\n2 2\n"), Err(HarnessError::Core(_))));
}

#[test]
fn checked_in_corpus_matches_the_generators() {
    let fresh = default_corpus().unwrap();
    assert_eq!(fresh.len(), 140);
    let mut loaded = load_corpus_strict(&corpus_dir()).unwrap();
    let mut fresh_sorted = fresh.clone();
    fresh_sorted.sort_by(|a, b| (a.rank(), &a.name).cmp(&(b.rank(), &b.name)));
    loaded.sort_by(|a, b| (a.rank(), &a.name).cmp(&(b.rank(), &b.name)));
    assert_eq!(loaded, fresh_sorted);
}

#[test]
fn a_malformed_corpus_entry_only_affects_its_own_row() {
    let dir = tempfile::tempdir().unwrap();
    let good: Vec<Instance> = (0..3)
        .map(|s| generate_instance(InstanceKind::Random, 2, s).unwrap())
        .collect();
    write_corpus(dir.path(), &good).unwrap();
    std::fs::write(dir.path().join("broken.lat"), "2 2\n1 0\n").unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let rows = load_corpus(dir.path()).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().filter(|(_, r)| r.is_ok()).count(), 3);
    assert!(load_corpus_strict(dir.path()).is_err());
}
