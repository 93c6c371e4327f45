use rtorsion::complex::compute_homology;
use rtorsion::generators::{
    gen_chain_complex, gen_homology_bases, gen_ses, gen_symplectic, GenConfig, GenError, SymplecticKind, Twist,
};
use rtorsion::io::{document_to_json, instance_to_json, to_canonical_string, Document, Instance, SesFile};
use rtorsion::linalg::determinant;
use rtorsion::torsion::milnor_product_check;

const KINDS: [SymplecticKind; 3] = [SymplecticKind::DZero, SymplecticKind::Exact, SymplecticKind::Mixed];

#[test]
fn every_generated_instance_validates() {
    for seed in 0..60 {
        for n in 1..=4 {
            let (c, bases) = gen_chain_complex(&GenConfig::new(seed, n, 5)).unwrap();
            assert!(c.validate().is_ok(), "chain seed {seed} n {n}");
            for p in 0..=n {
                assert!(!num::Zero::is_zero(&determinant(bases.degree(p)).unwrap()));
            }
            let g = gen_ses(&GenConfig::new(seed, n, 4)).unwrap();
            assert!(g.ses.validate().is_ok(), "ses seed {seed} n {n}");
        }
        for kind in KINDS {
            for (n, max) in [(2, 6), (6, 3)] {
                let s = gen_symplectic(&GenConfig::new(seed, n, max), kind).unwrap();
                assert!(s.validate().is_ok(), "{kind:?} seed {seed} n {n}");
            }
        }
    }
}

#[test]
fn kinds_have_their_shape() {
    for seed in 0..30 {
        let cfg = GenConfig::new(seed, 6, 4);
        let dzero = gen_symplectic(&cfg, SymplecticKind::DZero).unwrap();
        assert!(dzero.base.is_boundary_zero());
        let exact = gen_symplectic(&cfg, SymplecticKind::Exact).unwrap();
        assert!(compute_homology(&exact.base).unwrap().is_acyclic());
    }
}

#[test]
fn identical_configs_serialize_identically() {
    for seed in [0u64, 7, 12345] {
        let cfg = GenConfig::new(seed, 2, 6);
        let render = || {
            let s = gen_symplectic(&cfg, SymplecticKind::Mixed).unwrap();
            let inst = Instance {
                homology_bases: Some(gen_homology_bases(&cfg, &s.base).unwrap()),
                ..Instance::from_symplectic(&s)
            };
            to_canonical_string(&instance_to_json(&inst))
        };
        assert_eq!(render(), render());

        let cfg = GenConfig::new(seed, 3, 4);
        let ses = || {
            let g = gen_ses(&cfg).unwrap();
            to_canonical_string(&document_to_json(&Document::Ses(SesFile {
                ses: g.ses,
                bases: Some(g.bases),
            })))
        };
        assert_eq!(ses(), ses());
        assert_eq!(gen_chain_complex(&cfg).unwrap(), gen_chain_complex(&cfg).unwrap());
    }
    let a = gen_symplectic(&GenConfig::new(1, 2, 6), SymplecticKind::Mixed).unwrap();
    let b = gen_symplectic(&GenConfig::new(2, 2, 6), SymplecticKind::Mixed).unwrap();
    assert_ne!(a, b);
}

#[test]
fn requested_betti_numbers_are_produced() {
    let targets = vec![1, 2, 2, 2, 2, 2, 1];
    for seed in 0..100 {
        let mut cfg = GenConfig::new(seed, 6, 4);
        cfg.betti_targets = Some(targets.clone());
        let s = gen_symplectic(&cfg, SymplecticKind::Mixed).unwrap();
        let betti = compute_homology(&s.base).unwrap().betti();
        assert_eq!(betti, targets, "seed {seed}");
    }
}

#[test]
fn mixed_generation_covers_every_degree_pair() {
    let n = 6;
    let mut homology = vec![false; n / 2 + 1];
    let mut boundary = vec![false; n];
    for seed in 0..100 {
        let s = gen_symplectic(&GenConfig::new(seed, n, 4), SymplecticKind::Mixed).unwrap();
        let h = compute_homology(&s.base).unwrap();
        for (p, b) in h.betti().iter().enumerate().take(n / 2 + 1) {
            homology[p] |= *b > 0;
        }
        for (p, d) in h.degrees.iter().enumerate().take(n) {
            boundary[p] |= d.boundaries.cols() > 0;
        }
    }
    assert!(homology.iter().all(|&x| x), "{homology:?}");
    assert!(boundary.iter().all(|&x| x), "{boundary:?}");
}

#[test]
fn dimensions_are_honored() {
    let mut cfg = GenConfig::new(3, 2, 0);
    cfg.dims = Some(vec![3, 4, 3]);
    let s = gen_symplectic(&cfg, SymplecticKind::Mixed).unwrap();
    assert_eq!(s.base.dims(), &[3, 4, 3]);

    let mut cfg = GenConfig::new(3, 3, 0);
    cfg.dims = Some(vec![2, 3, 3, 1]);
    cfg.betti_targets = Some(vec![1, 0, 0, 0]);
    let (c, _) = gen_chain_complex(&cfg).unwrap();
    assert_eq!(c.dims(), &[2, 3, 3, 1]);
    assert_eq!(compute_homology(&c).unwrap().betti(), vec![1, 0, 0, 0]);
}

#[test]
fn infeasible_requests_are_rejected() {
    let mut cfg = GenConfig::new(0, 2, 4);
    cfg.dims = Some(vec![1, 3, 1]);
    assert!(matches!(gen_symplectic(&cfg, SymplecticKind::Mixed), Err(GenError::Infeasible(_))));
    let cfg = GenConfig::new(0, 4, 4);
    assert!(matches!(gen_symplectic(&cfg, SymplecticKind::Mixed), Err(GenError::InvalidConfig(_))));
    let mut cfg = GenConfig::new(0, 2, 4);
    cfg.betti_targets = Some(vec![1, 2]);
    assert!(matches!(gen_chain_complex(&cfg), Err(GenError::InvalidConfig(_))));
}

#[test]
fn sequences_carry_compatible_bases() {
    let mut twists = std::collections::HashSet::new();
    for seed in 0..40 {
        let g = gen_ses(&GenConfig::new(seed, 3, 4)).unwrap();
        let m = milnor_product_check(&g.ses, &g.bases).unwrap();
        assert!(m.compatible, "seed {seed}");
        assert!(m.les_exact, "seed {seed}");
        twists.extend(g.twists.iter().map(|t| format!("{t:?}")));
    }
    for t in [Twist::Identity, Twist::Unitriangular, Twist::OddPermutation] {
        assert!(twists.contains(&format!("{t:?}")));
    }
}
