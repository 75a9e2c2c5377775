//! Property tests for the pure operations: normal-form reduction, domain
//! classification, leaf transport, and the file formats.

use proptest::prelude::*;

use tubecut_core::body::{BodySpec, Hyperplane, Method, Side, reduce_to_normal_form};
use tubecut_core::certify::{CSV_HEADER, VolumeSample, read_samples, write_samples};
use tubecut_core::classify::{DomainLabel, ThimbleLabel, classify, critical_offsets};
use tubecut_core::monodromy::{LeafSet, LoopSpec, loop_to_perm, transport_leaf};

fn spec325() -> BodySpec {
    BodySpec::new(3, 2, 0.5).unwrap()
}

proptest! {
    /// Scaling a hyperplane does not change its reduction, except that a
    /// negative factor flips c together with the coorientation.
    #[test]
    fn reduction_is_scale_invariant(
        alpha in prop::array::uniform3(-3.0f64..3.0),
        gamma in prop::array::uniform2(-3.0f64..3.0),
        beta in -3.0f64..3.0,
        lambda in prop::sample::select(vec![-2.5f64, -1.0, -0.04, 0.04, 0.7, 3.0]),
    ) {
        prop_assume!(alpha.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let h = Hyperplane::new(alpha.to_vec(), gamma.to_vec(), beta).unwrap();
        let hs = Hyperplane::new(
            alpha.iter().map(|v| lambda * v).collect(),
            gamma.iter().map(|v| lambda * v).collect(),
            lambda * beta,
        )
        .unwrap();
        let nf = reduce_to_normal_form(&h);
        let nfs = reduce_to_normal_form(&hs);
        prop_assert!((nf.a - nfs.a).abs() <= 1e-9 * (1.0 + nf.a.abs()));
        let expect_c = if lambda > 0.0 { nf.c } else { -nf.c };
        prop_assert!((expect_c - nfs.c).abs() <= 1e-9 * (1.0 + nf.c.abs()));
        prop_assert!(nf.a >= 0.0);
    }

    /// classify(a, c) = classify(−a, c); negating c swaps the one-circle
    /// labels and fixes the rest.
    #[test]
    fn classify_mirrors(a in -4.0f64..4.0, c in -4.0f64..4.0) {
        let spec = spec325();
        let base = classify(a, c, &spec, 1e-9);
        prop_assert_eq!(base, classify(-a, c, &spec, 1e-9));
        let flipped = classify(a, -c, &spec, 1e-9);
        let expect = match base {
            DomainLabel::LeftOnly2l => DomainLabel::RightOnly2r,
            DomainLabel::RightOnly2r => DomainLabel::LeftOnly2l,
            other => other,
        };
        prop_assert_eq!(flipped, expect);
    }

    /// Offsets are sorted, labelled consistently, and classification changes
    /// exactly when c crosses one of them.
    #[test]
    fn offsets_partition_the_line(a in -4.0f64..4.0) {
        let spec = spec325();
        let off = critical_offsets(a, &spec);
        prop_assert!(off.offsets.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((off.offset_of(ThimbleLabel::RPlus) - (1.0 + off.e)).abs() < 1e-12);
        prop_assert!((off.offset_of(ThimbleLabel::LMinus) - (-1.0 - off.e)).abs() < 1e-12);
        // Within one open interval between offsets the label is constant.
        for w in off.offsets.windows(2) {
            if w[1] - w[0] < 1e-6 {
                continue;
            }
            let c1 = w[0] + 0.25 * (w[1] - w[0]);
            let c2 = w[0] + 0.75 * (w[1] - w[0]);
            prop_assert_eq!(classify(a, c1, &spec, 0.0), classify(a, c2, &spec, 0.0));
        }
    }

    /// Leaf transport is a group action: acting by the sum of two loops
    /// equals acting twice, and every action preserves cardinality.
    #[test]
    fn leaf_transport_is_an_action(
        bits in 0u8..16,
        l1 in (-6i64..6, -6i64..6),
        l2 in (-6i64..6, -6i64..6),
    ) {
        let leaf = LeafSet::from_labels(
            ThimbleLabel::ALL
                .into_iter()
                .enumerate()
                .filter(|(i, _)| bits & (1 << i) != 0)
                .map(|(_, l)| l),
        );
        let first = LoopSpec { lk3: l1.0, lk4: l1.1 };
        let second = LoopSpec { lk3: l2.0, lk4: l2.1 };
        let combined = LoopSpec { lk3: l1.0 + l2.0, lk4: l1.1 + l2.1 };
        let step_wise = transport_leaf(transport_leaf(leaf, first), second);
        prop_assert_eq!(step_wise, transport_leaf(leaf, combined));
        prop_assert_eq!(step_wise.len(), leaf.len());
        // Complements transport to complements.
        prop_assert_eq!(
            transport_leaf(leaf.complement(), first),
            transport_leaf(leaf, first).complement()
        );
    }

    /// Permutation images compose commutatively and are involutive.
    #[test]
    fn loop_images_commute(l1 in (-6i64..6, -6i64..6), l2 in (-6i64..6, -6i64..6)) {
        let g = loop_to_perm(LoopSpec { lk3: l1.0, lk4: l1.1 });
        let h = loop_to_perm(LoopSpec { lk3: l2.0, lk4: l2.1 });
        prop_assert_eq!(g.compose(&h), h.compose(&g));
        prop_assert!(g.compose(&g).is_identity());
    }

    /// CSV round trip is bit-lossless for finite values.
    #[test]
    fn csv_round_trip(
        a in -10.0f64..10.0,
        c in -10.0f64..10.0,
        volume in prop::num::f64::POSITIVE | prop::num::f64::ZERO,
        stderr in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        prop_assume!(volume.is_finite());
        let sample = VolumeSample {
            a,
            c,
            side: Side::Leq,
            domain: DomainLabel::Both4,
            volume,
            stderr,
            method: Method::MonteCarlo,
            n: 3,
            m: 2,
            eps: 0.5,
            tol: 0.0,
            seed,
        };
        let dir = std::env::temp_dir().join(format!(
            "tubecut-prop-{}-{seed:x}",
            std::process::id()
        ));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("row.csv");
        write_samples(&[sample], &path).unwrap();
        let back = read_samples(&path).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(back[0].volume.to_bits(), volume.to_bits());
        prop_assert_eq!(back[0].a.to_bits(), a.to_bits());
        prop_assert_eq!(back[0].seed, seed);
    }
}

#[test]
fn csv_header_is_the_contract() {
    assert_eq!(
        CSV_HEADER,
        "a,c,side,domain,volume,stderr,method,n,m,eps,tol,seed"
    );
}
