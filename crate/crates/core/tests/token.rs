use std::collections::{BTreeMap, BTreeSet};

use lmobf_core::gf2::BitVector;
use lmobf_core::token::{tok_gen, tok_sign, tok_ver, Signature, TokenBackend, TokenError, VerificationKey};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn backend_strategy() -> impl Strategy<Value = TokenBackend> {
    prop_oneof![Just(TokenBackend::Dense), Just(TokenBackend::Subspace)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn signatures_lie_in_the_right_space(seed in any::<u64>(), kp in 1usize..=4, m in 1usize..=4, backend in backend_strategy()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (vk, mut sk) = tok_gen(kp, m, backend, &mut rng).unwrap();
        let x = BitVector::random(m, &mut rng);
        let sig = tok_sign(&x, &mut sk, &mut rng).unwrap();
        for (j, a) in sig.vectors.iter().enumerate() {
            let space = &vk.subspaces()[j];
            let member = if x.get(j) { space.dual().contains(a) } else { space.contains(a) };
            prop_assert!(member);
        }
        // Rejections come only from zero vectors.
        prop_assert_eq!(tok_ver(&vk, &x, &sig), sig.vectors.iter().all(|a| !a.is_zero()));
        prop_assert!(matches!(tok_sign(&x, &mut sk, &mut rng), Err(TokenError::Consumed)));
    }

    #[test]
    fn large_kappa_never_fails_honestly(seed in any::<u64>(), m in 1usize..=8) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (vk, mut sk) = tok_gen(32, m, TokenBackend::Subspace, &mut rng).unwrap();
        let x = BitVector::random(m, &mut rng);
        let sig = tok_sign(&x, &mut sk, &mut rng).unwrap();
        prop_assert!(tok_ver(&vk, &x, &sig));
    }

    #[test]
    fn verification_key_text_round_trip(seed in any::<u64>(), kp in 1usize..=6, m in 0usize..=4) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (vk, _) = tok_gen(kp, m, TokenBackend::Subspace, &mut rng).unwrap();
        let back: VerificationKey = vk.to_string().parse().unwrap();
        prop_assert_eq!(back, vk);
    }
}

#[test]
fn malformed_signatures_are_rejected() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let (vk, mut sk) = tok_gen(16, 2, TokenBackend::Subspace, &mut rng).unwrap();
    let x = BitVector::from_u64(2, 2);
    let sig = tok_sign(&x, &mut sk, &mut rng).unwrap();
    assert!(tok_ver(&vk, &x, &sig));
    assert!(!tok_ver(&vk, &BitVector::from_u64(2, 3), &sig));
    assert!(!tok_ver(&vk, &x, &Signature { vectors: sig.vectors[..1].to_vec() }));
    let mut short = sig.clone();
    short.vectors[0] = BitVector::zeros(5);
    assert!(!tok_ver(&vk, &x, &short));
    let mut zero = sig.clone();
    zero.vectors[1] = BitVector::zeros(32);
    assert!(!tok_ver(&vk, &x, &zero));
}

#[test]
fn signing_needs_matching_length() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let (_, mut sk) = tok_gen(4, 2, TokenBackend::Dense, &mut rng).unwrap();
    assert!(matches!(
        tok_sign(&BitVector::zeros(3), &mut sk, &mut rng),
        Err(TokenError::Length { expected: 2, found: 3 })
    ));
    assert!(!sk.is_consumed());
    assert!(matches!(sk.residual_signature(&BitVector::zeros(2), &mut rng), Err(TokenError::NotConsumed)));
    assert_eq!(sk.num_qubits(), 16);
}

#[test]
fn both_backends_sample_uniformly() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let draws = 4000;
    for backend in [TokenBackend::Dense, TokenBackend::Subspace] {
        for bit in [false, true] {
            let x = BitVector::from_bits(&[bit]);
            let (vk, sk) = tok_gen(2, 1, backend, &mut rng).unwrap();
            let space = if bit { vk.subspaces()[0].dual() } else { vk.subspaces()[0].clone() };
            let mut counts: BTreeMap<BitVector, usize> = BTreeMap::new();
            for _ in 0..draws {
                let sig = tok_sign(&x, &mut sk.clone(), &mut rng).unwrap();
                *counts.entry(sig.vectors[0].clone()).or_default() += 1;
            }
            assert_eq!(counts.keys().cloned().collect::<BTreeSet<_>>(), space.elements().collect());
            // Each of the 4 elements has mean 1000 and standard deviation ≈ 27.
            assert!(counts.values().all(|&c| c.abs_diff(draws / 4) < 150), "{backend:?} {counts:?}");
        }
    }
}
