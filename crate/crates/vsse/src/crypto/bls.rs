//! BLS signatures over scalar messages.
//!
//! Sign is a single G1 exponentiation, verify is two pairings, and
//! signatures aggregate by group multiplication:
//! prod_i sign(sk, m_i) = sign(sk, sum_i m_i). That identity is what lets a
//! search proof stay one group element no matter how many entries it covers.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::group::{hash_to_scalar, pairing, G1Elem, G2Elem, Scalar};

/// A signing key and its public counterpart pk = g2^sk.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlsKeyPair {
    sk: Scalar,
    pk: G2Elem,
}

impl BlsKeyPair {
    /// Samples a fresh keypair. Exponents 0 and 1 are rejected and resampled:
    /// sk = 0 makes every signature the identity and sk = 1 publishes the
    /// signing exponent as the public key.
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let sk = Scalar::random(rng);
            if sk == Scalar::zero() || sk == Scalar::one() {
                continue;
            }
            return Self::from_sk(sk);
        }
    }

    /// Keypair from a fixed exponent. Degenerate exponents are accepted here;
    /// tests use them to pin the identity cases.
    pub fn from_sk(sk: Scalar) -> Self {
        let pk = G2Elem::generator().pow(sk);
        BlsKeyPair { sk, pk }
    }

    pub fn sk(&self) -> Scalar {
        self.sk
    }

    pub fn pk(&self) -> G2Elem {
        self.pk
    }
}

/// Maps a byte string onto G1 as g1^hash_to_scalar(msg).
pub fn bilinear_hash(msg: &[u8]) -> G1Elem {
    G1Elem::generator().pow(hash_to_scalar(msg))
}

/// sigma = g1^(sk * m).
pub fn sign(sk: Scalar, m: Scalar) -> G1Elem {
    G1Elem::generator().pow(sk * m)
}

/// Accepts iff e(sigma, g2) = e(g1^m, pk).
pub fn verify(pk: &G2Elem, m: Scalar, sigma: &G1Elem) -> bool {
    let lhs = pairing(sigma, &G2Elem::generator());
    let rhs = pairing(&G1Elem::generator().pow(m), pk);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    // Frozen encodings computed with the out-of-tree big-integer tool.

    #[test]
    fn bilinear_hash_frozen_vector() {
        assert_eq!(
            hex::encode(bilinear_hash(b"").to_bytes()),
            "8054243423706db83b82e5c2fcf0ae669f6c0cc959a3936671465e9b2f2d5309\
             75432c2aedb03102df249190b83f662f"
        );
    }

    #[test]
    fn bilinear_hash_equals_independent_exponentiation() {
        let msg = b"some document";
        assert_eq!(
            bilinear_hash(msg),
            G1Elem::generator().pow(hash_to_scalar(msg))
        );
    }

    #[test]
    fn sign_frozen_vectors() {
        let small = sign(Scalar::from_u64(2), Scalar::from_u64(3));
        assert_eq!(
            hex::encode(small.to_bytes()),
            "a6e82f6da4520f85c5d27d8f329eccfa05944fd1096b20734c894966d12a9e2a\
             9a9744529d7212d33883113a0cadb909"
        );

        let sk = hash_to_scalar(b"alpha");
        let m = hash_to_scalar(b"message");
        let keys = BlsKeyPair::from_sk(sk);
        assert_eq!(
            hex::encode(keys.pk().to_bytes()),
            "aeb3cd09fd1060f0ba2d10034cdcbad3c685bf09142043b0acddac591cf0d7d3\
             2059aa86bbadf83938a05c9dda82399316f2be3a1a2fedf24d580d1d1f28f0ff\
             89c8a8a5c48bcd1f7684bce8c2ffdaf520261faf1c73cbda85130d35945efc91"
        );
        let sigma = sign(sk, m);
        assert_eq!(
            hex::encode(sigma.to_bytes()),
            "96cd8baead4e0aa2394105587f8fb68288913ba4fe30ca979b8eddc6811f29d3\
             a4c3fb90eb38da48bdf44ab7afb758ca"
        );
        assert!(verify(&keys.pk(), m, &sigma));
    }

    #[test]
    fn degenerate_exponents() {
        // m = 0: the signature is the identity and still verifies.
        let keys = BlsKeyPair::from_sk(Scalar::from_u64(5));
        let sigma = sign(keys.sk(), Scalar::zero());
        assert!(sigma.is_identity());
        assert!(verify(&keys.pk(), Scalar::zero(), &sigma));

        // m = 1: the signature is g1^sk.
        let sigma = sign(keys.sk(), Scalar::one());
        assert_eq!(sigma, G1Elem::generator().pow(keys.sk()));

        // sk = 0 / sk = 1 would be degenerate keypairs.
        assert!(BlsKeyPair::from_sk(Scalar::zero()).pk().is_identity());
        assert_eq!(
            BlsKeyPair::from_sk(Scalar::one()).pk(),
            G2Elem::generator()
        );
    }

    #[test]
    fn generate_rejects_degenerate_exponents() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..8 {
            let keys = BlsKeyPair::generate(&mut rng);
            assert!(keys.sk() != Scalar::zero() && keys.sk() != Scalar::one());
            assert_eq!(keys.pk(), G2Elem::generator().pow(keys.sk()));
        }
    }

    #[test]
    fn keypair_satisfies_the_pairing_relation() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let keys = BlsKeyPair::generate(&mut rng);
        let base = pairing(&G1Elem::generator(), &G2Elem::generator());
        assert_eq!(
            pairing(&G1Elem::generator(), &keys.pk()),
            base.pow(keys.sk())
        );
    }

    #[test]
    fn sign_verify_round_trip_with_bit_flip_rejection() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for round in 0..200 {
            let keys = BlsKeyPair::generate(&mut rng);
            let m = Scalar::random(&mut rng);
            let sigma = sign(keys.sk(), m);
            assert!(verify(&keys.pk(), m, &sigma));

            // One random single-bit perturbation of m's encoding per round.
            let mut enc = m.to_bytes();
            let bit = (round * 37) % 256;
            enc[bit / 8] ^= 1 << (bit % 8);
            if let Ok(m_bad) = Scalar::from_bytes(&enc) {
                assert!(!verify(&keys.pk(), m_bad, &sigma));
            }
        }
    }

    #[test]
    fn every_bit_position_of_one_message_rejects() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let keys = BlsKeyPair::generate(&mut rng);
        let m = Scalar::random(&mut rng);
        let sigma = sign(keys.sk(), m);
        for bit in 0..256 {
            let mut enc = m.to_bytes();
            enc[bit / 8] ^= 1 << (bit % 8);
            if let Ok(m_bad) = Scalar::from_bytes(&enc) {
                assert!(!verify(&keys.pk(), m_bad, &sigma), "bit {bit}");
            }
        }
    }

    #[test]
    fn perturbed_signature_rejects() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let keys = BlsKeyPair::generate(&mut rng);
        let m = Scalar::random(&mut rng);
        let sigma = sign(keys.sk(), m) * G1Elem::generator();
        assert!(!verify(&keys.pk(), m, &sigma));
    }

    #[test]
    fn aggregation_identity_over_200_random_batches() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for round in 0..200 {
            let keys = BlsKeyPair::generate(&mut rng);
            let k = 1 + (round % 7);
            let msgs: Vec<Scalar> = (0..k).map(|_| Scalar::random(&mut rng)).collect();
            let product: G1Elem = msgs.iter().map(|m| sign(keys.sk(), *m)).product();
            let total: Scalar = msgs.iter().copied().sum();
            assert_eq!(product, sign(keys.sk(), total));
        }
    }
}
