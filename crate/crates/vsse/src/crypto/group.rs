//! Thin multiplicative-notation wrappers over the BLS12-381 groups.
//!
//! The schemes are specified over a symmetric pairing e: G x G -> GT.
//! Practical curves are asymmetric, so the interface is split: signatures,
//! hashed messages, and aggregated proofs live in G1 ([`G1Elem`]), public
//! keys and the right-hand generator live in G2 ([`G2Elem`]). The pairing
//! equations hold verbatim under this split.

use core::fmt;
use core::iter::{Product, Sum};
use core::ops::{Add, Mul, Neg};

use ff::Field;
use group::Group;
use rand::{CryptoRng, RngCore};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha512};

use super::{tags, CryptoError};

/// An exponent: an integer modulo the group order q.
///
/// Canonical encoding is 32 bytes big-endian, value < q.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Scalar(bls12_381::Scalar);

impl Scalar {
    pub const BYTES: usize = 32;

    pub fn zero() -> Self {
        Scalar(bls12_381::Scalar::ZERO)
    }

    pub fn one() -> Self {
        Scalar(bls12_381::Scalar::ONE)
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar(bls12_381::Scalar::from(v))
    }

    /// Uniform scalar from 64 random bytes.
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut wide = [0u8; 64];
        rng.fill_bytes(&mut wide);
        Self::from_wide_be(&wide)
    }

    /// Reduces a 512-bit big-endian integer modulo q. The bias against a
    /// ~255-bit modulus is below 2^-250.
    pub fn from_wide_be(wide: &[u8; 64]) -> Self {
        let mut le = *wide;
        le.reverse();
        Scalar(bls12_381::Scalar::from_bytes_wide(&le))
    }

    /// Big-endian embedding of a 16-byte identifier. Injective: any 128-bit
    /// value is far below q.
    pub fn from_id_bytes(id: &[u8; 16]) -> Self {
        let mut wide = [0u8; 64];
        for (i, b) in id.iter().rev().enumerate() {
            wide[i] = *b;
        }
        let mut le = wide;
        le.reverse();
        Self::from_wide_be(&le)
    }

    pub fn to_bytes(self) -> [u8; 32] {
        let mut be = self.0.to_bytes();
        be.reverse();
        be
    }

    pub fn from_bytes(bytes: &[u8; 32]) -> Result<Self, CryptoError> {
        let mut le = *bytes;
        le.reverse();
        Option::from(bls12_381::Scalar::from_bytes(&le))
            .map(Scalar)
            .ok_or(CryptoError::InvalidScalar)
    }

    pub fn is_zero(&self) -> bool {
        bool::from(self.0.is_zero())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(self.to_bytes()))
    }
}

/// Element of the signature-side source group G1.
///
/// Canonical encoding is the curve's 48-byte compressed form; decoding
/// performs the full on-curve and prime-order-subgroup check.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct G1Elem(bls12_381::G1Projective);

/// Element of the key-side source group G2 (96-byte compressed encoding).
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct G2Elem(bls12_381::G2Projective);

/// Element of the pairing target group GT.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GtElem(bls12_381::Gt);

impl G1Elem {
    pub const BYTES: usize = 48;

    pub fn generator() -> Self {
        G1Elem(bls12_381::G1Projective::generator())
    }

    pub fn identity() -> Self {
        G1Elem(bls12_381::G1Projective::identity())
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    /// Exponentiation: self^k.
    pub fn pow(&self, k: Scalar) -> Self {
        G1Elem(self.0 * k.0)
    }

    pub fn to_bytes(self) -> [u8; 48] {
        bls12_381::G1Affine::from(self.0).to_compressed()
    }

    pub fn from_bytes(bytes: &[u8; 48]) -> Result<Self, CryptoError> {
        Option::from(bls12_381::G1Affine::from_compressed(bytes))
            .map(|a: bls12_381::G1Affine| G1Elem(a.into()))
            .ok_or(CryptoError::InvalidPoint)
    }
}

/// The group operation, written multiplicatively.
impl Mul for G1Elem {
    type Output = G1Elem;
    fn mul(self, rhs: G1Elem) -> G1Elem {
        G1Elem(self.0 + rhs.0)
    }
}

impl Product for G1Elem {
    fn product<I: Iterator<Item = G1Elem>>(iter: I) -> G1Elem {
        iter.fold(G1Elem::identity(), |acc, x| acc * x)
    }
}

impl fmt::Debug for G1Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G1Elem({})", hex::encode(self.to_bytes()))
    }
}

impl G2Elem {
    pub const BYTES: usize = 96;

    pub fn generator() -> Self {
        G2Elem(bls12_381::G2Projective::generator())
    }

    pub fn identity() -> Self {
        G2Elem(bls12_381::G2Projective::identity())
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    pub fn pow(&self, k: Scalar) -> Self {
        G2Elem(self.0 * k.0)
    }

    pub fn to_bytes(self) -> [u8; 96] {
        bls12_381::G2Affine::from(self.0).to_compressed()
    }

    pub fn from_bytes(bytes: &[u8; 96]) -> Result<Self, CryptoError> {
        Option::from(bls12_381::G2Affine::from_compressed(bytes))
            .map(|a: bls12_381::G2Affine| G2Elem(a.into()))
            .ok_or(CryptoError::InvalidPoint)
    }
}

impl Mul for G2Elem {
    type Output = G2Elem;
    fn mul(self, rhs: G2Elem) -> G2Elem {
        G2Elem(self.0 + rhs.0)
    }
}

impl fmt::Debug for G2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G2Elem({})", hex::encode(self.to_bytes()))
    }
}

impl GtElem {
    pub fn identity() -> Self {
        GtElem(bls12_381::Gt::identity())
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    pub fn pow(&self, k: Scalar) -> Self {
        GtElem(self.0 * k.0)
    }
}

impl Mul for GtElem {
    type Output = GtElem;
    fn mul(self, rhs: GtElem) -> GtElem {
        GtElem(self.0 + rhs.0)
    }
}

impl fmt::Debug for GtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GtElem(..)")
    }
}

/// The bilinear map e: G1 x G2 -> GT. Total on valid elements;
/// non-degenerate: e(g1, g2) is not the identity.
pub fn pairing(a: &G1Elem, b: &G2Elem) -> GtElem {
    GtElem(bls12_381::pairing(
        &bls12_381::G1Affine::from(a.0),
        &bls12_381::G2Affine::from(b.0),
    ))
}

/// Maps an arbitrary byte string into an exponent: the SHA-512 digest of
/// `"h2s" || msg` taken as a 512-bit big-endian integer, reduced modulo q.
pub fn hash_to_scalar(msg: &[u8]) -> Scalar {
    let mut hasher = Sha512::new();
    hasher.update(tags::H2S);
    hasher.update(msg);
    let digest: [u8; 64] = hasher.finalize().into();
    Scalar::from_wide_be(&digest)
}

macro_rules! impl_hex_serde {
    ($t:ty, $len:expr) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&hex::encode(self.to_bytes()))
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                let raw = hex::decode(&text).map_err(de::Error::custom)?;
                let bytes: [u8; $len] = raw
                    .as_slice()
                    .try_into()
                    .map_err(|_| de::Error::invalid_length(raw.len(), &stringify!($len)))?;
                Self::from_bytes(&bytes).map_err(de::Error::custom)
            }
        }
    };
}

impl_hex_serde!(Scalar, 32);
impl_hex_serde!(G1Elem, 48);
impl_hex_serde!(G2Elem, 96);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    // Expected values below were computed with an out-of-tree big-integer
    // tool (Python: hashlib + affine curve arithmetic over the raw field
    // constants), not with this crate.

    #[test]
    fn hash_to_scalar_frozen_vectors() {
        assert_eq!(
            hex::encode(hash_to_scalar(b"").to_bytes()),
            "57cf504a28a9e4a07ea1244c689fa5ae43a11a4881978d0710621418b60c2189"
        );
        let m1: Vec<u8> = (0u8..32).collect();
        let m2 = [0xffu8; 32];
        assert_eq!(
            hex::encode(hash_to_scalar(&m1).to_bytes()),
            "4370d25e4ea9d089e66232cd9357ad62dcf7ebfbeab29fe21f40b06a545be2dc"
        );
        assert_eq!(
            hex::encode(hash_to_scalar(&m2).to_bytes()),
            "5ccd9bb776235be044b51b2165e43e6705a1ad93afc84a510736c15ed75a77e5"
        );
        assert_ne!(hash_to_scalar(&m1), hash_to_scalar(&m2));
    }

    #[test]
    fn hash_to_scalar_deterministic() {
        assert_eq!(hash_to_scalar(b"abc"), hash_to_scalar(b"abc"));
    }

    #[test]
    fn generator_encodings_match_the_standard() {
        assert_eq!(
            hex::encode(G1Elem::generator().to_bytes()),
            "97f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac58\
             6c55e83ff97a1aeffb3af00adb22c6bb"
        );
        assert_eq!(
            hex::encode(G2Elem::generator().to_bytes()),
            "93e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049\
             334cf11213945d57e5ac7d055d042b7e024aa2b2f08f0a91260805272dc51051\
             c6e47ad4fa403b02b4510b647ae3d1770bac0326a805bbefd48056c8c121bdb8"
        );
    }

    #[test]
    fn pairing_is_non_degenerate() {
        let e = pairing(&G1Elem::generator(), &G2Elem::generator());
        assert!(!e.is_identity());
    }

    #[test]
    fn pairing_with_identity_degenerates() {
        let e = pairing(&G1Elem::identity(), &G2Elem::generator());
        assert!(e.is_identity());
    }

    #[test]
    fn bilinearity_over_200_random_exponent_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let base = pairing(&G1Elem::generator(), &G2Elem::generator());
        for _ in 0..200 {
            let a = Scalar::random(&mut rng);
            let b = Scalar::random(&mut rng);
            let lhs = pairing(
                &G1Elem::generator().pow(a),
                &G2Elem::generator().pow(b),
            );
            assert_eq!(lhs, base.pow(a * b));
        }
    }

    #[test]
    fn rejects_non_canonical_scalar() {
        let too_big = [0xffu8; 32];
        assert_eq!(Scalar::from_bytes(&too_big), Err(CryptoError::InvalidScalar));
    }

    #[test]
    fn rejects_invalid_point_encoding() {
        let mut bytes = G1Elem::generator().to_bytes();
        bytes[47] ^= 1;
        // Either off-curve or a different valid point; flipping the low bit
        // of x for the generator happens to leave the curve.
        assert!(G1Elem::from_bytes(&bytes).is_err());
        let garbage = [0x55u8; 96];
        assert!(G2Elem::from_bytes(&garbage).is_err());
    }

    #[test]
    fn id_embedding_is_the_big_endian_integer() {
        let id: [u8; 16] = core::array::from_fn(|i| i as u8);
        assert_eq!(
            hex::encode(Scalar::from_id_bytes(&id).to_bytes()),
            "00000000000000000000000000000000000102030405060708090a0b0c0d0e0f"
        );
    }

    proptest! {
        #[test]
        fn scalar_serialization_round_trips(seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let s = Scalar::random(&mut rng);
            prop_assert_eq!(Scalar::from_bytes(&s.to_bytes()).unwrap(), s);
        }

        #[test]
        fn group_serialization_round_trips(seed in any::<u64>()) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let k = Scalar::random(&mut rng);
            let p1 = G1Elem::generator().pow(k);
            let p2 = G2Elem::generator().pow(k);
            prop_assert_eq!(G1Elem::from_bytes(&p1.to_bytes()).unwrap(), p1);
            prop_assert_eq!(G2Elem::from_bytes(&p2.to_bytes()).unwrap(), p2);
        }

        #[test]
        fn id_embedding_is_injective(a in any::<[u8; 16]>(), b in any::<[u8; 16]>()) {
            prop_assume!(a != b);
            prop_assert_ne!(Scalar::from_id_bytes(&a), Scalar::from_id_bytes(&b));
        }
    }
}
