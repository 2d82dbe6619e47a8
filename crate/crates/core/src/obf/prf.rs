use std::fmt;
use std::str::FromStr;

use hmac::{Hmac, KeyInit, Mac};
use rand::Rng;
use sha2::Sha256;

use crate::gf2::BitVector;

use super::ObfError;

pub const PRF_KEY_BYTES: usize = 32;

/// Key of the label PRF.
#[derive(Clone, PartialEq, Eq)]
pub struct PrfKey([u8; PRF_KEY_BYTES]);

impl PrfKey {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut k = [0u8; PRF_KEY_BYTES];
        rng.fill(&mut k[..]);
        Self(k)
    }

    pub fn from_bytes(bytes: [u8; PRF_KEY_BYTES]) -> Self {
        Self(bytes)
    }

    /// The first `bits` bits of HMAC-SHA256(key, ctr ‖ message) for
    /// ctr = 0, 1, ... as a 4-byte big-endian counter.
    pub fn eval(&self, message: &[u8], bits: usize) -> BitVector {
        let mut out = Vec::with_capacity(bits.div_ceil(8));
        let mut ctr: u32 = 0;
        while out.len() * 8 < bits {
            let mut mac = Hmac::<Sha256>::new_from_slice(&self.0).expect("any key length");
            mac.update(&ctr.to_be_bytes());
            mac.update(message);
            out.extend_from_slice(&mac.finalize().into_bytes());
            ctr += 1;
        }
        out.truncate(bits.div_ceil(8));
        if !bits.is_multiple_of(8) {
            *out.last_mut().expect("bits > 0") &= 0xffu8 << (8 - bits % 8);
        }
        BitVector::from_bytes(&out, bits).expect("enough bytes")
    }
}

impl fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PrfKey(..)")
    }
}

impl fmt::Display for PrfKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl FromStr for PrfKey {
    type Err = ObfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = hex::decode(s.trim()).map_err(|e| ObfError::Parse(format!("prf key: {e}")))?;
        let arr: [u8; PRF_KEY_BYTES] = bytes
            .try_into()
            .map_err(|_| ObfError::Parse(format!("prf key must be {PRF_KEY_BYTES} bytes")))?;
        Ok(Self(arr))
    }
}
