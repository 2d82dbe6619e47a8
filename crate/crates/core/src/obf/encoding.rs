use std::fmt;

use crate::gf2::BitVector;
use crate::token::Signature;

use super::ObfError;

/// Canonical byte encoding: a vector is its bit length as a big-endian u32
/// followed by its bits packed MSB first; a list is a big-endian u32 count
/// followed by its items.
#[derive(Default)]
pub struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vector(&mut self, v: &BitVector) -> &mut Self {
        self.buf.extend((v.len() as u32).to_be_bytes());
        self.buf.extend(v.to_bytes());
        self
    }

    pub fn vectors(&mut self, vs: &[BitVector]) -> &mut Self {
        self.buf.extend((vs.len() as u32).to_be_bytes());
        for v in vs {
            self.vector(v);
        }
        self
    }

    pub fn layers(&mut self, ls: &[Vec<BitVector>]) -> &mut Self {
        self.buf.extend((ls.len() as u32).to_be_bytes());
        for l in ls {
            self.vectors(l);
        }
        self
    }

    pub fn byte(&mut self, b: u8) -> &mut Self {
        self.buf.push(b);
        self
    }

    pub fn finish(&mut self) -> Vec<u8> {
        std::mem::take(&mut self.buf)
    }
}

pub struct Decoder<'a> {
    rest: &'a [u8],
}

impl<'a> Decoder<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { rest: bytes }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ObfError> {
        if self.rest.len() < n {
            return Err(ObfError::Parse("truncated encoding".into()));
        }
        let (head, tail) = self.rest.split_at(n);
        self.rest = tail;
        Ok(head)
    }

    fn count(&mut self) -> Result<usize, ObfError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize)
    }

    pub fn vector(&mut self) -> Result<BitVector, ObfError> {
        let len = self.count()?;
        let bytes = self.take(len.div_ceil(8))?;
        BitVector::from_bytes(bytes, len).map_err(|e| ObfError::Parse(e.to_string()))
    }

    pub fn vectors(&mut self) -> Result<Vec<BitVector>, ObfError> {
        let n = self.count()?;
        if n > self.rest.len() {
            return Err(ObfError::Parse("list longer than its encoding".into()));
        }
        (0..n).map(|_| self.vector()).collect()
    }

    pub fn layers(&mut self) -> Result<Vec<Vec<BitVector>>, ObfError> {
        let n = self.count()?;
        if n > self.rest.len() {
            return Err(ObfError::Parse("list longer than its encoding".into()));
        }
        (0..n).map(|_| self.vectors()).collect()
    }

    pub fn finish(self) -> Result<(), ObfError> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(ObfError::Parse(format!("{} trailing bytes", self.rest.len())))
        }
    }
}

/// The classical input to F_i or G: (x, σ_x, ṽ_1..ṽ_i, w̃_i, ℓ_1..ℓ_{i−1}).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OracleQuery {
    pub x: BitVector,
    pub sigma: Signature,
    /// Readouts of V_1..V_i, one list per layer.
    pub v_tilde: Vec<Vec<BitVector>>,
    pub w_tilde: Vec<BitVector>,
    pub labels: Vec<BitVector>,
}

impl OracleQuery {
    pub fn encode(&self) -> Vec<u8> {
        Encoder::new()
            .vector(&self.x)
            .vectors(&self.sigma.vectors)
            .layers(&self.v_tilde)
            .vectors(&self.w_tilde)
            .vectors(&self.labels)
            .finish()
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, ObfError> {
        let mut d = Decoder::new(bytes);
        let q = Self {
            x: d.vector()?,
            sigma: Signature { vectors: d.vectors()? },
            v_tilde: d.layers()?,
            w_tilde: d.vectors()?,
            labels: d.vectors()?,
        };
        d.finish()?;
        Ok(q)
    }

    /// Message hashed into ℓ_i: x, σ_x, ṽ_1..ṽ_i, ℓ_1..ℓ_{i−1}, then r_i.
    pub fn label_message(&self, i: usize, r: bool) -> Vec<u8> {
        Encoder::new()
            .vector(&self.x)
            .vectors(&self.sigma.vectors)
            .layers(&self.v_tilde[..=i])
            .vectors(&self.labels[..i])
            .byte(u8::from(r))
            .finish()
    }
}

/// Why an oracle refused, reported only in diagnostic mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BotReason {
    BadToken,
    BadLabel,
    LabelCollision,
    DecodeFail,
}

impl fmt::Display for BotReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BotReason::BadToken => "bad-token",
            BotReason::BadLabel => "bad-label",
            BotReason::LabelCollision => "label-collision",
            BotReason::DecodeFail => "decode-fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OracleResponse {
    /// F_i output (ṽ_i, ℓ_i).
    Layer { v_tilde: Vec<BitVector>, label: BitVector },
    /// G output y.
    Output(BitVector),
    Bot(Option<BotReason>),
}

impl OracleResponse {
    pub fn is_bot(&self) -> bool {
        matches!(self, OracleResponse::Bot(_))
    }

    /// Wire form: `OK <hex ṽ_i> <hex ℓ_i>`, `OK <hex y>` or `BOT`.
    pub fn to_wire(&self) -> String {
        match self {
            OracleResponse::Layer { v_tilde, label } => format!(
                "OK {} {}",
                hex::encode(Encoder::new().vectors(v_tilde).finish()),
                hex::encode(Encoder::new().vector(label).finish())
            ),
            OracleResponse::Output(y) => format!("OK {}", hex::encode(Encoder::new().vector(y).finish())),
            OracleResponse::Bot(_) => "BOT".to_string(),
        }
    }

    pub fn from_wire(line: &str) -> Result<Self, ObfError> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let unhex = |s: &str| hex::decode(s).map_err(|e| ObfError::Parse(e.to_string()));
        match toks.as_slice() {
            ["BOT"] => Ok(OracleResponse::Bot(None)),
            ["OK", y] => {
                let bytes = unhex(y)?;
                let mut d = Decoder::new(&bytes);
                let y = d.vector()?;
                d.finish()?;
                Ok(OracleResponse::Output(y))
            }
            ["OK", v, l] => {
                let (vb, lb) = (unhex(v)?, unhex(l)?);
                let mut d = Decoder::new(&vb);
                let v_tilde = d.vectors()?;
                d.finish()?;
                let mut d = Decoder::new(&lb);
                let label = d.vector()?;
                d.finish()?;
                Ok(OracleResponse::Layer { v_tilde, label })
            }
            _ => Err(ObfError::Parse(format!("bad oracle response {line:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn sample() -> OracleQuery {
        OracleQuery {
            x: bv("10"),
            sigma: Signature { vectors: vec![bv("0110"), bv("1001")] },
            v_tilde: vec![vec![bv("10101")], vec![]],
            w_tilde: vec![bv("00000"), bv("11111")],
            labels: vec![bv("1010101010")],
        }
    }

    #[test]
    fn vector_framing() {
        let bytes = Encoder::new().vector(&bv("101")).finish();
        assert_eq!(bytes, vec![0, 0, 0, 3, 0b1010_0000]);
        let empty = Encoder::new().vector(&BitVector::zeros(0)).finish();
        assert_eq!(empty, vec![0, 0, 0, 0]);
    }

    #[test]
    fn query_round_trip() {
        let q = sample();
        assert_eq!(OracleQuery::decode(&q.encode()).unwrap(), q);
        let mut bytes = q.encode();
        bytes.push(0);
        assert!(OracleQuery::decode(&bytes).is_err());
        assert!(OracleQuery::decode(&bytes[..5]).is_err());
    }

    #[test]
    fn response_wire_round_trip() {
        for r in [
            OracleResponse::Layer { v_tilde: vec![bv("101"), bv("011")], label: bv("1100") },
            OracleResponse::Output(bv("01")),
            OracleResponse::Bot(None),
        ] {
            assert_eq!(OracleResponse::from_wire(&r.to_wire()).unwrap(), r);
        }
    }
}
