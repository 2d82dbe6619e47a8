use std::io::{self, BufRead, Write};
use std::sync::Mutex;

use super::encoding::{OracleQuery, OracleResponse};
use super::oracle::OracleSet;
use super::ObfError;

/// `F <i> <hex>` for a layer oracle, `G <hex>` for the output oracle.
pub fn format_request(i: usize, num_layers: usize, q: &OracleQuery) -> String {
    let body = hex::encode(q.encode());
    if i == num_layers {
        format!("G {body}")
    } else {
        format!("F {i} {body}")
    }
}

pub fn parse_request(line: &str, num_layers: usize) -> Result<(usize, OracleQuery), ObfError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let (i, body) = match toks.as_slice() {
        ["G", body] => (num_layers, *body),
        ["F", i, body] => {
            let i: usize = i.parse().map_err(|_| ObfError::Parse(format!("bad layer index {i:?}")))?;
            if i >= num_layers {
                return Err(ObfError::Parse(format!("no layer oracle F {i}")));
            }
            (i, *body)
        }
        _ => return Err(ObfError::Parse(format!("bad request {line:?}"))),
    };
    let bytes = hex::decode(body).map_err(|e| ObfError::Parse(e.to_string()))?;
    Ok((i, OracleQuery::decode(&bytes)?))
}

/// Answers requests line by line until end of input. Malformed requests get
/// `BOT`. Returns the number of requests served.
pub fn serve<R: BufRead, W: Write>(oracles: &dyn OracleSet, input: R, mut output: W) -> io::Result<usize> {
    let mut served = 0;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let resp = match parse_request(&line, oracles.num_layers()) {
            Ok((i, q)) => oracles.query(i, &q),
            Err(_) => OracleResponse::Bot(None),
        };
        writeln!(output, "{}", resp.to_wire())?;
        output.flush()?;
        served += 1;
    }
    Ok(served)
}

/// Oracle access over a line-oriented stream pair.
pub struct RemoteOracle<R, W> {
    io: Mutex<(R, W)>,
    num_layers: usize,
    error: Mutex<Option<String>>,
}

impl<R: BufRead, W: Write> RemoteOracle<R, W> {
    pub fn new(reader: R, writer: W, num_layers: usize) -> Self {
        Self { io: Mutex::new((reader, writer)), num_layers, error: Mutex::new(None) }
    }

    /// The first transport or protocol failure, reported as ⊥ to the caller.
    pub fn error(&self) -> Option<String> {
        self.error.lock().expect("error lock").clone()
    }

    fn exchange(&self, request: &str) -> Result<OracleResponse, ObfError> {
        let mut io = self.io.lock().expect("io lock");
        let (reader, writer) = &mut *io;
        writeln!(writer, "{request}")?;
        writer.flush()?;
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Err(ObfError::Protocol("oracle closed the connection".into()));
        }
        OracleResponse::from_wire(line.trim())
    }
}

impl<R: BufRead, W: Write> OracleSet for RemoteOracle<R, W> {
    fn num_layers(&self) -> usize {
        self.num_layers
    }

    fn query(&self, i: usize, q: &OracleQuery) -> OracleResponse {
        match self.exchange(&format_request(i, self.num_layers, q)) {
            Ok(resp) => resp,
            Err(e) => {
                self.error.lock().expect("error lock").get_or_insert_with(|| e.to_string());
                OracleResponse::Bot(None)
            }
        }
    }
}
