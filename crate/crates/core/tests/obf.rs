use std::io::{BufReader, Cursor};
use std::sync::Arc;

use lmobf_core::gf2::BitVector;
use lmobf_core::lm::{compile, Circuit, LmProgram, StateTag};
use lmobf_core::obf::{
    format_request, honest_run, mutate_query, parse_request, qeval, qobf, run_attack, serve, AttackKind, BotReason,
    ObfError, ObfParams, OracleKey, OracleMode, OracleQuery, OracleResponse, OracleSet, Oracles, Recording,
    RegisterMode, RemoteOracle, DETERMINISTIC_PROGRAMS,
};
use lmobf_core::token::TokenBackend;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn program(text: &str) -> (Circuit, LmProgram) {
    let c: Circuit = text.parse().unwrap();
    let p = compile(&c).unwrap();
    (c, p)
}

/// κ′ = 32 keeps the zero-vector token failure (m·2^{−κ′}) out of sight.
fn params(register: RegisterMode) -> ObfParams {
    ObfParams { kappa_prime: 32, token_backend: Some(TokenBackend::Subspace), register, ..ObfParams::default() }
}

fn inputs(m: usize) -> Vec<BitVector> {
    (0..1u64 << m).map(|v| BitVector::from_u64(v, m)).collect()
}

fn q_map(c: &Circuit) -> OracleMode {
    let c = c.clone();
    OracleMode::Simulated(Arc::new(move |x: &BitVector| c.deterministic_output(x).unwrap().unwrap()))
}

#[test]
fn catalog_is_deterministic_and_small() {
    for (name, text) in DETERMINISTIC_PROGRAMS {
        let (c, _) = program(text);
        assert!(c.num_inputs() <= 2 && c.t_count() <= 2, "{name}");
        for x in inputs(c.num_inputs()) {
            assert!(c.deterministic_output(&x).unwrap().is_some(), "{name} on {x}");
        }
    }
}

#[test]
fn logical_register_end_to_end() {
    let params = params(RegisterMode::Logical);
    for (name, text) in DETERMINISTIC_PROGRAMS {
        let (c, p) = program(text);
        for x in inputs(c.num_inputs()) {
            let want = c.deterministic_output(&x).unwrap().unwrap();
            for seed in 0..5 {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let (mut obf, key) = qobf(&params, &p, &mut rng).unwrap();
                let oracles = Oracles::new(key, OracleMode::Real).unwrap().diagnostic();
                let y = qeval(&x, &mut obf, &oracles, &mut rng).unwrap();
                assert_eq!(y, want, "{name} x={x} seed {seed}");
            }
        }
    }
}

#[test]
fn physical_register_end_to_end() {
    let params = ObfParams { lambda: 1, ..params(RegisterMode::Physical) };
    let mut ran = 0;
    for (name, text) in DETERMINISTIC_PROGRAMS {
        let (c, p) = program(text);
        if p.num_wires() * 3 > 15 {
            continue;
        }
        ran += 1;
        for x in inputs(c.num_inputs()) {
            let want = c.deterministic_output(&x).unwrap().unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(7);
            let (mut obf, key) = qobf(&params, &p, &mut rng).unwrap();
            assert!(obf.is_physical());
            let oracles = Oracles::new(key, OracleMode::Real).unwrap().diagnostic();
            assert_eq!(qeval(&x, &mut obf, &oracles, &mut rng).unwrap(), want, "{name}");
        }
    }
    assert!(ran >= 4);
}

#[test]
fn simulated_oracles_reproduce_q() {
    let params = params(RegisterMode::Auto);
    for (name, text) in DETERMINISTIC_PROGRAMS {
        let (c, p) = program(text);
        for x in inputs(c.num_inputs()) {
            let mut rng = ChaCha20Rng::seed_from_u64(3);
            let (mut obf, key) = qobf(&params, &p, &mut rng).unwrap();
            let sim = Oracles::new(key, q_map(&c)).unwrap().diagnostic();
            let y = qeval(&x, &mut obf, &sim, &mut rng).unwrap();
            assert_eq!(Some(y), c.deterministic_output(&x).unwrap(), "{name}");
        }
    }
}

#[test]
fn real_and_simulated_reject_the_same_queries() {
    let params = params(RegisterMode::Logical);
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    let mut bots = 0;
    let mut total = 0;
    for (_, text) in DETERMINISTIC_PROGRAMS {
        let (c, p) = program(text);
        let x = BitVector::random(c.num_inputs(), &mut rng);
        let run = honest_run(&params, &p, &x, &mut rng).unwrap();
        let real = Oracles::new(run.key.clone(), OracleMode::Real).unwrap();
        let sim = Oracles::new(run.key.clone(), q_map(&c)).unwrap();
        for (i, q, _) in &run.calls {
            for _ in 0..40 {
                let m = mutate_query(q, &mut rng);
                let (a, b) = (real.query(*i, &m), sim.query(*i, &m));
                assert_eq!(a.is_bot(), b.is_bot());
                bots += usize::from(a.is_bot());
                total += 1;
            }
        }
    }
    assert!(bots > 0 && bots < total);
}

#[test]
fn accepted_labels_were_emitted_on_the_same_prefix() {
    let params = params(RegisterMode::Logical);
    for (_, text) in DETERMINISTIC_PROGRAMS {
        let (c, p) = program(text);
        if p.t() == 0 {
            continue;
        }
        for x in inputs(c.num_inputs()) {
            let mut rng = ChaCha20Rng::seed_from_u64(5);
            let (mut obf, key) = qobf(&params, &p, &mut rng).unwrap();
            let oracles = Oracles::new(key, OracleMode::Real).unwrap().with_log();
            qeval(&x, &mut obf, &oracles, &mut rng).unwrap();
            let log = oracles.log().unwrap();
            assert!(log.accepted() > 0 && log.emitted() > 0);
            assert_eq!(log.unmatched(), 0);
        }
    }
}

#[test]
fn oracle_is_deterministic() {
    let (c, p) = program(DETERMINISTIC_PROGRAMS[6].1);
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let run = honest_run(&params(RegisterMode::Logical), &p, &BitVector::from_u64(2, c.num_inputs()), &mut rng).unwrap();
    let a = Oracles::new(run.key.clone(), OracleMode::Real).unwrap();
    let b = Oracles::new(run.key.clone(), OracleMode::Real).unwrap();
    for (i, q, r) in &run.calls {
        assert_eq!(&a.query(*i, q), r);
        assert_eq!(a.query(*i, q), b.query(*i, q));
    }
}

#[test]
fn honest_layer_label_and_output() {
    let (c, p) = program("qubits 1 inputs 1 outputs 0\nT 0\nT 0\n");
    let params = params(RegisterMode::Logical);
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let x = BitVector::from_u64(1, 1);
    let run = honest_run(&params, &p, &x, &mut rng).unwrap();
    assert_eq!(Some(run.y.clone()), c.deterministic_output(&x).unwrap());
    let (i, q) = run.labelled_call().unwrap();
    assert_eq!(q.labels.len(), i);
    assert!(q.labels.iter().all(|l| l.len() == 64));
    let oracles = Oracles::new(run.key.clone(), OracleMode::Real).unwrap().diagnostic();

    let g = run.calls.iter().find(|(i, _, r)| *i == p.t() && !r.is_bot()).unwrap();
    assert_eq!(g.2, OracleResponse::Output(run.y.clone()));

    let mut truncated = g.1.clone();
    truncated.labels.pop();
    assert_eq!(oracles.query(p.t(), &truncated), OracleResponse::Bot(Some(BotReason::BadLabel)));

    let mut other = g.1.clone();
    other.sigma = run.calls.iter().map(|(_, q, _)| q.sigma.clone()).next().unwrap();
    other.x = BitVector::from_u64(0, 1);
    assert_eq!(oracles.query(p.t(), &other), OracleResponse::Bot(Some(BotReason::BadToken)));

    let adversarial = Oracles::new(run.key.clone(), OracleMode::Real).unwrap();
    assert_eq!(adversarial.query(p.t(), &truncated), OracleResponse::Bot(None));
}

#[test]
fn codeword_flip_is_a_decode_failure() {
    let (c, p) = program("qubits 1 inputs 1 outputs 0\nT 0\n");
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let x = BitVector::from_u64(0, c.num_inputs());
    let run = honest_run(&params(RegisterMode::Logical), &p, &x, &mut rng).unwrap();
    let oracles = Oracles::new(run.key.clone(), OracleMode::Real).unwrap().diagnostic();
    let s_delta = run.key.auth.s_delta().clone();
    let (i, q, _) = run.calls.iter().find(|(i, q, r)| *i < p.t() && !q.w_tilde.is_empty() && !r.is_bot()).unwrap();
    for k in 0..run.key.auth.p() {
        let mut e = BitVector::zeros(run.key.auth.p());
        e.set(k, true);
        if s_delta.contains(&e) {
            continue;
        }
        let mut m = q.clone();
        m.w_tilde[0].xor_assign(&e);
        assert_eq!(oracles.query(*i, &m), OracleResponse::Bot(Some(BotReason::DecodeFail)));
    }
}

#[test]
fn t_free_program_has_only_g() {
    let (_, p) = program("qubits 2 inputs 2 outputs 0,1\nCNOT 0 1\n");
    assert_eq!(p.t(), 0);
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let (obf, key) = qobf(&params(RegisterMode::Logical), &p, &mut rng).unwrap();
    assert_eq!(Oracles::new(key, OracleMode::Real).unwrap().num_layers(), 0);
    assert_eq!(obf.num_qubits(5), 2 * 5 + 2 * 2 * 32);
}

#[test]
fn seeds_change_keys_not_function() {
    let (c, p) = program(DETERMINISTIC_PROGRAMS[5].1);
    let params = params(RegisterMode::Logical);
    let x = BitVector::from_u64(1, c.num_inputs());
    let mut keys = Vec::new();
    for seed in 0..10 {
        let mut rng = ChaCha20Rng::seed_from_u64(100 + seed);
        let (mut obf, key) = qobf(&params, &p, &mut rng).unwrap();
        let oracles = Oracles::new(key.clone(), OracleMode::Real).unwrap();
        assert_eq!(Some(qeval(&x, &mut obf, &oracles, &mut rng).unwrap()), c.deterministic_output(&x).unwrap());
        keys.push(key.to_string());
    }
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), 10);
}

#[test]
fn qobf_rejects_input_wires_and_bad_params() {
    let (_, mut p) = program("qubits 1 inputs 1 outputs 0\nH 0\n");
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    p.state[0] = StateTag::InputBit(0);
    assert!(matches!(qobf(&ObfParams::default(), &p, &mut rng), Err(ObfError::InvalidProgram(_))));
    let (_, p) = program("qubits 1 inputs 1 outputs 0\nH 0\n");
    let bad = ObfParams { kappa: 4, ..ObfParams::default() };
    assert!(matches!(qobf(&bad, &p, &mut rng), Err(ObfError::Params(_))));
}

#[test]
fn evaluating_twice_fails_on_the_token() {
    let (_, p) = program(DETERMINISTIC_PROGRAMS[0].1);
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    let (mut obf, key) = qobf(&params(RegisterMode::Logical), &p, &mut rng).unwrap();
    let oracles = Oracles::new(key, OracleMode::Real).unwrap();
    let x = BitVector::from_u64(1, 2);
    qeval(&x, &mut obf, &oracles, &mut rng).unwrap();
    assert!(matches!(qeval(&x, &mut obf, &oracles, &mut rng), Err(ObfError::Token(_))));
}

#[test]
fn oracle_key_text_round_trip() {
    let (_, p) = program(DETERMINISTIC_PROGRAMS[6].1);
    let mut rng = ChaCha20Rng::seed_from_u64(14);
    let (_, key) = qobf(&ObfParams::default(), &p, &mut rng).unwrap();
    let text = key.to_string();
    let back: OracleKey = text.parse().unwrap();
    assert_eq!(back, key);
    assert_eq!(back.to_string(), text);
    assert!(text.replace("oracle-key", "oracle-kez").parse::<OracleKey>().is_err());
}

#[test]
fn wire_protocol_matches_in_process_oracles() {
    let (c, p) = program(DETERMINISTIC_PROGRAMS[6].1);
    let mut rng = ChaCha20Rng::seed_from_u64(15);
    let run = honest_run(&params(RegisterMode::Logical), &p, &BitVector::from_u64(3, c.num_inputs()), &mut rng).unwrap();
    let oracles = Oracles::new(run.key.clone(), OracleMode::Real).unwrap();
    let t = p.t();
    let mut requests = String::new();
    for (i, q, _) in &run.calls {
        let line = format_request(*i, t, q);
        let (j, back) = parse_request(&line, t).unwrap();
        assert_eq!((j, &back), (*i, q));
        requests.push_str(&line);
        requests.push('\n');
    }
    requests.push_str("F 99 00\n");
    let mut out = Vec::new();
    let served = serve(&oracles, Cursor::new(requests), &mut out).unwrap();
    assert_eq!(served, run.calls.len() + 1);
    let lines: Vec<&str> = std::str::from_utf8(&out).unwrap().lines().collect();
    for ((_, _, r), line) in run.calls.iter().zip(&lines) {
        assert_eq!(&OracleResponse::from_wire(line).unwrap(), r);
    }
    assert_eq!(*lines.last().unwrap(), "BOT");
}

#[test]
fn remote_oracle_reports_transport_failure_as_bot() {
    let remote = RemoteOracle::new(BufReader::new(Cursor::new(Vec::new())), Vec::new(), 0);
    let q = OracleQuery {
        x: BitVector::zeros(0),
        sigma: lmobf_core::token::Signature { vectors: vec![] },
        v_tilde: vec![vec![]],
        w_tilde: vec![],
        labels: vec![],
    };
    assert_eq!(remote.query(0, &q), OracleResponse::Bot(None));
    assert!(remote.error().is_some());
}

#[test]
fn recording_keeps_every_call() {
    let (c, p) = program(DETERMINISTIC_PROGRAMS[4].1);
    let mut rng = ChaCha20Rng::seed_from_u64(16);
    let (mut obf, key) = qobf(&params(RegisterMode::Logical), &p, &mut rng).unwrap();
    let oracles = Oracles::new(key, OracleMode::Real).unwrap();
    let rec = Recording::new(&oracles);
    qeval(&BitVector::from_u64(0, c.num_inputs()), &mut obf, &rec, &mut rng).unwrap();
    let calls = rec.into_calls();
    assert!(calls.iter().any(|(i, _, _)| *i == p.t()));
    assert!(calls.iter().all(|(_, _, r)| !r.is_bot()));
}

#[test]
fn attack_harness_reports() {
    let (_, p) = program(DETERMINISTIC_PROGRAMS[4].1);
    let params = params(RegisterMode::Logical);
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    for (kind, trials) in [
        (AttackKind::PauliTamper, 50),
        (AttackKind::LabelForge, 2000),
        (AttackKind::MixedInput, 20),
        (AttackKind::Replay, 200),
    ] {
        let report = run_attack(kind, &params, &p, trials, &mut rng).unwrap();
        assert_eq!(report.trials, trials, "{kind}");
        assert!(report.all_rejected(), "{report}");
    }
    let tamper = run_attack(AttackKind::PauliTamper, &params, &p, 20, &mut rng).unwrap();
    assert_eq!(tamper.reasons.get("decode-fail"), Some(&20));
    let replay = run_attack(AttackKind::Replay, &params, &p, 20, &mut rng).unwrap();
    assert_eq!(replay.reasons.get("bad-label"), Some(&20));
    assert!("label-forge".parse::<AttackKind>().is_ok());
    assert!("nope".parse::<AttackKind>().is_err());
}

#[test]
fn label_attacks_need_a_measurement_layer() {
    let (_, p) = program(DETERMINISTIC_PROGRAMS[0].1);
    let mut rng = ChaCha20Rng::seed_from_u64(18);
    let r = run_attack(AttackKind::LabelForge, &params(RegisterMode::Logical), &p, 10, &mut rng);
    assert!(matches!(r, Err(ObfError::NotApplicable(_))));
}
