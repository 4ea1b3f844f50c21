use std::process::Command;

use fgred::harness::{gen, reduce, solve, GenOptions, ReduceOptions, Target};
use fgred::instance::{InstanceFile, Kind};
use fgred::reduce::{HammingImage, Metric, Role};
use fgred::solvers::{solve_cp_binary, solve_ip};
use fgred::{reduce as red, BinaryVector, BitVector};

fn opts(verify: bool) -> ReduceOptions {
    ReduceOptions {
        block_width: 2,
        p: 2.0,
        strategy: None,
        seed: 0,
        verify,
    }
}

fn planted(seed: u64, n: usize, d: usize, sigma: u64) -> InstanceFile {
    gen(&GenOptions {
        kind: Kind::Ip,
        n,
        d,
        sigma: Some(sigma),
        planted: true,
        metric: None,
        seed,
    })
    .unwrap()
}

fn witness_count(file: &InstanceFile) -> usize {
    let (a, b) = file.dense_vectors().unwrap();
    let sigma = file.sigma.unwrap();
    a.iter().flat_map(|x| b.iter().map(move |y| x.dot(y))).filter(|&v| v == sigma).count()
}

#[test]
fn unique_witness_survives_to_euclidean_closest_pair() {
    let mut seen = 0;
    for seed in 0..40 {
        let file = planted(seed, 3, 8, 4);
        if witness_count(&file) != 1 {
            continue;
        }
        seen += 1;
        let (a, b) = file.dense_vectors().unwrap();
        let inst = red::IpInstance::new(a.to_vec(), b.to_vec(), 4).unwrap();
        let witness = solve_ip(&inst).witness.unwrap();

        let (mx, rep) = reduce(&file, Target::MaxIp, &opts(true)).unwrap();
        assert!(rep.ok, "{}", rep.report);
        let (ch, _) = reduce(&mx, Target::CpHamming, &opts(false)).unwrap();
        let (l2, _) = reduce(&ch, Target::CpLp, &opts(false)).unwrap();

        let (ga, gb) = l2.gadget_vectors().unwrap();
        let cp = red::CpInstance::new(
            ga.into_iter().map(|v| HammingImage::new(v, Role::A)).collect(),
            gb.into_iter().map(|v| HammingImage::new(v, Role::B)).collect(),
            Metric::Lp(2.0),
        )
        .unwrap();
        let best = solve_cp_binary(&cp).unwrap();
        assert_eq!(best.witness, witness);

        let (w, gamma) = match mx.body {
            fgred::instance::Body::Gadget { .. } => {
                let v = &mx.gadget_vectors().unwrap().0[0];
                (v.weights().iter().sum::<u64>(), v.spec().gamma())
            }
            _ => unreachable!("maxip output is gadget-encoded"),
        };
        let d_prime = mx.dim;
        assert_eq!(best.optimum.exact, 2 * d_prime - 2 * w * gamma);
        let want = ((2 * d_prime - 2 * w * gamma) as f64).sqrt();
        assert!((best.optimum.distance - want).abs() <= 1e-9 * want);
        // the runner-up is strictly farther
        let ties = cp
            .a
            .iter()
            .flat_map(|x| cp.b.iter().map(move |y| x.hamming(y)))
            .filter(|&h| h == best.optimum.exact)
            .count();
        assert_eq!(ties, 1);
    }
    assert!(seen >= 5, "only {seen} unique-witness instances");
}

#[test]
fn files_round_trip_through_text() {
    let ip = planted(1, 4, 10, 3);
    assert_eq!(InstanceFile::parse(&ip.to_string()).unwrap(), ip);
    let (mx, _) = reduce(&ip, Target::MaxIp, &opts(false)).unwrap();
    let text = mx.to_string();
    assert_eq!(InstanceFile::parse(&text).unwrap().to_string(), text);
    let (mn, _) = reduce(&mx, Target::MinIp, &opts(false)).unwrap();
    assert_eq!(InstanceFile::parse(&mn.to_string()).unwrap().to_string(), mn.to_string());

    let cp = gen(&GenOptions {
        kind: Kind::Cp,
        n: 3,
        d: 5,
        sigma: None,
        planted: false,
        metric: None,
        seed: 4,
    })
    .unwrap();
    let (ed, rep) = reduce(&cp, Target::CpEdit, &opts(true)).unwrap();
    assert!(rep.ok && rep.report.contains("passed"), "{}", rep.report);
    assert_eq!(InstanceFile::parse(&ed.to_string()).unwrap(), ed);
}

#[test]
fn verify_does_not_change_artifacts() {
    let ip = planted(2, 3, 8, 2);
    let (plain, _) = reduce(&ip, Target::MaxIp, &opts(false)).unwrap();
    let (checked, rep) = reduce(&ip, Target::MaxIp, &opts(true)).unwrap();
    assert_eq!(plain.to_string(), checked.to_string());
    assert!(rep.report.contains("pass"));
}

#[test]
fn solve_reports_reduced_optimum() {
    let ip = planted(3, 3, 8, 3);
    let (mx, rep) = reduce(&ip, Target::MaxIp, &opts(true)).unwrap();
    let out = solve(&mx).unwrap();
    let target = rep.report.split("target W*Gamma=").nth(1).unwrap().lines().next().unwrap();
    assert!(out.contains(&format!("optimum={target}")), "{out}");
}

#[test]
fn wrong_inputs_are_rejected() {
    let ip = planted(5, 2, 6, 2);
    assert!(reduce(&ip, Target::CpHamming, &opts(false)).is_err());
    let (mx, _) = reduce(&ip, Target::MaxIp, &opts(false)).unwrap();
    let (ch, _) = reduce(&mx, Target::CpHamming, &opts(false)).unwrap();
    // edit strings have no structured form
    assert!(reduce(&ch, Target::CpEdit, &opts(false)).is_err());
    assert!(InstanceFile::parse("FGRED v1 ip N=1 d=3 sigma=1\n101\n").is_err());
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_fgred");
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ip.txt");
    std::fs::write(&file, planted(6, 2, 6, 2).to_string()).unwrap();

    let ok = Command::new(exe).arg("protocol-run").arg(&file).args(["--count", "1"]).output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("status ok"));

    let bad = Command::new(exe).args(["reduce", "--target", "cp-edit"]).arg(&file).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error"));

    let missing = Command::new(exe).args(["solve", "/nonexistent/file"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let csv = Command::new(exe).args(["sweep", "--c", "1,2"]).output().unwrap();
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "epsilon,c,T,t,q,R_space_size,L_bits,d_prime,delta,status");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn planted_generator_hits_sigma() {
    for seed in 0..10 {
        let file = planted(seed, 5, 12, 5);
        assert!(witness_count(&file) >= 1);
        let (a, _) = file.dense_vectors().unwrap();
        assert!(a.iter().all(|x: &BitVector| x.len() == 12));
    }
}
