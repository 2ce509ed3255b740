use std::fs;
use std::path::Path;
use std::process::Command;

use escape_lab::config::{parse_config, parse_config_with, Kind};
use escape_lab::output::{read_footer, write_tables, Table};
use escape_lab::run::run;

fn escape(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_escape"))
        .args(args)
        .env_remove("ESCAPE_OUT_DIR")
        .current_dir(dir)
        .output()
        .unwrap()
}

#[test]
fn empty_config_needs_a_seed() {
    let e = parse_config("").unwrap_err();
    assert_eq!(e.0.len(), 1);
    assert_eq!(e.0[0].key, "seed");
    assert!(e.to_string().contains("seed"));
}

#[test]
fn errors_name_the_key() {
    let e = parse_config("seed = 1\nescape_rho = 1.5\nbogus = 3\n").unwrap_err();
    let keys: Vec<&str> = e.0.iter().map(|x| x.key.as_str()).collect();
    assert!(keys.contains(&"escape_rho"), "{e}");
    assert!(keys.contains(&"bogus"), "{e}");
    let bogus = e.0.iter().find(|x| x.key == "bogus").unwrap();
    assert_eq!(bogus.line, Some(3));
    assert!(bogus.message.contains("unknown"));
    assert!(parse_config("seed = 1\nreplicas = many\n").is_err());
    assert!(parse_config("seed = 1\nthreads = 0\n").is_err());
    assert!(parse_config("seed = 1\nkind = everything\n").is_err());
}

#[test]
fn later_values_win_and_text_round_trips() {
    let c = parse_config_with(
        "seed = 4 # trailing comment\nkind = pk\nreplicas = 10\nreplicas = 20\n",
        &[("replicas", "30".into()), ("escape_r", "1, 3".into())],
    )
    .unwrap();
    assert_eq!(c.kind, Kind::Pk);
    assert_eq!(c.params.replicas, 30);
    assert_eq!(c.params.escape_r, vec![1, 3]);
    let again = parse_config(&c.to_text()).unwrap();
    assert_eq!(again.entries(), c.entries());
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let text = "seed = 99\nreplicas = 12\nescape_horizon = 16\nstrangle_t = 4,8\ncrossing_p = 0.6\n";
    let mut outputs = Vec::new();
    for threads in [1, 3] {
        for kind in ["escape", "crossing"] {
            let c = parse_config_with(text, &[("kind", kind.into()), ("threads", threads.to_string())]).unwrap();
            let out = dir.path().join(format!("{kind}-{threads}"));
            let paths = run(&c, &out).unwrap();
            let mut files: Vec<(String, String)> = paths
                .iter()
                .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(p).unwrap()))
                .collect();
            files.sort();
            outputs.push(files);
        }
    }
    assert_eq!(outputs[0], outputs[2]);
    assert_eq!(outputs[1], outputs[3]);
    let survival = &outputs[0].iter().find(|(n, _)| n == "survival.csv").unwrap().1;
    let footer = read_footer(survival);
    assert!(footer.contains(&("seed".into(), "99".into())));
    assert!(footer.iter().all(|(k, _)| k != "threads"));
    let rebuilt: String = footer.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    assert_eq!(parse_config(&rebuilt).unwrap().params.replicas, 12);
}

#[test]
fn bounds_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let c = parse_config("seed = 1\nkind = bounds\n").unwrap();
    let paths = run(&c, dir.path()).unwrap();
    assert_eq!(paths.len(), 1);
    let text = fs::read_to_string(&paths[0]).unwrap();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let pass = headers.iter().position(|h| h == "pass").unwrap();
    let mut n = 0;
    for rec in rdr.records() {
        assert_eq!(&rec.unwrap()[pass], "true");
        n += 1;
    }
    assert!(n > 100);
}

#[test]
fn failed_writes_leave_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = Table::new("first", &["x"]);
    a.push(vec!["1".into()]);
    let b = Table::new("second", &["y"]);
    fs::create_dir(dir.path().join("second.csv")).unwrap();
    assert!(write_tables(dir.path(), &[a, b], &[]).is_err());
    assert!(!dir.path().join("first.csv").exists());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = escape(&["ladder", "--seed", "5", "--out", "o"], dir.path());
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    for f in ["ladder.csv", "trigger.csv", "density.csv"] {
        assert!(dir.path().join("o").join(f).exists(), "{f}");
    }
    let no_seed = escape(&["ladder"], dir.path());
    assert_eq!(no_seed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&no_seed.stderr).contains("seed"));
    let bad_key = escape(&["escape", "--seed", "1", "-s", "escape_rho=1.5"], dir.path());
    assert_eq!(bad_key.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_key.stderr).contains("escape_rho"));
    assert_eq!(escape(&["ladder", "--config", "missing.conf"], dir.path()).status.code(), Some(1));
    assert_eq!(escape(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(escape(&["--help"], dir.path()).status.code(), Some(0));
    // level 5 of the ladder is far beyond what can be simulated
    let runtime = escape(&["pk", "--seed", "1", "--out", "p", "-s", "pk_levels=5", "-s", "k_max=5"], dir.path());
    assert_eq!(runtime.status.code(), Some(2), "{}", String::from_utf8_lossy(&runtime.stderr));
    assert!(!dir.path().join("p").join("pk.csv").exists());
}

#[test]
fn config_file_and_env_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.conf"), "seed = 8\nreplicas = 5\ncrossing_p = 0.9\n").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_escape"))
        .args(["crossing", "--config", "run.conf"])
        .env("ESCAPE_OUT_DIR", "env-out")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("env-out/crossing.csv")).unwrap();
    assert!(text.contains("# seed = 8"));
    assert!(text.lines().nth(1).unwrap().starts_with("0.9,"));
}
