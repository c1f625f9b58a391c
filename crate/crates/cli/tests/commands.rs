//! The `memento` command line: argument handling, exit codes and output.

mod common;

use clap::Parser;
use common::*;
use memento_cli::{build_server_config, run, Cli, CliError};
use memento_cli::commands::Command;
use memento_server::{ErrorPageType, NegotiationPattern};

fn cli(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("memento").chain(args.iter().copied())).unwrap()
}

async fn output(args: &[&str]) -> (Result<(), CliError>, String) {
    let mut out = Vec::new();
    let r = run(cli(args), &mut out).await;
    (r, String::from_utf8(out).unwrap())
}

fn serve_args(args: &[&str]) -> memento_cli::commands::ServeArgs {
    let mut full = vec!["serve", "--dump", "x.dump"];
    full.extend_from_slice(args);
    match cli(&full).command {
        Command::Serve(a) => a,
        other => panic!("{other:?}"),
    }
}

#[test]
fn serve_defaults_and_overrides() {
    let c = build_server_config(&serve_args(&[])).unwrap();
    assert_eq!(c.negotiation_pattern, NegotiationPattern::P302);
    assert_eq!(c.timemap_page_size, 500);
    assert_eq!(c.error_page_type, ErrorPageType::Friendly);
    assert_eq!(c.base_url, "http://127.0.0.1:8080");

    let c = build_server_config(&serve_args(&["--pattern", "200", "--listen", "0.0.0.0:9000"])).unwrap();
    assert_eq!(c.negotiation_pattern, NegotiationPattern::P200);
    assert_eq!(c.base_url, "http://0.0.0.0:9000");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("memento.conf");
    std::fs::write(&path, "timemap_page_size = 7\nerror_page_type = 'traditional'\n").unwrap();
    let c = build_server_config(&serve_args(&["--config", path.to_str().unwrap(), "--page-size", "9"])).unwrap();
    assert_eq!((c.timemap_page_size, c.error_page_type), (9, ErrorPageType::Traditional));

    std::fs::write(&path, "page_sise = 7\n").unwrap();
    let err = build_server_config(&serve_args(&["--config", path.to_str().unwrap()])).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let err = build_server_config(&serve_args(&["--pattern", "303"])).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn clap_usage_errors_exit_2() {
    let err = Cli::try_parse_from(["memento", "negotiate"]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let err = Cli::try_parse_from(["memento", "frobnicate"]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[tokio::test]
async fn model_table() {
    let (r, text) = output(&["model", "--csv"]).await;
    r.unwrap();
    assert!(text.starts_with("quantity,value\n"));
    assert!(text.contains("crossover_bandwidth_bps,21925.93\n"));
    assert!(text.contains("transmission_delay_s,0.4111\n"));
    let (r, _) = output(&["model", "--bandwidth", "0"]).await;
    assert_eq!(r.unwrap_err().exit_code(), 2);
}

#[tokio::test]
async fn negotiate_walk_and_audit_commands() {
    let server = start(wiki_store(), |_| {}).await;
    let original = server.original("Daenerys");
    let (r, text) = output(&["negotiate", &original, "--datetime", "Thu, 30 Jun 2011 00:00:00 GMT"]).await;
    r.unwrap();
    assert_eq!(text, format!("{original}?rev=27870\tWed, 29 Jun 2011 21:14:05 GMT\n"));

    let (r, text) = output(&["walk", &server.timemap("Daenerys")]).await;
    r.unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().next().unwrap().starts_with("Fri, 02 Mar 2007 12:00:00 GMT\t"));

    let (r, text) = output(&["audit", &original]).await;
    r.unwrap();
    assert!(text.ends_with("PATTERN\tp2.1\n"));
    assert!(!text.contains("FAIL"));

    let (r, _) = output(&["negotiate", &server.original("Nobody")]).await;
    assert_eq!(r.unwrap_err().exit_code(), 1);
    let (plain, _task) = start_plain().await;
    let (r, text) = output(&["audit", &plain]).await;
    assert_eq!(r.unwrap_err().exit_code(), 1);
    assert!(text.ends_with("PATTERN\tnone\n"));
}

#[tokio::test]
async fn verify_dump_command() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.dump");
    std::fs::write(&good, WIKI_DUMP).unwrap();
    let (r, text) = output(&["verify-dump", good.to_str().unwrap()]).await;
    r.unwrap();
    assert_eq!(text, "records=7 pages=3 violations=0\n");

    let bad = dir.path().join("bad.dump");
    let first = WIKI_DUMP.lines().next().unwrap();
    std::fs::write(&bad, format!("{first}\n{first}\nnot a record\n")).unwrap();
    let (r, text) = output(&["verify-dump", bad.to_str().unwrap()]).await;
    assert_eq!(r.unwrap_err().exit_code(), 1);
    assert!(text.ends_with("violations=2\n"), "{text}");
}

#[tokio::test]
async fn bench_commands_round_trip() {
    let special = start(wiki_store(), |_| {}).await;
    let dir = tempfile::tempdir().unwrap();
    let urls = dir.path().join("urls.txt");
    std::fs::write(&urls, format!("# TimeGates\n{}/timegate/Daenerys\n\n", special.base)).unwrap();
    let log = dir.path().join("siege.log");
    let (r, _) = output(&["bench", "run", "--urls", urls.to_str().unwrap(), "--out", log.to_str().unwrap()]).await;
    r.unwrap();
    let text = std::fs::read_to_string(&log).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("HTTP/1.1 302 "));

    let sample = dir.path().join("sample.log");
    std::fs::write(
        &sample,
        "HTTP/1.1 302   0.60 secs:       0 bytes ==> GET  /demo-special/index.php/Special:TimeGate/Daenerys\n\
         HTTP/1.1 200   3.10 secs:   95662 bytes ==> GET  /demo-special/index.php?title=Daenerys&oldid=27870\n\
         HTTP/1.1 302   3.41 secs:       0 bytes ==> GET  /demo/index.php/Daenerys\n\
         HTTP/1.1 200   1.86 secs:   94558 bytes ==> GET  /demo/index.php?title=Daenerys&oldid=27870\n",
    )
    .unwrap();
    let (r, csv) = output(&["bench", "timegate", sample.to_str().unwrap()]).await;
    r.unwrap();
    assert_eq!(csv, "PAGE,SPECIAL,DEFAULT\n\"Daenerys\",0.60,3.41\n");

    let csv_path = dir.path().join("tg.csv");
    std::fs::write(&csv_path, &csv).unwrap();
    let (r, stats) = output(&["bench", "stats", csv_path.to_str().unwrap(), "--column", "SPECIAL"]).await;
    r.unwrap();
    assert_eq!(stats, "COLUMN,MIN,MAX,MEAN,MEDIAN\nSPECIAL,0.6,0.6,0.6,0.6\n");
    let (r, diff) = output(&["bench", "stats", csv_path.to_str().unwrap(), "--diff", "DEFAULT", "SPECIAL"]).await;
    r.unwrap();
    assert!(diff.starts_with("PAGE,DEFAULT,SPECIAL,DIFFERENCE\n\"Daenerys\",3.41,0.6,"));
    let (r, buckets) =
        output(&["bench", "stats", csv_path.to_str().unwrap(), "--diff", "DEFAULT", "SPECIAL", "--histogram"]).await;
    r.unwrap();
    assert_eq!(buckets.lines().count(), 13);

    let (r, pages) = output(&["bench", "pages", sample.to_str().unwrap(), "--metric", "bytes"]).await;
    r.unwrap();
    assert_eq!(pages, "PAGE,NOT_INSTALLED,DEFAULT,ALL_HEADERS\n");
    let (r, _) = output(&["bench", "stats", csv_path.to_str().unwrap()]).await;
    assert_eq!(r.unwrap_err().exit_code(), 2);
}
