//! End-to-end tests of the `kpistats` binary: exit codes, artifact files,
//! byte determinism, and report.json conformance to the shipped schema.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn kpistats(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpistats"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_csv(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

// ---------------------------------------------------------------------------
// exit codes
// ---------------------------------------------------------------------------

#[cfg(unix)]
#[test]
fn closed_stdout_pipe_stays_quiet() {
    use std::process::Stdio;
    // `kpistats correlate ... | head -1` must not spray a broken-pipe panic;
    // dropping the read end before the child writes simulates that.
    let mut child = Command::new(env!("CARGO_BIN_EXE_kpistats"))
        .args(["correlate", "--builtin", "table2_services"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    drop(child.stdout.take());
    let out = child.wait_with_output().expect("child exits");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(!err.contains("panicked"), "stderr: {err}");
    assert!(!err.contains("Broken pipe"), "stderr: {err}");
}

#[test]
fn help_and_version_exit_zero() {
    for args in [&["--help"][..], &["--version"][..], &["correlate", "--help"][..]] {
        let out = kpistats(args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert!(!stdout(&out).is_empty());
    }
}

#[test]
fn usage_errors_exit_one() {
    // unknown flag
    assert_eq!(code(&kpistats(&["correlate", "--frobnicate"])), 1);
    // missing input source
    assert_eq!(code(&kpistats(&["correlate"])), 1);
    // contradictory sources
    assert_eq!(
        code(&kpistats(&[
            "correlate",
            "--input",
            "x.csv",
            "--builtin",
            "table1_kpi"
        ])),
        1
    );
    // unknown builtin dataset and unknown enum values are caught at parse time
    assert_eq!(code(&kpistats(&["correlate", "--builtin", "nope"])), 1);
    assert_eq!(
        code(&kpistats(&["cluster", "--builtin", "table1_kpi", "--linkage", "ward"])),
        1
    );
    assert_eq!(code(&kpistats(&["nonsense"])), 1);
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // file that does not exist
    let out = kpistats(&["correlate", "--input", "/nonexistent/data.csv"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("error:"));

    // malformed cell
    let bad = write_csv(dir.path(), "bad.csv", "t,a,b\ns1,1,2\ns2,x,4\ns3,5,6\n");
    let out = kpistats(&["correlate", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("row 3"));

    // more factors than variables
    let out = kpistats(&["fa", "--builtin", "table1_kpi", "--factors", "9"]);
    assert_eq!(code(&out), 2);

    // power exponents on a non-power metric
    let out = kpistats(&[
        "cluster",
        "--builtin",
        "table1_kpi",
        "--metric",
        "euclidean",
        "--power-p",
        "3",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn numeric_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // column b is exactly 2a: the correlation matrix is singular, so the
    // ML factor fit cannot even start
    let collinear = write_csv(
        dir.path(),
        "collinear.csv",
        "t,a,b,c\ns1,1,2,5\ns2,2,4,3\ns3,3,6,8\ns4,4,8,1\n",
    );
    let out = kpistats(&["fa", "--input", collinear.to_str().unwrap(), "--factors", "1"]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
}

// ---------------------------------------------------------------------------
// stdout behavior
// ---------------------------------------------------------------------------

#[test]
fn datasets_lists_both_tables() {
    let out = kpistats(&["datasets"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("table1_kpi"));
    assert!(text.contains("table2_services"));
}

#[test]
fn correlate_prints_the_service_matrix() {
    let out = kpistats(&["correlate", "--builtin", "table2_services"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("0.9837184"), "latency–throughput cell");
    assert!(text.contains("0.8914506"), "video–latency cell");
    assert!(text.contains("0.1519382"), "e-mail–FTP cell");
    assert!(text.contains("n = 20 samples"));
}

#[test]
fn cluster_prints_the_five_hour_groups() {
    let out = kpistats(&["cluster", "--builtin", "table1_kpi"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("Cluster 2: Hr 3, Hr 4"));
    assert!(text.contains("Cluster 3: Hr 5, Hr 6"));
    assert!(text.contains("Cluster 4: Hr 9"));
    assert!(text.contains("Cluster 5: Hr 11"));
}

#[test]
fn mds_reports_planar_fit() {
    let out = kpistats(&["mds", "--builtin", "table1_kpi", "--metric", "euclidean"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("cumulative proportion at dim 2: 0.7950"));
    assert!(text.starts_with("label,dim1,dim2"));
}

#[test]
fn ca_names_the_packet_loss_hours() {
    let out = kpistats(&["ca", "--builtin", "table1_kpi"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("Hr 9 is dominantly associated with Gn interface Packet loss"));
    assert!(text.contains("Hr 11 is dominantly associated with Gi interface Packet loss"));
}

#[test]
fn fa_prints_loadings_and_convergence() {
    let out = kpistats(&["fa", "--builtin", "table1_kpi", "--factors", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("GGSN utilization"));
    assert!(text.contains("uniqueness"));
    assert!(text.contains("converged in"));
}

// ---------------------------------------------------------------------------
// artifacts
// ---------------------------------------------------------------------------

#[test]
fn single_stage_subcommands_write_requested_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("corr");
    let out = kpistats(&[
        "correlate",
        "--builtin",
        "table2_services",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    assert!(out_dir.join("correlation.csv").is_file());
    assert!(out_dir.join("pvalues.csv").is_file());
    assert!(!out_dir.join("correlation.json").exists());

    let out_dir = dir.path().join("tree");
    let out = kpistats(&[
        "cluster",
        "--builtin",
        "table1_kpi",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    for name in [
        "dendrogram.json",
        "dendrogram.newick",
        "dendrogram.svg",
        "partition.csv",
        "distances.csv",
    ] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
    let svg = std::fs::read_to_string(out_dir.join("dendrogram.svg")).unwrap();
    assert_eq!(svg.matches("class=\"leaf\"").count(), 20);

    let out_dir = dir.path().join("ca");
    let out = kpistats(&[
        "ca",
        "--builtin",
        "table1_kpi",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "svg",
    ]);
    assert_eq!(code(&out), 0);
    let svg = std::fs::read_to_string(out_dir.join("ca.svg")).unwrap();
    assert_eq!(svg.matches("class=\"pt\"").count(), 20, "row markers");
    assert_eq!(svg.matches("class=\"pt2\"").count(), 5, "column markers");
}

#[test]
fn pipeline_writes_everything_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("report");
    let args = [
        "pipeline",
        "--builtin",
        "table1_kpi",
        "--out",
        out_dir.to_str().unwrap(),
    ];
    let out = kpistats(&args);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("Configuration: dataset=table1_kpi"));
    assert!(text.contains("wrote "));

    let names = [
        "report.json",
        "correlation.csv",
        "pvalues.csv",
        "distances.csv",
        "partition.csv",
        "dendrogram.newick",
        "mds_coords.csv",
        "ca_coords.csv",
        "dendrogram.svg",
        "mds.svg",
        "ca.svg",
    ];
    let first: Vec<Vec<u8>> = names
        .iter()
        .map(|n| std::fs::read(out_dir.join(n)).expect(n))
        .collect();

    let out = kpistats(&args);
    assert_eq!(code(&out), 0);
    for (n, bytes) in names.iter().zip(&first) {
        assert_eq!(
            &std::fs::read(out_dir.join(n)).unwrap(),
            bytes,
            "{n} changed between runs"
        );
    }
}

#[test]
fn pipeline_on_tiny_input_skips_and_clamps() {
    let dir = tempfile::tempdir().unwrap();
    let toy = write_csv(dir.path(), "toy.csv", "period,a,b\np1,1,4\np2,3,0\n");
    let out_dir = dir.path().join("toyreport");
    let out = kpistats(&[
        "pipeline",
        "--input",
        toy.to_str().unwrap(),
        "--k",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("correlation skipped"));
    assert!(text.contains("mds_dim reduced from 2 to 1"));
    assert!(text.contains("Cluster 1: p1."));
    assert!(text.contains("Cluster 2: p2."));
    assert!(out_dir.join("report.json").is_file());
    assert!(!out_dir.join("correlation.csv").exists());
    assert!(out_dir.join("mds.svg").is_file());
}

// ---------------------------------------------------------------------------
// schema conformance
// ---------------------------------------------------------------------------

/// Just enough JSON Schema (draft-07 subset) to check report.json against
/// the schema shipped in the repository: type, properties, required,
/// additionalProperties (bool), items, enum, minimum and local $refs.
fn validate(root: &serde_json::Value, schema: &serde_json::Value, value: &serde_json::Value, path: &str) -> Result<(), String> {
    use serde_json::Value;

    if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
        let name = reference
            .strip_prefix("#/$defs/")
            .ok_or_else(|| format!("{path}: unsupported $ref {reference}"))?;
        let target = root
            .pointer(&format!("/$defs/{name}"))
            .ok_or_else(|| format!("{path}: dangling $ref {reference}"))?;
        return validate(root, target, value, path);
    }

    if let Some(kind) = schema.get("type").and_then(Value::as_str) {
        let ok = match kind {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "number" => value.is_number(),
            "integer" => value.is_i64() || value.is_u64(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            other => return Err(format!("{path}: unsupported type {other}")),
        };
        if !ok {
            return Err(format!("{path}: expected {kind}, got {value}"));
        }
    }

    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            return Err(format!("{path}: {value} not in {allowed:?}"));
        }
    }

    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        let v = value
            .as_f64()
            .ok_or_else(|| format!("{path}: minimum on non-number"))?;
        if v < min {
            return Err(format!("{path}: {v} < minimum {min}"));
        }
    }

    if let Some(obj) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().unwrap();
                if !obj.contains_key(key) {
                    return Err(format!("{path}: missing required {key}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(props) = props {
            for (key, sub) in obj {
                match props.get(key) {
                    Some(subschema) => {
                        validate(root, subschema, sub, &format!("{path}/{key}"))?
                    }
                    None => {
                        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
                            return Err(format!("{path}: unexpected property {key}"));
                        }
                    }
                }
            }
        }
    }

    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, element) in arr.iter().enumerate() {
            validate(root, items, element, &format!("{path}/{i}"))?;
        }
    }

    Ok(())
}

fn schema() -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json");
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn report_json_validates_against_the_shipped_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("r");
    let out = kpistats(&[
        "pipeline",
        "--builtin",
        "table1_kpi",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    let schema = schema();
    validate(&schema, &schema, &report, "report").unwrap();
}

#[test]
fn partial_reports_also_validate() {
    let dir = tempfile::tempdir().unwrap();
    let toy = write_csv(dir.path(), "toy.csv", "period,a,b\np1,1,4\np2,3,0\n");
    let out_dir = dir.path().join("r");
    let out = kpistats(&[
        "pipeline",
        "--input",
        toy.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert!(report.get("correlation").is_none());
    let schema = schema();
    validate(&schema, &schema, &report, "report").unwrap();
}

#[test]
fn schema_validator_rejects_corrupted_reports() {
    let schema = schema();
    // k as a string instead of an integer
    let bad: serde_json::Value = serde_json::json!({
        "config": {
            "dataset": {"builtin": "table1_kpi"},
            "standardize": {"mode": "zscore", "zero_variance_policy": "error"},
            "metric": {"kind": "euclidean"},
            "linkage": "complete",
            "k_clusters": "five",
            "mds_dim": 2,
            "fa_factors": 2,
            "outputs": "x",
            "formats": ["json"]
        },
        "narrative": []
    });
    assert!(validate(&schema, &schema, &bad, "report").is_err());

    let missing: serde_json::Value = serde_json::json!({ "narrative": [] });
    assert!(validate(&schema, &schema, &missing, "report").is_err());
}
