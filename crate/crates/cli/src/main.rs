//! `oemarkov`: validate, analyze and recode Markov chains over free groups.
//!
//! Every command prints a JSON report on stdout. Exit status is 0 when every
//! check passes, 1 when a check fails or a precondition does not hold, and 2
//! when an input cannot be read or parsed.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use oemarkov::chainspec::{parse_spec, to_json, validate, write_spec, MarkovSpec, Sampler};
use oemarkov::edgeslide::{
    generator_ergodic_pipeline, params_from_json, params_to_json, pushforward, replay, verify_slide, VerifyOptions,
};
use oemarkov::fullgroup::{bernoullization_report, bernoullization_sequence, match_full_group, permutation_json};
use oemarkov::graphs::classify;
use oemarkov::suite::{verify_suite, SuiteOptions};
use oemarkov::{ball, Check, Error};

#[derive(Parser)]
#[command(name = "oemarkov", version, about = "Exact Markov chains over free groups and their edge-sliding recodings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check normalisation, stochasticity and stationarity of a chain spec.
    Validate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify every generator restriction.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply one edge slide and verify it. `--out` receives the new spec.
    Slide {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Slide until every generator restriction is ergodic and free.
    /// `--out` receives the final spec; the report carries the slide log.
    Pipeline {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: u64,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The measure sequence ending in the Bernoulli spec. `--out` receives
    /// the sequence as a JSON array of specs.
    Bernoullize {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy full-group element matching two label vectors on a cycle.
    Match {
        /// JSON array of labels (phi).
        phi: PathBuf,
        /// JSON array of labels (psi).
        psi: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suite at depth `level`.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotSpecial(_) | Error::PeriodicClass(_) | Error::Precondition(_) | Error::Pipeline(_) => {
                Failure::Verification(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct Run {
    command: &'static str,
    inputs: Vec<Value>,
    checks: Vec<Check>,
    result: Value,
    artifact: Option<String>,
}

impl Run {
    fn new(command: &'static str) -> Self {
        Run {
            command,
            inputs: Vec::new(),
            checks: Vec::new(),
            result: Value::Null,
            artifact: None,
        }
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.inputs.push(json!({
            "path": path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(&bytes)),
        }));
        String::from_utf8(bytes).map_err(|_| Failure::Input(format!("{}: not UTF-8", path.display())))
    }

    fn read_spec(&mut self, path: &Path) -> Result<(String, MarkovSpec), Failure> {
        let text = self.read(path)?;
        let spec = parse_spec(&text)?;
        Ok((text, spec))
    }

    fn read_json(&mut self, path: &Path) -> Result<Value, Failure> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn report(&self, error: Option<&str>) -> Value {
        let mut v = json!({
            "command": self.command,
            "inputs": self.inputs,
            "passed": error.is_none() && self.passed(),
            "checks": self.checks,
        });
        if let Some(e) = error {
            v["error"] = json!(e);
        }
        if !self.result.is_null() {
            v["result"] = self.result.clone();
        }
        v
    }
}

fn require_valid(spec: &MarkovSpec, checks: &mut Vec<Check>) -> bool {
    let report = validate(spec);
    let ok = report.is_valid();
    checks.push(Check::from_witness(
        "valid spec",
        report.violations.first().map(|v| v.to_string()),
    ));
    ok
}

fn validate_cmd(run: &mut Run, spec: &Path) -> Result<(), Failure> {
    let (_, spec) = run.read_spec(spec)?;
    let report = validate(&spec);
    run.checks = report
        .violations
        .iter()
        .map(|v| Check::fail("valid spec", v.to_string()))
        .collect();
    if run.checks.is_empty() {
        run.checks.push(Check::pass("valid spec"));
    }
    Ok(())
}

fn analyze_cmd(run: &mut Run, spec: &Path) -> Result<(), Failure> {
    let (_, spec) = run.read_spec(spec)?;
    if require_valid(&spec, &mut run.checks) {
        run.result = serde_json::to_value(classify(&spec)?).expect("classification serializes");
    }
    Ok(())
}

fn slide_cmd(run: &mut Run, spec: &Path, params: &Path, seed: u64, samples: u64) -> Result<(), Failure> {
    let (text, spec) = run.read_spec(spec)?;
    let raw = run.read_json(params)?;
    if !require_valid(&spec, &mut run.checks) {
        return Ok(());
    }
    let params = params_from_json(&spec, &raw)?;
    let slid = pushforward(&spec, &params)?;
    let report = verify_slide(
        &spec,
        &params,
        VerifyOptions {
            samples,
            seed,
            ..Default::default()
        },
    )?;
    run.checks.extend(report.checks.iter().cloned());
    let mut summary = serde_json::to_value(&report).expect("slide report serializes");
    summary.as_object_mut().expect("object").remove("checks");
    summary["params"] = params_to_json(&spec, &params);
    run.result = summary;
    // the empty slide is the identity, so the input comes back untouched
    run.artifact = Some(if params.is_empty() { text } else { write_spec(&slid) });
    Ok(())
}

fn pipeline_cmd(run: &mut Run, spec: &Path, seed: u64, samples: u64, radius: usize) -> Result<(), Failure> {
    let (_, spec) = run.read_spec(spec)?;
    if !require_valid(&spec, &mut run.checks) {
        return Ok(());
    }
    let out = generator_ergodic_pipeline(&spec)?;
    let c = classify(&out.spec)?;
    run.checks.push(Check::from_witness(
        "every generator restriction ergodic and free",
        (!c.generator_ergodic()).then(|| "some restriction is not ergodic and free".into()),
    ));
    run.checks.push(Check::from_witness(
        "one-site law unchanged",
        (out.spec.pi() != spec.pi()).then(|| "pi differs".into()),
    ));

    let sampler = Sampler::new(&spec, seed)?;
    let domain = ball(spec.rank(), radius)?;
    let mut round = out.slides.clone();
    round.extend(out.slides.iter().rev().cloned());
    let mut witness = None;
    for i in 0..samples {
        let x = sampler.sample(i);
        let back = replay(&round, spec.rank(), &x, radius)?;
        if let Some(h) = domain.iter().find(|h| back.get(h) != Some(x.get(h))) {
            witness = Some(format!("sample {i} differs at {h}"));
            break;
        }
    }
    run.checks
        .push(Check::from_witness(format!("replay then reverse replay is the identity on ball({radius})"), witness));

    let slides: Vec<Value> = out
        .slides
        .iter()
        .zip(&out.stages)
        .map(|(p, s)| params_to_json(s, p))
        .collect();
    run.result = json!({
        "classification": c,
        "slides": slides,
    });
    run.artifact = Some(write_spec(&out.spec));
    Ok(())
}

fn bernoullize_cmd(run: &mut Run, spec: &Path) -> Result<(), Failure> {
    let (_, spec) = run.read_spec(spec)?;
    if !require_valid(&spec, &mut run.checks) {
        return Ok(());
    }
    let c = classify(&spec)?;
    let (start, slides) = if c.generator_ergodic() {
        (spec.clone(), 0)
    } else {
        let out = generator_ergodic_pipeline(&spec)?;
        (out.spec, out.slides.len())
    };
    let seq = bernoullization_sequence(&start)?;
    let report = bernoullization_report(&start, &seq);
    run.checks.extend(report.checks.iter().cloned());
    let mut summary = serde_json::to_value(&report).expect("report serializes");
    summary.as_object_mut().expect("object").remove("checks");
    summary["pipeline_slides"] = json!(slides);
    run.result = summary;
    let mut text = serde_json::to_string_pretty(&seq.iter().map(to_json).collect::<Vec<_>>()).expect("json");
    text.push('\n');
    run.artifact = Some(text);
    Ok(())
}

fn labels(v: &Value, what: &str) -> Result<Vec<String>, Failure> {
    v.as_array()
        .ok_or_else(|| Failure::Input(format!("{what} must be a JSON array")))?
        .iter()
        .map(|l| match l {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(Failure::Input(format!("{what}: labels must be strings or numbers"))),
        })
        .collect()
}

fn match_cmd(run: &mut Run, phi: &Path, psi: &Path) -> Result<(), Failure> {
    let phi = labels(&run.read_json(phi)?, "phi")?;
    let psi = labels(&run.read_json(psi)?, "psi")?;
    let s = match_full_group(&phi, &psi)?;
    let bad = (0..phi.len())
        .find(|&x| psi[x] != phi[s.apply(x)])
        .map(|x| format!("psi({x}) differs from phi(S({x}))"));
    run.checks.push(Check::from_witness("psi = phi o S", bad));
    run.result = permutation_json(&s);
    Ok(())
}

fn verify_cmd(run: &mut Run, spec: &Path, seed: u64, level: usize) -> Result<(), Failure> {
    let (_, spec) = run.read_spec(spec)?;
    let report = verify_suite(&spec, SuiteOptions { level, seed })?;
    for s in &report.sections {
        run.checks.extend(s.checks.iter().map(|c| Check {
            name: format!("{}: {}", s.name, c.name),
            ..c.clone()
        }));
    }
    let mut summary = serde_json::to_value(&report).expect("suite report serializes");
    summary.as_object_mut().expect("object").remove("sections");
    run.result = summary;
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut run, out, outcome) = match &cli.command {
        Command::Validate { spec, out } => {
            let mut run = Run::new("validate");
            let r = validate_cmd(&mut run, spec);
            (run, out, r)
        }
        Command::Analyze { spec, out } => {
            let mut run = Run::new("analyze");
            let r = analyze_cmd(&mut run, spec);
            (run, out, r)
        }
        Command::Slide {
            spec,
            params,
            seed,
            samples,
            out,
        } => {
            let mut run = Run::new("slide");
            let r = slide_cmd(&mut run, spec, params, *seed, *samples);
            (run, out, r)
        }
        Command::Pipeline {
            spec,
            seed,
            samples,
            radius,
            out,
        } => {
            let mut run = Run::new("pipeline");
            let r = pipeline_cmd(&mut run, spec, *seed, *samples, *radius);
            (run, out, r)
        }
        Command::Bernoullize { spec, out } => {
            let mut run = Run::new("bernoullize");
            let r = bernoullize_cmd(&mut run, spec);
            (run, out, r)
        }
        Command::Match { phi, psi, out } => {
            let mut run = Run::new("match");
            let r = match_cmd(&mut run, phi, psi);
            (run, out, r)
        }
        Command::Verify { spec, seed, level, out } => {
            let mut run = Run::new("verify");
            let r = verify_cmd(&mut run, spec, *seed, *level);
            (run, out, r)
        }
    };

    let (error, code) = match &outcome {
        Ok(()) if run.passed() => (None, 0),
        Ok(()) => (None, 1),
        Err(Failure::Verification(m)) => (Some(m.as_str()), 1),
        Err(Failure::Input(m)) => (Some(m.as_str()), 2),
    };
    let mut text = serde_json::to_string_pretty(&run.report(error)).expect("json");
    text.push('\n');
    if let Some(path) = out {
        let artifact = run.artifact.take().unwrap_or_else(|| text.clone());
        if let Err(Failure::Input(m) | Failure::Verification(m)) = write(path, &artifact) {
            eprintln!("oemarkov: {m}");
            return ExitCode::from(2);
        }
    }
    print!("{text}");
    if let Some(m) = error {
        eprintln!("oemarkov: {m}");
    }
    ExitCode::from(code)
}
