use std::io::{Read, Write};
use std::path::PathBuf;

use skinsim::export::{frames_from_csv, frames_to_csv, write_atomic};
use skinsim::wire::{encode_stream, parse_all, ParseEvent};

use crate::{read_bytes, read_file, CliError, StreamArgs, StreamOp};

pub fn run(args: StreamArgs) -> Result<(), CliError> {
    match args.op {
        StreamOp::Encode { input, output } => encode(input, output),
        StreamOp::Decode {
            input,
            output,
            rate,
        } => decode(input, output, rate),
    }
}

fn read_input_text(input: Option<PathBuf>) -> Result<String, CliError> {
    match input {
        Some(path) => read_file(&path),
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Config(format!("reading stdin: {e}")))?;
            Ok(text)
        }
    }
}

fn read_input_bytes(input: Option<PathBuf>) -> Result<Vec<u8>, CliError> {
    match input {
        Some(path) => read_bytes(&path),
        None => {
            let mut bytes = Vec::new();
            std::io::stdin()
                .read_to_end(&mut bytes)
                .map_err(|e| CliError::Config(format!("reading stdin: {e}")))?;
            Ok(bytes)
        }
    }
}

fn write_output(output: Option<PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => Ok(write_atomic(&path, bytes)?),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::Config(format!("writing stdout: {e}")))
        }
    }
}

fn encode(input: Option<PathBuf>, output: Option<PathBuf>) -> Result<(), CliError> {
    let frames = frames_from_csv(&read_input_text(input)?).map_err(CliError::from)?;
    let bytes = encode_stream(&frames)?;
    write_output(output, &bytes)
}

fn decode(input: Option<PathBuf>, output: Option<PathBuf>, rate: f64) -> Result<(), CliError> {
    let bytes = read_input_bytes(input)?;
    let events = parse_all(&bytes, rate);
    let mut frames = Vec::new();
    let mut corrupt = 0u64;
    let mut gaps = 0u64;
    let mut missing = 0u64;
    for event in events {
        match event {
            ParseEvent::Frame(frame) => frames.push(frame),
            ParseEvent::CorruptFrame => corrupt += 1,
            ParseEvent::Gap(n) => {
                gaps += 1;
                missing += n as u64;
            }
        }
    }
    // Valid frames are always written, whatever else was in the stream.
    write_output(output, frames_to_csv(&frames).as_bytes())?;
    eprintln!(
        "{}",
        serde_json::json!({
            "frames": frames.len(),
            "corrupt_frames": corrupt,
            "gaps": gaps,
            "missing_frames": missing,
        })
    );
    Ok(())
}
