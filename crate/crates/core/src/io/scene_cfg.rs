//! Scene descriptions as `key=value` lines.
//!
//! Blank lines and lines starting with `#` are ignored. Missing keys take
//! their [`SceneSpec::default`] value; unknown and repeated keys are errors.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use crate::error::{Error, Location, Result};
use crate::synth::SceneSpec;

pub fn write_scene_spec(spec: &SceneSpec, mut w: impl Write) -> Result<()> {
    writeln!(w, "seed={}", spec.seed)?;
    writeln!(w, "height={}", spec.height)?;
    writeln!(w, "width={}", spec.width)?;
    writeln!(w, "planes={}", spec.planes)?;
    writeln!(w, "d_min={}", spec.d_min)?;
    writeln!(w, "d_max={}", spec.d_max)?;
    writeln!(w, "max_slope={}", spec.max_slope)?;
    writeln!(w, "texture={}", spec.texture)?;
    writeln!(w, "density={}", spec.density)?;
    writeln!(w, "noise_sigma={}", spec.noise_sigma)?;
    Ok(())
}

fn value<V: FromStr>(text: &str, key: &str, at: Location) -> Result<V> {
    text.parse()
        .map_err(|_| Error::parse(at, format!("invalid value `{text}` for `{key}`")))
}

pub fn read_scene_spec(r: impl Read) -> Result<SceneSpec> {
    let mut spec = SceneSpec::default();
    let mut seen = HashSet::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let at = Location::Line(i as u64 + 1);
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, text) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(at, "expected `key=value`"))?;
        let (key, text) = (key.trim(), text.trim());
        if !seen.insert(key.to_string()) {
            return Err(Error::parse(at, format!("repeated key `{key}`")));
        }
        match key {
            "seed" => spec.seed = value(text, key, at)?,
            "height" => spec.height = value(text, key, at)?,
            "width" => spec.width = value(text, key, at)?,
            "planes" => spec.planes = value(text, key, at)?,
            "d_min" => spec.d_min = value(text, key, at)?,
            "d_max" => spec.d_max = value(text, key, at)?,
            "max_slope" => spec.max_slope = value(text, key, at)?,
            "texture" => spec.texture = value(text, key, at)?,
            "density" => spec.density = value(text, key, at)?,
            "noise_sigma" => spec.noise_sigma = value(text, key, at)?,
            _ => return Err(Error::parse(at, format!("unknown key `{key}`"))),
        }
    }
    spec.validate()?;
    Ok(spec)
}
