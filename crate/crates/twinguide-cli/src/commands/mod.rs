pub mod calibrate;
pub mod shadow;
pub mod sweep;
pub mod synth;
pub mod trace;

use std::path::PathBuf;
use std::str::FromStr;

use twinguide::geometry::{CavitySide, PatternSpec};

use crate::CliError;

/// `C,W,D,S` pattern notation used by trace and sweep flags.
#[derive(Debug, Clone, Copy)]
pub struct PatternArg(pub PatternSpec);

impl FromStr for PatternArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(format!(
                "pattern must be cavity_count,width,depth,spacing — got '{s}'"
            ));
        }
        let count: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| format!("bad cavity count '{}'", parts[0]))?;
        let nums: Vec<f64> = parts[1..]
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad pattern value '{p}'"))
            })
            .collect::<Result<_, _>>()?;
        Ok(PatternArg(PatternSpec::new(
            count, nums[0], nums[1], nums[2],
        )))
    }
}

impl std::fmt::Display for PatternArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.0.cavity_count, self.0.width, self.0.depth, self.0.spacing
        )
    }
}

/// `outer|inner` cavity-side flag.
#[derive(Debug, Clone, Copy)]
pub struct SideArg(pub CavitySide);

impl FromStr for SideArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "outer" => Ok(SideArg(CavitySide::Outer)),
            "inner" => Ok(SideArg(CavitySide::Inner)),
            other => Err(format!("bad cavity side '{other}' (expected outer|inner)")),
        }
    }
}

impl std::fmt::Display for SideArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            CavitySide::Outer => write!(f, "outer"),
            CavitySide::Inner => write!(f, "inner"),
        }
    }
}

pub fn load_state_library(
    path: &PathBuf,
) -> Result<twinguide::deformation::StateLibrary, CliError> {
    let text = crate::read_input(path)?;
    twinguide::deformation::load_states(text.as_bytes()).map_err(crate::input_err)
}
