//! Command-line front end: a small expression language for elements,
//! λ-brackets and forms, a script runner, presets and verification commands.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
//! a usage or parse error.

mod commands;
mod session;
mod syntax;

use std::io::Write;

use clap::Parser;

pub use commands::{dispatch, script_command, Cli, Command};
pub use session::{form_text, parse_element, parse_form, parse_value, Outcome, Scope, Session, Value};
pub use syntax::{parse, parse_expr, split_words, CheckOp, Expr, Located, Pos, Script, Statement};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs a script text in a fresh session.
pub fn run_script(text: &str, session: &mut Session, out: &mut dyn Write) -> crate::Result<bool> {
    let script = parse(text)?;
    session.run(&script, out, &mut script_command)
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run { files } => {
            let mut all = true;
            let mut res = Ok(true);
            for f in files {
                let text = match std::fs::read_to_string(f) {
                    Ok(t) => t,
                    Err(e) => {
                        res = Err(crate::Error::InvalidArgument(format!("{}: {e}", f.display())));
                        break;
                    }
                };
                let mut s = Session::new();
                s.fixtures = cli.fixtures.clone();
                match run_script(&text, &mut s, out) {
                    Ok(ok) => all &= ok,
                    Err(e) => {
                        res = Err(crate::Error::InvalidArgument(format!("{}: {e}", f.display())));
                        break;
                    }
                }
            }
            res.map(|_| all)
        }
        cmd => {
            let mut s = Session::new();
            s.fixtures = cli.fixtures.clone();
            dispatch(&mut s, cmd).map(|o| {
                if !o.text.is_empty() {
                    let _ = writeln!(out, "{}", o.text);
                }
                o.passed
            })
        }
    };
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
