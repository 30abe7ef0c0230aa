//! `--config FILE`: `key = value` lines become `--key value` flags unless the
//! same flag was given on the command line. Unknown keys surface as
//! ordinary unknown-flag errors.

use std::ffi::OsString;

fn config_path(args: &[OsString]) -> Result<Option<String>, String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it
                .next()
                .map(|p| Some(p.to_string_lossy().into_owned()))
                .ok_or_else(|| "--config needs a file".into());
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_string()));
        }
    }
    Ok(None)
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        let k = k.trim();
        if k.is_empty() || k.starts_with('-') || k.contains(char::is_whitespace) {
            return Err(format!("config line {}: bad key {k:?}", i + 1));
        }
        if k == "config" || k == "output" {
            return Err(format!(
                "config line {}: {k} cannot be set from a config file",
                i + 1
            ));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn expand_args(mut args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let given = |key: &str| {
        args.iter().any(|a| {
            let a = a.to_string_lossy();
            a == format!("--{key}") || a.starts_with(&format!("--{key}="))
        })
    };
    let mut extra = Vec::new();
    for (k, v) in parse_config(&text)? {
        if given(&k) {
            continue;
        }
        match v.as_str() {
            "true" => extra.push(OsString::from(format!("--{k}"))),
            "false" => {}
            _ => {
                extra.push(OsString::from(format!("--{k}")));
                extra.push(OsString::from(v));
            }
        }
    }
    args.extend(extra);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let c = parse_config("# runs\nn = 4\n\nseed=7\n").unwrap();
        assert_eq!(
            c,
            vec![("n".into(), "4".into()), ("seed".into(), "7".into())]
        );
        assert!(parse_config("n 4").is_err());
        assert!(parse_config("--n=4").is_err());
    }
}
