//! Command-line vocabulary for scores, priors and score+prior strategies:
//! `bdeu:1`, `bds:10`, `k2`, `bd-jeffreys`, `bic`, `loglik`; `u`, `mu:0.5`,
//! `mu-sparse:1`; combined as `bdeu:1+u`.

use anyhow::{anyhow, bail, Result};
use bnsl::{PriorKind, ScoreKind};

pub fn parse_score(text: &str) -> Result<ScoreKind> {
    let (name, param) = split_param(text);
    let alpha = |name: &str| -> Result<f64> {
        let raw = param
            .ok_or_else(|| anyhow!("score {name:?} needs an imaginary sample size, e.g. {name}:1"))?;
        let alpha: f64 = raw
            .parse()
            .map_err(|_| anyhow!("invalid imaginary sample size {raw:?}"))?;
        if !(alpha.is_finite() && alpha > 0.0) {
            bail!("imaginary sample size must be positive, got {alpha}");
        }
        Ok(alpha)
    };
    match name {
        "bdeu" => Ok(ScoreKind::Bdeu { alpha: alpha("bdeu")? }),
        "bds" => Ok(ScoreKind::Bds { alpha: alpha("bds")? }),
        "k2" => no_param(param, "k2", ScoreKind::K2),
        "jeffreys" | "bd-jeffreys" => no_param(param, name, ScoreKind::BdJeffreys),
        "bic" => no_param(param, "bic", ScoreKind::Bic),
        "loglik" => no_param(param, "loglik", ScoreKind::LogLik),
        other => bail!("unknown score {other:?} (expected bdeu:a, bds:a, k2, bd-jeffreys, bic or loglik)"),
    }
}

pub fn parse_prior(text: &str) -> Result<PriorKind> {
    let (name, param) = split_param(text);
    match name {
        "u" | "uniform" => no_param(param, "u", PriorKind::Uniform),
        "mu" => {
            let raw = param.ok_or_else(|| anyhow!("prior mu needs beta, e.g. mu:0.5"))?;
            let beta: f64 = raw.parse().map_err(|_| anyhow!("invalid beta {raw:?}"))?;
            Ok(PriorKind::MarginalUniform { beta })
        }
        "mu-sparse" => {
            let raw = param.ok_or_else(|| anyhow!("prior mu-sparse needs c, e.g. mu-sparse:1"))?;
            let c: f64 = raw.parse().map_err(|_| anyhow!("invalid c {raw:?}"))?;
            Ok(PriorKind::MarginalUniformSparse { c })
        }
        other => bail!("unknown prior {other:?} (expected u, mu:beta or mu-sparse:c)"),
    }
}

/// `<score>+<prior>`, e.g. `bds:1+mu:0.5`.
pub fn parse_strategy(text: &str) -> Result<(ScoreKind, PriorKind)> {
    let (score, prior) = text
        .split_once('+')
        .ok_or_else(|| anyhow!("strategy {text:?} must look like <score>+<prior>, e.g. bdeu:1+u"))?;
    Ok((parse_score(score.trim())?, parse_prior(prior.trim())?))
}

fn split_param(text: &str) -> (&str, Option<&str>) {
    match text.trim().split_once(':') {
        Some((name, param)) => (name, Some(param)),
        None => (text.trim(), None),
    }
}

fn no_param<T>(param: Option<&str>, name: &str, value: T) -> Result<T> {
    match param {
        Some(p) => bail!("{name} takes no parameter, got {name}:{p}"),
        None => Ok(value),
    }
}
