//! Flat `key=value` configuration files.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored.
//! Keys are the field names of the simulation config (hyphens and
//! underscores are interchangeable), plus `algorithm`, `iterations`, `seed`,
//! `jobs` and `out`. Per-kind parameters use a `regular.`, `bot.` or
//! `influencer.` prefix, e.g. `bot.post_misinfo_prob = 0.6`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::BatchPlan;
use crate::domain::{AgentKind, Algorithm};
use crate::error::{Error, Result};

/// Parses `text` as a config file and applies each setting to `plan` in order.
pub fn apply_config_text(plan: &mut BatchPlan, text: &str, path: &Path) -> Result<()> {
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected key=value, got `{line}`")))?;
        apply_setting(plan, key.trim(), value.trim()).map_err(parse_err)?;
    }
    Ok(())
}

pub fn load_config_file(plan: &mut BatchPlan, path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    apply_config_text(plan, &text, path)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("invalid value `{value}` for `{key}`: {e}"))
}

/// Parses `all` or a comma-separated list of algorithm names.
pub fn parse_algorithms(value: &str) -> Result<Vec<Algorithm>, String> {
    if value == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    value
        .split(',')
        .map(|s| s.trim().parse::<Algorithm>().map_err(|e| e.to_string()))
        .collect()
}

/// Applies a single setting. Returns a message on unknown keys or bad values.
pub fn apply_setting(plan: &mut BatchPlan, key: &str, value: &str) -> Result<(), String> {
    let key = key.replace('-', "_");
    let c = &mut plan.base;
    match key.as_str() {
        "timesteps" | "steps" => c.timesteps = parse(&key, value)?,
        "n_users" | "users" => c.n_users = parse(&key, value)?,
        "avg_followers" => c.avg_followers = parse(&key, value)?,
        "initial_news" => c.initial_news = parse(&key, value)?,
        "misinfo_pct" => c.misinfo_pct = parse(&key, value)?,
        "bot_pct" => c.bot_pct = parse(&key, value)?,
        "influencer_pct" => c.influencer_pct = parse(&key, value)?,
        "recs_per_step" => c.recs_per_step = parse(&key, value)?,
        "topic_dim" => c.topic_dim = parse(&key, value)?,
        "feed_cap" => c.feed_cap = parse(&key, value)?,
        "steps_per_day" => c.steps_per_day = parse(&key, value)?,
        "infection_recovery_window" => c.infection_recovery_window = parse(&key, value)?,
        "knn_neighbors" => c.knn_neighbors = parse(&key, value)?,
        "popularity_window" => c.popularity_window = parse(&key, value)?,
        "cold_start_min_interactions" => c.cold_start_min_interactions = parse(&key, value)?,
        "engagement_decay" => c.engagement_decay = parse(&key, value)?,
        "engagement_bump" => c.engagement_bump = parse(&key, value)?,
        "authored_topic_noise" => c.authored_topic_noise = parse(&key, value)?,
        "seed" | "rng_seed" => plan.base_seed = parse(&key, value)?,
        "algorithm" | "algorithms" => plan.algorithms = parse_algorithms(value)?,
        "iterations" => plan.iterations = parse(&key, value)?,
        "jobs" => plan.jobs = parse(&key, value)?,
        "out" => plan.out_dir = PathBuf::from(value),
        other => return apply_kind_setting(plan, other, value),
    }
    Ok(())
}

fn apply_kind_setting(plan: &mut BatchPlan, key: &str, value: &str) -> Result<(), String> {
    let unknown = || format!("unknown key `{key}`");
    let (prefix, field) = key.split_once('.').ok_or_else(unknown)?;
    let kind = AgentKind::ALL
        .into_iter()
        .find(|k| k.name() == prefix)
        .ok_or_else(unknown)?;
    let p = plan.base.kind_params_mut(kind);
    match field {
        "activity_min" => p.activity.0 = parse(key, value)?,
        "activity_max" => p.activity.1 = parse(key, value)?,
        "naivety_min" => p.naivety.0 = parse(key, value)?,
        "naivety_max" => p.naivety.1 = parse(key, value)?,
        "post_prob" => p.post_prob = parse(key, value)?,
        "post_misinfo_prob" => p.post_misinfo_prob = parse(key, value)?,
        "fake_share_factor" => p.fake_share_factor = parse(key, value)?,
        "follow_boost" => p.follow_boost = parse(key, value)?,
        _ => return Err(unknown()),
    }
    Ok(())
}
