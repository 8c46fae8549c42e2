//! Command implementations.
//!
//! Every command resolves its configuration as defaults, then the
//! `--config` file, then flags, prints the result to stderr, and only
//! then touches data. Output files depend on nothing but the inputs and
//! the resolved configuration, so identical invocations produce
//! byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use bk_core::config::{load_group_gaps, save_group_gaps, ToolConfig};
use bk_core::data::{BoundaryList, Prediction};
use bk_core::error::{Error, Result};
use bk_core::groups::{classify_group, GroupKey};
use bk_core::io::{self, fmt6};
use bk_core::pipeline::{
    self, apply_alignment, evaluate_report, pseudo_label, split_easy_hard, tune_per_group,
    AlignMode,
};
use bk_core::{detect, eval, simgen};

use crate::{
    AlignArgs, AlignFlags, Cli, Command, DetectArgs, DetectFlags, EvalArgs, EvalFlags, FuseArgs,
    GroupsArgs, PseudoLabelArgs, ReportArgs, SimulateArgs, SplitArgs, TuneArgs,
};

/// 1 for usage and configuration problems, 2 for data problems.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) => 1,
        Error::Stage { source, .. } => exit_code(source),
        _ => 2,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let mut config = ToolConfig::default();
    if let Some(path) = &cli.config {
        config.merge_file(path)?;
    }
    match cli.command {
        Command::Simulate(args) => simulate(config, args),
        Command::Detect(args) => detect_cmd(config, args),
        Command::Align(args) => align_cmd(config, args),
        Command::Fuse(args) => fuse_cmd(config, args),
        Command::Eval(args) => eval_cmd(config, args),
        Command::Groups(args) => groups_cmd(config, args),
        Command::Split(args) => split_cmd(config, args),
        Command::PseudoLabel(args) => pseudo_label_cmd(config, args),
        Command::Tune(args) => tune_cmd(config, args),
        Command::Report(args) => report_cmd(config, args),
    }
}

fn print_config(config: &ToolConfig) {
    eprintln!("# resolved config");
    for (key, value) in config.entries() {
        eprintln!("{key} = {value}");
    }
}

fn apply_detect_flags(config: &mut ToolConfig, flags: &DetectFlags) {
    if let Some(v) = flags.threshold {
        config.pipeline.detect.threshold = v;
    }
    if let Some(v) = flags.smooth_sd {
        config.pipeline.detect.smooth_sd = v;
    }
    if let Some(v) = flags.refine {
        config.pipeline.detect.refine = v;
    }
}

fn apply_align_flags(config: &mut ToolConfig, flags: &AlignFlags) -> Result<()> {
    if let Some(v) = flags.margin {
        config.pipeline.align.margin = v;
    }
    if let Some(v) = flags.gap_factor {
        config.pipeline.align.gap_factor = v;
    }
    if let Some(v) = flags.dense_floor {
        config.pipeline.align.dense_gap_floor_factor = v;
    }
    if let Some(v) = flags.dense_trigger {
        config.pipeline.align.dense_trigger = v;
    }
    if let Some(path) = &flags.per_group_gaps {
        config.pipeline.align.per_group_gap.extend(load_group_gaps(path)?);
    }
    Ok(())
}

fn apply_eval_flags(config: &mut ToolConfig, flags: &EvalFlags) -> Result<()> {
    if let Some(v) = flags.rel_dis {
        config.pipeline.eval.rel_dis = v;
    }
    if let Some(mode) = &flags.aggregation {
        config.set("eval.aggregation", mode)?;
    }
    Ok(())
}

fn parse_number_list(flag: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("{flag}: expected a number, got '{tok}'"))
            })
        })
        .collect()
}

fn parse_mode(text: &str) -> Result<AlignMode> {
    text.parse()
}

fn simulate(mut config: ToolConfig, args: SimulateArgs) -> Result<()> {
    let s = &mut config.sim;
    if let Some(v) = args.seed {
        s.seed = v;
    }
    if let Some(v) = args.n_videos {
        s.n_videos = v;
    }
    if let Some(v) = args.rate {
        s.boundary_rate = v;
    }
    if let Some(v) = args.min_gap {
        s.min_gap = v;
    }
    if let Some(v) = args.margin {
        s.margin = v;
    }
    if let Some(v) = args.raters {
        s.n_raters = v;
    }
    if let Some(v) = args.jitter_sd {
        s.rater_jitter_sd = v;
    }
    if let Some(v) = args.bump_width {
        s.bump_width = v;
    }
    if let Some(v) = args.noise_sd {
        s.noise_sd = v;
    }
    if let Some(v) = args.stride {
        s.stride = v;
    }
    if let Some(text) = &args.duration_weights {
        let w = parse_number_list("--duration-weights", text)?;
        if w.len() != 4 {
            return Err(Error::InvalidConfig(
                "--duration-weights needs exactly four values".into(),
            ));
        }
        s.duration_weights = [w[0], w[1], w[2], w[3]];
    }
    print_config(&config);

    let generated = simgen::generate(&config.sim)?;
    io::save_corpus(&generated.curves, &generated.annotations, &args.out_dir)?;
    let boundaries: usize = generated
        .annotations
        .iter()
        .map(|a| a.primary().len())
        .sum();
    if generated.truncated_videos > 0 {
        eprintln!(
            "warning: boundary target truncated on {} of {} videos (margin/min-gap capacity)",
            generated.truncated_videos,
            generated.curves.len()
        );
    }
    println!(
        "wrote {} videos ({} canonical boundaries) to {}",
        generated.curves.len(),
        boundaries,
        args.out_dir.display()
    );
    Ok(())
}

fn detect_cmd(mut config: ToolConfig, args: DetectArgs) -> Result<()> {
    apply_detect_flags(&mut config, &args.detect);
    print_config(&config);
    config.pipeline.detect.validate()?;

    let curves = io::load_scores(&args.scores)?;
    let preds: Vec<Prediction> = curves
        .iter()
        .map(|c| detect::detect(c, &config.pipeline.detect))
        .collect();
    io::save_predictions(&preds, &args.out)?;
    let boundaries: usize = preds.iter().map(Prediction::len).sum();
    println!(
        "detected {} boundaries across {} videos -> {}",
        boundaries,
        preds.len(),
        args.out.display()
    );
    Ok(())
}

fn align_cmd(mut config: ToolConfig, args: AlignArgs) -> Result<()> {
    apply_align_flags(&mut config, &args.align)?;
    print_config(&config);
    config.pipeline.align.validate()?;
    let mode = parse_mode(&args.mode)?;
    if mode == AlignMode::None {
        return Err(Error::InvalidConfig(
            "align mode must be static or dynamic".into(),
        ));
    }

    let metas = io::load_metas(&args.durations_from)?;
    let preds = io::load_predictions(&args.preds, &metas)?;
    let before: usize = preds.iter().map(Prediction::len).sum();
    let aligned: Vec<Prediction> = preds
        .iter()
        .map(|p| apply_alignment(p, &config.pipeline.align, mode))
        .collect();
    let after: usize = aligned.iter().map(Prediction::len).sum();
    io::save_predictions(&aligned, &args.out)?;
    println!(
        "aligned {} videos ({mode}): {} boundaries in, {} kept -> {}",
        aligned.len(),
        before,
        after,
        args.out.display()
    );
    Ok(())
}

fn fuse_cmd(config: ToolConfig, args: FuseArgs) -> Result<()> {
    print_config(&config);
    let spec = bk_core::config::load_ensemble_spec(&args.spec)?;
    let fused = pipeline::fuse_members(&spec)?;
    io::save_scores(&fused, &args.out)?;
    println!(
        "fused {} members over {} videos -> {}",
        spec.members().len(),
        fused.len(),
        args.out.display()
    );
    Ok(())
}

fn eval_cmd(mut config: ToolConfig, args: EvalArgs) -> Result<()> {
    apply_eval_flags(&mut config, &args.eval)?;
    print_config(&config);
    config.pipeline.eval.validate()?;

    let annotations = io::load_annotations(&args.annotations)?;
    let metas: Vec<_> = annotations.iter().map(|a| a.meta().clone()).collect();
    let preds = io::load_predictions(&args.preds, &metas)?;
    let lists: Vec<BoundaryList> = preds.iter().map(|p| p.boundaries().clone()).collect();
    let report = evaluate_report(&lists, &annotations, &config.pipeline.eval, "input")?;
    println!("corpus F1 = {}", fmt6(report.corpus_f1));
    if let Some(path) = &args.report_out {
        report.write_records(path)?;
        eprintln!("report records -> {}", path.display());
    }
    Ok(())
}

fn groups_cmd(config: ToolConfig, args: GroupsArgs) -> Result<()> {
    print_config(&config);
    // (duration, count) per video, from whichever input was given.
    let items: Vec<(f64, usize)> = match (&args.annotations, &args.preds) {
        (Some(path), None) => io::load_annotations(path)?
            .iter()
            .map(|a| (a.meta().duration(), a.primary().len()))
            .collect(),
        (None, Some(path)) => {
            let durations = args.durations_from.as_ref().expect("clap enforces the pair");
            let metas = io::load_metas(durations)?;
            io::load_predictions(path, &metas)?
                .iter()
                .map(|p| (p.meta().duration(), p.len()))
                .collect()
        }
        _ => {
            return Err(Error::InvalidConfig(
                "provide exactly one of --annotations or --preds".into(),
            ))
        }
    };

    let mut counts: BTreeMap<GroupKey, usize> =
        GroupKey::all().into_iter().map(|k| (k, 0)).collect();
    for &(duration, count) in &items {
        *counts.get_mut(&classify_group(duration, count)).unwrap() += 1;
    }
    let density = eval::density_table(items.iter().copied())?;

    println!("group            videos");
    for (key, n) in &counts {
        println!("{:<16} {:>6}", key.to_string(), n);
    }
    println!();
    println!("splits per second  none     r0-0.55  r0.55-1  r1+");
    println!(
        "share              {:<8} {:<8} {:<8} {:<8}",
        format!("{:.2}%", density.percent[0]),
        format!("{:.2}%", density.percent[1]),
        format!("{:.2}%", density.percent[2]),
        format!("{:.2}%", density.percent[3]),
    );

    if let Some(path) = &args.out {
        let mut records = format!("{} report\n", io::FORMAT_VERSION);
        for (key, n) in &counts {
            records.push_str(&format!("groups\t{key}\t{n}\n"));
        }
        for (label, pct) in eval::DENSITY_LABELS.iter().zip(density.percent) {
            records.push_str(&format!("density\t{label}\t{}\n", fmt6(pct)));
        }
        fs::write(path, records).map_err(|e| Error::io(path, e))?;
        eprintln!("group records -> {}", path.display());
    }
    Ok(())
}

fn split_cmd(mut config: ToolConfig, args: SplitArgs) -> Result<()> {
    if let Some(v) = args.hard_threshold {
        config.pipeline.hard_threshold = v;
    }
    print_config(&config);

    let curves = io::load_scores(&args.scores)?;
    let (easy, hard) = split_easy_hard(&curves, config.pipeline.hard_threshold);
    println!("easy {} / hard {}", easy.len(), hard.len());

    let write_ids = |path: &Path, ids: &[String]| -> Result<()> {
        let mut text = String::new();
        for id in ids {
            text.push_str(id);
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| Error::io(path, e))
    };
    match (&args.out_easy, &args.out_hard) {
        (None, None) => {
            for id in &easy {
                println!("easy\t{id}");
            }
            for id in &hard {
                println!("hard\t{id}");
            }
        }
        (easy_path, hard_path) => {
            if let Some(path) = easy_path {
                write_ids(path, &easy)?;
            }
            if let Some(path) = hard_path {
                write_ids(path, &hard)?;
            }
        }
    }
    Ok(())
}

fn pseudo_label_cmd(mut config: ToolConfig, args: PseudoLabelArgs) -> Result<()> {
    apply_detect_flags(&mut config, &args.detect);
    apply_align_flags(&mut config, &args.align)?;
    print_config(&config);
    config.pipeline.detect.validate()?;
    config.pipeline.align.validate()?;

    let curves = io::load_scores(&args.scores)?;
    let labeled = pseudo_label(&curves, &config.pipeline);
    io::save_annotations(&labeled, &args.out)?;
    let boundaries: usize = labeled.iter().map(|a| a.primary().len()).sum();
    println!(
        "pseudo-labeled {} videos ({} boundaries) -> {}",
        labeled.len(),
        boundaries,
        args.out.display()
    );
    Ok(())
}

fn tune_cmd(mut config: ToolConfig, args: TuneArgs) -> Result<()> {
    apply_detect_flags(&mut config, &args.detect);
    apply_align_flags(&mut config, &args.align)?;
    apply_eval_flags(&mut config, &args.eval)?;
    if let Some(text) = &args.thresholds {
        config.pipeline.grid.thresholds = parse_number_list("--thresholds", text)?;
    }
    if let Some(text) = &args.gap_factors {
        config.pipeline.grid.gap_factors = parse_number_list("--gap-factors", text)?;
    }
    print_config(&config);
    config.pipeline.detect.validate()?;
    config.pipeline.align.validate()?;
    config.pipeline.eval.validate()?;

    let curves = io::load_scores(&args.scores)?;
    let annotations = io::load_annotations(&args.annotations)?;
    let outcome = tune_per_group(&curves, &annotations, &config.pipeline)?;

    for key in &outcome.empty_groups {
        eprintln!("warning: group {key} has no videos; omitted");
    }
    println!("group            videos  threshold  gap_factor  F1 before  F1 after");
    for (key, entry) in &outcome.entries {
        println!(
            "{:<16} {:>6}  {}   {}    {}   {}",
            key.to_string(),
            entry.videos,
            fmt6(entry.threshold),
            fmt6(entry.gap_factor),
            fmt6(entry.f1_before),
            fmt6(entry.f1_after),
        );
    }

    if let Some(path) = &args.out_gaps {
        save_group_gaps(&outcome.gap_table(), path)?;
        eprintln!("per-group gap table -> {}", path.display());
    }
    if let Some(path) = &args.out {
        let mut records = format!("{} report\n", io::FORMAT_VERSION);
        for (key, entry) in &outcome.entries {
            records.push_str(&format!("tune\t{key}:videos\t{}\n", entry.videos));
            records.push_str(&format!("tune\t{key}:threshold\t{}\n", fmt6(entry.threshold)));
            records.push_str(&format!("tune\t{key}:gap_factor\t{}\n", fmt6(entry.gap_factor)));
            records.push_str(&format!("tune\t{key}:f1_before\t{}\n", fmt6(entry.f1_before)));
            records.push_str(&format!("tune\t{key}:f1_after\t{}\n", fmt6(entry.f1_after)));
        }
        fs::write(path, records).map_err(|e| Error::io(path, e))?;
        eprintln!("tuning records -> {}", path.display());
    }
    Ok(())
}

fn report_cmd(mut config: ToolConfig, args: ReportArgs) -> Result<()> {
    apply_detect_flags(&mut config, &args.detect);
    apply_align_flags(&mut config, &args.align)?;
    apply_eval_flags(&mut config, &args.eval)?;
    print_config(&config);

    let mode = parse_mode(&args.align_mode)?;
    let compare_to = args.compare_to.as_deref().map(parse_mode).transpose()?;
    if args.scores.is_none() && args.fuse_spec.is_none() {
        return Err(Error::InvalidConfig(
            "provide --scores or --fuse-spec".into(),
        ));
    }

    let output = pipeline::run_pipeline_files(
        args.scores.as_deref(),
        args.fuse_spec.as_deref(),
        &args.annotations,
        &config.pipeline,
        mode,
        compare_to,
    )?;

    print!("{}", output.report.to_text());
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        output.report.write_text(dir.join("report.txt"))?;
        output.report.write_records(dir.join("report.bk"))?;
        io::save_predictions(&output.aligned, dir.join("predictions.bk"))?;
        eprintln!("report written to {}", dir.display());
    }
    Ok(())
}
