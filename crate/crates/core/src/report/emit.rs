//! CSV, SVG and summary output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;
use serde::Serialize;

use super::curve::{
    cumulative_curve, quantile_grid, stratified_union, CurvePoint, DEFAULT_GRID_POINTS,
};
use super::score::ScoreRecord;
use super::ReportError;
use crate::instance::{meta, ContextBucket, TaskKind};
use crate::stats::MeanAccumulator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SliceBy {
    All,
    Complexity,
    ViewKind,
    Answerable,
    KeyArity,
}

impl SliceBy {
    pub fn name(self) -> &'static str {
        match self {
            SliceBy::All => "all",
            SliceBy::Complexity => "complexity",
            SliceBy::ViewKind => "view_kind",
            SliceBy::Answerable => "answerable",
            SliceBy::KeyArity => "key_arity",
        }
    }

    pub fn parse(s: &str) -> Option<SliceBy> {
        [
            SliceBy::All,
            SliceBy::Complexity,
            SliceBy::ViewKind,
            SliceBy::Answerable,
            SliceBy::KeyArity,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }

    /// Slice value for a score; `None` when the score has no such tag.
    pub fn label(self, s: &ScoreRecord) -> Option<String> {
        match self {
            SliceBy::All => Some("all".into()),
            SliceBy::Complexity => Some(format!("complexity={}", s.complexity)),
            SliceBy::ViewKind => s.tag(meta::VIEW_KIND).map(|v| format!("view_kind={v}")),
            SliceBy::Answerable => s
                .tag(meta::IDK_ANSWERABLE)
                .map(|v| format!("answerable={v}")),
            SliceBy::KeyArity => s
                .tag(meta::MRCR_KEY_ARITY)
                .map(|v| format!("key_arity={v}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub slice: SliceBy,
    /// Keep only IDK scores with this answerability.
    pub answerable: Option<bool>,
    pub task: Option<TaskKind>,
    pub grid: Option<Vec<usize>>,
    pub csv: bool,
    pub plot: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            slice: SliceBy::All,
            answerable: None,
            task: None,
            grid: None,
            csv: true,
            plot: true,
        }
    }
}

impl ReportOptions {
    fn keep(&self, s: &ScoreRecord) -> bool {
        if self.task.is_some_and(|t| t != s.task) {
            return false;
        }
        match self.answerable {
            None => true,
            Some(want) => {
                s.task == TaskKind::Idk
                    && s.tag(meta::IDK_ANSWERABLE) == Some(if want { "true" } else { "false" })
            }
        }
    }

    fn slice_name(&self) -> String {
        match (self.answerable, self.slice) {
            (None, s) => s.name().to_owned(),
            (Some(a), SliceBy::All) => format!("answerable={a}"),
            (Some(a), s) => format!("answerable={a},{}", s.name()),
        }
    }

    fn label(&self, s: &ScoreRecord) -> Option<String> {
        let base = self.slice.label(s)?;
        Some(match (self.answerable, self.slice) {
            (None, _) => base,
            (Some(a), SliceBy::All) => format!("answerable={a}"),
            (Some(a), _) => format!("answerable={a},{base}"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub model_id: String,
    pub task: TaskKind,
    pub bucket: ContextBucket,
    pub context_tokens: usize,
    pub cumulative_mean: f64,
    pub n: usize,
    pub slice: String,
}

type Groups = BTreeMap<(String, TaskKind), BTreeMap<String, Vec<ScoreRecord>>>;

fn group(scores: &[ScoreRecord], opts: &ReportOptions) -> Groups {
    let mut out: Groups = BTreeMap::new();
    for s in scores.iter().filter(|s| opts.keep(s)) {
        if let Some(label) = opts.label(s) {
            out.entry((s.model_id.clone(), s.task))
                .or_default()
                .entry(label)
                .or_default()
                .push(s.clone());
        }
    }
    out
}

fn task_grids(scores: &[ScoreRecord], opts: &ReportOptions) -> BTreeMap<TaskKind, Vec<usize>> {
    let mut lengths: BTreeMap<TaskKind, Vec<usize>> = BTreeMap::new();
    for s in scores.iter().filter(|s| opts.keep(s)) {
        lengths.entry(s.task).or_default().push(s.context_tokens);
    }
    lengths
        .into_iter()
        .map(|(t, ls)| {
            (
                t,
                opts.grid
                    .clone()
                    .unwrap_or_else(|| quantile_grid(&ls, DEFAULT_GRID_POINTS)),
            )
        })
        .collect()
}

/// Curve rows for every (model, task, slice) present in `scores`.
pub fn report_rows(scores: &[ScoreRecord], opts: &ReportOptions) -> Vec<CurveRow> {
    let grids = task_grids(scores, opts);
    let mut rows = Vec::new();
    for ((model, task), slices) in group(scores, opts) {
        for (label, members) in slices {
            for p in cumulative_curve(&members, Some(&grids[&task])) {
                rows.push(CurveRow {
                    model_id: model.clone(),
                    task,
                    bucket: ContextBucket::containing(p.context_tokens),
                    context_tokens: p.context_tokens,
                    cumulative_mean: p.cumulative_mean,
                    n: p.n,
                    slice: label.clone(),
                });
            }
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketSummary {
    pub n: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskSummary {
    pub model_id: String,
    pub task: TaskKind,
    pub n: usize,
    pub mean: f64,
    pub std_err: f64,
    pub errored: usize,
    pub by_bucket: BTreeMap<ContextBucket, BucketSummary>,
    /// Union of all generated buckets, weighted per range; absent when undefined.
    pub stratified: Option<f64>,
}

pub fn summarize(scores: &[ScoreRecord]) -> Vec<TaskSummary> {
    let mut groups: BTreeMap<(String, TaskKind), Vec<&ScoreRecord>> = BTreeMap::new();
    for s in scores {
        groups
            .entry((s.model_id.clone(), s.task))
            .or_default()
            .push(s);
    }
    groups
        .into_iter()
        .map(|((model_id, task), members)| {
            let acc: MeanAccumulator = members.iter().map(|s| s.score).collect();
            let mut subsets: BTreeMap<ContextBucket, Vec<ScoreRecord>> = BTreeMap::new();
            for s in &members {
                subsets.entry(s.bucket).or_default().push((*s).clone());
            }
            let by_bucket = subsets
                .iter()
                .map(|(b, v)| {
                    let a: MeanAccumulator = v.iter().map(|s| s.score).collect();
                    (
                        *b,
                        BucketSummary {
                            n: a.len(),
                            mean: a.mean(),
                        },
                    )
                })
                .collect();
            let include: Vec<ContextBucket> = subsets.keys().copied().collect();
            TaskSummary {
                model_id,
                task,
                n: acc.len(),
                mean: acc.mean(),
                std_err: acc.std_err(),
                errored: members
                    .iter()
                    .filter(|s| s.tag(super::score::ERRORED_TAG).is_some())
                    .count(),
                by_bucket,
                stratified: stratified_union(&subsets, &include).ok(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportFiles {
    pub csv: Option<PathBuf>,
    pub plots: Vec<PathBuf>,
    pub summary: PathBuf,
    pub rows: usize,
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn plot(path: &Path, title: &str, curves: &[(String, Vec<CurvePoint>)]) -> Result<(), String> {
    let xs = curves
        .iter()
        .flat_map(|(_, c)| c.iter().map(|p| p.context_tokens as f64));
    let (lo, hi) = xs.fold((f64::MAX, f64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)));
    let (lo, hi) = if lo < hi {
        (lo, hi)
    } else {
        (lo - 1.0, lo + 1.0)
    };
    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| e.to_string())?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(lo..hi, 0f64..1.0)
        .map_err(|e| e.to_string())?;
    chart
        .configure_mesh()
        .x_desc("context tokens")
        .y_desc("cumulative average score")
        .draw()
        .map_err(|e| e.to_string())?;
    for (i, (label, points)) in curves.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(
                points
                    .iter()
                    .map(|p| (p.context_tokens as f64, p.cumulative_mean)),
                color.stroke_width(2),
            ))
            .map_err(|e| e.to_string())?
            .label(label.clone())
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
            });
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| e.to_string())?;
    root.present().map_err(|e| e.to_string())
}

pub fn emit_report(
    scores: &[ScoreRecord],
    opts: &ReportOptions,
    out_dir: &Path,
) -> Result<ReportFiles, ReportError> {
    if scores.is_empty() {
        return Err(ReportError::EmptyInput("no scores to report".into()));
    }
    let io = |path: &Path, e: std::io::Error| ReportError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
    let rows = report_rows(scores, opts);

    let csv = if opts.csv {
        let path = out_dir.join("curves.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| ReportError::Io {
            path: path.clone(),
            message: e.to_string(),
        })?;
        for r in &rows {
            w.serialize(r).map_err(|e| ReportError::Io {
                path: path.clone(),
                message: e.to_string(),
            })?;
        }
        w.flush().map_err(|e| io(&path, e))?;
        Some(path)
    } else {
        None
    };

    let mut plots = Vec::new();
    if opts.plot {
        let mut figures: BTreeMap<(String, TaskKind), Vec<(String, Vec<CurvePoint>)>> =
            BTreeMap::new();
        for r in &rows {
            let curves = figures.entry((r.model_id.clone(), r.task)).or_default();
            if curves.last().is_none_or(|(l, _)| *l != r.slice) {
                curves.push((r.slice.clone(), Vec::new()));
            }
            let p = CurvePoint {
                context_tokens: r.context_tokens,
                cumulative_mean: r.cumulative_mean,
                n: r.n,
            };
            curves.last_mut().unwrap().1.push(p);
        }
        let slice = opts.slice_name();
        for ((model, task), curves) in figures {
            let path = out_dir.join(format!(
                "{}_{}_{}.svg",
                file_safe(&model),
                task,
                file_safe(&slice)
            ));
            plot(&path, &format!("{model} / {task} / {slice}"), &curves).map_err(|message| {
                ReportError::Io {
                    path: path.clone(),
                    message,
                }
            })?;
            plots.push(path);
        }
    }

    let summary = out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summarize(scores)).expect("summary serializes");
    std::fs::write(&summary, text + "\n").map_err(|e| io(&summary, e))?;
    Ok(ReportFiles {
        csv,
        plots,
        summary,
        rows: rows.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::curve::tests::sr;

    fn scores() -> Vec<ScoreRecord> {
        let mut out = Vec::new();
        for model in ["m1", "m2"] {
            for (i, c) in [1u32, 5, 20].iter().enumerate() {
                for k in 0..4 {
                    let mut s = sr(1000 * (k + 1) + i, 1.0 / (*c as f64), ContextBucket::B32K);
                    s.model_id = model.into();
                    s.task = TaskKind::LatentList;
                    s.complexity = *c;
                    s.instance_id = format!("{model}-{c}-{k}");
                    out.push(s);
                }
            }
        }
        out
    }

    #[test]
    fn complexity_slices_give_three_curves() {
        let opts = ReportOptions {
            slice: SliceBy::Complexity,
            grid: Some(vec![5000]),
            ..Default::default()
        };
        let rows = report_rows(&scores(), &opts);
        // grid points x models x slices
        assert_eq!(rows.len(), 2 * 3);
        let m1: Vec<_> = rows
            .iter()
            .filter(|r| r.model_id == "m1")
            .map(|r| (r.slice.as_str(), r.cumulative_mean))
            .collect();
        assert_eq!(
            m1,
            [
                ("complexity=1", 1.0),
                ("complexity=20", 0.05),
                ("complexity=5", 0.2)
            ]
        );
    }

    #[test]
    fn answerable_filter_keeps_idk_only() {
        let mut s = scores();
        let mut idk = sr(3000, 1.0, ContextBucket::B32K);
        idk.tags.insert(meta::IDK_ANSWERABLE.into(), "false".into());
        s.push(idk);
        let opts = ReportOptions {
            answerable: Some(false),
            ..Default::default()
        };
        let rows = report_rows(&s, &opts);
        assert!(rows
            .iter()
            .all(|r| r.task == TaskKind::Idk && r.slice == "answerable=false"));
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let opts = ReportOptions {
            slice: SliceBy::Complexity,
            ..Default::default()
        };
        let files = emit_report(&scores(), &opts, dir.path()).unwrap();
        assert_eq!(files.plots.len(), 2);
        assert!(files.plots[0].ends_with("m1_latent_list_complexity.svg"));
        let svg = std::fs::read_to_string(&files.plots[0]).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("complexity=20"));
        let csv = std::fs::read_to_string(files.csv.unwrap()).unwrap();
        assert_eq!(
            csv.lines().next().unwrap(),
            "model_id,task,bucket,context_tokens,cumulative_mean,n,slice"
        );
        assert_eq!(csv.lines().count(), files.rows + 1);
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(files.summary).unwrap()).unwrap();
        assert_eq!(summary.as_array().unwrap().len(), 2);
    }
}
