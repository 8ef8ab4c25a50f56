//! Replaying scripts through the engine, optionally against the oracles.
//!
//! `replay` feeds a parsed script to a [`Session`] and records one line per
//! item: change lines carry the classified change type, query lines carry
//! the answer, and every record snapshots the cumulative prime-drop and
//! refresh counters. `check` does the same and additionally answers each
//! query with the brute-force oracle and rebuilds the decomposition from
//! scratch after every change; disagreements become [`Diff`] entries in the
//! report rather than errors, so a broken build produces evidence instead
//! of a crash.

use std::collections::{BTreeMap, BTreeSet};

use planiso::decomp::DecompositionState;
use planiso::graph::{ChangeEvent, DynamicGraph, VertexId};
use planiso::{EngineError, Session, SessionConfig};
use planiso_oracle::iso::oracle_iso;
use planiso_oracle::CompactGraph;
use serde::Serialize;

use crate::script::{Item, Script};

/// Knobs for a replay run, mirroring the CLI flags.
#[derive(Debug, Clone)]
pub struct ReplayOpts {
    /// Stop at the first change the engine refuses. When false, refused
    /// changes are recorded and skipped.
    pub strict: bool,
    /// Attach a vertex bijection to positive `?t` answers.
    pub witness: bool,
    /// Render the report as JSON (consulted by the binary, not by `replay`).
    pub json: bool,
    pub config: SessionConfig,
}

impl Default for ReplayOpts {
    fn default() -> Self {
        ReplayOpts {
            strict: true,
            witness: false,
            json: false,
            config: SessionConfig::default(),
        }
    }
}

/// One report line. `drops` and `refreshes` are cumulative session
/// counters as of this item, so the pool history can be read off any
/// record prefix.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub line: usize,
    pub kind: &'static str,
    pub answer: Option<bool>,
    pub change_type: Option<String>,
    pub drops: u64,
    pub refreshes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(VertexId, VertexId)>>,
}

/// One disagreement found in check mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diff {
    pub line: usize,
    /// "answer" for a query disagreement, "decomposition" for an
    /// incremental-vs-scratch mismatch after a change.
    pub what: &'static str,
    pub engine: String,
    pub oracle: String,
}

/// The outcome of a whole run. Identical inputs produce identical reports:
/// the engine, the generator and the oracles are all deterministic.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub n: usize,
    pub records: Vec<Record>,
    pub drops: u64,
    pub refreshes: u64,
    /// Line of the refused change that stopped a strict run.
    pub aborted: Option<usize>,
    /// Empty outside check mode, and in a healthy build inside it.
    pub diffs: Vec<Diff>,
}

/// Replays a script through a fresh session.
pub fn replay(script: &Script, opts: &ReplayOpts) -> Report {
    run(script, opts, false)
}

/// Replays a script with full oracle cross-checking: every query is also
/// answered by the brute-force oracle and every change is followed by a
/// from-scratch decomposition rebuild. Refused changes are skipped rather
/// than aborted on, so one bad line cannot hide later diffs.
pub fn check(script: &Script) -> Report {
    let opts = ReplayOpts { strict: false, ..ReplayOpts::default() };
    run(script, &opts, true)
}

fn run(script: &Script, opts: &ReplayOpts, checking: bool) -> Report {
    let mut s = Session::new(script.n, opts.config.clone());
    let mut records = Vec::new();
    let mut diffs = Vec::new();
    let mut aborted = None;
    for &(line, item) in &script.items {
        match item {
            Item::Insert(u, v) | Item::Delete(u, v) => {
                let ev = match item {
                    Item::Insert(..) => ChangeEvent::insert(u, v),
                    _ => ChangeEvent::delete(u, v),
                };
                let mut rec = record(line, item.kind(), &s);
                match s.apply(ev) {
                    Ok(applied) => {
                        rec.change_type = Some(applied.change_type.to_string());
                        rec.drops = s.drops();
                        rec.refreshes = s.refreshes();
                        records.push(rec);
                        if checking {
                            diff_decomposition(&s, line, &mut diffs);
                        }
                    }
                    Err(e) => {
                        rec.note = Some(format!("refused: {e}"));
                        records.push(rec);
                        if opts.strict {
                            aborted = Some(line);
                            break;
                        }
                    }
                }
            }
            _ => {
                let mut rec = record(line, item.kind(), &s);
                match answer(&mut s, item) {
                    Ok((ans, witness)) => {
                        rec.answer = Some(ans);
                        if opts.witness {
                            rec.witness = witness;
                        }
                        if checking {
                            diff_answer(&s, line, item, ans, &mut diffs);
                        }
                    }
                    Err(e) => rec.note = Some(format!("unanswerable: {e}")),
                }
                rec.drops = s.drops();
                rec.refreshes = s.refreshes();
                records.push(rec);
            }
        }
    }
    Report {
        n: script.n,
        records,
        drops: s.drops(),
        refreshes: s.refreshes(),
        aborted,
        diffs,
    }
}

fn record(line: usize, kind: &'static str, s: &Session) -> Record {
    Record {
        line,
        kind,
        answer: None,
        change_type: None,
        drops: s.drops(),
        refreshes: s.refreshes(),
        note: None,
        witness: None,
    }
}

type Answer = (bool, Option<Vec<(VertexId, VertexId)>>);

fn answer(s: &mut Session, item: Item) -> Result<Answer, EngineError> {
    match item {
        Item::Components(u, v) => Ok((s.query_components(u, v)?, None)),
        Item::Connected(a, a2) => Ok((s.query_connected(a, a2)?, None)),
        Item::Biconnected([a, b, a2, b2]) => Ok((s.query_biconnected(a, b, a2, b2)?, None)),
        Item::Triconnected(t) => {
            let tuple = [t[0], t[1], t[2], t[3]];
            let tuple_star = [t[4], t[5], t[6], t[7]];
            let (ans, m) = s.query_triconnected(tuple, tuple_star)?;
            Ok((ans, m.map(|m| m.pairs().collect())))
        }
        Item::Insert(..) | Item::Delete(..) => unreachable!("changes are not queries"),
    }
}

fn diff_decomposition(s: &Session, line: usize, diffs: &mut Vec<Diff>) {
    let g = s.graph();
    let scratch = DecompositionState::from_graph(g);
    let live = s.decomposition().canonical_form(g);
    let want = scratch.canonical_form(g);
    if live != want {
        diffs.push(Diff {
            line,
            what: "decomposition",
            engine: format!("{live:?}"),
            oracle: format!("{want:?}"),
        });
    }
}

fn diff_answer(s: &Session, line: usize, item: Item, engine: bool, diffs: &mut Vec<Diff>) {
    match oracle_answer(s, item) {
        Some(oracle) if oracle != engine => diffs.push(Diff {
            line,
            what: "answer",
            engine: yesno(engine).to_string(),
            oracle: yesno(oracle).to_string(),
        }),
        _ => {}
    }
}

pub(crate) fn yesno(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Answers a query with the brute-force oracle, reading nothing from the
/// engine but the graph itself except where the query's own preconditions
/// name maintained structures (which block or skeleton a tuple selects).
/// Returns None when the instance is outside the oracle's size limits.
fn oracle_answer(s: &Session, item: Item) -> Option<bool> {
    let g = s.graph();
    match item {
        Item::Components(u, v) => {
            let (ga, _) = induced(g, &g.component_of(u));
            let (gb, _) = induced(g, &g.component_of(v));
            oracle_iso(&ga, &gb, &[], None).ok().map(|m| m.is_some())
        }
        Item::Connected(a, a2) => {
            let (ga, ma) = induced(g, &g.component_of(a));
            let (gb, mb) = induced(g, &g.component_of(a2));
            oracle_iso(&ga, &gb, &[(ma[&a], mb[&a2])], None).ok().map(|m| m.is_some())
        }
        Item::Biconnected([a, b, a2, b2]) => {
            let d = s.decomposition();
            let (ga, ma) = induced(g, &d.bicomp(d.bicomp_with_both(a, b)?).verts);
            let (gb, mb) = induced(g, &d.bicomp(d.bicomp_with_both(a2, b2)?).verts);
            let pins = [(ma[&a], mb[&a2]), (ma[&b], mb[&b2])];
            oracle_iso(&ga, &gb, &pins, None).ok().map(|m| m.is_some())
        }
        Item::Triconnected(t) => {
            let (sa, va) = skeleton_of(s, [t[0], t[1], t[2], t[3]])?;
            let (sb, vb) = skeleton_of(s, [t[4], t[5], t[6], t[7]])?;
            let (ga, ma) = induced(&sa, &va);
            let (gb, mb) = induced(&sb, &vb);
            let pins: Vec<(usize, usize)> =
                (0..4).map(|i| (ma[&t[i]], mb[&t[i + 4]])).collect();
            oracle_iso(&ga, &gb, &pins, None).ok().map(|m| m.is_some())
        }
        Item::Insert(..) | Item::Delete(..) => None,
    }
}

/// The skeleton (virtual pair edges included) of the unique triconnected
/// component holding all four tuple vertices, or None when no such
/// component exists and the engine refuses the query too.
fn skeleton_of(s: &Session, tuple: [VertexId; 4]) -> Option<(DynamicGraph, BTreeSet<VertexId>)> {
    let d = s.decomposition();
    let g = s.graph();
    let bic = d
        .bicomps_containing(tuple[0])
        .into_iter()
        .find(|&b| tuple.iter().all(|v| d.bicomp(b).verts.contains(v)))?;
    let tri = d.bicomp(bic).tri.as_ref()?;
    let comp = tri
        .comps()
        .keys()
        .copied()
        .find(|&c| tuple.iter().all(|v| tri.comp_verts(c).contains(v)))?;
    let verts = tri.comp_verts(comp).clone();
    Some((tri.skeleton_graph(g, comp), verts))
}

fn induced(
    g: &DynamicGraph,
    verts: &BTreeSet<VertexId>,
) -> (CompactGraph, BTreeMap<VertexId, usize>) {
    let order: Vec<VertexId> = verts.iter().copied().collect();
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut c = CompactGraph::new(order.len());
    for (i, &u) in order.iter().enumerate() {
        for (j, &v) in order.iter().enumerate().skip(i + 1) {
            if g.has_edge(u, v) {
                c.add_edge(i, j);
            }
        }
    }
    (c, pos)
}

/// Renders a report the way the binary prints it: one line per record,
/// then a counter summary, then any diffs.
pub fn render_text(report: &Report) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for r in &report.records {
        write!(out, "line {}: {}", r.line, r.kind).unwrap();
        if let Some(t) = &r.change_type {
            write!(out, " applied {t}").unwrap();
        }
        if let Some(a) = r.answer {
            write!(out, " -> {}", yesno(a)).unwrap();
        }
        if let Some(note) = &r.note {
            write!(out, " ({note})").unwrap();
        }
        if let Some(w) = &r.witness {
            let pairs: Vec<String> = w.iter().map(|(u, v)| format!("{u}->{v}")).collect();
            write!(out, " witness {}", pairs.join(" ")).unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "drops {} refreshes {}", report.drops, report.refreshes).unwrap();
    if let Some(line) = report.aborted {
        writeln!(out, "aborted at line {line}").unwrap();
    }
    for d in &report.diffs {
        writeln!(
            out,
            "diff at line {}: {} engine={} oracle={}",
            d.line, d.what, d.engine, d.oracle
        )
        .unwrap();
    }
    if !report.diffs.is_empty() {
        writeln!(out, "{} diffs", report.diffs.len()).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse_script;

    fn lenient() -> ReplayOpts {
        ReplayOpts { strict: false, ..ReplayOpts::default() }
    }

    #[test]
    fn two_disjoint_triangles_answer_yes() {
        let s = parse_script("n 6\n+ 0 1\n+ 1 2\n+ 0 2\n+ 3 4\n+ 4 5\n+ 3 5\n? 0 3").unwrap();
        let rep = replay(&s, &ReplayOpts::default());
        assert_eq!(rep.aborted, None);
        let q = rep.records.last().unwrap();
        assert_eq!((q.kind, q.answer), ("?", Some(true)));
        assert!(rep.records[..6].iter().all(|r| r.change_type.is_some()));
    }

    #[test]
    fn strict_replay_stops_at_a_refused_change() {
        let mut text = String::from("n 5\n");
        for u in 0..5 {
            for v in u + 1..5 {
                text += &format!("+ {u} {v}\n");
            }
        }
        text += "? 0 1\n";
        let s = parse_script(&text).unwrap();
        let rep = replay(&s, &ReplayOpts::default());
        assert_eq!(rep.aborted, Some(11), "the last of the ten edges breaks planarity");
        assert_eq!(rep.records.len(), 10);
        assert!(rep.records.last().unwrap().note.as_deref().unwrap().contains("refused"));

        let rep = replay(&s, &lenient());
        assert_eq!(rep.aborted, None);
        assert_eq!(rep.records.len(), 11, "the skip leaves the rest of the script running");
        assert_eq!(rep.records.last().unwrap().answer, Some(true));
    }

    #[test]
    fn witnesses_ride_along_on_triconnected_hits() {
        let mut text = String::from("n 8\n");
        for (u, v) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            text += &format!("+ {u} {v}\n+ {} {}\n", u + 4, v + 4);
        }
        text += "?t 0 1 2 3 4 5 6 7\n";
        let s = parse_script(&text).unwrap();
        let opts = ReplayOpts { witness: true, ..ReplayOpts::default() };
        let rep = replay(&s, &opts);
        let q = rep.records.last().unwrap();
        assert_eq!(q.answer, Some(true));
        let w = q.witness.as_ref().expect("positive ?t carries a witness");
        assert_eq!(w, &vec![(0, 4), (1, 5), (2, 6), (3, 7)]);

        let plain = replay(&s, &ReplayOpts::default());
        assert_eq!(plain.records.last().unwrap().witness, None);
    }

    #[test]
    fn queries_with_no_legal_reading_are_recorded_not_fatal() {
        let s = parse_script("n 6\n+ 0 1\n+ 1 2\n?b 0 2 0 2\n?t 0 1 2 3 0 1 2 3\n? 0 5").unwrap();
        let rep = replay(&s, &ReplayOpts::default());
        assert_eq!(rep.aborted, None, "only changes can abort a strict run");
        let notes: Vec<_> =
            rep.records.iter().filter(|r| r.note.is_some()).map(|r| r.kind).collect();
        assert_eq!(notes, vec!["?b", "?t"]);
        assert_eq!(rep.records.last().unwrap().answer, Some(false));
    }

    #[test]
    fn check_mode_agrees_with_itself_on_a_small_script() {
        let text = "n 6\n+ 0 1\n+ 1 2\n+ 0 2\n?c 0 3\n+ 3 4\n+ 4 5\n+ 3 5\n? 0 3\n?c 0 3\n?b 0 1 3 4\n- 0 2\n? 0 3";
        let s = parse_script(text).unwrap();
        let rep = check(&s);
        assert_eq!(rep.diffs, vec![]);
        let answers: Vec<_> = rep.records.iter().filter_map(|r| r.answer).collect();
        assert_eq!(answers, vec![false, true, true, true, false]);
    }

    #[test]
    fn reports_serialize_with_the_documented_fields() {
        let s = parse_script("n 4\n+ 0 1\n? 0 1").unwrap();
        let rep = replay(&s, &ReplayOpts::default());
        let json: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        for key in ["n", "records", "drops", "refreshes", "aborted", "diffs"] {
            assert!(json.get(key).is_some(), "report field {key} present");
        }
        for rec in json["records"].as_array().unwrap() {
            for key in ["line", "kind", "answer", "change_type", "drops", "refreshes"] {
                assert!(rec.get(key).is_some(), "record field {key} present");
            }
        }
        assert_eq!(json["records"][1]["kind"], "?");
        assert_eq!(json["records"][1]["answer"], true);
        assert_eq!(json["records"][0]["answer"], serde_json::Value::Null);
    }
}
