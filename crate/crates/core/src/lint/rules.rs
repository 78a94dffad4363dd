//! The MicroSim compliance rule registry and rule checks.

use std::collections::BTreeSet;

use serde::Serialize;

use super::token::{LexProblemKind, Token, TokenKind};
use crate::model::MicroSimRecord;
use crate::validate::Severity;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LintRule {
    pub id: &'static str,
    pub title: &'static str,
    pub severity: Severity,
    /// Where in the MicroSim conventions the rule comes from.
    pub rationale_ref: &'static str,
    /// `false` for rules that source text alone cannot decide.
    pub statically_assessable: bool,
}

const fn rule(
    id: &'static str,
    title: &'static str,
    severity: Severity,
    rationale_ref: &'static str,
) -> LintRule {
    LintRule {
        id,
        title,
        severity,
        rationale_ref,
        statically_assessable: true,
    }
}

pub const TOUCH_TARGET_FEATURE: &str = "touch-target-44";

pub static RULES: &[LintRule] = &[
    rule("MS001", "canvas structure variables declared", Severity::Error,
        "Standard canvas structure: canvasWidth, drawHeight, controlHeight, canvasHeight, margin, sliderLeftMargin"),
    rule("MS002", "canvasHeight = drawHeight + controlHeight", Severity::Warning,
        "Standard canvas structure: canvasHeight is the drawing region plus the controls region"),
    rule("MS003", "updateCanvasSize() defined and invoked", Severity::Error,
        "Container width adaptation through a standard updateCanvasSize() function"),
    rule("MS004", "describe() called in setup()", Severity::Error,
        "Screen reader support through describe() generated during setup"),
    rule("MS005", "at least one interactive control", Severity::Error,
        "Minimum interactivity: simulations expose controls such as Start buttons and sliders"),
    rule("MS006", "windowResized() handler defined", Severity::Warning,
        "Width-responsive layout: resize events update the layout"),
    rule("MS007", "standard region colours", Severity::Warning,
        "Drawing region on 'aliceblue', controls region on 'white', both outlined in 1-pixel 'silver'"),
    rule("MS008", "no network access outside analytics endpoints", Severity::Error,
        "Not server-dependent: primary operation is entirely client-side"),
    rule("MS009", "no frame-busting", Severity::Error,
        "Safe iframe embedding: the simulation never navigates its host page"),
    rule("MS010", "external scripts from allowlisted sources", Severity::Warning,
        "Lightweight frameworks only: p5.js, Mermaid.js, ChartJS, vis-network, vis-timeline"),
    rule("MS011", "title centred with textAlign(CENTER)", Severity::Info,
        "Width-responsive layout: the title sits centred at the top of the canvas"),
    rule("MS012", "slider ranges match declared metadata", Severity::Warning,
        "UI documentation: each slider's range and default are declared in metadata"),
    LintRule {
        id: "MS013",
        title: "touch targets at least 44x44 pixels",
        severity: Severity::Info,
        rationale_ref: "Motor accessibility: minimum 44 by 44 pixel touch targets on mobile",
        statically_assessable: false,
    },
    rule("MS014", "source tokenizes cleanly", Severity::Warning,
        "Self-contained, well-formed source: no unterminated strings, templates or comments"),
];

/// Every registered rule, in id order.
pub fn list_rules() -> Vec<LintRule> {
    RULES.to_vec()
}

pub fn find_rule(id: &str) -> Option<&'static LintRule> {
    RULES.iter().find(|r| r.id == id)
}

/// One script's code tokens with the file they came from.
pub(crate) struct ScriptUnit<'a> {
    pub file: &'a str,
    pub tokens: Vec<Token>,
}

/// A rule hit before severity and excerpt are attached.
#[derive(Debug, Clone)]
pub(crate) struct RawFinding {
    pub rule: &'static str,
    pub file: String,
    pub line: usize,
    pub message: String,
}

pub(crate) struct RuleContext<'a> {
    pub units: &'a [ScriptUnit<'a>],
    pub external_scripts: &'a [(String, String, usize)],
    pub lex_problems: &'a [(String, LexProblemKind, usize)],
    pub declared: Option<&'a MicroSimRecord>,
    pub script_allowlist: &'a [String],
    pub analytics_allowlist: &'a [String],
}

impl RuleContext<'_> {
    /// Where findings about something absent are reported: the first code
    /// token of the bundle.
    fn anchor(&self) -> (String, usize) {
        self.units
            .iter()
            .find_map(|u| u.tokens.first().map(|t| (u.file.to_string(), t.line)))
            .or_else(|| self.units.first().map(|u| (u.file.to_string(), 1)))
            .unwrap_or_default()
    }

    fn missing(&self, rule: &'static str, message: String) -> RawFinding {
        let (file, line) = self.anchor();
        RawFinding {
            rule,
            file,
            line,
            message,
        }
    }

    fn at(&self, rule: &'static str, unit: &ScriptUnit<'_>, token: &Token, message: String) -> RawFinding {
        RawFinding {
            rule,
            file: unit.file.to_string(),
            line: token.line,
            message,
        }
    }

    fn any_call(&self, names: &[&str]) -> bool {
        self.units
            .iter()
            .any(|u| (0..u.tokens.len()).any(|i| names.iter().any(|n| is_call(&u.tokens, i, n))))
    }

    fn any_definition(&self, name: &str) -> bool {
        self.units
            .iter()
            .any(|u| (0..u.tokens.len()).any(|i| is_definition(&u.tokens, i, name)))
    }
}

/// `tokens[i]` is identifier `name` called directly: `name(`.
fn is_call(tokens: &[Token], i: usize, name: &str) -> bool {
    tokens[i].is_ident(name)
        && tokens.get(i + 1).is_some_and(|t| t.is_punct("("))
        && !(i > 0 && tokens[i - 1].is_ident("function"))
}

/// `function name(`, `name = function`, `name = (...) =>` or `name = x =>`.
fn is_definition(tokens: &[Token], i: usize, name: &str) -> bool {
    if !tokens[i].is_ident(name) {
        return false;
    }
    if i > 0 && tokens[i - 1].is_ident("function") {
        return true;
    }
    tokens.get(i + 1).is_some_and(|t| t.is_punct("="))
        && tokens.get(i + 2).is_some_and(|t| {
            t.is_ident("function") || t.is_punct("(") || t.is_ident("async")
                || (t.kind == TokenKind::Ident && tokens.get(i + 3).is_some_and(|n| n.is_punct("=>")))
        })
}

/// Index one past the bracket that closes the one at `open`.
fn matching_close(tokens: &[Token], open: usize) -> usize {
    let mut depth = 0usize;
    for (i, t) in tokens.iter().enumerate().skip(open) {
        if t.kind != TokenKind::Punct {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    return i + 1;
                }
            }
            _ => {}
        }
    }
    tokens.len()
}

/// Names introduced by `let`/`const`/`var`, including comma lists.
fn declared_names(tokens: &[Token]) -> BTreeSet<&str> {
    let mut names = BTreeSet::new();
    let mut i = 0;
    while i < tokens.len() {
        if !(tokens[i].is_ident("let") || tokens[i].is_ident("const") || tokens[i].is_ident("var")) {
            i += 1;
            continue;
        }
        i += 1;
        let mut expect_name = true;
        let mut depth = 0usize;
        while i < tokens.len() {
            let t = &tokens[i];
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                    }
                    "," if depth == 0 => expect_name = true,
                    ";" if depth == 0 => break,
                    _ => {}
                }
            } else if t.kind == TokenKind::Ident {
                if depth == 0 && matches!(t.text.as_str(), "let" | "const" | "var") {
                    break;
                }
                if expect_name && depth == 0 {
                    names.insert(t.text.as_str());
                    expect_name = false;
                }
            }
            i += 1;
        }
    }
    names
}

/// Arguments of the call whose `(` is at `open`, split at top-level commas.
fn call_args(tokens: &[Token], open: usize) -> Vec<&[Token]> {
    let close = matching_close(tokens, open);
    let inner = &tokens[open + 1..close.saturating_sub(1).max(open + 1)];
    let mut args = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, t) in inner.iter().enumerate() {
        if t.kind != TokenKind::Punct {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth = depth.saturating_sub(1),
            "," if depth == 0 => {
                args.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if start < inner.len() {
        args.push(&inner[start..]);
    }
    args
}

/// A numeric literal argument, allowing a leading minus sign.
fn numeric_literal(arg: &[Token]) -> Option<f64> {
    match arg {
        [n] if n.kind == TokenKind::Number => n.text.replace('_', "").parse().ok(),
        [sign, n] if sign.is_punct("-") && n.kind == TokenKind::Number => {
            n.text.replace('_', "").parse::<f64>().ok().map(|v| -v)
        }
        _ => None,
    }
}

fn string_literal(arg: &[Token]) -> Option<&str> {
    match arg {
        [s] if s.kind.is_string() => s.value.as_deref(),
        _ => None,
    }
}

pub(crate) const CANVAS_VARIABLES: [&str; 6] = [
    "canvasWidth",
    "drawHeight",
    "controlHeight",
    "canvasHeight",
    "margin",
    "sliderLeftMargin",
];

pub(crate) fn check(id: &str, cx: &RuleContext<'_>) -> Vec<RawFinding> {
    match id {
        "MS001" => canvas_variables(cx),
        "MS002" => canvas_height_sum(cx),
        "MS003" => update_canvas_size(cx),
        "MS004" => describe_in_setup(cx),
        "MS005" => interactive_control(cx),
        "MS006" => resize_handler(cx),
        "MS007" => region_colours(cx),
        "MS008" => network_primitives(cx),
        "MS009" => frame_busting(cx),
        "MS010" => external_scripts(cx),
        "MS011" => centred_title(cx),
        "MS012" => slider_metadata(cx),
        "MS013" => touch_targets(cx),
        "MS014" => lexical_integrity(cx),
        _ => Vec::new(),
    }
}

fn canvas_variables(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    let declared: BTreeSet<&str> = cx.units.iter().flat_map(|u| declared_names(&u.tokens)).collect();
    CANVAS_VARIABLES
        .iter()
        .filter(|name| !declared.contains(*name))
        .map(|name| cx.missing("MS001", format!("canvas structure variable `{name}` is not declared")))
        .collect()
}

fn canvas_height_sum(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    let mut first_assignment = None;
    for unit in cx.units {
        let toks = &unit.tokens;
        for i in 0..toks.len() {
            if !(toks[i].is_ident("canvasHeight") && toks.get(i + 1).is_some_and(|t| t.is_punct("="))) {
                continue;
            }
            let rhs = &toks[i + 2..toks.len().min(i + 6)];
            let is_sum = rhs.len() >= 3
                && rhs[1].is_punct("+")
                && ((rhs[0].is_ident("drawHeight") && rhs[2].is_ident("controlHeight"))
                    || (rhs[0].is_ident("controlHeight") && rhs[2].is_ident("drawHeight")))
                && !rhs.get(3).is_some_and(|t| {
                    t.kind == TokenKind::Punct && matches!(t.text.as_str(), "+" | "-" | "*" | "/" | "%" | "**" | ".")
                });
            if is_sum {
                return Vec::new();
            }
            first_assignment.get_or_insert((unit, &toks[i]));
        }
    }
    first_assignment
        .map(|(unit, tok)| {
            vec![cx.at(
                "MS002",
                unit,
                tok,
                "canvasHeight is not defined as drawHeight + controlHeight".into(),
            )]
        })
        .unwrap_or_default()
}

fn update_canvas_size(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    if !cx.any_definition("updateCanvasSize") {
        return vec![cx.missing("MS003", "function updateCanvasSize() is not defined".into())];
    }
    if !cx.any_call(&["updateCanvasSize"]) {
        return vec![cx.missing("MS003", "updateCanvasSize() is defined but never invoked".into())];
    }
    Vec::new()
}

fn describe_in_setup(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    for unit in cx.units {
        let toks = &unit.tokens;
        for i in 0..toks.len() {
            if !is_definition(toks, i, "setup") {
                continue;
            }
            let Some(body) = (i..toks.len()).find(|&j| toks[j].is_punct("{")) else {
                continue;
            };
            let end = matching_close(toks, body);
            let found = (body..end).any(|j| is_call(toks, j, "describe") && !(j > 0 && toks[j - 1].is_punct(".")));
            if found {
                return Vec::new();
            }
            return vec![cx.at("MS004", unit, &toks[i], "setup() does not call describe()".into())];
        }
    }
    vec![cx.missing("MS004", "no setup() function, so describe() is never called during setup".into())]
}

const CONTROL_CONSTRUCTORS: [&str; 5] = [
    "createButton",
    "createSlider",
    "createCheckbox",
    "createSelect",
    "createRadio",
];

fn interactive_control(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    if cx.any_call(&CONTROL_CONSTRUCTORS) {
        Vec::new()
    } else {
        vec![cx.missing(
            "MS005",
            format!("no interactive control is created (expected one of {})", CONTROL_CONSTRUCTORS.join(", ")),
        )]
    }
}

fn resize_handler(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    if cx.any_definition("windowResized") {
        Vec::new()
    } else {
        vec![cx.missing("MS006", "no windowResized() handler is defined".into())]
    }
}

fn region_colours(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    let mut seen: BTreeSet<(&str, String)> = BTreeSet::new();
    for unit in cx.units {
        let toks = &unit.tokens;
        for i in 0..toks.len() {
            for func in ["background", "fill", "stroke"] {
                if is_call(toks, i, func) {
                    if let Some(value) = call_args(toks, i + 1).first().and_then(|a| string_literal(a)) {
                        // a region is painted either by background() or by fill() before its rect()
                        let func = if func == "fill" { "background" } else { func };
                        seen.insert((func, value.trim().to_ascii_lowercase()));
                    }
                }
            }
        }
    }
    [
        ("background", "aliceblue", "drawing region background 'aliceblue'"),
        ("background", "white", "controls region background 'white'"),
        ("stroke", "silver", "region border stroke 'silver'"),
    ]
    .into_iter()
    .filter(|(func, colour, _)| !seen.contains(&(*func, colour.to_string())))
    .map(|(func, colour, what)| {
        let calls = if func == "background" {
            format!("background('{colour}') or fill('{colour}')")
        } else {
            format!("{func}('{colour}')")
        };
        cx.missing("MS007", format!("missing {what}: no {calls} call"))
    })
    .collect()
}

const NETWORK_PRIMITIVES: [&str; 4] = ["fetch", "XMLHttpRequest", "WebSocket", "EventSource"];

fn network_primitives(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    let mut out = Vec::new();
    for unit in cx.units {
        let toks = &unit.tokens;
        for i in 0..toks.len() {
            let Some(name) = NETWORK_PRIMITIVES.iter().find(|n| toks[i].is_ident(n)) else {
                continue;
            };
            if i > 0 && toks[i - 1].is_punct(".") {
                let global = i > 1 && ["window", "self", "globalThis"].iter().any(|g| toks[i - 2].is_ident(g));
                if !global {
                    continue;
                }
            }
            let constructed = i > 0 && toks[i - 1].is_ident("new");
            let called = toks.get(i + 1).is_some_and(|t| t.is_punct("("));
            if !(called || constructed) {
                continue;
            }
            let target = if called {
                call_args(toks, i + 1).first().and_then(|a| string_literal(a)).map(str::to_string)
            } else {
                None
            };
            let allowed = target
                .as_deref()
                .is_some_and(|url| cx.analytics_allowlist.iter().any(|p| url.starts_with(p.as_str())));
            if !allowed {
                let detail = match &target {
                    Some(url) => format!("`{name}` reaches `{url}`, which is not an allowlisted analytics endpoint"),
                    None => format!("`{name}` is used outside an allowlisted analytics endpoint"),
                };
                out.push(cx.at("MS008", unit, &toks[i], detail));
            }
        }
    }
    out
}

fn frame_busting(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    let mut out = Vec::new();
    for unit in cx.units {
        let toks = &unit.tokens;
        for i in 2..toks.len() {
            let host = &toks[i - 2];
            if !(toks[i].is_ident("location")
                && toks[i - 1].is_punct(".")
                && (host.is_ident("top") || host.is_ident("parent")))
            {
                continue;
            }
            let next = |k: usize| toks.get(i + k);
            let assigns = next(1).is_some_and(|t| t.is_punct("="))
                || (next(1).is_some_and(|t| t.is_punct("."))
                    && next(2).is_some_and(|t| {
                        ["href", "pathname", "search", "hash", "host", "hostname", "protocol"]
                            .iter()
                            .any(|p| t.is_ident(p))
                    })
                    && next(3).is_some_and(|t| t.is_punct("=")))
                || (next(1).is_some_and(|t| t.is_punct("."))
                    && next(2).is_some_and(|t| t.is_ident("replace") || t.is_ident("assign"))
                    && next(3).is_some_and(|t| t.is_punct("(")));
            if assigns {
                out.push(cx.at(
                    "MS009",
                    unit,
                    host,
                    format!("frame-busting: navigates {}.location", host.text),
                ));
            }
        }
    }
    out
}

fn external_scripts(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    cx.external_scripts
        .iter()
        .filter_map(|(file, src, line)| {
            let lower = src.trim().to_ascii_lowercase();
            let absolute = if let Some(rest) = lower.strip_prefix("//") {
                format!("https://{rest}")
            } else if lower.starts_with("http://") || lower.starts_with("https://") {
                src.trim().to_string()
            } else {
                return None;
            };
            let allowed = cx.script_allowlist.iter().any(|p| absolute.starts_with(p.as_str()));
            (!allowed).then(|| RawFinding {
                rule: "MS010",
                file: file.clone(),
                line: *line,
                message: format!("external script `{src}` is not from an allowlisted source"),
            })
        })
        .collect()
}

fn centred_title(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    let centred = cx.units.iter().any(|u| {
        u.tokens.windows(3).any(|w| {
            w[0].is_ident("textAlign") && w[1].is_punct("(") && w[2].is_ident("CENTER")
        })
    });
    if centred {
        Vec::new()
    } else {
        vec![cx.missing("MS011", "no textAlign(CENTER ...) call, so the title is not centred".into())]
    }
}

struct SliderCall<'a> {
    unit: &'a ScriptUnit<'a>,
    token: &'a Token,
    variable: Option<&'a str>,
    args: Vec<Option<f64>>,
}

fn slider_metadata(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    let Some(record) = cx.declared else {
        return Vec::new();
    };
    let sliders: Vec<_> = record
        .ui
        .iter()
        .filter(|c| c.is_slider())
        .filter_map(|c| c.name.as_deref().map(|n| (n, c)))
        .collect();
    let mut calls = Vec::new();
    for unit in cx.units {
        let toks = &unit.tokens;
        for i in 0..toks.len() {
            if !is_call(toks, i, "createSlider") {
                continue;
            }
            let variable = (i >= 2 && toks[i - 1].is_punct("=") && toks[i - 2].kind == TokenKind::Ident)
                .then(|| toks[i - 2].text.as_str());
            let args = call_args(toks, i + 1).into_iter().map(numeric_literal).collect();
            calls.push(SliderCall {
                unit,
                token: &toks[i],
                variable,
                args,
            });
        }
    }

    let mut out = Vec::new();
    let mut claimed = BTreeSet::new();
    let positional = sliders.len() == calls.len();
    for (k, call) in calls.iter().enumerate() {
        let by_name = call.variable.and_then(|var| {
            let var = var.to_ascii_lowercase();
            sliders
                .iter()
                .position(|(name, _)| !claimed.contains(name) && var.starts_with(&name.to_ascii_lowercase()))
        });
        let index = by_name.or_else(|| (positional && !claimed.contains(&sliders[k].0)).then_some(k));
        let Some(index) = index else { continue };
        let (name, control) = sliders[index];
        claimed.insert(name);
        let declared = [
            ("min", control.min),
            ("max", control.max),
            ("default", control.default_value),
            ("step", control.step),
        ];
        let mismatches: Vec<String> = declared
            .iter()
            .zip(call.args.iter().chain(std::iter::repeat(&None)))
            .filter_map(|((field, want), got)| match (want, got) {
                (Some(want), Some(got)) if want != got => {
                    Some(format!("{field} {got} in source but {want} declared"))
                }
                _ => None,
            })
            .collect();
        if !mismatches.is_empty() {
            out.push(cx.at(
                "MS012",
                call.unit,
                call.token,
                format!("slider `{name}`: {}", mismatches.join("; ")),
            ));
        }
    }
    out
}

fn touch_targets(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    let Some(record) = cx.declared else {
        return Vec::new();
    };
    let declared = record
        .technical
        .as_ref()
        .is_some_and(|t| t.accessibility_features.iter().any(|f| f == TOUCH_TARGET_FEATURE));
    if declared {
        Vec::new()
    } else {
        vec![cx.missing(
            "MS013",
            format!("metadata does not declare `{TOUCH_TARGET_FEATURE}`; touch target size cannot be assessed from source"),
        )]
    }
}

fn lexical_integrity(cx: &RuleContext<'_>) -> Vec<RawFinding> {
    cx.lex_problems
        .iter()
        .map(|(file, kind, line)| RawFinding {
            rule: "MS014",
            file: file.clone(),
            line: *line,
            message: match kind {
                LexProblemKind::UnterminatedString => "unterminated string literal",
                LexProblemKind::UnterminatedTemplate => "unterminated template literal",
                LexProblemKind::UnterminatedComment => "unterminated block comment",
            }
            .into(),
        })
        .collect()
}
