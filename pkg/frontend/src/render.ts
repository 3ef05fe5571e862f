// Pure view functions: application state in, HTML string out. Nothing here
// computes or reinterprets grading results; every verdict element shown is
// copied verbatim from the service payload.

import type {
  CategoryName,
  PerSymbolRow,
  SymbolKindName,
  TaskDetail,
  VerdictPayload,
  VerdictStatus,
} from "./types"
import type { AppState, DraftRow } from "./app"

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;")
}

const STATUS_HEADLINES: Record<VerdictStatus, string> = {
  accepted: "vocabulary accepted",
  rejected_phase1: "some descriptions were not understood",
  rejected_phase2: "vocabulary rejected",
}

const CATEGORIES: readonly CategoryName[] = ["C1", "C2", "C3", "C4", "C5"]
const STATUSES: readonly VerdictStatus[] = ["accepted", "rejected_phase1", "rejected_phase2"]

// ---------------------------------------------------------------------------
// Verdict view

function isStringArray(value: unknown): value is string[] {
  return Array.isArray(value) && value.every((x) => typeof x === "string")
}

function isPerSymbolRow(value: unknown): value is PerSymbolRow {
  if (typeof value !== "object" || value === null) return false
  const row = value as Record<string, unknown>
  return (
    typeof row.name === "string" &&
    (row.matched === null || typeof row.matched === "string") &&
    CATEGORIES.includes(row.category as CategoryName) &&
    typeof row.positive === "boolean" &&
    typeof row.score === "number"
  )
}

/** Validate an untrusted response body; null means "render the error state". */
export function parseVerdict(value: unknown): VerdictPayload | null {
  if (typeof value !== "object" || value === null) return null
  const v = value as Record<string, unknown>
  if (!STATUSES.includes(v.status as VerdictStatus)) return null
  if (!Array.isArray(v.per_symbol) || !v.per_symbol.every(isPerSymbolRow)) return null
  if (!isStringArray(v.faults_fired) || !isStringArray(v.suggestions_fired)) return null
  if (typeof v.symbol_feedback !== "object" || v.symbol_feedback === null) return null
  if (!Array.isArray(v.duplicates)) return null
  return value as VerdictPayload
}

function badge(row: PerSymbolRow): string {
  const polarity = row.positive ? "badge-positive" : "badge-negative"
  return (
    `<span class="badge ${polarity}" data-category="${row.category}"` +
    ` title="score ${row.score.toFixed(2)}">${row.category}</span>`
  )
}

function symbolRow(row: PerSymbolRow, feedback: string | undefined): string {
  const target =
    row.matched !== null
      ? `<td class="symbol-target">→ ${escapeHtml(row.matched)}</td>`
      : `<td class="symbol-target symbol-unmatched">no match</td>`
  const note = feedback === undefined ? "" : `<td class="symbol-feedback">${escapeHtml(feedback)}</td>`
  return (
    `<tr class="symbol-row" data-symbol="${escapeHtml(row.name)}">` +
    `<td class="symbol-name">${escapeHtml(row.name)}</td>` +
    `<td>${badge(row)}</td>${target}${note}</tr>`
  )
}

function list(items: string[], kind: "fault" | "suggestion"): string {
  if (items.length === 0) return ""
  const lines = items.map((text) => `<li class="${kind}">${escapeHtml(text)}</li>`).join("")
  return `<ul class="${kind}s">${lines}</ul>`
}

export function renderVerdict(verdict: VerdictPayload): string {
  const rows = verdict.per_symbol
    .map((row) => symbolRow(row, verdict.symbol_feedback[row.name]))
    .join("")
  const duplicates = verdict.duplicates
    .map(
      (group) =>
        `<li class="duplicate">${escapeHtml(group.students.join(", "))} all describe ` +
        `${escapeHtml(group.potential)}; keep one of them</li>`,
    )
    .join("")
  const mapping =
    verdict.mapping === undefined
      ? ""
      : "<dl class=\"mapping\">" +
        Object.entries(verdict.mapping)
          .map(([student, target]) => `<dt>${escapeHtml(student)}</dt><dd>${escapeHtml(target)}</dd>`)
          .join("") +
        "</dl>"
  return (
    `<section class="verdict verdict-${verdict.status}">` +
    `<h2 class="verdict-headline">${STATUS_HEADLINES[verdict.status]}</h2>` +
    `<table class="symbol-table"><tbody>${rows}</tbody></table>` +
    list(verdict.faults_fired, "fault") +
    (duplicates === "" ? "" : `<ul class="duplicates">${duplicates}</ul>`) +
    list(verdict.suggestions_fired, "suggestion") +
    mapping +
    "</section>"
  )
}

/** Total wrapper: malformed payloads get a generic error state, never a throw. */
export function renderVerdictView(value: unknown): string {
  const verdict = parseVerdict(value)
  if (verdict === null) {
    return '<section class="verdict verdict-error">something went wrong; please resubmit</section>'
  }
  return renderVerdict(verdict)
}

// ---------------------------------------------------------------------------
// Task editor view

export function kindOptions(logic: string): SymbolKindName[] {
  return logic === "propositional" ? ["proposition"] : ["relation", "function", "constant"]
}

function kindCell(row: DraftRow, index: number, logic: string): string {
  const options = kindOptions(logic)
  if (options.length === 1) {
    // propositional tasks: kind is fixed, nothing to choose
    return `<td class="cell-kind">${options[0]}</td>`
  }
  const rendered = options
    .map(
      (kind) =>
        `<option value="${kind}"${kind === row.kind ? " selected" : ""}>${kind}</option>`,
    )
    .join("")
  return `<td class="cell-kind"><select data-row="${index}" data-field="kind">${rendered}</select></td>`
}

function textCell(
  field: "name" | "arity" | "params" | "description",
  value: string,
  index: number,
): string {
  return (
    `<td class="cell-${field}"><input data-row="${index}" data-field="${field}"` +
    ` value="${escapeHtml(value)}"></td>`
  )
}

function editorRow(row: DraftRow, index: number, logic: string): string {
  const propositional = logic === "propositional"
  const arity = propositional ? "" : textCell("arity", row.arity, index)
  const params = propositional ? "" : textCell("params", row.params, index)
  return (
    `<tr class="editor-row">` +
    textCell("name", row.name, index) +
    kindCell(row, index, logic) +
    arity +
    params +
    textCell("description", row.description, index) +
    `<td><button class="remove-row" data-row="${index}">remove</button></td>` +
    "</tr>"
  )
}

function editorHead(logic: string): string {
  const columns =
    logic === "propositional"
      ? ["name", "kind", "description", ""]
      : ["name", "kind", "arity", "parameters", "description", ""]
  return "<tr>" + columns.map((c) => `<th>${c}</th>`).join("") + "</tr>"
}

export function renderTask(task: TaskDetail, state: AppState): string {
  const rows = state.rows.map((row, i) => editorRow(row, i, task.logic)).join("")
  const banner =
    state.error === null
      ? ""
      : `<div class="banner banner-error">${escapeHtml(state.error)}` +
        ' <button class="retry">retry</button></div>'
  const validation =
    state.validation === null
      ? ""
      : `<p class="validation">${escapeHtml(state.validation)}</p>`
  const submit = `<button class="submit"${state.inFlight ? " disabled" : ""}>submit</button>`
  return (
    `<section class="task" data-task="${escapeHtml(task.task_id)}">` +
    `<p class="scenario">${escapeHtml(task.scenario)}</p>` +
    banner +
    `<table class="editor"><thead>${editorHead(task.logic)}</thead><tbody>${rows}</tbody></table>` +
    '<button class="add-row">add symbol</button>' +
    validation +
    submit +
    (state.verdict === null ? "" : renderVerdict(state.verdict)) +
    "</section>"
  )
}
