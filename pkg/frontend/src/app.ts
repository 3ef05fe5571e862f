// Application state and transitions. All functions return a new state; the
// DOM layer re-renders from scratch after each transition. Draft edits stay
// legal while a submission is in flight (they only touch the local draft);
// a second submission is refused until the first settles.

import type { AttemptPayload, AttemptSymbol, SymbolKindName, VerdictPayload } from "./types"
import { kindOptions } from "./render"

export interface DraftRow {
  name: string
  kind: SymbolKindName
  arity: string
  params: string
  description: string
}

export interface AppState {
  logic: string
  rows: DraftRow[]
  inFlight: boolean
  verdict: VerdictPayload | null
  error: string | null
  validation: string | null
}

export function initialState(logic: string): AppState {
  return {
    logic,
    rows: [emptyRow(logic)],
    inFlight: false,
    verdict: null,
    error: null,
    validation: null,
  }
}

export function emptyRow(logic: string): DraftRow {
  return { name: "", kind: kindOptions(logic)[0], arity: "", params: "", description: "" }
}

export function addRow(state: AppState): AppState {
  return { ...state, rows: [...state.rows, emptyRow(state.logic)] }
}

export function removeRow(state: AppState, index: number): AppState {
  return { ...state, rows: state.rows.filter((_, i) => i !== index) }
}

export function editRow(
  state: AppState,
  index: number,
  field: keyof DraftRow,
  value: string,
): AppState {
  const rows = state.rows.map((row, i) => (i === index ? { ...row, [field]: value } : row))
  return { ...state, rows }
}

function rowIsBlank(row: DraftRow): boolean {
  return row.name.trim() === "" && row.description.trim() === ""
}

/** Build the wire attempt from the draft; a string result is a validation error. */
export function draftToAttempt(state: AppState): AttemptPayload | string {
  const rows = state.rows.filter((row) => !rowIsBlank(row))
  if (rows.length === 0) return "add at least one symbol before submitting"
  const symbols: AttemptSymbol[] = []
  for (const row of rows) {
    if (row.name.trim() === "") return "every symbol needs a name"
    if (row.description.trim() === "") return `symbol ${row.name.trim()} needs a description`
    const symbol: AttemptSymbol = {
      name: row.name.trim(),
      kind: row.kind,
      description: row.description.trim(),
    }
    if (row.kind === "relation" || row.kind === "function") {
      const arity = Number(row.arity.trim())
      if (!Number.isInteger(arity) || arity < 1) {
        return `symbol ${symbol.name}: arity must be a positive integer`
      }
      symbol.arity = arity
      const params = row.params.trim()
      if (params !== "") symbol.params = params.split(/[\s,]+/)
    }
    symbols.push(symbol)
  }
  return { symbols }
}

export type SubmitStart =
  | { kind: "refused"; state: AppState }
  | { kind: "invalid"; state: AppState }
  | { kind: "started"; state: AppState; attempt: AttemptPayload }

export function beginSubmit(state: AppState): SubmitStart {
  if (state.inFlight) return { kind: "refused", state }
  const attempt = draftToAttempt(state)
  if (typeof attempt === "string") {
    return { kind: "invalid", state: { ...state, validation: attempt } }
  }
  return {
    kind: "started",
    state: { ...state, inFlight: true, validation: null, error: null },
    attempt,
  }
}

export function completeSubmit(state: AppState, verdict: VerdictPayload): AppState {
  return { ...state, inFlight: false, verdict, error: null }
}

export function failSubmit(state: AppState, message: string): AppState {
  return { ...state, inFlight: false, error: message }
}
