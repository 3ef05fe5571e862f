// Wire types for the task-service HTTP API. These mirror the JSON exactly;
// the UI adds nothing and interprets nothing beyond what is listed here.

export type SymbolKindName = "proposition" | "relation" | "function" | "constant"

export type CategoryName = "C1" | "C2" | "C3" | "C4" | "C5"

export type VerdictStatus = "accepted" | "rejected_phase1" | "rejected_phase2"

export interface TaskSummary {
  task_id: string
  logic: string
}

export interface TaskDetail extends TaskSummary {
  scenario: string
}

export interface AttemptSymbol {
  name: string
  kind: SymbolKindName
  arity?: number
  params?: string[]
  description: string
}

export interface AttemptPayload {
  symbols: AttemptSymbol[]
}

export interface PerSymbolRow {
  name: string
  matched: string | null
  category: CategoryName
  positive: boolean
  score: number
  description_index: number | null
  permutation: number[]
}

export interface DuplicateGroup {
  potential: string
  students: string[]
}

export interface VerdictPayload {
  status: VerdictStatus
  per_symbol: PerSymbolRow[]
  symbol_feedback: Record<string, string>
  faults_fired: string[]
  suggestions_fired: string[]
  duplicates: DuplicateGroup[]
  mapping?: Record<string, string>
}

export interface AttemptRecord {
  task_id: string
  timestamp: string
  attempt: AttemptPayload
  verdict: VerdictPayload
}
