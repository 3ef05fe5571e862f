// Thin client over the task-service API. Every method maps onto exactly one
// endpoint; no retries or caching here, the app layer decides that.

import type { AttemptPayload, AttemptRecord, TaskDetail, TaskSummary, VerdictPayload } from "./types"

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message)
  }
}

export class TaskServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.url(path), init)
    if (!response.ok) {
      let detail = response.statusText
      try {
        const body = await response.json()
        if (body && typeof body.detail === "string") detail = body.detail
      } catch {
        // non-JSON error body; statusText is all we have
      }
      throw new ApiError(response.status, detail)
    }
    return (await response.json()) as T
  }

  listTasks(): Promise<TaskSummary[]> {
    return this.request("/v1/tasks")
  }

  getTask(taskId: string): Promise<TaskDetail> {
    return this.request(`/v1/tasks/${encodeURIComponent(taskId)}`)
  }

  submitAttempt(taskId: string, attempt: AttemptPayload): Promise<VerdictPayload> {
    return this.request(`/v1/tasks/${encodeURIComponent(taskId)}/attempts`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(attempt),
    })
  }

  listAttempts(taskId: string): Promise<AttemptRecord[]> {
    return this.request(`/v1/tasks/${encodeURIComponent(taskId)}/attempts`)
  }
}
