// Browser bootstrap: picks the task from the query string, wires events via
// delegation, and re-renders the whole view after every state transition.

import { TaskServiceClient } from "./api"
import {
  addRow,
  beginSubmit,
  completeSubmit,
  editRow,
  failSubmit,
  initialState,
  removeRow,
  type AppState,
} from "./app"
import type { DraftRow } from "./app"
import { parseVerdict, renderTask } from "./render"
import type { TaskDetail } from "./types"

export async function mount(root: HTMLElement, client: TaskServiceClient, taskId: string) {
  let task: TaskDetail
  try {
    task = await client.getTask(taskId)
  } catch (error) {
    root.innerHTML = `<div class="banner banner-error">could not load task: ${String(error)}</div>`
    return
  }
  let state = initialState(task.logic)

  const update = (next: AppState) => {
    state = next
    root.innerHTML = renderTask(task, state)
  }

  const submit = async () => {
    const start = beginSubmit(state)
    update(start.state)
    if (start.kind !== "started") return
    try {
      const verdict = await client.submitAttempt(taskId, start.attempt)
      const parsed = parseVerdict(verdict)
      update(
        parsed === null
          ? failSubmit(state, "the service sent an unreadable verdict")
          : completeSubmit(state, parsed),
      )
    } catch (error) {
      update(failSubmit(state, `submission failed: ${String(error)}`))
    }
  }

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement
    if (target.matches(".add-row")) update(addRow(state))
    else if (target.matches(".remove-row")) update(removeRow(state, Number(target.dataset.row)))
    else if (target.matches(".submit")) void submit()
    else if (target.matches(".retry")) void submit()
  })
  root.addEventListener("change", (event) => {
    const target = event.target as HTMLInputElement | HTMLSelectElement
    const index = Number(target.dataset.row)
    const field = target.dataset.field as keyof DraftRow | undefined
    if (field !== undefined && Number.isInteger(index)) {
      update(editRow(state, index, field, target.value))
    }
  })

  update(state)
}

declare global {
  interface Window {
    vocabBridgeMount?: typeof mount
  }
}

if (typeof window !== "undefined") {
  window.vocabBridgeMount = mount
}
