/** Entry point: wire the session to the page. */

import { ApiClient } from './api'
import { renderTask } from './render'
import { ReviewSession } from './session'

export async function bootstrap(root: HTMLElement, apiBaseUrl: string,
                                evaluatorId: string): Promise<ReviewSession> {
  const api = new ApiClient(apiBaseUrl)
  const session = new ReviewSession(api, evaluatorId)
  await session.start()
  const advance = () => {
    void renderTask(root, session, advance)
  }
  await renderTask(root, session, advance)
  return session
}

function setupEntryForm(): void {
  const form = document.getElementById('session-entry') as HTMLFormElement | null
  const root = document.getElementById('task-root')
  if (!form || !root) return
  form.addEventListener('submit', async (event) => {
    event.preventDefault()
    const apiUrl = (document.getElementById('api-url') as HTMLInputElement).value
    const evaluator = (document.getElementById('evaluator-id') as HTMLInputElement).value
    if (!apiUrl || !evaluator) return
    form.hidden = true
    await bootstrap(root, apiUrl, evaluator)
  })
}

if (typeof document !== 'undefined' && document.readyState !== 'loading') {
  setupEntryForm()
} else if (typeof document !== 'undefined') {
  document.addEventListener('DOMContentLoaded', setupEntryForm)
}
