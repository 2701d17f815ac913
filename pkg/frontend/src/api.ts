/**
 * Thin client for the evaluation API.
 *
 * Submissions carry idempotency keys and are retried on transport failure,
 * so a retried POST can never store a second record server-side.
 */

import { ChoiceBody, JudgmentBody, PairPayload, ProblemInfo } from './types'

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message)
  }
}

export class ApiClient {
  private pending: Array<{ path: string; body: unknown }> = []

  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
    private maxRetries = 3,
    private retryDelayMs = 50,
  ) {}

  pendingCount(): number {
    return this.pending.length
  }

  async problems(): Promise<ProblemInfo[]> {
    const doc = await this.getJson('/problems')
    return doc.problems as ProblemInfo[]
  }

  /** null when the evaluator has exhausted the problem's pair queue */
  async nextPair(problemId: number, evaluatorId: string): Promise<PairPayload | null> {
    const path = `/pair?problem=${problemId}&evaluator=${encodeURIComponent(evaluatorId)}`
    const response = await this.fetchImpl(this.baseUrl + path)
    if (response.status === 404) return null
    if (!response.ok) throw new ApiError(response.status, await response.text())
    return (await response.json()) as PairPayload
  }

  async submitJudgment(body: JudgmentBody): Promise<void> {
    await this.postWithRetry('/judgment', body)
  }

  async submitChoice(body: ChoiceBody): Promise<void> {
    await this.postWithRetry('/choice', body)
  }

  private async getJson(path: string): Promise<any> {
    const response = await this.fetchImpl(this.baseUrl + path)
    if (!response.ok) throw new ApiError(response.status, await response.text())
    return response.json()
  }

  /**
   * Transport failures keep the payload queued and retry; the idempotency key
   * inside the body makes the eventual duplicate delivery harmless. Server
   * validation errors (4xx) are NOT retried: they surface to the form.
   */
  private async postWithRetry(path: string, body: unknown): Promise<void> {
    this.pending.push({ path, body })
    let lastError: unknown = null
    for (let attempt = 0; attempt < this.maxRetries; attempt++) {
      try {
        const response = await this.fetchImpl(this.baseUrl + path, {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify(body),
        })
        if (response.ok) {
          this.pending.pop()
          return
        }
        this.pending.pop()
        throw new ApiError(response.status, await response.text())
      } catch (error) {
        if (error instanceof ApiError) throw error
        lastError = error
        await new Promise((resolve) => setTimeout(resolve, this.retryDelayMs * (attempt + 1)))
      }
    }
    this.pending.pop()
    throw lastError instanceof Error ? lastError : new Error(String(lastError))
  }
}
