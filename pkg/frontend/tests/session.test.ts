/** Unit tests for the task queue and API client against a fake transport. */

import { beforeEach, describe, expect, it } from 'vitest'
import { ApiClient } from '../src/api'
import { renderMath } from '../src/math'
import { ReviewSession } from '../src/session'
import { validateScores } from '../src/types'

interface FakeState {
  pairsServed: number
  judgments: any[]
  choices: any[]
  failNextPosts: number
}

function fakeFetch(state: FakeState) {
  const pair = {
    pair_id: 'pair-1',
    problem_id: 1,
    first: { blind_id: 'sol-aaaa', text: 'proof one' },
    second: { blind_id: 'sol-bbbb', text: 'proof two' },
    guidance: null,
  }
  return async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input)
    if (init?.method === 'POST' && state.failNextPosts > 0) {
      state.failNextPosts -= 1
      throw new TypeError('network dropped')
    }
    if (url.pathname === '/problems') {
      return jsonResponse({ problems: [{ problem_id: 1, guidance: null }] })
    }
    if (url.pathname === '/pair') {
      if (state.pairsServed >= 1) {
        return jsonResponse({ error: 'no pairs remaining', exhausted: true }, 404)
      }
      return jsonResponse(pair)
    }
    if (url.pathname === '/judgment') {
      const body = JSON.parse(String(init!.body))
      if (!state.judgments.some((j) => j.idempotency_key === body.idempotency_key)) {
        state.judgments.push(body)
      }
      return jsonResponse({ stored: true })
    }
    if (url.pathname === '/choice') {
      const body = JSON.parse(String(init!.body))
      if (!state.choices.some((c) => c.idempotency_key === body.idempotency_key)) {
        state.choices.push(body)
      }
      state.pairsServed += 1
      return jsonResponse({ stored: true })
    }
    return jsonResponse({ error: 'unknown' }, 404)
  }
}

function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { 'Content-Type': 'application/json' },
  })
}

describe('review session queue', () => {
  let state: FakeState
  let session: ReviewSession

  beforeEach(async () => {
    state = { pairsServed: 0, judgments: [], choices: [], failNextPosts: 0 }
    session = new ReviewSession(new ApiClient('http://fake', fakeFetch(state)), 'e-1')
    await session.start()
  })

  it('expands one pair into the five screens in order', () => {
    expect(session.pendingTasks.map((t) => t.kind)).toEqual([
      'Correctness', 'FineGrained', 'Correctness', 'FineGrained', 'ABChoice',
    ])
    expect(session.assignedProblems).toEqual([1])
  })

  it('combines the two judgment screens into one submitted record', async () => {
    session.completeCorrectness('Correct')
    const problems = await session.completeFineGrained({
      answer_accuracy: 1.0, logical_correctness: 5, completeness: 5, clarity: 4,
    })
    expect(problems).toEqual([])
    expect(state.judgments).toHaveLength(1)
    expect(state.judgments[0].label).toBe('Correct')
    expect(state.judgments[0].blind_solution_id).toBe('sol-aaaa')
  })

  it('rejects out-of-range scores client-side without posting', async () => {
    session.completeCorrectness('Correct')
    const problems = await session.completeFineGrained({
      answer_accuracy: 1.0, logical_correctness: 5, completeness: 5, clarity: 6,
    })
    expect(problems.some((p) => p.includes('clarity'))).toBe(true)
    expect(state.judgments).toHaveLength(0)
  })

  it('walks the full queue and finishes after the forced choice', async () => {
    session.completeCorrectness('Correct')
    await session.completeFineGrained({
      answer_accuracy: 1, logical_correctness: 5, completeness: 5, clarity: 5,
    })
    session.completeCorrectness('Inconclusive')
    await session.completeFineGrained({
      answer_accuracy: 0, logical_correctness: 3, completeness: 2, clarity: 3,
    })
    await session.completeChoice('First')
    expect(session.done).toBe(true)
    expect(state.choices).toHaveLength(1)
    expect(state.choices[0].chosen).toBe('First')
    expect(session.submitted).toBe(3)
  })

  it('retries a dropped submission and the server stores exactly one record', async () => {
    state.failNextPosts = 1
    session.completeCorrectness('Correct')
    await session.completeFineGrained({
      answer_accuracy: 1, logical_correctness: 4, completeness: 4, clarity: 4,
    })
    expect(state.judgments).toHaveLength(1)
  })
})

describe('score validation', () => {
  it('flags each broken range', () => {
    expect(validateScores({
      answer_accuracy: 1.2, logical_correctness: 6, completeness: -1, clarity: 2.5,
    })).toHaveLength(4)
    expect(validateScores({
      answer_accuracy: 0.5, logical_correctness: 0, completeness: 5, clarity: 3,
    })).toEqual([])
  })
})

describe('math rendering fallback', () => {
  it('falls back to raw source with a warning when no renderer is loaded', async () => {
    const container = document.createElement('div')
    const outcome = await renderMath(container, '$x^2 \\ge 0$')
    expect(outcome.rendered).toBe(false)
    expect(outcome.warning).toContain('raw source')
    expect(container.querySelector('.proof-source')?.textContent).toContain('x^2')
  })
})
