/**
 * Browser-level round trip against the real evaluation harness.
 *
 * A fixture store is served by the actual backend process; the DOM is driven
 * through the same screens an expert uses: one correctness judgment, one
 * fine-grained form, and one forced A-B choice. Stored records must carry
 * blind ids only, the rendered DOM must never contain a method name, and a
 * fault-injected retry must store exactly one record.
 */

import { ChildProcess, spawn } from 'node:child_process'
import { mkdtempSync, readFileSync, writeFileSync, existsSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { ApiClient, FetchLike } from '../src/api'
import { renderTask } from '../src/render'
import { ReviewSession } from '../src/session'

const METHOD_NAMES = ['prover-alpha', 'prover-beta']
const realFetch: FetchLike = (input, init) => fetch(input, init)

let harness: ChildProcess
let baseUrl = ''
let storeDir = ''

async function waitFor(predicate: () => boolean, timeoutMs = 15_000): Promise<void> {
  const started = Date.now()
  while (!predicate()) {
    if (Date.now() - started > timeoutMs) throw new Error('timed out waiting for condition')
    await new Promise((resolve) => setTimeout(resolve, 25))
  }
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), 'review-ui-'))
  storeDir = join(dir, 'store')
  for (const method of METHOD_NAMES) {
    writeFileSync(
      join(dir, `${method}.tex`),
      `\\begin{proof}A complete argument produced by ${method}: $x^2 \\ge 0$ ` +
        `for all real $x$.\\end{proof}`,
    )
  }
  writeFileSync(
    join(dir, 'solutions.json'),
    JSON.stringify(
      METHOD_NAMES.map((method) => ({ method, problem_id: 1, path: `${method}.tex` })),
    ),
  )
  harness = spawn('python3', [
    '-m', 'proofloop.cli', 'eval-serve',
    '--store', storeDir,
    '--solutions', join(dir, 'solutions.json'),
    '--port', '0',
  ])
  let stderr = ''
  harness.stderr!.on('data', (chunk) => {
    stderr += String(chunk)
  })
  await waitFor(() => /serving evaluation API on (\S+)/.test(stderr))
  baseUrl = stderr.match(/serving evaluation API on (\S+)/)![1]
})

afterAll(() => {
  harness?.kill('SIGTERM')
})

function storedLines(name: string): any[] {
  const path = join(storeDir, name)
  if (!existsSync(path)) return []
  return readFileSync(path, 'utf-8')
    .split('\n')
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line))
}

function submitForm(form: HTMLFormElement): void {
  form.dispatchEvent(new window.Event('submit', { bubbles: true, cancelable: true }))
}

function pickRadio(root: HTMLElement, name: string, value: string): void {
  const radio = root.querySelector<HTMLInputElement>(
    `input[name="${name}"][value="${value}"]`,
  )!
  radio.checked = true
  radio.dispatchEvent(new window.Event('change', { bubbles: true }))
}

function fillScores(form: HTMLFormElement, scores: Record<string, string>): void {
  for (const [name, value] of Object.entries(scores)) {
    form.querySelector<HTMLInputElement>(`input[name="${name}"]`)!.value = value
  }
}

describe('blind review round trip', () => {
  it('completes a judgment, a fine-grained form, and a forced A-B choice', async () => {
    const root = document.createElement('div')
    document.body.appendChild(root)
    const session = new ReviewSession(new ApiClient(baseUrl, realFetch), 'expert-ui')
    await session.start()
    expect(session.pendingTasks.map((t) => t.kind)).toEqual([
      'Correctness', 'FineGrained', 'Correctness', 'FineGrained', 'ABChoice',
    ])
    const advance = () => {
      void renderTask(root, session, advance)
    }
    await renderTask(root, session, advance)

    // correctness screen: exactly the three labels, Inconclusive included
    const labels = Array.from(
      root.querySelectorAll<HTMLInputElement>('#correctness-form input[name="label"]'),
    ).map((input) => input.value)
    expect(labels).toEqual(['Correct', 'Inconclusive', 'Incorrect'])
    pickRadio(root, 'label', 'Correct')
    submitForm(root.querySelector('#correctness-form')!)
    await waitFor(() => root.querySelector('#fine-grained-form') !== null)

    // fine-grained screen: client-side range rejection first, then a clean submit
    let form = root.querySelector<HTMLFormElement>('#fine-grained-form')!
    fillScores(form, {
      answer_accuracy: '1', logical_correctness: '5', completeness: '5', clarity: '6',
    })
    submitForm(form)
    await waitFor(() => (root.querySelector('.form-errors')?.children.length ?? 0) > 0)
    expect(storedLines('judgments.jsonl')).toHaveLength(0)
    fillScores(form, { clarity: '4' })
    submitForm(form)
    await waitFor(() => storedLines('judgments.jsonl').length === 1)

    // second solution: judge it too
    await waitFor(() => root.querySelector('#correctness-form') !== null)
    pickRadio(root, 'label', 'Inconclusive')
    submitForm(root.querySelector('#correctness-form')!)
    await waitFor(() => root.querySelector('#fine-grained-form') !== null)
    form = root.querySelector<HTMLFormElement>('#fine-grained-form')!
    fillScores(form, {
      answer_accuracy: '0.5', logical_correctness: '3', completeness: '3', clarity: '3',
    })
    submitForm(form)
    await waitFor(() => storedLines('judgments.jsonl').length === 2)

    // A-B screen: two panels in served order, forced choice
    await waitFor(() => root.querySelector('#choice-form') !== null)
    const panels = root.querySelectorAll('.ab-panels .proof-panel')
    expect(panels).toHaveLength(2)
    const served = session.pendingTasks[0].pair
    expect(panels[0].querySelector('.blind-id')!.textContent).toContain(
      served.first.blind_id,
    )
    expect(panels[1].querySelector('.blind-id')!.textContent).toContain(
      served.second.blind_id,
    )
    const submit = root.querySelector<HTMLButtonElement>('#choice-form button')!
    expect(submit.disabled).toBe(true) // nothing selected yet
    pickRadio(root, 'chosen', 'First')
    expect(submit.disabled).toBe(false)
    submitForm(root.querySelector('#choice-form')!)
    await waitFor(() => storedLines('pairwise.jsonl').length === 1)
    await waitFor(() => root.querySelector('.session-complete') !== null)

    // stored records carry blind ids only
    const everything = JSON.stringify({
      judgments: storedLines('judgments.jsonl'),
      pairwise: storedLines('pairwise.jsonl'),
    })
    for (const method of METHOD_NAMES) {
      expect(everything.includes(method)).toBe(false)
    }
    const choice = storedLines('pairwise.jsonl')[0]
    expect(choice.blind_id_first).toMatch(/^sol-/)
    expect(choice.blind_id_second).toMatch(/^sol-/)
    expect(choice.chosen).toBe('First')
    for (const judgment of storedLines('judgments.jsonl')) {
      expect(judgment.blind_solution_id).toMatch(/^sol-/)
    }

    // the rendered DOM never contained a planted method name
    expect(document.body.innerHTML).not.toContain('prover-alpha')
    expect(document.body.innerHTML).not.toContain('prover-beta')
    document.body.removeChild(root)
  })

  it('stores exactly one record when a dropped submission is retried', async () => {
    let failures = 1
    const flakyFetch: FetchLike = async (input, init) => {
      if (init?.method === 'POST' && String(input).includes('/choice') && failures > 0) {
        failures -= 1
        throw new TypeError('socket hang up')
      }
      return realFetch(input, init)
    }
    const session = new ReviewSession(new ApiClient(baseUrl, flakyFetch), 'expert-retry')
    await session.start()
    session.completeCorrectness('Correct')
    await session.completeFineGrained({
      answer_accuracy: 1, logical_correctness: 5, completeness: 5, clarity: 5,
    })
    session.completeCorrectness('Correct')
    await session.completeFineGrained({
      answer_accuracy: 1, logical_correctness: 5, completeness: 5, clarity: 5,
    })
    await session.completeChoice('Second')
    const mine = storedLines('pairwise.jsonl').filter(
      (record) => record.evaluator_id === 'expert-retry',
    )
    expect(mine).toHaveLength(1)
    expect(mine[0].chosen).toBe('Second')
  })
})
