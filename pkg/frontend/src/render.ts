/**
 * Screen rendering. All DOM is built from served payloads; the pair order is
 * never changed client-side, and nothing beyond blind ids and proof text is
 * displayed.
 */

import { renderMath } from './math'
import { ReviewSession } from './session'
import { CORRECTNESS_LABELS, CorrectnessValue, Task } from './types'

export async function renderTask(root: HTMLElement, session: ReviewSession,
                                 onAdvance: () => void): Promise<void> {
  root.innerHTML = ''
  const task = session.currentTask()
  if (!task) {
    const done = document.createElement('p')
    done.className = 'session-complete'
    done.textContent = 'All assigned tasks are complete. Thank you.'
    root.appendChild(done)
    return
  }
  if (task.kind === 'Correctness') await renderCorrectness(root, session, task, onAdvance)
  else if (task.kind === 'FineGrained') await renderFineGrained(root, session, task, onAdvance)
  else await renderChoice(root, session, task, onAdvance)
}

function heading(root: HTMLElement, text: string): void {
  const h = document.createElement('h2')
  h.textContent = text
  root.appendChild(h)
}

function guidanceBox(root: HTMLElement, guidance: string | null): void {
  if (!guidance) return
  const box = document.createElement('p')
  box.className = 'guidance'
  box.textContent = guidance
  root.appendChild(box)
}

async function proofPanel(root: HTMLElement, blindId: string, text: string,
                          className = 'proof-panel'): Promise<void> {
  const panel = document.createElement('section')
  panel.className = className
  const tag = document.createElement('p')
  tag.className = 'blind-id'
  tag.textContent = `Solution ${blindId}`
  panel.appendChild(tag)
  const body = document.createElement('div')
  body.className = 'proof-body'
  panel.appendChild(body)
  const outcome = await renderMath(body, text)
  if (outcome.warning) {
    const warning = document.createElement('p')
    warning.className = 'warning-banner'
    warning.textContent = outcome.warning
    panel.insertBefore(warning, body)
  }
  root.appendChild(panel)
}

function errorList(root: HTMLElement): HTMLElement {
  const list = document.createElement('ul')
  list.className = 'form-errors'
  root.appendChild(list)
  return list
}

function showErrors(list: HTMLElement, problems: string[]): void {
  list.innerHTML = ''
  for (const problem of problems) {
    const item = document.createElement('li')
    item.textContent = problem
    list.appendChild(item)
  }
}

async function renderCorrectness(root: HTMLElement, session: ReviewSession, task: Task,
                                 onAdvance: () => void): Promise<void> {
  heading(root, `Problem ${task.pair.problem_id}: overall correctness`)
  guidanceBox(root, task.pair.guidance)
  const side = task.pair[task.side!]
  await proofPanel(root, side.blind_id, side.text)

  const form = document.createElement('form')
  form.id = 'correctness-form'
  for (const label of CORRECTNESS_LABELS) {
    const wrap = document.createElement('label')
    const radio = document.createElement('input')
    radio.type = 'radio'
    radio.name = 'label'
    radio.value = label
    wrap.appendChild(radio)
    wrap.appendChild(document.createTextNode(label))
    form.appendChild(wrap)
  }
  const errors = errorList(form)
  const submit = document.createElement('button')
  submit.type = 'submit'
  submit.textContent = 'Continue'
  form.appendChild(submit)
  form.addEventListener('submit', (event) => {
    event.preventDefault()
    const chosen = form.querySelector<HTMLInputElement>('input[name="label"]:checked')
    if (!chosen) {
      showErrors(errors, ['select one of the three labels'])
      return
    }
    session.completeCorrectness(chosen.value as CorrectnessValue)
    onAdvance()
  })
  root.appendChild(form)
}

const SCALE_FIELDS: Array<{ name: 'logical_correctness' | 'completeness' | 'clarity';
                            label: string }> = [
  { name: 'logical_correctness', label: 'Logical correctness (0-5)' },
  { name: 'completeness', label: 'Proof completeness (0-5)' },
  { name: 'clarity', label: 'Proof clarity (0-5)' },
]

async function renderFineGrained(root: HTMLElement, session: ReviewSession, task: Task,
                                 onAdvance: () => void): Promise<void> {
  heading(root, `Problem ${task.pair.problem_id}: fine-grained scores`)
  const side = task.pair[task.side!]
  await proofPanel(root, side.blind_id, side.text)

  const form = document.createElement('form')
  form.id = 'fine-grained-form'

  const accuracyLabel = document.createElement('label')
  accuracyLabel.textContent = 'Final answer accuracy (0-1)'
  const accuracy = document.createElement('input')
  accuracy.type = 'number'
  accuracy.name = 'answer_accuracy'
  accuracy.min = '0'
  accuracy.max = '1'
  accuracy.step = '0.05'
  accuracyLabel.appendChild(accuracy)
  form.appendChild(accuracyLabel)

  for (const field of SCALE_FIELDS) {
    const wrap = document.createElement('label')
    wrap.textContent = field.label
    const input = document.createElement('input')
    input.type = 'number'
    input.name = field.name
    input.min = '0'
    input.max = '5'
    input.step = '1'
    wrap.appendChild(input)
    form.appendChild(wrap)
  }

  const errors = errorList(form)
  const submit = document.createElement('button')
  submit.type = 'submit'
  submit.textContent = 'Submit scores'
  form.appendChild(submit)
  form.addEventListener('submit', async (event) => {
    event.preventDefault()
    const value = (name: string) =>
      Number(form.querySelector<HTMLInputElement>(`input[name="${name}"]`)!.value)
    const scores = {
      answer_accuracy: value('answer_accuracy'),
      logical_correctness: value('logical_correctness'),
      completeness: value('completeness'),
      clarity: value('clarity'),
    }
    try {
      const problems = await session.completeFineGrained(scores)
      if (problems.length > 0) {
        showErrors(errors, problems)
        return
      }
      onAdvance()
    } catch (error) {
      showErrors(errors, [`submission failed: ${String(error)}`])
    }
  })
  root.appendChild(form)
}

async function renderChoice(root: HTMLElement, session: ReviewSession, task: Task,
                            onAdvance: () => void): Promise<void> {
  heading(root, `Problem ${task.pair.problem_id}: which proof is stronger?`)
  guidanceBox(root, task.pair.guidance)

  const panels = document.createElement('div')
  panels.className = 'ab-panels'
  await proofPanel(panels, task.pair.first.blind_id, task.pair.first.text, 'proof-panel ab-first')
  await proofPanel(panels, task.pair.second.blind_id, task.pair.second.text, 'proof-panel ab-second')
  root.appendChild(panels)

  const form = document.createElement('form')
  form.id = 'choice-form'
  for (const [value, label] of [['First', 'First proof'], ['Second', 'Second proof']]) {
    const wrap = document.createElement('label')
    const radio = document.createElement('input')
    radio.type = 'radio'
    radio.name = 'chosen'
    radio.value = value
    wrap.appendChild(radio)
    wrap.appendChild(document.createTextNode(label))
    form.appendChild(wrap)
  }
  const errors = errorList(form)
  const submit = document.createElement('button')
  submit.type = 'submit'
  submit.textContent = 'Submit choice'
  submit.disabled = true // forced choice: nothing selected yet
  form.addEventListener('change', () => {
    submit.disabled = !form.querySelector('input[name="chosen"]:checked')
  })
  form.appendChild(submit)
  form.addEventListener('submit', async (event) => {
    event.preventDefault()
    const chosen = form.querySelector<HTMLInputElement>('input[name="chosen"]:checked')
    if (!chosen) {
      showErrors(errors, ['a choice is required'])
      return
    }
    try {
      await session.completeChoice(chosen.value as 'First' | 'Second')
      onAdvance()
    } catch (error) {
      showErrors(errors, [`submission failed: ${String(error)}`])
    }
  })
  root.appendChild(form)
}
