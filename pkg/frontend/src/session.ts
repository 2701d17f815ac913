/**
 * Review session: the evaluator's task queue.
 *
 * One served pair expands into five screens — correctness then fine-grained
 * for each side, then the forced A-B choice. The two judgment screens for a
 * side combine into one submitted record; the session never sees method
 * names or the server-side blind-id reverse map.
 */

import { ApiClient } from './api'
import {
  CorrectnessValue,
  FineGrainedScores,
  PairPayload,
  Task,
  validateScores,
} from './types'

export class ReviewSession {
  assignedProblems: number[] = []
  pendingTasks: Task[] = []
  submitted = 0
  private labels = new Map<string, CorrectnessValue>()

  constructor(
    private api: ApiClient,
    readonly evaluatorId: string,
  ) {}

  async start(): Promise<void> {
    const problems = await this.api.problems()
    this.assignedProblems = problems.map((p) => p.problem_id)
    for (const problemId of this.assignedProblems) {
      await this.enqueueNextPair(problemId)
    }
  }

  currentTask(): Task | null {
    return this.pendingTasks[0] ?? null
  }

  get done(): boolean {
    return this.pendingTasks.length === 0
  }

  private async enqueueNextPair(problemId: number): Promise<void> {
    const pair = await this.api.nextPair(problemId, this.evaluatorId)
    if (pair === null) return
    this.pendingTasks.push(
      { kind: 'Correctness', pair, side: 'first' },
      { kind: 'FineGrained', pair, side: 'first' },
      { kind: 'Correctness', pair, side: 'second' },
      { kind: 'FineGrained', pair, side: 'second' },
      { kind: 'ABChoice', pair },
    )
  }

  /** screen 1 of a judgment: remember the label, advance */
  completeCorrectness(label: CorrectnessValue): void {
    const task = this.expect('Correctness')
    this.labels.set(this.labelKey(task.pair, task.side!), label)
    this.pendingTasks.shift()
  }

  /** screen 2: validate, combine with the stored label, submit one record */
  async completeFineGrained(scores: FineGrainedScores): Promise<string[]> {
    const task = this.expect('FineGrained')
    const problems = validateScores(scores)
    if (problems.length > 0) return problems
    const label = this.labels.get(this.labelKey(task.pair, task.side!))
    if (!label) return ['correctness label missing']
    const blindId = task.pair[task.side!].blind_id
    await this.api.submitJudgment({
      problem_id: task.pair.problem_id,
      blind_solution_id: blindId,
      evaluator_id: this.evaluatorId,
      label,
      ...scores,
      idempotency_key: `${this.evaluatorId}|${task.pair.pair_id}|${blindId}|judgment`,
    })
    this.submitted += 1
    this.pendingTasks.shift()
    return []
  }

  /** the A-B choice is forced: callers must pass First or Second */
  async completeChoice(chosen: 'First' | 'Second'): Promise<void> {
    const task = this.expect('ABChoice')
    await this.api.submitChoice({
      pair_id: task.pair.pair_id,
      evaluator_id: this.evaluatorId,
      chosen,
      idempotency_key: `${this.evaluatorId}|${task.pair.pair_id}|choice`,
    })
    this.submitted += 1
    this.pendingTasks.shift()
    await this.enqueueNextPair(task.pair.problem_id)
  }

  private expect(kind: Task['kind']): Task {
    const task = this.currentTask()
    if (!task || task.kind !== kind) {
      throw new Error(`expected a ${kind} task, queue has ${task?.kind ?? 'nothing'}`)
    }
    return task
  }

  private labelKey(pair: PairPayload, side: 'first' | 'second'): string {
    return `${pair.pair_id}|${side}`
  }
}
