/** Wire types for the evaluation API and the client-side task queue. */

export interface ProblemInfo {
  problem_id: number
  guidance: string | null
}

export interface PairSide {
  blind_id: string
  text: string
}

export interface PairPayload {
  pair_id: string
  problem_id: number
  first: PairSide
  second: PairSide
  guidance: string | null
}

export type CorrectnessValue = 'Correct' | 'Inconclusive' | 'Incorrect'

export const CORRECTNESS_LABELS: CorrectnessValue[] = [
  'Correct',
  'Inconclusive',
  'Incorrect',
]

export interface FineGrainedScores {
  answer_accuracy: number // 0..1
  logical_correctness: number // integer 0..5
  completeness: number // integer 0..5
  clarity: number // integer 0..5
}

export interface JudgmentBody extends FineGrainedScores {
  problem_id: number
  blind_solution_id: string
  evaluator_id: string
  label: CorrectnessValue
  idempotency_key: string
}

export interface ChoiceBody {
  pair_id: string
  evaluator_id: string
  chosen: 'First' | 'Second'
  idempotency_key: string
}

export type TaskKind = 'Correctness' | 'FineGrained' | 'ABChoice'

export interface Task {
  kind: TaskKind
  pair: PairPayload
  /** which member of the pair a judgment task concerns */
  side?: 'first' | 'second'
}

export function validateScores(scores: FineGrainedScores): string[] {
  const problems: string[] = []
  if (!(scores.answer_accuracy >= 0 && scores.answer_accuracy <= 1)) {
    problems.push('answer accuracy must lie in [0, 1]')
  }
  for (const name of ['logical_correctness', 'completeness', 'clarity'] as const) {
    const value = scores[name]
    if (!Number.isInteger(value) || value < 0 || value > 5) {
      problems.push(`${name.replace(/_/g, ' ')} must be an integer in 0..5`)
    }
  }
  return problems
}
