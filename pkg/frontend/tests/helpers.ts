// Shared fixtures and a stub fetch for the test suite.

import type { FetchLike } from '../src/api';
import type { AnnotationItem, Candidate, EvalReport, ItemEval } from '../src/types';

export interface RecordedCall {
  url: string;
  init?: RequestInit;
  body: unknown;
}

export function stubFetch(
  respond: (url: string, init?: RequestInit) => { status?: number; body: unknown },
): { fetchImpl: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ url, init, body });
    const reply = respond(url, init);
    return new Response(JSON.stringify(reply.body), {
      status: reply.status ?? 200,
      headers: { 'Content-Type': 'application/json' },
    });
  };
  return { fetchImpl, calls };
}

export function makeCandidate(overrides: Partial<Candidate> = {}): Candidate {
  return {
    candidate_id: 'cand-0001',
    text: 'Which names appear in students?',
    origin: 'generated',
    model_id: 'mock',
    prompt_hash: 'deadbeef',
    rank: null,
    status: 'proposed',
    created_at: '2026-08-23T00:00:00+00:00',
    ...overrides,
  };
}

export function makeItem(overrides: Partial<AnnotationItem> = {}): AnnotationItem {
  return {
    item_id: 'item-0001',
    query_id: 'query-0001',
    sql: 'SELECT name FROM students',
    state: 'drafted',
    cte_name: null,
    parent_id: null,
    candidates: [1, 2, 3, 4].map((i) =>
      makeCandidate({ candidate_id: `cand-000${i}`, text: `candidate ${i}` }),
    ),
    sub_items: [],
    refinement_notes: [],
    lease: { annotator_id: 'alice', expires_at: 9999999999 },
    accepted_text: null,
    ...overrides,
  };
}

export function makeItemEval(overrides: Partial<ItemEval> = {}): ItemEval {
  return {
    item_id: 'item-0001',
    sql: 'SELECT name FROM students',
    question: 'Which names appear in students?',
    regenerated_sql: 'SELECT name FROM students',
    rubric: { level: 5, reason: 'full_match', detail: '', auto: true, overridden_by: null },
    exec_match: true,
    exact_match: true,
    bleu: null,
    rouge_l: null,
    ...overrides,
  };
}

export function makeReport(levels: number[]): EvalReport {
  const histogram: Record<string, number> = {};
  for (const level of levels) {
    const key = String(level);
    histogram[key] = (histogram[key] ?? 0) + 1;
  }
  const items = levels.map((level, i) =>
    makeItemEval({
      item_id: `item-000${i + 1}`,
      rubric: {
        level: level as 1 | 2 | 3 | 4 | 5,
        reason: level === 5 ? 'full_match' : 'order_mismatch',
        detail: '',
        auto: true,
        overridden_by: null,
      },
      exec_match: level === 5,
    }),
  );
  return {
    items,
    aggregates: {
      item_count: levels.length,
      level_histogram: histogram,
      execution_accuracy: items.filter((e) => e.exec_match).length / items.length,
      mean_bleu: null,
      mean_rouge_l: null,
    },
  };
}
