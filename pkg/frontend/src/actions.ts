// User intents, translated into API calls. Each action returns the updated
// item (or a typed outcome) so the caller can re-render; conflict responses
// (someone else holds the lease, or the item moved on) are surfaced as a
// distinct outcome instead of a thrown error.

import { ApiClient, ApiError } from './api';
import type { AnnotationItem, EvalReport } from './types';

export type ActionResult =
  | { kind: 'ok'; item: AnnotationItem }
  | { kind: 'conflict'; message: string };

async function run(
  call: () => Promise<AnnotationItem>,
): Promise<ActionResult> {
  try {
    return { kind: 'ok', item: await call() };
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      return { kind: 'conflict', message: `claimed elsewhere: ${err.message}` };
    }
    throw err;
  }
}

export function submitRank(
  api: ApiClient,
  itemId: string,
  annotatorId: string,
  ranking: string[],
): Promise<ActionResult> {
  return run(() => api.feedback(itemId, annotatorId, 'rank', { ranking }));
}

export function submitRefine(
  api: ApiClient,
  itemId: string,
  annotatorId: string,
  note: string,
): Promise<ActionResult> {
  // The note travels verbatim; it is the annotator's instruction to the model.
  return run(() => api.feedback(itemId, annotatorId, 'refine', { note }));
}

export function submitEdit(
  api: ApiClient,
  itemId: string,
  annotatorId: string,
  candidateId: string,
  text: string,
): Promise<ActionResult> {
  return run(() =>
    api.feedback(itemId, annotatorId, 'edit', {
      candidate_id: candidateId,
      text,
    }),
  );
}

export function discardCandidate(
  api: ApiClient,
  itemId: string,
  annotatorId: string,
  candidateId: string,
): Promise<ActionResult> {
  return run(() =>
    api.feedback(itemId, annotatorId, 'discard', { candidate_id: candidateId }),
  );
}

export function acceptCandidate(
  api: ApiClient,
  itemId: string,
  annotatorId: string,
  candidateId: string,
  finalText?: string,
): Promise<ActionResult> {
  return run(() => api.accept(itemId, annotatorId, candidateId, finalText));
}

export function reopenItem(
  api: ApiClient,
  itemId: string,
  annotatorId: string,
): Promise<ActionResult> {
  return run(() => api.feedback(itemId, annotatorId, 'reopen'));
}

// Human override of an automated rubric grade, recorded as a flag event on
// the item so the judgment trail stays in the project log.
export function overrideLevel(
  api: ApiClient,
  itemId: string,
  annotatorId: string,
  level: number,
  note = '',
): Promise<ActionResult> {
  return run(() =>
    api.feedback(itemId, annotatorId, 'flag', {
      note: `rubric_override level=${level}${note ? ` ${note}` : ''}`,
    }),
  );
}

export function fetchReport(
  api: ApiClient,
  projectId: string,
  dbDir: string,
): Promise<EvalReport> {
  return api.evaluate(projectId, dbDir);
}
