import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import {
  acceptCandidate,
  discardCandidate,
  overrideLevel,
  submitRefine,
} from '../src/actions';
import { makeItem, stubFetch } from './helpers';

describe('submitRefine', () => {
  it('posts a refine event carrying the note verbatim', async () => {
    const { fetchImpl, calls } = stubFetch(() => ({ body: makeItem() }));
    const api = new ApiClient({ fetchImpl });
    const note = '  Mention the 2024 filter — keep "students" literal. <>&  ';
    const result = await submitRefine(api, 'item-0001', 'alice', note);
    expect(result.kind).toBe('ok');
    expect(calls[0].url).toBe('/api/items/item-0001/feedback');
    expect(calls[0].body).toEqual({
      annotator_id: 'alice',
      kind: 'refine',
      payload: { note },
    });
  });
});

describe('acceptCandidate', () => {
  it('posts the chosen candidate and returns the updated item', async () => {
    const accepted = makeItem({ state: 'accepted', accepted_text: 'final' });
    const { fetchImpl, calls } = stubFetch(() => ({ body: accepted }));
    const api = new ApiClient({ fetchImpl });
    const result = await acceptCandidate(api, 'item-0001', 'alice', 'cand-0002');
    expect(calls[0].url).toBe('/api/items/item-0001/accept');
    expect(calls[0].body).toEqual({
      annotator_id: 'alice',
      candidate_id: 'cand-0002',
      final_text: null,
    });
    expect(result.kind === 'ok' && result.item.state).toBe('accepted');
  });

  it('maps a 409 to a conflict outcome instead of throwing', async () => {
    const { fetchImpl } = stubFetch(() => ({
      status: 409,
      body: { code: 'lease_mismatch', message: 'item leased by bob' },
    }));
    const api = new ApiClient({ fetchImpl });
    const result = await acceptCandidate(api, 'item-0001', 'alice', 'cand-0001');
    expect(result.kind).toBe('conflict');
    expect(result.kind === 'conflict' && result.message).toContain(
      'claimed elsewhere',
    );
  });

  it('still throws on non-conflict failures', async () => {
    const { fetchImpl } = stubFetch(() => ({
      status: 404,
      body: { code: 'unknown_item', message: 'no such item' },
    }));
    const api = new ApiClient({ fetchImpl });
    await expect(
      acceptCandidate(api, 'missing', 'alice', 'cand-0001'),
    ).rejects.toThrow('no such item');
  });
});

describe('discardCandidate', () => {
  it('posts a discard event naming the candidate', async () => {
    const { fetchImpl, calls } = stubFetch(() => ({ body: makeItem() }));
    const api = new ApiClient({ fetchImpl });
    await discardCandidate(api, 'item-0001', 'alice', 'cand-0003');
    expect(calls[0].body).toEqual({
      annotator_id: 'alice',
      kind: 'discard',
      payload: { candidate_id: 'cand-0003' },
    });
  });
});

describe('overrideLevel', () => {
  it('records the override as a flag event with the chosen level', async () => {
    const { fetchImpl, calls } = stubFetch(() => ({ body: makeItem() }));
    const api = new ApiClient({ fetchImpl });
    await overrideLevel(api, 'item-0001', 'alice', 3, 'ORDER BY lost');
    expect(calls[0].body).toEqual({
      annotator_id: 'alice',
      kind: 'flag',
      payload: { note: 'rubric_override level=3 ORDER BY lost' },
    });
  });
});
