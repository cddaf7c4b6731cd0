import { describe, expect, it } from 'vitest';

import {
  escapeHtml,
  histogramCounts,
  renderAnnotationScreen,
  renderHistogram,
  renderReviewScreen,
  renderSchemaSidebar,
} from '../src/render';
import { makeCandidate, makeItem, makeReport } from './helpers';

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe('escapeHtml', () => {
  it('neutralizes markup in untrusted text', () => {
    expect(escapeHtml(`<script>alert("x&y'")</script>`)).toBe(
      '&lt;script&gt;alert(&quot;x&amp;y&#39;&quot;)&lt;/script&gt;',
    );
  });
});

describe('renderAnnotationScreen', () => {
  it('renders one card per candidate — four for a drafted item', () => {
    const html = renderAnnotationScreen(makeItem());
    expect(count(html, 'class="candidate-card')).toBe(4);
    for (let i = 1; i <= 4; i++) {
      expect(html).toContain(`data-candidate-id="cand-000${i}"`);
      expect(html).toContain(`candidate ${i}`);
    }
  });

  it('shows the SQL escaped inside a code block', () => {
    const item = makeItem({ sql: "SELECT * FROM t WHERE a < 'b&c'" });
    const html = renderAnnotationScreen(item);
    expect(html).toContain('SELECT * FROM t WHERE a &lt; &#39;b&amp;c&#39;');
    expect(html).not.toContain("a < 'b&c'");
  });

  it('disables controls on discarded candidates and resolved items', () => {
    const item = makeItem({
      candidates: [
        makeCandidate({ candidate_id: 'c1', status: 'proposed' }),
        makeCandidate({ candidate_id: 'c2', status: 'discarded' }),
      ],
    });
    const html = renderAnnotationScreen(item);
    const [live, dead] = html.split('data-candidate-id="c2"');
    expect(live).not.toContain('disabled');
    expect(count(dead, 'disabled')).toBeGreaterThanOrEqual(3);

    const accepted = renderAnnotationScreen(makeItem({ state: 'accepted' }));
    expect(accepted).toContain('class="btn-refine" data-action="refine" disabled');
  });

  it('shows refinement notes and decomposition context when present', () => {
    const item = makeItem({
      cte_name: 'step_1',
      refinement_notes: ['mention the year filter'],
    });
    const html = renderAnnotationScreen(item);
    expect(html).toContain('step_1');
    expect(html).toContain('mention the year filter');
  });

  it('includes the schema sidebar when tables are given', () => {
    const tables = [
      { name: 'students', columns: [['id', 'INTEGER'], ['name', 'TEXT']] as [string, string][], primary_key: ['id'] },
    ];
    const html = renderAnnotationScreen(makeItem(), tables);
    expect(html).toContain('schema-sidebar');
    expect(html).toContain('students');
    expect(renderSchemaSidebar(tables)).toContain('<em>INTEGER</em>');
  });
});

describe('renderReviewScreen', () => {
  it('histogram for levels [5,5,4] shows counts 0/0/0/1/2', () => {
    const report = makeReport([5, 5, 4]);
    expect(histogramCounts(report)).toEqual([0, 0, 0, 1, 2]);
    const html = renderHistogram(report);
    expect(html).toContain('data-level="1" data-count="0"');
    expect(html).toContain('data-level="2" data-count="0"');
    expect(html).toContain('data-level="3" data-count="0"');
    expect(html).toContain('data-level="4" data-count="1"');
    expect(html).toContain('data-level="5" data-count="2"');
  });

  it('renders a per-item row with a level override selector', () => {
    const html = renderReviewScreen(makeReport([5, 4]));
    expect(count(html, 'class="level-override"')).toBe(2);
    expect(html).toContain('<option value="4" selected>4</option>');
    expect(html).toContain('execution accuracy: 0.500');
  });

  it('treats missing histogram keys as zero', () => {
    const report = makeReport([5]);
    expect(histogramCounts(report)).toEqual([0, 0, 0, 0, 1]);
  });
});
