// Pure HTML-string renderers. No DOM access, no network: given data,
// return markup. This keeps every screen testable without a browser.

import type {
  AnnotationItem,
  Candidate,
  EvalReport,
  ItemEval,
  Project,
  TableDef,
} from './types';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

// --- project list -----------------------------------------------------------

export function renderProjectList(projects: Project[]): string {
  if (projects.length === 0) {
    return '<p class="empty">No projects yet. Create one from the CLI or API.</p>';
  }
  const rows = projects
    .map((p) => {
      const stats = p.stats
        ? `${p.stats.items} items (${Object.entries(p.stats.by_state)
            .map(([state, n]) => `${n} ${state}`)
            .join(', ')})`
        : '';
      return `<li class="project" data-project-id="${escapeHtml(p.project_id)}">
  <span class="project-name">${escapeHtml(p.name)}</span>
  <span class="project-dialect">${escapeHtml(p.dialect)}</span>
  <span class="project-stats">${escapeHtml(stats)}</span>
</li>`;
    })
    .join('\n');
  return `<ul class="project-list">\n${rows}\n</ul>`;
}

// --- schema sidebar ----------------------------------------------------------

export function renderSchemaSidebar(tables: TableDef[]): string {
  const blocks = tables
    .map((table) => {
      const cols = table.columns
        .map(([name, type]) => {
          const pk = table.primary_key.includes(name) ? ' class="pk"' : '';
          return `      <li${pk}>${escapeHtml(name)} <em>${escapeHtml(type)}</em></li>`;
        })
        .join('\n');
      return `  <div class="table-def">
    <h4>${escapeHtml(table.name)}</h4>
    <ul>
${cols}
    </ul>
  </div>`;
    })
    .join('\n');
  return `<aside class="schema-sidebar">\n${blocks}\n</aside>`;
}

// --- annotation screen ---------------------------------------------------------

function candidateControls(candidate: Candidate, itemState: string): string {
  // Controls are live only while the item is still being worked on and the
  // candidate hasn't already been resolved.
  const frozen =
    itemState === 'accepted' ||
    itemState === 'discarded' ||
    candidate.status === 'discarded' ||
    candidate.status === 'accepted';
  const disabled = frozen ? ' disabled' : '';
  return `    <div class="candidate-controls">
      <label>rank <input type="number" min="1" max="4" class="rank-input"
        value="${candidate.rank ?? ''}"${disabled}></label>
      <button class="btn-accept" data-action="accept"${disabled}>accept</button>
      <button class="btn-edit" data-action="edit"${disabled}>edit</button>
      <button class="btn-discard" data-action="discard"${disabled}>discard</button>
    </div>`;
}

export function renderCandidateCard(
  candidate: Candidate,
  itemState: string,
): string {
  const badges = [candidate.origin, candidate.status]
    .map((b) => `<span class="badge badge-${escapeHtml(b)}">${escapeHtml(b)}</span>`)
    .join(' ');
  return `<div class="candidate-card candidate-${escapeHtml(candidate.status)}"
     data-candidate-id="${escapeHtml(candidate.candidate_id)}">
  <div class="candidate-meta">${badges}</div>
  <p class="candidate-text">${escapeHtml(candidate.text)}</p>
${candidateControls(candidate, itemState)}
</div>`;
}

export function renderAnnotationScreen(
  item: AnnotationItem,
  tables: TableDef[] = [],
): string {
  const cards = item.candidates
    .map((c) => renderCandidateCard(c, item.state))
    .join('\n');
  const notes =
    item.refinement_notes.length > 0
      ? `<ul class="refinement-notes">${item.refinement_notes
          .map((n) => `<li>${escapeHtml(n)}</li>`)
          .join('')}</ul>`
      : '';
  const ctx = item.cte_name
    ? `<p class="cte-context">decomposition step <code>${escapeHtml(item.cte_name)}</code></p>`
    : '';
  const refineDisabled =
    item.state === 'accepted' || item.state === 'discarded' ? ' disabled' : '';
  const sidebar = tables.length > 0 ? renderSchemaSidebar(tables) + '\n' : '';
  return `<section class="annotation-screen" data-item-id="${escapeHtml(item.item_id)}"
         data-state="${escapeHtml(item.state)}">
${sidebar}  <div class="annotation-main">
    <pre class="sql-block"><code>${escapeHtml(item.sql)}</code></pre>
${ctx}${notes}
    <div class="candidates">
${cards}
    </div>
    <div class="refine-bar">
      <input type="text" class="refine-note" placeholder="what should change?"${refineDisabled}>
      <button class="btn-refine" data-action="refine"${refineDisabled}>refine</button>
    </div>
  </div>
</section>`;
}

// --- review screen -------------------------------------------------------------

const LEVELS = [1, 2, 3, 4, 5] as const;

export function histogramCounts(report: EvalReport): number[] {
  return LEVELS.map((level) => report.aggregates.level_histogram[String(level)] ?? 0);
}

export function renderHistogram(report: EvalReport): string {
  const counts = histogramCounts(report);
  const max = Math.max(1, ...counts);
  const rows = LEVELS.map((level, i) => {
    const count = counts[i];
    const width = Math.round((count / max) * 100);
    return `  <div class="histogram-row" data-level="${level}" data-count="${count}">
    <span class="histogram-label">L${level}</span>
    <span class="histogram-bar" style="width:${width}%"></span>
    <span class="histogram-count">${count}</span>
  </div>`;
  }).join('\n');
  return `<div class="histogram">\n${rows}\n</div>`;
}

function levelOverrideSelect(entry: ItemEval): string {
  const options = LEVELS.map((level) => {
    const selected = level === entry.rubric.level ? ' selected' : '';
    return `<option value="${level}"${selected}>${level}</option>`;
  }).join('');
  return `<select class="level-override" data-item-id="${escapeHtml(entry.item_id)}">${options}</select>`;
}

export function renderReviewScreen(report: EvalReport): string {
  const { aggregates } = report;
  const pct = (x: number | null) => (x === null ? 'n/a' : x.toFixed(3));
  const rows = report.items
    .map((entry) => {
      const overridden = entry.rubric.overridden_by
        ? ` <span class="badge badge-overridden">overridden</span>`
        : '';
      return `    <tr data-item-id="${escapeHtml(entry.item_id)}">
      <td><code>${escapeHtml(entry.sql)}</code></td>
      <td>${escapeHtml(entry.question)}</td>
      <td><code>${escapeHtml(entry.regenerated_sql)}</code></td>
      <td class="rubric-cell">${levelOverrideSelect(entry)}${overridden}
        <span class="rubric-reason">${escapeHtml(entry.rubric.reason)}</span></td>
      <td>${entry.exec_match ? 'yes' : 'no'}</td>
    </tr>`;
    })
    .join('\n');
  return `<section class="review-screen">
  <div class="review-aggregates">
    <span>items: ${aggregates.item_count}</span>
    <span>execution accuracy: ${pct(aggregates.execution_accuracy)}</span>
    <span>mean BLEU: ${pct(aggregates.mean_bleu)}</span>
    <span>mean ROUGE-L: ${pct(aggregates.mean_rouge_l)}</span>
  </div>
${renderHistogram(report)}
  <table class="review-table">
    <thead><tr><th>SQL</th><th>question</th><th>regenerated</th>
      <th>rubric</th><th>exec</th></tr></thead>
    <tbody>
${rows}
    </tbody>
  </table>
</section>`;
}

export function renderError(message: string): string {
  return `<p class="error-banner">${escapeHtml(message)}</p>`;
}
