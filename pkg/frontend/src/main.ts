// SPA bootstrap: wires the pure renderers and actions onto the page.
// Everything stateful lives here; render.ts and actions.ts stay pure.

import { ApiClient, ApiError } from './api';
import {
  acceptCandidate,
  discardCandidate,
  submitRefine,
} from './actions';
import {
  renderAnnotationScreen,
  renderError,
  renderProjectList,
  renderReviewScreen,
} from './render';
import type { AnnotationItem, Project } from './types';

interface AppState {
  annotatorId: string;
  project: Project | null;
  item: AnnotationItem | null;
}

function getApp(): HTMLElement {
  const el = document.getElementById('app');
  if (!el) throw new Error('missing #app mount point');
  return el;
}

export function createUi(api: ApiClient, root: HTMLElement) {
  const state: AppState = {
    annotatorId: localStorage.getItem('annotator_id') ?? 'anonymous',
    project: null,
    item: null,
  };

  function show(html: string): void {
    root.innerHTML = html;
  }

  async function showProjects(): Promise<void> {
    const projects = await api.listProjects();
    show(renderProjectList(projects));
    root.querySelectorAll<HTMLElement>('[data-project-id]').forEach((el) => {
      el.addEventListener('click', () => {
        void openProject(el.dataset.projectId!);
      });
    });
  }

  async function openProject(projectId: string): Promise<void> {
    state.project = await api.getProject(projectId);
    await nextItem();
  }

  async function nextItem(): Promise<void> {
    if (!state.project) return;
    try {
      state.item = await api.next(state.project.project_id, state.annotatorId);
    } catch (err) {
      if (err instanceof ApiError && err.code === 'queue_empty') {
        show('<p class="empty">Queue empty — every item is resolved.</p>');
        return;
      }
      throw err;
    }
    showItem();
  }

  function showItem(): void {
    if (!state.item) return;
    const tables = state.project?.schema?.tables ?? [];
    show(renderAnnotationScreen(state.item, tables));
    wireAnnotationHandlers();
  }

  function wireAnnotationHandlers(): void {
    const item = state.item!;
    root.querySelectorAll<HTMLElement>('.candidate-card').forEach((card) => {
      const candidateId = card.dataset.candidateId!;
      card.querySelector('[data-action="accept"]')?.addEventListener(
        'click',
        () => void resolve(acceptCandidate(api, item.item_id, state.annotatorId, candidateId), true),
      );
      card.querySelector('[data-action="discard"]')?.addEventListener(
        'click',
        () => void resolve(discardCandidate(api, item.item_id, state.annotatorId, candidateId)),
      );
    });
    root.querySelector('[data-action="refine"]')?.addEventListener('click', () => {
      const input = root.querySelector<HTMLInputElement>('.refine-note');
      const note = input?.value.trim() ?? '';
      if (!note) return;
      void resolve(submitRefine(api, item.item_id, state.annotatorId, note));
    });
  }

  async function resolve(
    pending: Promise<import('./actions').ActionResult>,
    advance = false,
  ): Promise<void> {
    const result = await pending;
    if (result.kind === 'conflict') {
      show(renderError(result.message));
      return;
    }
    state.item = result.item;
    if (advance) {
      await nextItem();
    } else {
      showItem();
    }
  }

  async function showReview(projectId: string, dbDir: string): Promise<void> {
    const report = await api.evaluate(projectId, dbDir);
    show(renderReviewScreen(report));
  }

  return { showProjects, openProject, nextItem, showReview, state };
}

export function bootstrap(): void {
  const params = new URLSearchParams(location.search);
  const api = new ApiClient({
    baseUrl: params.get('api') ?? '',
    token: localStorage.getItem('api_token') ?? '',
  });
  const ui = createUi(api, getApp());
  void ui.showProjects().catch((err) => {
    getApp().innerHTML = renderError(String(err));
  });
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  bootstrap();
}
