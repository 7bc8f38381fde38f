// Single-page client for the search service: compose an intent, review and
// edit the planned queries, watch the run progress, then explore, label,
// and export the ranked results. All server state changes go through the
// documented API endpoints and rendered rank order is the API's order.

import { ApiClient } from './api.js';
import type {
  QueryBundleDocument,
  QueryDocument,
  ResultsPage,
  ResultsView,
  RunDocument,
  Screen,
} from './types.js';
import { SOURCES, VALID_EMBEDDING_DIMS } from './types.js';
import { parseList, validateCompose } from './validate.js';
import type { ComposeForm } from './validate.js';

export interface ViewState {
  screen: Screen;
  runId: string | null;
  view: ResultsView;
  sourceFilter: string; // '' means all sources
  offset: number;
  selection: string | null; // item id highlighted for labeling
}

export interface AppOptions {
  pollIntervalMs?: number;
  pageSize?: number;
}

export interface App {
  state: ViewState;
  readonly lastExport: { format: string; content: string } | null;
  flush(): Promise<void>;
}

interface QueryDraft {
  source: string;
  termsText: string;
  qualifiersText: string;
  fieldTargets: string[];
  origin: string;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export function initApp(
  root: HTMLElement,
  api: ApiClient,
  options: AppOptions = {},
): App {
  const pollIntervalMs = options.pollIntervalMs ?? 1500;
  const pageSize = options.pageSize ?? 50;
  const doc = root.ownerDocument;

  const state: ViewState = {
    screen: 'compose',
    runId: null,
    view: 'relevant_only',
    sourceFilter: '',
    offset: 0,
    selection: null,
  };

  let run: RunDocument | null = null;
  let bundle: QueryBundleDocument | null = null;
  let drafts: QueryDraft[] = [];
  let page: ResultsPage | null = null;
  const labels = new Map<string, string>();
  let lastExport: { format: string; content: string } | null = null;

  // Remembered compose form values so re-renders do not lose input.
  const form: ComposeForm = {
    prompt: '',
    sources: ['github_repos', 'stackoverflow'],
    queryCount: 4,
    dateStart: '',
    dateEnd: '',
    languages: [],
    llmTemperature: 0,
    embeddingModelId: 'text-embedding-3-small',
    embeddingDims: 1536,
  };
  let llmModelId = 'gpt-4o';

  // Mutating actions run one at a time; flush() resolves once the chain,
  // including any progress polling, has settled.
  let queue: Promise<void> = Promise.resolve();

  function enqueue(task: () => Promise<void>): void {
    queue = queue.then(task).catch((error: unknown) => {
      const message = error instanceof Error ? error.message : String(error);
      showNotice(message, task);
    });
  }

  function showNotice(message: string, retry?: () => Promise<void>): void {
    const notice = doc.getElementById('notice');
    if (!notice) return;
    notice.innerHTML = `
      <span class="notice-text">${escapeHtml(message)}</span>
      ${retry ? '<button id="notice-retry">Retry</button>' : ''}
      <button id="notice-dismiss">Dismiss</button>
    `;
    doc.getElementById('notice-dismiss')?.addEventListener('click', () => {
      notice.innerHTML = '';
    });
    if (retry) {
      doc.getElementById('notice-retry')?.addEventListener('click', () => {
        notice.innerHTML = '';
        enqueue(retry);
      });
    }
  }

  // ----- compose ------------------------------------------------------

  function renderCompose(): void {
    const sourceBoxes = SOURCES.map(
      (source) => `
        <label class="source-choice">
          <input type="checkbox" class="source-box" value="${source}"
                 ${form.sources.includes(source) ? 'checked' : ''}>
          ${source}
        </label>`,
    ).join('');
    const dimOptions = VALID_EMBEDDING_DIMS.map(
      (dims) => `
        <option value="${dims}" ${dims === form.embeddingDims ? 'selected' : ''}>
          ${dims}
        </option>`,
    ).join('');
    setScreen(`
      <section id="compose-screen">
        <h2>New search</h2>
        <label for="prompt">What are you looking for?</label>
        <textarea id="prompt" rows="3">${escapeHtml(form.prompt)}</textarea>
        <fieldset id="sources">${sourceBoxes}</fieldset>
        <label for="query-count">Queries to generate</label>
        <input id="query-count" type="number" min="1" value="${form.queryCount}">
        <details id="advanced">
          <summary>Advanced options</summary>
          <label for="llm-model">LLM model</label>
          <input id="llm-model" value="${escapeHtml(llmModelId)}">
          <label for="llm-temperature">LLM temperature</label>
          <input id="llm-temperature" type="number" min="0" max="2" step="0.1"
                 value="${form.llmTemperature}">
          <label for="embedding-model">Embedding model</label>
          <input id="embedding-model" value="${escapeHtml(form.embeddingModelId)}">
          <label for="embedding-dims">Embedding dimensions</label>
          <select id="embedding-dims">${dimOptions}</select>
          <label for="date-start">Created after</label>
          <input id="date-start" type="date" value="${form.dateStart}">
          <label for="date-end">Created before</label>
          <input id="date-end" type="date" value="${form.dateEnd}">
          <label for="languages">Languages (comma separated)</label>
          <input id="languages" value="${escapeHtml(form.languages.join(', '))}">
        </details>
        <ul id="compose-errors"></ul>
        <button id="compose-submit">Plan queries</button>
      </section>
    `);
    doc.getElementById('compose-submit')?.addEventListener('click', submitCompose);
  }

  function readComposeForm(): void {
    const value = (id: string) =>
      (doc.getElementById(id) as HTMLInputElement | HTMLTextAreaElement).value;
    form.prompt = value('prompt');
    form.sources = Array.from(
      root.querySelectorAll<HTMLInputElement>('.source-box:checked'),
    ).map((box) => box.value);
    form.queryCount = Number(value('query-count'));
    llmModelId = value('llm-model');
    form.llmTemperature = Number(value('llm-temperature'));
    form.embeddingModelId = value('embedding-model');
    form.embeddingDims = Number(value('embedding-dims'));
    form.dateStart = value('date-start');
    form.dateEnd = value('date-end');
    form.languages = parseList(value('languages'));
  }

  function submitCompose(): void {
    readComposeForm();
    const problems = validateCompose(form);
    const list = doc.getElementById('compose-errors');
    if (list) {
      list.innerHTML = problems
        .map((p) => `<li class="form-error">${escapeHtml(p)}</li>`)
        .join('');
    }
    if (problems.length > 0) return;
    enqueue(async () => {
      const created = await api.createRun({
        prompt: form.prompt,
        options: {
          sources: form.sources,
          query_count: form.queryCount,
          llm_model_id: llmModelId,
          llm_temperature: form.llmTemperature,
          embedding_model_id: form.embeddingModelId,
          embedding_dims: form.embeddingDims,
          ...(form.dateStart && form.dateEnd
            ? { date_range: [form.dateStart, form.dateEnd] as [string, string] }
            : {}),
          ...(form.languages.length > 0 ? { languages: form.languages } : {}),
        },
      });
      run = created;
      state.runId = created.run_id;
      bundle = await api.getQueries(created.run_id);
      drafts = bundle.queries.map((q) => ({
        source: q.source,
        termsText: q.terms.join(', '),
        qualifiersText: JSON.stringify(q.qualifiers),
        fieldTargets: q.field_targets,
        origin: q.origin,
      }));
      state.screen = 'query_review';
      render();
    });
  }

  // ----- query review -------------------------------------------------

  function renderQueryReview(): void {
    const rows = drafts
      .map(
        (draft, index) => `
        <li class="query-row" data-index="${index}">
          <span class="source-badge">${draft.source}</span>
          <span class="query-origin">${draft.origin}</span>
          <label>Terms
            <input class="query-terms" data-index="${index}"
                   value="${escapeHtml(draft.termsText)}">
          </label>
          <label>Qualifiers (JSON)
            <input class="query-qualifiers" data-index="${index}"
                   value="${escapeHtml(draft.qualifiersText)}">
          </label>
          <button class="query-delete" data-index="${index}">Remove</button>
        </li>`,
      )
      .join('');
    setScreen(`
      <section id="query-review-screen">
        <h2>Review queries</h2>
        <ol id="query-list">${rows}</ol>
        <button id="review-start">Save and start</button>
      </section>
    `);
    root.querySelectorAll<HTMLInputElement>('.query-terms').forEach((input) => {
      input.addEventListener('input', () => {
        drafts[Number(input.dataset.index)].termsText = input.value;
      });
    });
    root
      .querySelectorAll<HTMLInputElement>('.query-qualifiers')
      .forEach((input) => {
        input.addEventListener('input', () => {
          drafts[Number(input.dataset.index)].qualifiersText = input.value;
        });
      });
    root.querySelectorAll<HTMLElement>('.query-delete').forEach((button) => {
      button.addEventListener('click', () => {
        drafts.splice(Number(button.dataset.index), 1);
        render();
      });
    });
    doc.getElementById('review-start')?.addEventListener('click', startRun);
  }

  function draftsToQueries(): QueryDocument[] {
    return drafts.map((draft, index) => {
      let qualifiers: Record<string, unknown>;
      try {
        qualifiers = JSON.parse(draft.qualifiersText || '{}');
      } catch {
        throw new Error(`Query ${index + 1}: qualifiers are not valid JSON.`);
      }
      return {
        source: draft.source,
        terms: parseList(draft.termsText),
        field_targets: draft.fieldTargets,
        qualifiers,
        origin: draft.origin,
      };
    });
  }

  function startRun(): void {
    if (!bundle || !state.runId) return;
    let queries: QueryDocument[];
    try {
      queries = draftsToQueries();
    } catch (error) {
      showNotice(error instanceof Error ? error.message : String(error));
      return;
    }
    const runId = state.runId;
    const document: QueryBundleDocument = { ...bundle, queries };
    enqueue(async () => {
      bundle = await api.putQueries(runId, document);
      state.screen = 'progress';
      render();
      await api.startRun(runId);
      await pollUntilDone(runId);
    });
  }

  // ----- progress -----------------------------------------------------

  const STAGES = ['planning', 'fetching', 'classifying', 'complete'] as const;

  function renderProgress(): void {
    const stamps = run?.stage_timestamps ?? {};
    const items = STAGES.map((stage) => {
      const done = stage in stamps;
      return `
        <li class="stage ${done ? 'stage-done' : 'stage-pending'}">
          ${stage}${done ? ` at ${stamps[stage]}` : ''}
        </li>`;
    }).join('');
    const failure = run?.failure
      ? `<p id="run-failure">${escapeHtml(run.failure)}</p>`
      : '';
    setScreen(`
      <section id="progress-screen">
        <h2>Run ${escapeHtml(state.runId ?? '')}</h2>
        <ul id="stage-list">${items}</ul>
        <p id="progress-counts">
          fetched ${run?.counts.fetched ?? 0},
          after dedup ${run?.counts.after_dedup ?? 0},
          predicted relevant ${run?.counts.predicted_relevant ?? 0}
        </p>
        ${failure}
      </section>
    `);
  }

  async function pollUntilDone(runId: string): Promise<void> {
    for (;;) {
      run = await api.getRun(runId);
      if (run.status === 'complete') {
        state.screen = 'results';
        state.offset = 0;
        await loadResults();
        render();
        return;
      }
      if (run.status === 'failed') {
        render();
        showNotice(run.failure ?? 'run failed');
        return;
      }
      render();
      await sleep(pollIntervalMs);
    }
  }

  // ----- results ------------------------------------------------------

  async function loadResults(): Promise<void> {
    if (!state.runId) return;
    page = await api.getResults(state.runId, {
      view: state.view,
      source: state.sourceFilter || undefined,
      offset: state.offset,
      limit: pageSize,
    });
  }

  function labelCell(itemId: string): string {
    const current = labels.get(itemId);
    return `
      <span class="label-state">${current ?? ''}</span>
      <button class="label-relevant" data-item-id="${itemId}">relevant</button>
      <button class="label-irrelevant" data-item-id="${itemId}">irrelevant</button>
    `;
  }

  function renderResults(): void {
    const rows = (page?.results ?? [])
      .map(
        (row) => `
        <tr class="result-row ${
          state.selection === row.item_id ? 'selected' : ''
        }" data-item-id="${row.item_id}">
          <td class="cell-rank">${row.rank}</td>
          <td class="cell-score">${row.score.toFixed(4)}</td>
          <td class="cell-title">
            <a href="${escapeHtml(row.url)}" target="_blank" rel="noopener">
              ${escapeHtml(row.title)}
            </a>
          </td>
          <td class="cell-snippet">${escapeHtml(row.snippet)}</td>
          <td class="cell-source">
            <span class="source-badge">${row.source}</span>
          </td>
          <td class="cell-prediction">${row.prediction.label}</td>
          <td class="cell-label">${labelCell(row.item_id)}</td>
        </tr>`,
      )
      .join('');
    const total = page?.total ?? 0;
    const from = total === 0 ? 0 : state.offset + 1;
    const to = Math.min(state.offset + pageSize, total);
    const sourceOptions = ['', ...SOURCES]
      .map(
        (source) => `
        <option value="${source}" ${
          source === state.sourceFilter ? 'selected' : ''
        }>${source || 'all sources'}</option>`,
      )
      .join('');
    setScreen(`
      <section id="results-screen">
        <h2>Results</h2>
        <div id="view-toggle">
          <button id="view-relevant-only" class="${
            state.view === 'relevant_only' ? 'active' : ''
          }">relevant only</button>
          <button id="view-all" class="${
            state.view === 'all' ? 'active' : ''
          }">all</button>
          <select id="source-filter">${sourceOptions}</select>
        </div>
        <table id="results-table">
          <thead>
            <tr>
              <th>rank</th><th>score</th><th>title</th><th>snippet</th>
              <th>source</th><th>predicted</th><th>label</th>
            </tr>
          </thead>
          <tbody>${rows}</tbody>
        </table>
        <div id="pager">
          <button id="page-prev" ${state.offset === 0 ? 'disabled' : ''}>
            previous
          </button>
          <span id="page-info">${from}-${to} of ${total}</span>
          <button id="page-next" ${to >= total ? 'disabled' : ''}>next</button>
        </div>
        <div id="export-buttons">
          <button id="export-jsonl">Export JSONL</button>
          <button id="export-csv">Export CSV</button>
        </div>
      </section>
    `);
    doc.getElementById('view-relevant-only')?.addEventListener('click', () => {
      switchView('relevant_only');
    });
    doc.getElementById('view-all')?.addEventListener('click', () => {
      switchView('all');
    });
    doc.getElementById('source-filter')?.addEventListener('change', (event) => {
      state.sourceFilter = (event.target as HTMLSelectElement).value;
      state.offset = 0;
      enqueue(async () => {
        await loadResults();
        render();
      });
    });
    doc.getElementById('page-prev')?.addEventListener('click', () => {
      state.offset = Math.max(0, state.offset - pageSize);
      enqueue(async () => {
        await loadResults();
        render();
      });
    });
    doc.getElementById('page-next')?.addEventListener('click', () => {
      state.offset += pageSize;
      enqueue(async () => {
        await loadResults();
        render();
      });
    });
    root.querySelectorAll<HTMLElement>('.label-relevant').forEach((button) => {
      button.addEventListener('click', () => {
        submitLabel(button.dataset.itemId as string, 'relevant');
      });
    });
    root
      .querySelectorAll<HTMLElement>('.label-irrelevant')
      .forEach((button) => {
        button.addEventListener('click', () => {
          submitLabel(button.dataset.itemId as string, 'irrelevant');
        });
      });
    doc.getElementById('export-jsonl')?.addEventListener('click', () => {
      exportRun('jsonl');
    });
    doc.getElementById('export-csv')?.addEventListener('click', () => {
      exportRun('csv');
    });
  }

  function switchView(view: ResultsView): void {
    state.view = view;
    state.offset = 0;
    enqueue(async () => {
      await loadResults();
      render();
    });
  }

  function submitLabel(itemId: string, label: string): void {
    if (!state.runId) return;
    const runId = state.runId;
    state.selection = itemId;
    enqueue(async () => {
      const record = await api.submitLabel(runId, itemId, label);
      labels.set(itemId, record.label);
      render();
    });
  }

  function exportRun(format: 'jsonl' | 'csv'): void {
    if (!state.runId) return;
    const runId = state.runId;
    enqueue(async () => {
      const content = await api.exportRun(runId, format);
      lastExport = { format, content };
      downloadFile(`run-${runId}.${format}`, content);
    });
  }

  function downloadFile(name: string, content: string): void {
    // jsdom has no object URLs; remember the export and skip the download
    if (typeof URL.createObjectURL !== 'function') return;
    const blob = new Blob([content], { type: 'text/plain' });
    const anchor = doc.createElement('a');
    anchor.href = URL.createObjectURL(blob);
    anchor.download = name;
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  }

  // ----- shell --------------------------------------------------------

  function setScreen(inner: string): void {
    root.innerHTML = `<div id="notice"></div>${inner}`;
  }

  function render(): void {
    switch (state.screen) {
      case 'compose':
        renderCompose();
        break;
      case 'query_review':
        renderQueryReview();
        break;
      case 'progress':
        renderProgress();
        break;
      case 'results':
        renderResults();
        break;
    }
  }

  render();
  return {
    state,
    get lastExport() {
      return lastExport;
    },
    flush() {
      return queue;
    },
  };
}
