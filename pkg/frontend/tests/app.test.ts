// Scripted review session against the fixture API server: compose a run,
// edit one planned query, start the pipeline, toggle the relevance filter,
// label an item, and export. The server is the real FastAPI app over the
// deterministic offline pipeline from the package test suite.

import { spawn } from 'node:child_process';
import type { ChildProcess } from 'node:child_process';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { initApp } from '../src/app.js';
import type { App } from '../src/app.js';

const HERE = dirname(fileURLToPath(import.meta.url));
const PORT = 8700 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let serverLog = '';

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 30000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/openapi.json`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await sleep(200);
  }
  throw new Error(`fixture server did not start\n${serverLog}`);
}

beforeAll(async () => {
  server = spawn('python3', [join(HERE, 'fixture_server.py'), String(PORT)], {
    stdio: ['ignore', 'pipe', 'pipe'],
  });
  server.stdout?.on('data', (chunk: Buffer) => {
    serverLog += chunk.toString();
  });
  server.stderr?.on('data', (chunk: Buffer) => {
    serverLog += chunk.toString();
  });
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing element #${id}`);
  return element as T;
}

function setValue(element: HTMLInputElement | HTMLTextAreaElement, value: string) {
  element.value = value;
  element.dispatchEvent(new Event('input', { bubbles: true }));
}

function tableRows(): HTMLTableRowElement[] {
  return Array.from(document.querySelectorAll('#results-table tbody tr'));
}

describe('scripted review session', () => {
  const api = new ApiClient(BASE);
  let app: App;
  let runId: string;

  it('composes a run with advanced options collapsed by default', async () => {
    document.body.innerHTML = '<div id="app"></div>';
    app = initApp(byId('app'), new ApiClient(BASE), { pollIntervalMs: 10 });
    expect(app.state.screen).toBe('compose');

    const advanced = byId<HTMLDetailsElement>('advanced');
    expect(advanced.open).toBe(false);

    setValue(
      byId<HTMLTextAreaElement>('prompt'),
      'flaky test detection in continuous integration',
    );
    setValue(byId<HTMLInputElement>('query-count'), '2');
    advanced.open = true;
    setValue(byId<HTMLInputElement>('embedding-model'), 'toy-embedding');
    byId<HTMLSelectElement>('embedding-dims').value = '512';

    byId('compose-submit').click();
    await app.flush();

    expect(app.state.screen).toBe('query_review');
    runId = app.state.runId as string;
    expect(runId).toBeTruthy();
  });

  it('shows one editable query per source', () => {
    const rows = document.querySelectorAll('.query-row');
    expect(rows.length).toBe(2);
    const badges = Array.from(
      document.querySelectorAll('.query-row .source-badge'),
      (badge) => badge.textContent,
    );
    expect(new Set(badges)).toEqual(new Set(['github_repos', 'stackoverflow']));
  });

  it('saves an edited query and runs the pipeline against it', async () => {
    const inputs = Array.from(
      document.querySelectorAll<HTMLInputElement>('.query-terms'),
    );
    const rows = Array.from(document.querySelectorAll('.query-row'));
    const soIndex = rows.findIndex((row) =>
      row.querySelector('.source-badge')?.textContent?.includes('stackoverflow'),
    );
    expect(soIndex).toBeGreaterThanOrEqual(0);
    setValue(inputs[soIndex], 'edited flaky detection');

    byId('review-start').click();
    await app.flush();

    expect(app.state.screen).toBe('results');
    const run = await api.getRun(runId);
    expect(run.status).toBe('complete');
    expect(run.counts.fetched).toBe(4);
    expect(run.counts.predicted_relevant).toBe(2);
  });

  it('persisted the edit with a user_edited origin', async () => {
    const bundle = await api.getQueries(runId);
    const so = bundle.queries.find((q) => q.source === 'stackoverflow');
    const gh = bundle.queries.find((q) => q.source === 'github_repos');
    expect(so?.terms).toEqual(['edited flaky detection']);
    expect(so?.origin).toBe('user_edited');
    expect(gh?.origin).toBe('template_fallback');
  });

  it('renders the relevant-only view matching the API row count', async () => {
    expect(app.state.view).toBe('relevant_only');
    const fromApi = await api.getResults(runId, { view: 'relevant_only' });
    expect(tableRows().length).toBe(fromApi.total);
    expect(fromApi.total).toBe(2);
  });

  it('toggling to all shows every item, in the API rank order', async () => {
    byId('view-all').click();
    await app.flush();

    const fromApi = await api.getResults(runId, { view: 'all' });
    const rows = tableRows();
    expect(rows.length).toBe(fromApi.total);
    expect(fromApi.total).toBe(4);

    const renderedIds = rows.map((row) => row.dataset.itemId);
    expect(renderedIds).toEqual(fromApi.results.map((r) => r.item_id));
    const renderedRanks = rows.map(
      (row) => row.querySelector('.cell-rank')?.textContent?.trim(),
    );
    expect(renderedRanks).toEqual(fromApi.results.map((r) => String(r.rank)));
  });

  it('toggling back to relevant-only shrinks the table again', async () => {
    byId('view-relevant-only').click();
    await app.flush();
    expect(tableRows().length).toBe(2);
  });

  it('labels an item and the label persists on the server', async () => {
    const row = tableRows()[0];
    const itemId = row.dataset.itemId as string;
    row.querySelector<HTMLElement>('.label-relevant')?.click();
    await app.flush();

    const updated = tableRows()[0];
    expect(updated.querySelector('.label-state')?.textContent).toBe('relevant');

    const exported = await api.exportRun(runId, 'jsonl');
    const labelLines = exported
      .trim()
      .split('\n')
      .map((line) => JSON.parse(line) as Record<string, unknown>)
      .filter((record) => record.type === 'label');
    expect(labelLines.length).toBe(1);
    expect(labelLines[0].item_id).toBe(itemId);
    expect(labelLines[0].label).toBe('relevant');
  });

  it('exports the run as CSV, byte-equal to the API response', async () => {
    byId('export-csv').click();
    await app.flush();

    expect(app.lastExport?.format).toBe('csv');
    expect(app.lastExport?.content.startsWith('rank,score,predicted')).toBe(
      true,
    );
    const fromApi = await api.exportRun(runId, 'csv');
    expect(app.lastExport?.content).toBe(fromApi);
  });

  it('surfaces API errors as a notice instead of crashing', async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const broken = initApp(
      byId('app'),
      new ApiClient(`${BASE}/missing-prefix`),
      { pollIntervalMs: 10 },
    );
    setValue(byId<HTMLTextAreaElement>('prompt'), 'anything');
    byId('compose-submit').click();
    await broken.flush();
    expect(broken.state.screen).toBe('compose');
    expect(byId('notice').textContent).toContain('Not Found');
  });
});
