/**
 * Explorer application: pick columns, watch the join plan update, run the
 * query, and read the rows.
 *
 * The app owns three panels. The tables panel lists every table with a
 * checkbox per column. The plan panel re-plans on every selection change
 * (debounced) and renders each surviving sequence as arrow chains. The
 * results panel appears after Run and shows one grid per executed query.
 */

import { ApiClient, ApiError } from './api.js';
import type { PlanResponse, QueryResult, TableInfo } from './api.js';
import { formatSequence, formatStep } from './chains.js';
import { toCsv } from './csv.js';
import { debounce } from './debounce.js';
import { Selection, Sequencer } from './state.js';

export interface AppOptions {
  client: ApiClient;
  /** Quiet time before a selection change triggers planning. */
  planDebounceMs?: number;
}

/** Handle returned by mountApp; tests drive refresh and run directly. */
export interface App {
  readonly selection: Selection;
  refresh(): Promise<void>;
  run(): Promise<void>;
}

const POLICIES = ['all', 'union_distinct', 'most_rows', 'prefer_mandatory'];
const JOIN_TYPES = ['inner', 'left'];

export async function mountApp(root: HTMLElement, options: AppOptions): Promise<App> {
  const client = options.client;
  const selection = new Selection();
  const planRequests = new Sequencer();
  const queryRequests = new Sequencer();
  const labels = new Map<string, string>();

  root.innerHTML = `
    <header>
      <h1>autojoin explorer</h1>
      <p class="status" data-role="status"></p>
    </header>
    <main>
      <section class="tables" data-role="tables"></section>
      <section class="plan-panel">
        <h2>Join plan</h2>
        <div class="plan" data-role="plan"></div>
        <div class="controls">
          <label>policy <select data-role="policy"></select></label>
          <label>join <select data-role="join-type"></select></label>
          <button type="button" data-role="run" disabled>Run query</button>
        </div>
      </section>
      <section class="results" data-role="results"></section>
    </main>
  `;

  const status = mustFind(root, 'status');
  const tablesPanel = mustFind(root, 'tables');
  const planPanel = mustFind(root, 'plan');
  const resultsPanel = mustFind(root, 'results');
  const policySelect = mustFind(root, 'policy') as HTMLSelectElement;
  const joinSelect = mustFind(root, 'join-type') as HTMLSelectElement;
  const runButton = mustFind(root, 'run') as HTMLButtonElement;

  fillOptions(policySelect, POLICIES);
  fillOptions(joinSelect, JOIN_TYPES);

  const label = (table: string): string => labels.get(table) ?? table;

  const setStatus = (text: string, isError = false): void => {
    status.textContent = text;
    status.classList.toggle('error', isError);
  };

  const showError = (error: unknown): void => {
    if (error instanceof ApiError) {
      setStatus(`${error.code}: ${error.message}`, true);
    } else {
      setStatus(error instanceof Error ? error.message : String(error), true);
    }
  };

  const renderPlan = (plan: PlanResponse): void => {
    planPanel.replaceChildren();
    if (plan.sequences.length === 0) {
      const message = el('p', 'infeasible');
      message.textContent = `${plan.targets.map(label).join(', ')} are not joinable`;
      planPanel.append(message);
      runButton.disabled = true;
      return;
    }
    const caption = el('p', 'plan-caption');
    caption.textContent =
      plan.sequences.length === 1 ? '1 sequence' : `${plan.sequences.length} sequences`;
    planPanel.append(caption);
    for (const sequence of plan.sequences) {
      const block = el('div', 'sequence');
      const chain = el('div', 'chain');
      chain.textContent = formatSequence(sequence, label);
      block.append(chain);
      const steps = document.createElement('ol');
      steps.className = 'steps';
      for (const step of sequence.steps) {
        const item = document.createElement('li');
        item.textContent = formatStep(step);
        steps.append(item);
      }
      block.append(steps);
      planPanel.append(block);
    }
    runButton.disabled = false;
  };

  const refresh = async (): Promise<void> => {
    const token = planRequests.next();
    resultsPanel.replaceChildren();
    if (selection.isEmpty) {
      planPanel.replaceChildren();
      planPanel.textContent = 'select columns to plan a join';
      runButton.disabled = true;
      return;
    }
    try {
      const plan = await client.plan(selection.targets);
      if (!planRequests.isCurrent(token)) {
        return;
      }
      setStatus('');
      renderPlan(plan);
    } catch (error) {
      if (planRequests.isCurrent(token)) {
        showError(error);
      }
    }
  };

  const run = async (): Promise<void> => {
    const token = queryRequests.next();
    try {
      const response = await client.query({
        select: selection.columns,
        policy: policySelect.value,
        join_type: joinSelect.value,
      });
      if (!queryRequests.isCurrent(token)) {
        return;
      }
      setStatus('');
      resultsPanel.replaceChildren();
      for (const result of response.results) {
        resultsPanel.append(renderResult(result, label));
      }
    } catch (error) {
      if (queryRequests.isCurrent(token)) {
        showError(error);
      }
    }
  };

  const scheduleRefresh = debounce(() => {
    void refresh();
  }, options.planDebounceMs ?? 150);

  tablesPanel.addEventListener('change', (event) => {
    const input = event.target as HTMLInputElement | null;
    if (!input || input.type !== 'checkbox' || !input.dataset.ref) {
      return;
    }
    selection.toggle(input.dataset.ref, input.checked);
    scheduleRefresh();
  });

  runButton.addEventListener('click', () => {
    void run();
  });

  setStatus('loading tables');
  try {
    const response = await client.tables();
    for (const table of response.tables) {
      if (table.alias) {
        labels.set(table.name, table.alias);
      }
    }
    tablesPanel.replaceChildren(...response.tables.map(renderTableCard));
    setStatus('');
  } catch (error) {
    showError(error);
  }
  planPanel.textContent = 'select columns to plan a join';

  return { selection, refresh, run };
}

function renderTableCard(table: TableInfo): HTMLElement {
  const card = document.createElement('fieldset');
  card.className = 'table-card';
  const legend = document.createElement('legend');
  const alias = el('span', 'alias');
  alias.textContent = table.alias ?? table.name;
  const name = el('span', 'name');
  name.textContent = table.alias ? table.name : '';
  const count = el('span', 'count');
  count.textContent = `${table.row_count} rows`;
  legend.append(alias, ' ', name, ' ', count);
  card.append(legend);
  for (const column of table.columns) {
    const row = document.createElement('label');
    row.className = 'column';
    const box = document.createElement('input');
    box.type = 'checkbox';
    box.dataset.ref = `${table.name}.${column.name}`;
    const text = el('span', 'column-name');
    text.textContent = column.name;
    row.append(box, text);
    if (column.class) {
      const badge = el('span', `class-badge ${column.class}`);
      badge.textContent = column.class;
      row.append(badge);
    }
    card.append(row);
  }
  return card;
}

function renderResult(result: QueryResult, label: (table: string) => string): HTMLElement {
  const block = el('div', 'result');
  const caption = el('p', 'result-caption');
  caption.textContent = result.sequences.map((s) => formatSequence(s, label)).join(' | ');
  const rowCount = el('p', 'row-count');
  rowCount.textContent = result.row_count === 1 ? '1 row' : `${result.row_count} rows`;
  block.append(caption, rowCount);

  const wrapper = el('div', 'grid');
  const table = document.createElement('table');
  const head = document.createElement('thead');
  const headRow = document.createElement('tr');
  for (const column of result.columns) {
    const cell = document.createElement('th');
    cell.textContent = column;
    headRow.append(cell);
  }
  head.append(headRow);
  const body = document.createElement('tbody');
  for (const row of result.rows) {
    const tr = document.createElement('tr');
    for (const value of row) {
      const cell = document.createElement('td');
      cell.textContent = value === null || value === undefined ? '' : String(value);
      tr.append(cell);
    }
    body.append(tr);
  }
  table.append(head, body);
  wrapper.append(table);
  block.append(wrapper);

  const download = document.createElement('button');
  download.type = 'button';
  download.className = 'download';
  download.textContent = 'Download CSV';
  download.addEventListener('click', () => {
    const blob = new Blob([toCsv(result.columns, result.rows)], {
      type: 'text/csv;charset=utf-8',
    });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'results.csv';
    link.click();
    URL.revokeObjectURL(link.href);
  });
  block.append(download);
  return block;
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}

function mustFind(root: HTMLElement, role: string): HTMLElement {
  const node = root.querySelector<HTMLElement>(`[data-role="${role}"]`);
  if (!node) {
    throw new Error(`missing element with role ${role}`);
  }
  return node;
}

function fillOptions(select: HTMLSelectElement, values: string[]): void {
  for (const value of values) {
    const option = document.createElement('option');
    option.value = value;
    option.textContent = value.replace('_', ' ');
    select.append(option);
  }
}
