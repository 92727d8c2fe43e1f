/**
 * DOM glue for the review UI. All state lives in one object and the view
 * is re-rendered from it after every change; nothing is persisted.
 */

import { AnnotationClient } from './api.js';
import {
  buildSegments,
  classColor,
  contextWindow,
  kbView,
  validateEntities,
} from './annotations.js';
import { AnnotateResponse, Entity, EntityLink, KbChoice } from './types.js';

interface UiState {
  text: string;
  response: AnnotateResponse | null;
  entities: Entity[];
  selected: number | null;
  contextLength: number;
  kb: KbChoice;
  linkCache: Map<number, EntityLink>;
  status: string;
}

const state: UiState = {
  text: '',
  response: null,
  entities: [],
  selected: null,
  contextLength: 3,
  kb: 'snomed',
  linkCache: new Map(),
  status: 'paste a letter and press Annotate',
};

const client = new AnnotationClient('');

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const letterInput = $<HTMLTextAreaElement>('letter');
const fileInput = $<HTMLInputElement>('file');
const strategySelect = $<HTMLSelectElement>('strategy');
const annotateBtn = $<HTMLButtonElement>('annotate');
const statusEl = $('status');
const docEl = $('document');
const panelEl = $('entities');
const detailEl = $('detail');
const contextSlider = $<HTMLInputElement>('context-length');
const contextValue = $('context-value');

function setStatus(msg: string) {
  state.status = msg;
  statusEl.textContent = msg;
}

async function annotate() {
  const text = letterInput.value;
  if (!text.trim()) {
    setStatus('nothing to annotate');
    return;
  }
  setStatus('annotating…');
  try {
    const response = await client.annotate(text, strategySelect.value);
    state.text = text;
    state.response = response;
    state.entities = validateEntities(text, response.entities);
    state.selected = null;
    state.linkCache = new Map();
    setStatus(`${state.entities.length} entities (${response.model_ids.join(', ')})`);
    render();
  } catch (err) {
    if ((err as Error).name === 'AbortError') return; // superseded request
    setStatus(String(err));
  }
}

function renderDocument() {
  docEl.replaceChildren();
  if (!state.response) return;
  for (const segment of buildSegments(state.text, state.entities)) {
    if (segment.entity === null) {
      docEl.append(document.createTextNode(segment.text));
    } else {
      const mark = document.createElement('mark');
      mark.textContent = segment.text;
      mark.className = 'entity';
      mark.dataset.cls = segment.entity.class;
      mark.style.backgroundColor = classColor(segment.entity.class) + '44';
      mark.style.borderBottom = `2px solid ${classColor(segment.entity.class)}`;
      if (segment.entityIndex === state.selected) mark.classList.add('selected');
      const index = segment.entityIndex;
      mark.addEventListener('click', () => select(index));
      docEl.append(mark);
    }
  }
}

function renderPanel() {
  panelEl.replaceChildren();
  state.entities.forEach((entity, i) => {
    const row = document.createElement('li');
    row.className = i === state.selected ? 'selected' : '';
    const swatch = document.createElement('span');
    swatch.className = 'swatch';
    swatch.style.backgroundColor = classColor(entity.class);
    row.append(swatch, `${entity.text} · ${entity.class}`);
    row.addEventListener('click', () => select(i));
    panelEl.append(row);
  });
}

async function renderDetail() {
  detailEl.replaceChildren();
  if (state.selected === null || !state.response) {
    detailEl.textContent = 'select an entity to inspect it';
    return;
  }
  const entity = state.entities[state.selected];
  if (!entity) return;

  const title = document.createElement('h3');
  title.textContent = `${entity.text} (${entity.class})`;
  const snippet = document.createElement('blockquote');
  snippet.id = 'context-snippet';
  snippet.textContent = contextWindow(state.response.words, entity, state.contextLength);

  const kbRow = document.createElement('div');
  kbRow.className = 'kb-row';
  (['snomed', 'bnf'] as KbChoice[]).forEach((kb) => {
    const btn = document.createElement('button');
    btn.textContent = kb.toUpperCase();
    btn.className = kb === state.kb ? 'kb active' : 'kb';
    btn.addEventListener('click', () => {
      state.kb = kb;
      render();
    });
    kbRow.append(btn);
  });

  const linkEl = document.createElement('p');
  linkEl.id = 'kb-link';
  const link = entity.link ?? state.linkCache.get(state.selected) ?? null;
  const view = kbView(link, state.kb);
  if (view.url) {
    const anchor = document.createElement('a');
    anchor.href = view.url;
    anchor.target = '_blank';
    anchor.rel = 'noreferrer noopener';
    anchor.textContent = view.message;
    linkEl.append(anchor);
  } else {
    linkEl.textContent = view.message;
  }

  detailEl.append(title, snippet, kbRow, linkEl);

  if (link === null) {
    const selected = state.selected;
    try {
      const fetched = await client.link(entity.text, state.kb);
      state.linkCache.set(selected, fetched);
      if (state.selected === selected) render();
    } catch {
      linkEl.textContent = 'linking unavailable (no mapping table on the server?)';
    }
  }
}

function select(index: number | null) {
  state.selected = index;
  render();
}

function render() {
  renderDocument();
  renderPanel();
  void renderDetail();
}

annotateBtn.addEventListener('click', () => void annotate());
contextSlider.addEventListener('input', () => {
  state.contextLength = Number(contextSlider.value);
  contextValue.textContent = contextSlider.value;
  render();
});
fileInput.addEventListener('change', async () => {
  const file = fileInput.files?.[0];
  if (file) {
    letterInput.value = await file.text();
    setStatus(`loaded ${file.name}`);
  }
});

setStatus(state.status);
