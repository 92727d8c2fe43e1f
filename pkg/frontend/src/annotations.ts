/**
 * Pure view logic: entity validation, highlight segmentation, the
 * context window around a selected entity, and KB link selection.
 * Everything here is a function of its inputs so the rendered view is
 * reproducible from the same service responses and selections.
 */

import { Entity, EntityLink, KbChoice } from './types.js';

/** Fixed per-class highlight colors for consistent review sessions. */
export const CLASS_COLORS: Record<string, string> = {
  ADE: '#e5484d',
  Dosage: '#f76b15',
  Drug: '#30a46c',
  Duration: '#12a594',
  Form: '#8e4ec6',
  Frequency: '#0090ff',
  Reason: '#ad7f58',
  Route: '#e93d82',
  Strength: '#ffb224',
};

export function classColor(cls: string): string {
  return CLASS_COLORS[cls] ?? '#8b8d98';
}

/**
 * Drop spans that fall outside the text or overlap an earlier span.
 * The earlier span wins; each drop is reported through `warn`.
 */
export function validateEntities(
  text: string,
  entities: Entity[],
  warn: (msg: string) => void = (msg) => console.warn(msg),
): Entity[] {
  const kept: Entity[] = [];
  let coveredUpTo = -1;
  const ordered = [...entities].sort((a, b) => a.char_start - b.char_start);
  for (const entity of ordered) {
    if (
      entity.char_start < 0 ||
      entity.char_end > text.length ||
      entity.char_start >= entity.char_end
    ) {
      warn(`dropping out-of-bounds span [${entity.char_start}, ${entity.char_end})`);
      continue;
    }
    if (entity.char_start < coveredUpTo) {
      warn(`dropping overlapping span [${entity.char_start}, ${entity.char_end})`);
      continue;
    }
    kept.push(entity);
    coveredUpTo = entity.char_end;
  }
  return kept;
}

export interface Segment {
  text: string;
  /** null for plain text between highlights */
  entity: Entity | null;
  /** index into the validated entity list, for selection */
  entityIndex: number | null;
}

/** Cut the document into alternating plain and highlighted segments. */
export function buildSegments(text: string, entities: Entity[]): Segment[] {
  const segments: Segment[] = [];
  let cursor = 0;
  entities.forEach((entity, i) => {
    if (entity.char_start > cursor) {
      segments.push({ text: text.slice(cursor, entity.char_start), entity: null, entityIndex: null });
    }
    segments.push({
      text: text.slice(entity.char_start, entity.char_end),
      entity,
      entityIndex: i,
    });
    cursor = entity.char_end;
  });
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), entity: null, entityIndex: null });
  }
  return segments;
}

/**
 * Snippet of k words either side of an entity. k = 0 gives the entity
 * text alone; a k larger than the document returns the whole document.
 */
export function contextWindow(
  words: string[],
  entity: { word_start: number; word_end: number },
  k: number,
): string {
  const start = Math.max(0, entity.word_start - k);
  const end = Math.min(words.length, entity.word_end + k);
  return words.slice(start, end).join(' ');
}

export interface KbView {
  kb: KbChoice;
  url: string | null;
  message: string;
}

/**
 * Which link the KB toggle shows. BNF is always available (keyword
 * search); SNOMED needs a fuzzy match and reports "no code found"
 * otherwise.
 */
export function kbView(link: EntityLink | null, kb: KbChoice): KbView {
  if (link === null) {
    return { kb, url: null, message: 'link not loaded yet' };
  }
  if (kb === 'bnf') {
    return { kb, url: link.bnf_url, message: `BNF keyword search: ${link.query}` };
  }
  if (link.snomed_url && link.matched) {
    return { kb, url: link.snomed_url, message: `SNOMED-CT ${link.matched.snomed_code}` };
  }
  return { kb, url: null, message: 'no SNOMED code found' };
}
