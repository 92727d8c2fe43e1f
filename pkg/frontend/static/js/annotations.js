/**
 * Pure view logic: entity validation, highlight segmentation, the
 * context window around a selected entity, and KB link selection.
 * Everything here is a function of its inputs so the rendered view is
 * reproducible from the same service responses and selections.
 */
/** Fixed per-class highlight colors for consistent review sessions. */
export const CLASS_COLORS = {
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
export function classColor(cls) {
    return CLASS_COLORS[cls] ?? '#8b8d98';
}
/**
 * Drop spans that fall outside the text or overlap an earlier span.
 * The earlier span wins; each drop is reported through `warn`.
 */
export function validateEntities(text, entities, warn = (msg) => console.warn(msg)) {
    const kept = [];
    let coveredUpTo = -1;
    const ordered = [...entities].sort((a, b) => a.char_start - b.char_start);
    for (const entity of ordered) {
        if (entity.char_start < 0 ||
            entity.char_end > text.length ||
            entity.char_start >= entity.char_end) {
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
/** Cut the document into alternating plain and highlighted segments. */
export function buildSegments(text, entities) {
    const segments = [];
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
export function contextWindow(words, entity, k) {
    const start = Math.max(0, entity.word_start - k);
    const end = Math.min(words.length, entity.word_end + k);
    return words.slice(start, end).join(' ');
}
/**
 * Which link the KB toggle shows. BNF is always available (keyword
 * search); SNOMED needs a fuzzy match and reports "no code found"
 * otherwise.
 */
export function kbView(link, kb) {
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
