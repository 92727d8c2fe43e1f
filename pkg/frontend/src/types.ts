/** Wire types for the annotation service. */

export interface MatchedEntry {
  snomed_code: string;
  bnf_code: string;
  dmd_code: string | null;
  description: string;
  score: number;
}

export interface EntityLink {
  query: string;
  matched: MatchedEntry | null;
  snomed_url: string | null;
  bnf_url: string;
}

export interface Entity {
  char_start: number;
  char_end: number;
  text: string;
  class: string;
  label: string;
  word_start: number;
  word_end: number;
  link: EntityLink | null;
}

export interface AnnotateResponse {
  words: string[];
  labels: string[];
  entities: Entity[];
  strategy: string;
  ensemble: boolean;
  model_ids: string[];
}

export interface LabelsResponse {
  labels: string[];
  entity_classes: string[];
}

export type KbChoice = 'snomed' | 'bnf';
