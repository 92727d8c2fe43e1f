/**
 * Thin client for the annotation service. At most one annotate request
 * is in flight: submitting again aborts the previous one.
 */

import { AnnotateResponse, EntityLink, KbChoice, LabelsResponse } from './types.js';

export class AnnotationClient {
  private inflight: AbortController | null = null;

  constructor(private baseUrl: string = '') {}

  async annotate(text: string, strategy = 'first'): Promise<AnnotateResponse> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const res = await fetch(`${this.baseUrl}/annotate`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ text, strategy }),
        signal: controller.signal,
      });
      if (!res.ok) {
        throw new Error(`annotate failed: ${res.status} ${await res.text()}`);
      }
      return (await res.json()) as AnnotateResponse;
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
      }
    }
  }

  async link(term: string, kb: KbChoice): Promise<EntityLink & { url: string | null }> {
    const res = await fetch(`${this.baseUrl}/link`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ term, kb }),
    });
    if (!res.ok) {
      throw new Error(`link failed: ${res.status}`);
    }
    return await res.json();
  }

  async labels(): Promise<LabelsResponse> {
    const res = await fetch(`${this.baseUrl}/labels`);
    if (!res.ok) {
      throw new Error(`labels failed: ${res.status}`);
    }
    return await res.json();
  }
}
