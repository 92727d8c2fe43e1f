/**
 * Thin client for the annotation service. At most one annotate request
 * is in flight: submitting again aborts the previous one.
 */
export class AnnotationClient {
    constructor(baseUrl = '') {
        this.baseUrl = baseUrl;
        this.inflight = null;
    }
    async annotate(text, strategy = 'first') {
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
            return (await res.json());
        }
        finally {
            if (this.inflight === controller) {
                this.inflight = null;
            }
        }
    }
    async link(term, kb) {
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
    async labels() {
        const res = await fetch(`${this.baseUrl}/labels`);
        if (!res.ok) {
            throw new Error(`labels failed: ${res.status}`);
        }
        return await res.json();
    }
}
