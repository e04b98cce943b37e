/** Typed client for the five documented GET routes; nothing else is issued.
 *
 * Interactive fetches go through named slots with sequence tags: when a
 * newer request has been issued on the same slot, the older response
 * resolves to null and the caller drops it, so a stale selection can never
 * overwrite a newer one.
 */

import type {
  ConceptDetail,
  CorpusDescriptor,
  Projection,
  SearchResponse,
  SimilarityResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  private sequence = new Map<string, number>();

  constructor(readonly baseUrl: string) {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status} on ${path}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        /* non-JSON error body; keep defaults */
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  /** Issue a GET on a named slot; resolves null if a newer call superseded it. */
  private async getLatest<T>(slot: string, path: string): Promise<T | null> {
    const tag = (this.sequence.get(slot) ?? 0) + 1;
    this.sequence.set(slot, tag);
    const result = await this.get<T>(path);
    return this.sequence.get(slot) === tag ? result : null;
  }

  corpora(): Promise<CorpusDescriptor[]> {
    return this.get("/api/corpora");
  }

  projection(corpusId: string): Promise<Projection> {
    return this.get(`/api/corpora/${encodeURIComponent(corpusId)}/projection`);
  }

  search(q: string): Promise<SearchResponse | null> {
    return this.getLatest("search", `/api/concepts/search?q=${encodeURIComponent(q)}`);
  }

  concept(conceptId: string): Promise<ConceptDetail | null> {
    return this.getLatest("concept", `/api/concepts/${encodeURIComponent(conceptId)}`);
  }

  similarity(ref: string, comparisons: string[]): Promise<SimilarityResponse> {
    const params = new URLSearchParams([
      ["ref", ref],
      ...comparisons.map((c): [string, string] => ["cmp", c]),
    ]);
    return this.get(`/api/similarity?${params.toString()}`);
  }
}
