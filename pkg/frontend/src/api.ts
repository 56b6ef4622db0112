// Thin client for the question-answering service; the UI never computes
// scores or colors itself, it only renders what these endpoints return.

import type { AnnotationPayload, SearchResultPayload, TablePayload } from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export interface SearchApi {
  search(question: string, topK?: number): Promise<SearchResultPayload>;
  getTable(tableId: string): Promise<TablePayload>;
  annotate(annotation: AnnotationPayload): Promise<void>;
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class HttpApi implements SearchApi {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async search(question: string, topK?: number): Promise<SearchResultPayload> {
    const body: Record<string, unknown> = { question };
    if (topK !== undefined) body.top_k = topK;
    const response = await fetch(this.url("/search"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(await errorDetail(response), response.status);
    }
    return (await response.json()) as SearchResultPayload;
  }

  async getTable(tableId: string): Promise<TablePayload> {
    const response = await fetch(this.url(`/tables/${encodeURIComponent(tableId)}`));
    if (!response.ok) {
      throw new ApiError(await errorDetail(response), response.status);
    }
    return (await response.json()) as TablePayload;
  }

  async annotate(annotation: AnnotationPayload): Promise<void> {
    const response = await fetch(this.url("/annotate"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(annotation),
    });
    if (!response.ok) {
      throw new ApiError(await errorDetail(response), response.status);
    }
  }
}
