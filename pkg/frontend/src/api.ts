/**
 * Typed client for the nettingdesk HTTP service.
 *
 * This is the UI's only doorway to data: every number shown anywhere in the
 * app originates from one of these responses, and nothing here computes.
 */

import type {
  Annotation,
  AuditVerifyDoc,
  DetermineResultDoc,
  DeterminationDoc,
  DocumentKind,
  ReasonsDoc,
  SaveResultDoc,
  SentenceDoc,
  Term,
  Verification,
  VersionsDoc,
  VocabularyDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly reasonId: string,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }

  /** Optimistic-concurrency loss; the remedy is always "reload and retry". */
  get isConflict(): boolean {
    return this.status === 409;
  }
}

export interface WhatIfResult {
  doc: DeterminationDoc;
  /** Exact response body — the canonical trace bytes, kept for export. */
  raw: string;
}

type FetchLike = typeof fetch;

function withQuery(path: string, params: Record<string, string | number | undefined>): string {
  const query = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined) query.set(key, String(value));
  }
  const encoded = query.toString();
  return encoded ? `${path}?${encoded}` : path;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<{ doc: unknown; raw: string }> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const raw = await response.text();
    let doc: unknown;
    try {
      doc = JSON.parse(raw);
    } catch {
      throw new ApiError(response.status, "BadPayload", raw.slice(0, 200));
    }
    if (!response.ok) {
      const error = (doc as { error?: { reasonId?: string; detail?: string } }).error ?? {};
      throw new ApiError(response.status, error.reasonId ?? "Unknown", error.detail ?? raw);
    }
    return { doc, raw };
  }

  private async get<T>(path: string): Promise<T> {
    return (await this.request("GET", path)).doc as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    return (await this.request("POST", path, body)).doc as T;
  }

  health(): Promise<{ status: string }> {
    return this.get("/health");
  }

  reasons(): Promise<ReasonsDoc> {
    return this.get("/reasons");
  }

  vocabulary(): Promise<VocabularyDoc> {
    return this.get("/vocabulary");
  }

  addObject(term: Term): Promise<{ registryVersion: number; storeVersion: number }> {
    return this.post("/vocabulary/objects", term);
  }

  addPredicate(term: Term): Promise<{ registryVersion: number; storeVersion: number }> {
    return this.post("/vocabulary/predicates", term);
  }

  parse(text: string): Promise<SentenceDoc> {
    return this.post("/parse", { text });
  }

  render(sentence: Omit<SentenceDoc, "text" | "polarity">): Promise<{ text: string }> {
    return this.post("/render", sentence);
  }

  listIds(kind: DocumentKind): Promise<{ ids: string[] }> {
    return this.get(`/${kind}`);
  }

  getDocument<T>(kind: DocumentKind, id: string, version?: number): Promise<T> {
    return this.get(withQuery(`/${kind}/${encodeURIComponent(id)}`, { version }));
  }

  getVersions(kind: DocumentKind, id: string): Promise<VersionsDoc> {
    return this.get(`/${kind}/${encodeURIComponent(id)}/versions`);
  }

  saveDocument(kind: DocumentKind, doc: unknown, baseVersion?: number): Promise<SaveResultDoc> {
    return this.post(withQuery(`/${kind}`, { baseVersion }), doc);
  }

  setVerification(
    opinionId: string,
    itemId: string,
    body: { status: Verification; analystId: string; at?: string; baseVersion?: number },
  ): Promise<SaveResultDoc> {
    return this.post(`/opinions/${encodeURIComponent(opinionId)}/items/${encodeURIComponent(itemId)}/verification`, body);
  }

  setAnnotation(
    opinionId: string,
    itemId: string,
    body: { annotation: Annotation; baseVersion?: number },
  ): Promise<SaveResultDoc> {
    return this.post(`/opinions/${encodeURIComponent(opinionId)}/items/${encodeURIComponent(itemId)}/annotation`, body);
  }

  determine(body: Record<string, unknown>): Promise<DetermineResultDoc> {
    return this.post("/determinations", body);
  }

  async whatIf(body: Record<string, unknown>): Promise<WhatIfResult> {
    const { doc, raw } = await this.request("POST", "/whatif", body);
    return { doc: doc as DeterminationDoc, raw };
  }

  recordEvent(body: Record<string, unknown>): Promise<{ event: unknown; affected: string[] }> {
    return this.post("/events", body);
  }

  sweep(asOfDate: string): Promise<{ flipped: string[]; skipped: string[] }> {
    return this.post("/sweeps", { asOfDate });
  }

  audit(): Promise<{ entries: Array<Record<string, unknown>> }> {
    return this.get("/audit");
  }

  auditVerify(): Promise<AuditVerifyDoc> {
    return this.get("/audit/verify");
  }
}
