/** Minimal fetch wrapper behind an injectable transport (tests mock it). */

import type { ApiErrorBody } from "./types.js";

export interface Transport {
  get(path: string): Promise<unknown>;
  post(path: string, body?: FormData): Promise<unknown>;
  del(path: string): Promise<unknown>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public line?: number,
  ) {
    super(message);
  }
}

async function unwrap(resp: Response): Promise<unknown> {
  if (resp.ok) {
    return resp.json();
  }
  let code = "HttpError";
  let message = `${resp.status} ${resp.statusText}`;
  let line: number | undefined;
  try {
    const body = (await resp.json()) as ApiErrorBody;
    code = body.error.code;
    message = body.error.message;
    line = body.error.line;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, code, message, line);
}

export class HttpTransport implements Transport {
  constructor(private base: string = "") {}

  get(path: string): Promise<unknown> {
    return fetch(this.base + path).then(unwrap);
  }

  post(path: string, body?: FormData): Promise<unknown> {
    return fetch(this.base + path, { method: "POST", body }).then(unwrap);
  }

  del(path: string): Promise<unknown> {
    return fetch(this.base + path, { method: "DELETE" }).then(unwrap);
  }
}
