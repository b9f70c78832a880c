import type {
  ApiErrorBody,
  ExplanationResponse,
  PlanResponse,
  SessionView,
} from './types';

export class ApiError extends Error {
  code: string;
  status: number;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.status = status;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody = { code: 'internal', message: `HTTP ${response.status}` };
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body; keep the fallback
  }
  return new ApiError(response.status, body);
}

async function expectJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw await parseError(response);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private baseUrl: string = '') {}

  async createSession(): Promise<{ id: string; state: string }> {
    const response = await fetch(`${this.baseUrl}/sessions`, { method: 'POST' });
    return expectJson(response);
  }

  async submitLabs(
    sessionId: string,
    payload: { age: number; sex: number; labs: Record<string, number> },
  ): Promise<SessionView> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/labs`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
    return expectJson(response);
  }

  async submitReport(sessionId: string, text: string): Promise<SessionView> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/report`, {
      method: 'POST',
      headers: { 'Content-Type': 'text/plain' },
      body: text,
    });
    return expectJson(response);
  }

  async getPlan(sessionId: string): Promise<PlanResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/plan`);
    return expectJson(response);
  }

  async getSession(sessionId: string): Promise<SessionView> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}`);
    return expectJson(response);
  }

  async getExplanation(sessionId: string): Promise<ExplanationResponse> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/explanation`);
    return expectJson(response);
  }
}
