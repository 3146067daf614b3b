import {
    Action,
    DatasetInfo,
    SessionConfigPatch,
    WirePayload,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
    constructor(readonly status: number, message: string) {
        super(message);
    }
}

/** Thin typed wrapper over the session endpoints; fetch is injectable so
 *  tests can run against a stub or a live server alike. */
export class ApiClient {
    constructor(
        private readonly baseUrl: string,
        private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
    ) {}

    private async request(path: string, init?: RequestInit): Promise<unknown> {
        const res = await this.fetchImpl(`${this.baseUrl}${path}`, init);
        if (!res.ok) {
            let detail = `${res.status}`;
            try {
                const body = await res.json();
                detail = body?.detail ?? detail;
            } catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(res.status, String(detail));
        }
        return res.json();
    }

    async listDatasets(): Promise<DatasetInfo[]> {
        const body = (await this.request('/datasets')) as {
            datasets: DatasetInfo[];
        };
        return body.datasets;
    }

    async createSession(
        dataset: string,
        config?: SessionConfigPatch,
    ): Promise<WirePayload> {
        return (await this.request('/sessions', {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({ dataset, config }),
        })) as WirePayload;
    }

    async getQuestion(sessionId: string): Promise<WirePayload> {
        return (await this.request(
            `/sessions/${sessionId}/question`,
        )) as WirePayload;
    }

    async answer(
        sessionId: string,
        questionIndex: number,
        action: Action,
        choice?: number,
    ): Promise<WirePayload> {
        return (await this.request(`/sessions/${sessionId}/answer`, {
            method: 'POST',
            headers: { 'Content-Type': 'application/json' },
            body: JSON.stringify({
                question_index: questionIndex,
                action,
                choice,
            }),
        })) as WirePayload;
    }
}
