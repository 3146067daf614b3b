import { ApiClient, ApiError } from './client';
import {
    SessionConfigPatch,
    WirePayload,
    WireQuestion,
    WireResult,
    isQuestion,
    isResult,
} from './types';

export type FlowState =
    | { kind: 'idle' }
    | { kind: 'question'; question: WireQuestion; busy: boolean; error: string | null }
    | { kind: 'result'; result: WireResult }
    | { kind: 'fatal'; error: string };

export type Listener = (state: FlowState) => void;

/** Session state machine for the browser client.
 *
 *  All algorithm logic lives server-side; this only sequences requests.
 *  One request is in flight at a time: while busy, further submissions are
 *  dropped, and a stale-question conflict (409) re-fetches the pending
 *  question instead of double-submitting. Network failures keep the current
 *  question on screen with a retriable error banner.
 */
export class SessionFlow {
    private state: FlowState = { kind: 'idle' };
    private sessionId: string | null = null;
    private listeners: Listener[] = [];

    constructor(
        private readonly client: ApiClient,
        private readonly dataset: string,
        private readonly config?: SessionConfigPatch,
    ) {}

    current(): FlowState {
        return this.state;
    }

    subscribe(listener: Listener): void {
        this.listeners.push(listener);
    }

    private setState(next: FlowState): FlowState {
        this.state = next;
        for (const l of this.listeners) l(next);
        return next;
    }

    private absorb(payload: WirePayload): FlowState {
        this.sessionId = payload.session_id;
        if (isQuestion(payload)) {
            return this.setState({
                kind: 'question',
                question: payload,
                busy: false,
                error: null,
            });
        }
        if (isResult(payload)) {
            return this.setState({ kind: 'result', result: payload });
        }
        return this.setState({ kind: 'fatal', error: 'malformed payload' });
    }

    async start(): Promise<FlowState> {
        try {
            return this.absorb(await this.client.createSession(this.dataset, this.config));
        } catch (err) {
            return this.setState({ kind: 'fatal', error: String(err) });
        }
    }

    async choose(index: number): Promise<FlowState> {
        return this.submit('choose', index);
    }

    async optOut(): Promise<FlowState> {
        return this.submit('opt_out');
    }

    async stop(): Promise<FlowState> {
        return this.submit('quit');
    }

    /** Re-fetch the pending question, e.g. after a reload or an error. */
    async refresh(): Promise<FlowState> {
        if (!this.sessionId) return this.state;
        try {
            return this.absorb(await this.client.getQuestion(this.sessionId));
        } catch (err) {
            return this.setState({ kind: 'fatal', error: String(err) });
        }
    }

    private async submit(
        action: 'choose' | 'opt_out' | 'quit',
        choice?: number,
    ): Promise<FlowState> {
        const state = this.state;
        if (state.kind !== 'question' || state.busy || !this.sessionId) {
            return this.state; // nothing to answer, or a request is in flight
        }
        const question = state.question;
        this.setState({ kind: 'question', question, busy: true, error: null });
        try {
            return this.absorb(
                await this.client.answer(
                    this.sessionId,
                    question.question_index,
                    action,
                    choice,
                ),
            );
        } catch (err) {
            if (err instanceof ApiError && err.status === 409) {
                // Someone (a double click, another tab) already answered this
                // question; fall back to whatever is pending now.
                return this.refresh();
            }
            return this.setState({
                kind: 'question',
                question,
                busy: false,
                error: `submission failed: ${String(err)} (retry)`,
            });
        }
    }
}
