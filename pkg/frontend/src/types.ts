// Wire types mirroring the session API's JSON contract.

export type Action = 'choose' | 'opt_out' | 'quit';

export interface WireQuestion {
    type: 'question';
    session_id: string;
    question_index: number;
    phase: number;
    attributes: string[];
    tuples: number[][];
    raw_tuples: (number | null)[][] | null;
    allowed_actions: Action[];
    questions_answered: number;
}

export interface CoverageInfo {
    p_cover: number;
    lower_bound: number;
    rounds_executed: number;
    confidence: number;
}

export interface ResultRow {
    origin_id: number;
    values: Record<string, number>;
    raw_values?: Record<string, number | null>;
}

export interface WireResult {
    type: 'result';
    session_id: string;
    kind: 'favorite' | 'regret_set';
    favorite?: ResultRow;
    tuples?: ResultRow[];
    diagnostics: {
        questions_asked: number;
        phase_reached: number | string;
        identified_keys: string[];
        expired: boolean;
        coverage?: CoverageInfo | null;
    };
}

export type WirePayload = WireQuestion | WireResult;

export interface DatasetInfo {
    name: string;
    rows: number;
    attributes: number;
}

export interface SessionConfigPatch {
    m?: number;
    s?: number;
    d_max?: number;
    K?: number;
    seed?: number;
}

export function isQuestion(p: WirePayload): p is WireQuestion {
    return p.type === 'question';
}

export function isResult(p: WirePayload): p is WireResult {
    return p.type === 'result';
}
