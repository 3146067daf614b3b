import { FlowState } from './flow';
import { WireQuestion, WireResult } from './types';

export interface Handlers {
    onChoose: (index: number) => void;
    onOptOut: () => void;
    onStop: () => void;
    onRetry: () => void;
}

export const OPT_OUT_LABEL = 'none of these attributes matter to me';
export const STOP_LABEL = 'stop and show my results';

function el<K extends keyof HTMLElementTagNameMap>(
    doc: Document,
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
}

function formatValue(v: number | null): string {
    if (v === null) return '—';
    return Number.isInteger(v) ? String(v) : v.toFixed(3);
}

const PHASE_LABEL: Record<number, string> = {
    1: 'screening attribute groups',
    2: 'pinning down your key attributes',
    3: 'comparing finalists',
};

/** s selectable cards showing exactly the attributes the server sent.
 *
 *  Raw source values are preferred when the dataset provides them;
 *  otherwise the normalized scores are shown and flagged as such.
 */
export function renderQuestion(
    container: HTMLElement,
    question: WireQuestion,
    handlers: Handlers,
    busy = false,
    error: string | null = null,
): void {
    const doc = container.ownerDocument;
    container.textContent = '';

    const progress = el(
        doc,
        'p',
        'progress',
        `question ${question.question_index + 1} · ` +
            `${PHASE_LABEL[question.phase] ?? `phase ${question.phase}`} · ` +
            `${question.questions_answered} answered`,
    );
    container.appendChild(progress);

    if (error) {
        const banner = el(doc, 'div', 'error-banner', error);
        const retry = el(doc, 'button', 'retry', 'retry');
        retry.addEventListener('click', () => handlers.onRetry());
        banner.appendChild(retry);
        container.appendChild(banner);
    }

    const usingRaw = question.raw_tuples !== null;
    if (!usingRaw) {
        container.appendChild(
            el(doc, 'p', 'norm-note', 'showing normalized scores (0–1); raw values unavailable'),
        );
    }

    const cards = el(doc, 'div', 'cards');
    question.tuples.forEach((values, i) => {
        const card = el(doc, 'div', 'card');
        const table = el(doc, 'table', 'attrs');
        question.attributes.forEach((name, j) => {
            const row = el(doc, 'tr');
            row.appendChild(el(doc, 'td', 'attr-name', name));
            const display = usingRaw ? question.raw_tuples![i][j] : values[j];
            row.appendChild(el(doc, 'td', 'attr-value', formatValue(display)));
            table.appendChild(row);
        });
        card.appendChild(table);
        const pick = el(doc, 'button', 'pick', `prefer option ${i + 1}`);
        pick.disabled = busy;
        pick.addEventListener('click', () => handlers.onChoose(i));
        card.appendChild(pick);
        cards.appendChild(card);
    });
    container.appendChild(cards);

    if (question.allowed_actions.includes('opt_out')) {
        const optOut = el(doc, 'button', 'opt-out', OPT_OUT_LABEL);
        optOut.disabled = busy;
        optOut.addEventListener('click', () => handlers.onOptOut());
        container.appendChild(optOut);
    }
    const stop = el(doc, 'button', 'stop', STOP_LABEL);
    stop.disabled = busy;
    stop.addEventListener('click', () => handlers.onStop());
    container.appendChild(stop);
}

function rowTable(doc: Document, row: { values: Record<string, number>; raw_values?: Record<string, number | null> }): HTMLTableElement {
    const table = doc.createElement('table');
    table.className = 'attrs';
    const source = row.raw_values ?? row.values;
    for (const [name, value] of Object.entries(source)) {
        const tr = doc.createElement('tr');
        const nameCell = doc.createElement('td');
        nameCell.textContent = name;
        const valueCell = doc.createElement('td');
        valueCell.textContent = formatValue(value);
        tr.appendChild(nameCell);
        tr.appendChild(valueCell);
        table.appendChild(tr);
    }
    return table;
}

export function renderResult(container: HTMLElement, result: WireResult): void {
    const doc = container.ownerDocument;
    container.textContent = '';
    const d = result.diagnostics;

    if (result.kind === 'favorite' && result.favorite) {
        container.appendChild(el(doc, 'h2', 'headline', 'your favorite'));
        const card = el(doc, 'div', 'card favorite');
        card.dataset.originId = String(result.favorite.origin_id);
        card.appendChild(rowTable(doc, result.favorite));
        container.appendChild(card);
    } else {
        container.appendChild(
            el(doc, 'h2', 'headline', `top ${result.tuples?.length ?? 0} picks for you`),
        );
        const table = el(doc, 'table', 'regret-set');
        result.tuples?.forEach((row) => {
            const tr = el(doc, 'tr', 'set-row');
            tr.dataset.originId = String(row.origin_id);
            const source = row.raw_values ?? row.values;
            for (const value of Object.values(source)) {
                tr.appendChild(el(doc, 'td', undefined, formatValue(value)));
            }
            table.appendChild(tr);
        });
        container.appendChild(table);
    }

    const stats = el(doc, 'ul', 'stats');
    const keys = d.identified_keys.length
        ? d.identified_keys.join(', ')
        : 'none identified';
    stats.appendChild(el(doc, 'li', undefined, `attributes that matter to you: ${keys}`));
    stats.appendChild(el(doc, 'li', undefined, `questions answered: ${d.questions_asked}`));
    if (d.expired) {
        stats.appendChild(el(doc, 'li', undefined, 'session expired; results from the answers so far'));
    }
    container.appendChild(stats);
}

export function render(container: HTMLElement, state: FlowState, handlers: Handlers): void {
    if (state.kind === 'question') {
        renderQuestion(container, state.question, handlers, state.busy, state.error);
    } else if (state.kind === 'result') {
        renderResult(container, state.result);
    } else if (state.kind === 'fatal') {
        container.textContent = '';
        container.appendChild(el(container.ownerDocument, 'div', 'error-banner', state.error));
    }
}
