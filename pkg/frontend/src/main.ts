import { ApiClient } from './client';
import { SessionFlow } from './flow';
import { Handlers, render } from './render';

/** Wire a live session into a container element. */
export async function mount(
    container: HTMLElement,
    baseUrl = '',
    dataset?: string,
): Promise<SessionFlow> {
    const client = new ApiClient(baseUrl);
    const datasets = await client.listDatasets();
    if (datasets.length === 0) {
        container.textContent = 'no datasets registered on the server';
        throw new Error('no datasets');
    }
    const name = dataset ?? datasets[0].name;
    const flow = new SessionFlow(client, name);
    const handlers: Handlers = {
        onChoose: (i) => void flow.choose(i),
        onOptOut: () => void flow.optOut(),
        onStop: () => void flow.stop(),
        onRetry: () => void flow.refresh(),
    };
    flow.subscribe((state) => render(container, state, handlers));
    await flow.start();
    return flow;
}

declare global {
    interface Window {
        sparsepref?: { mount: typeof mount };
    }
}

if (typeof window !== 'undefined') {
    window.sparsepref = { mount };
}
