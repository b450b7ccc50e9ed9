/**
 * Panel wiring. All protocol state flows bus -> reducer -> render; the
 * panels publish envelopes and never mutate the view directly, so every
 * visible change is attributable to a message on the bus.
 */

import { Bus } from './bus';
import { explainMessage, renderTrace, traceView } from './covering';
import { renderGraph, replay } from './hypergraph';
import { MazeEditor, editMessages } from './mazeEditor';
import { banner, executeMessage, frameToSvg, obstacleMessage } from './playback';
import type { Envelope } from './protocol';
import { apply, initialState, selectSolution, setCursor, type ViewState } from './state';

function el<T extends HTMLElement>(id: string): T {
    const found = document.getElementById(id);
    if (!found) throw new Error(`missing #${id}`);
    return found as T;
}

let state: ViewState = initialState();
let requestSeq = 0;
const nextRequestId = () => `ide-${++requestSeq}`;

const wsUrl = `ws://${location.hostname || 'localhost'}:7071/bus`;
const bus = new Bus(wsUrl);

function publish(messages: Envelope[]): void {
    for (const m of messages) bus.send(m);
}

const editor = new MazeEditor(el('editor'), {
    onEdit: (maze) => publish(editMessages(maze, nextRequestId())),
});

function renderSolutions(): void {
    const list = el('solutions');
    list.textContent = '';
    state.solutions.forEach((sol, i) => {
        const row = document.createElement('div');
        row.className = 'solution' + (state.selected === i ? ' selected' : '');
        row.textContent = `#${sol.index} ${sol.moves.join(';')} (${sol.moves.length} moves)`;
        row.title = sol.term;
        row.addEventListener('click', () => {
            state = selectSolution(state, i);
            render();
        });
        list.appendChild(row);
    });
    const summary = el('summary');
    if (state.done) {
        summary.textContent = `${state.done.count} solution(s)` + (state.done.exhaustive ? '' : ' (truncated)');
    } else if (state.requestId) {
        summary.textContent = 'synthesizing…';
    } else {
        summary.textContent = '';
    }

    const warnings = el('warnings');
    warnings.textContent = '';
    for (const w of state.warnings) {
        const row = document.createElement('div');
        row.className = 'warning';
        row.textContent = `${w.kind}: ${w.detail}`;
        warnings.appendChild(row);
    }
}

function renderReplay(): void {
    const slider = el<HTMLInputElement>('cursor');
    const label = el('cursor-label');
    if (state.events.length === 0) {
        slider.disabled = true;
        label.textContent = 'no event log';
        el('graph').textContent = '';
        return;
    }
    slider.disabled = false;
    slider.min = '0';
    slider.max = String(state.events.length - 1);
    const cursor = state.cursor ?? state.events.length - 1;
    slider.value = String(cursor);
    label.textContent = `event ${cursor} / ${state.events.length - 1}`;
    renderGraph(el('graph'), replay(state.events, cursor));
}

function renderPlayback(): void {
    el('tick').textContent = state.robot
        ? `tick ${state.tick} — robot at (${state.robot[0]}, ${state.robot[1]})`
        : '';
    const note = banner(state.halt);
    const bannerEl = el('banner');
    bannerEl.textContent = note ?? (state.running ? 'running…' : '');
    bannerEl.className = state.halt ? `banner ${state.halt.cause}` : 'banner';
    if (state.frame) el('laser').innerHTML = frameToSvg(state.frame);
}

function render(): void {
    editor.setMaze(state.maze);
    renderSolutions();
    renderReplay();
    renderPlayback();
    if (state.trace) renderTrace(el('trace'), traceView(state.trace));
    el('error').textContent = state.lastError ?? '';
}

bus.onEnvelope((env) => {
    state = apply(state, env);
    render();
});

bus.onStatus((status) => {
    el('status').textContent = status;
    // reconnect restores the view: republish the world and re-request
    if (status === 'open' && state.maze) {
        publish(editMessages(state.maze, nextRequestId()));
    }
});

el<HTMLInputElement>('cursor').addEventListener('input', (ev) => {
    state = setCursor(state, Number((ev.target as HTMLInputElement).value));
    render();
});

el('explain').addEventListener('click', () => {
    const combinator = el<HTMLInputElement>('comb').value.trim();
    const target = el<HTMLInputElement>('target').value.trim();
    if (combinator && target) bus.send(explainMessage(nextRequestId(), combinator, target));
});

el('play').addEventListener('click', () => {
    const chosen = state.selected ?? (state.solutions.length ? 0 : null);
    if (chosen === null) return;
    const solution = state.solutions[chosen];
    if (!solution) return;
    const tickMs = Number(el<HTMLInputElement>('tickms').value) || 0;
    bus.send(executeMessage(solution, tickMs));
});

el('inject').addEventListener('click', () => {
    const raw = el<HTMLInputElement>('inject-cell').value.trim();
    const m = raw.match(/^(\d+)\s*,\s*(\d+)$/);
    if (m) bus.send(obstacleMessage([Number(m[1]), Number(m[2])]));
});

el('load-demo').addEventListener('click', () => {
    publish(
        editMessages(
            {
                rows: 4,
                cols: 3,
                blocked: [
                    [1, 1],
                    [3, 0],
                    [3, 2],
                ],
                start: [1, 2],
                goal: [3, 1],
            },
            nextRequestId(),
        ),
    );
});

bus.connect();
render();
