/**
 * Covering debugger: arranges a covering trace for display — one row per
 * target path and arity, showing which combinator paths can serve it and
 * why the others were rejected. Failing traces carry their reasons; that is
 * the panel's whole point when a combinator's type is missing a component.
 */

import type { CoverEntry, CoverTrace, Envelope, PathRejection } from './protocol';
import { envelope } from './protocol';

export interface CoverageRow {
    arity: number;
    targetPath: string;
    candidates: string[];
    rejected: PathRejection[];
    covered: boolean;
}

export interface TraceView {
    combinator: string;
    combinatorType: string;
    target: string;
    ok: boolean;
    rows: CoverageRow[];
    covers: CoverEntry[];
    reasons: string[];
}

export function traceView(trace: CoverTrace): TraceView {
    const rows: CoverageRow[] = [];
    const arities = Object.keys(trace.coverage)
        .map(Number)
        .sort((a, b) => a - b);
    for (const arity of arities) {
        for (const entry of trace.coverage[String(arity)] ?? []) {
            rows.push({
                arity,
                targetPath: entry.targetPath,
                candidates: entry.candidates,
                rejected: entry.rejected,
                covered: entry.candidates.length > 0,
            });
        }
    }
    return {
        combinator: trace.combinator,
        combinatorType: trace.combinatorType,
        target: trace.target,
        ok: trace.ok,
        rows,
        covers: trace.covers,
        reasons: trace.reasons,
    };
}

/** The message the panel's "explain" button publishes. */
export function explainMessage(id: string, combinator: string, target: string): Envelope {
    return envelope('lab/synth/explain', { id, combinator, target });
}

export function renderTrace(root: HTMLElement, view: TraceView): void {
    root.textContent = '';
    const head = document.createElement('div');
    head.className = `trace-head ${view.ok ? 'ok' : 'failed'}`;
    head.textContent = `${view.combinator} : ${view.combinatorType}  vs  ${view.target}`;
    root.appendChild(head);

    for (const row of view.rows) {
        const el = document.createElement('div');
        el.className = `trace-row ${row.covered ? 'covered' : 'uncovered'}`;
        const title = document.createElement('div');
        title.textContent = `target path ${row.targetPath} (arity ${row.arity})`;
        el.appendChild(title);
        for (const c of row.candidates) {
            const line = document.createElement('div');
            line.className = 'candidate';
            line.textContent = `✓ ${c}`;
            el.appendChild(line);
        }
        for (const r of row.rejected) {
            const line = document.createElement('div');
            line.className = 'rejected';
            line.textContent = `✗ ${r.path} — ${r.reason}`;
            el.appendChild(line);
        }
        root.appendChild(el);
    }

    for (const cover of view.covers) {
        const el = document.createElement('div');
        el.className = 'cover';
        el.textContent = `cover (arity ${cover.arity}): needs ${cover.argTypes.join(', ') || 'nothing'}`;
        root.appendChild(el);
    }
    for (const reason of view.reasons) {
        const el = document.createElement('div');
        el.className = 'trace-reason';
        el.textContent = reason;
        root.appendChild(el);
    }
}
