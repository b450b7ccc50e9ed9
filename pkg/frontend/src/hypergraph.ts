/**
 * Step-wise replay of the grammar construction log. The graph reading:
 * nodes are types, hyperedges are rules from a target type to its argument
 * types, labelled by the combinator. Replaying events 0..cursor mirrors the
 * server's own replay (queue adds a node, ruleAdded adds an edge, pruned
 * removes a node plus every rule that mentions it), while failed covers and
 * uninhabited targets stay visible as annotated dead ends.
 */

import type { GrammarEvent } from './protocol';

export interface RuleEdge {
    target: string;
    combinator: string;
    args: string[];
}

export interface DeadEnd {
    kind: 'coverFailed' | 'targetUninhabited';
    target: string;
    combinator?: string;
    reason: string;
}

export interface GraphModel {
    goal: string | null;
    /** types in first-seen order; pruned types are removed again */
    nodes: string[];
    rules: RuleEdge[];
    deadEnds: DeadEnd[];
    pruned: string[];
}

/** Rebuild the graph as of the event with index `cursor` (inclusive). */
export function replay(events: GrammarEvent[], cursor: number): GraphModel {
    const nodes: string[] = [];
    const seen = new Set<string>();
    let rules: RuleEdge[] = [];
    const deadEnds: DeadEnd[] = [];
    const pruned: string[] = [];
    let goal: string | null = null;

    const addNode = (t: string) => {
        if (!seen.has(t)) {
            seen.add(t);
            nodes.push(t);
        }
    };

    for (const e of events) {
        if (e.index > cursor) break;
        switch (e.event) {
            case 'targetQueued':
                if (goal === null) goal = e.target;
                addNode(e.target);
                break;
            case 'ruleAdded':
                addNode(e.target);
                rules.push({
                    target: e.target,
                    combinator: e.combinator ?? '?',
                    args: e.args ?? [],
                });
                break;
            case 'coverFailed':
                deadEnds.push({
                    kind: 'coverFailed',
                    target: e.target,
                    combinator: e.combinator,
                    reason: e.reason ?? '',
                });
                break;
            case 'targetUninhabited':
                deadEnds.push({
                    kind: 'targetUninhabited',
                    target: e.target,
                    reason: e.reason ?? 'no rule can produce this type',
                });
                break;
            case 'pruned': {
                const t = e.target;
                pruned.push(t);
                seen.delete(t);
                const at = nodes.indexOf(t);
                if (at >= 0) nodes.splice(at, 1);
                rules = rules.filter((r) => r.target !== t && !r.args.includes(t));
                break;
            }
        }
    }
    return { goal, nodes, rules, deadEnds, pruned };
}

/** Canonical one-line rendering of a rule, identical to the server dump. */
export function ruleLine(rule: RuleEdge): string {
    return `${rule.target} <- ${rule.combinator}(${rule.args.join(', ')})`;
}

/** The grammar at this cursor as dump lines (unordered — compare as sets). */
export function ruleLines(model: GraphModel): string[] {
    return model.rules.map(ruleLine);
}

/**
 * Render the graph model as nested DOM: one block per node listing its
 * rules, dead ends annotated beneath the node they belong to.
 */
export function renderGraph(root: HTMLElement, model: GraphModel): void {
    root.textContent = '';
    const byTarget = new Map<string, RuleEdge[]>();
    for (const r of model.rules) {
        const list = byTarget.get(r.target) ?? [];
        list.push(r);
        byTarget.set(r.target, list);
    }
    const failures = new Map<string, DeadEnd[]>();
    for (const d of model.deadEnds) {
        const list = failures.get(d.target) ?? [];
        list.push(d);
        failures.set(d.target, list);
    }

    for (const node of model.nodes) {
        const block = document.createElement('div');
        block.className = 'graph-node';
        if (node === model.goal) block.classList.add('goal');
        const title = document.createElement('div');
        title.className = 'type';
        title.textContent = node;
        block.appendChild(title);
        for (const rule of byTarget.get(node) ?? []) {
            const line = document.createElement('div');
            line.className = 'rule';
            line.textContent = `← ${rule.combinator}(${rule.args.join(', ')})`;
            block.appendChild(line);
        }
        for (const dead of failures.get(node) ?? []) {
            const line = document.createElement('div');
            line.className = `dead-end ${dead.kind}`;
            const who = dead.combinator ? `${dead.combinator}: ` : '';
            line.textContent = `⊘ ${who}${dead.reason}`;
            block.appendChild(line);
        }
        root.appendChild(block);
    }
    if (model.pruned.length) {
        const note = document.createElement('div');
        note.className = 'pruned-note';
        note.textContent = `pruned (unproductive): ${model.pruned.join(', ')}`;
        root.appendChild(note);
    }
}
