/**
 * Wire types for the lab bus: one JSON envelope per WebSocket text message,
 * `{"topic": ..., "payload": ...}`, topics and payload shapes mirroring the
 * server's schemas. The server validates strictly; the client only guards
 * enough shape to never crash on a hostile frame.
 */

export type Cell = [number, number];

export type Constraint = 'simplePath' | 'noImmediateReversal' | { maxLength: number };

export interface MazePayload {
    rows: number;
    cols: number;
    blocked: Cell[];
    start: Cell;
    goal: Cell;
}

export interface SynthRequestPayload {
    id: string;
    maxSolutions: number;
    constraints: Constraint[];
    includeEvents?: boolean;
}

export interface SolutionPayload {
    id: string;
    index: number;
    term: string;
    moves: string[];
    cells: Cell[];
}

export interface WarningPayload {
    id: string;
    kind: string;
    detail: string;
}

export interface DonePayload {
    id: string;
    count: number;
    exhaustive: boolean;
}

/**
 * One step of the grammar construction log; replaying the log rebuilds the
 * pruned grammar, failed covers stay visible as annotations.
 */
export interface GrammarEvent {
    index: number;
    event: 'targetQueued' | 'ruleAdded' | 'coverFailed' | 'targetUninhabited' | 'pruned';
    target: string;
    combinator?: string;
    args?: string[];
    reason?: string;
}

export interface EventsPayload {
    id: string;
    events: GrammarEvent[];
}

export interface ExplainPayload {
    id: string;
    combinator: string;
    target: string;
}

export interface CoverEntry {
    arity: number;
    selectedPaths: string[];
    argTypes: string[];
}

export interface PathRejection {
    path: string;
    reason: string;
}

export interface TargetPathCoverage {
    targetPath: string;
    candidates: string[];
    rejected: PathRejection[];
}

export interface CoverTrace {
    combinator: string;
    combinatorType: string;
    target: string;
    pathsByArity: Record<string, string[]>;
    coverage: Record<string, TargetPathCoverage[]>;
    covers: CoverEntry[];
    reasons: string[];
    ok: boolean;
}

export interface TracePayload {
    id: string;
    combinator: string;
    target: string;
    trace: CoverTrace;
}

export interface ExecutePayload {
    robot: string;
    moves: string[];
    tickMs: number;
}

export interface PositionPayload {
    robot: string;
    cell: Cell;
    t: number;
}

export type HaltCause = 'planComplete' | 'worldFailure' | 'specError';

export interface HaltPayload {
    robot: string;
    cause: HaltCause;
    cell: Cell;
}

export interface ObstaclePayload {
    cell: Cell;
    blocked: boolean;
}

export interface Polyline {
    color: string;
    points: [number, number][];
}

export interface FramePayload {
    frame: number;
    polylines: Polyline[];
}

export interface ErrorPayload {
    reason: string;
}

export interface TopicPayloads {
    'lab/maze/set': MazePayload;
    'lab/synth/request': SynthRequestPayload;
    'lab/synth/solution': SolutionPayload;
    'lab/synth/warning': WarningPayload;
    'lab/synth/done': DonePayload;
    'lab/synth/events': EventsPayload;
    'lab/synth/explain': ExplainPayload;
    'lab/synth/trace': TracePayload;
    'lab/robot/execute': ExecutePayload;
    'lab/robot/position': PositionPayload;
    'lab/robot/halt': HaltPayload;
    'lab/world/obstacle': ObstaclePayload;
    'lab/laser/frame': FramePayload;
    'lab/error': ErrorPayload;
}

export type Topic = keyof TopicPayloads;

export type Envelope = { [T in Topic]: { topic: T; payload: TopicPayloads[T] } }[Topic];

export const TOPICS: ReadonlySet<string> = new Set([
    'lab/maze/set',
    'lab/synth/request',
    'lab/synth/solution',
    'lab/synth/warning',
    'lab/synth/done',
    'lab/synth/events',
    'lab/synth/explain',
    'lab/synth/trace',
    'lab/robot/execute',
    'lab/robot/position',
    'lab/robot/halt',
    'lab/world/obstacle',
    'lab/laser/frame',
    'lab/error',
]);

export function envelope<T extends Topic>(topic: T, payload: TopicPayloads[T]): Envelope {
    return { topic, payload } as Envelope;
}

export function encode(env: Envelope): string {
    return JSON.stringify(env);
}

/** Parse one wire message; throws on anything that is not a known envelope. */
export function decode(text: string): Envelope {
    let raw: unknown;
    try {
        raw = JSON.parse(text);
    } catch {
        throw new Error(`not JSON: ${text.slice(0, 80)}`);
    }
    if (typeof raw !== 'object' || raw === null) {
        throw new Error('envelope must be an object');
    }
    const obj = raw as { topic?: unknown; payload?: unknown };
    if (typeof obj.topic !== 'string' || !TOPICS.has(obj.topic)) {
        throw new Error(`unknown topic: ${String(obj.topic)}`);
    }
    if (typeof obj.payload !== 'object' || obj.payload === null) {
        throw new Error('payload must be an object');
    }
    return obj as Envelope;
}

export function cellsEqual(a: Cell, b: Cell): boolean {
    return a[0] === b[0] && a[1] === b[1];
}

export function cellKey(c: Cell): string {
    return `${c[0]},${c[1]}`;
}
