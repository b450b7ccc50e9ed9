/**
 * The IDE's single source of truth. Every field is derived from envelopes
 * seen on the bus (commands included — the bus echoes the sender's own
 * traffic), so reconnecting and replaying maze/set + a fresh request
 * reconstructs an equivalent view. The only local inputs are panel
 * selections, which never touch protocol-derived state.
 */

import type {
    Cell,
    CoverTrace,
    DonePayload,
    Envelope,
    FramePayload,
    GrammarEvent,
    HaltPayload,
    MazePayload,
    SolutionPayload,
    WarningPayload,
} from './protocol';
import { cellKey, cellsEqual } from './protocol';

export interface ViewState {
    maze: MazePayload | null;
    /** live obstacle overlay; synthesis always targets `maze` */
    blockedNow: Cell[];
    requestId: string | null;
    solutions: SolutionPayload[];
    warnings: WarningPayload[];
    done: DonePayload | null;
    events: GrammarEvent[];
    trace: CoverTrace | null;
    /** index into solutions; invariant: null or < solutions.length */
    selected: number | null;
    /** index of the last replayed event; invariant: null or < events.length */
    cursor: number | null;
    robot: Cell | null;
    tick: number;
    running: boolean;
    halt: HaltPayload | null;
    frame: FramePayload | null;
    lastError: string | null;
}

export function initialState(): ViewState {
    return {
        maze: null,
        blockedNow: [],
        requestId: null,
        solutions: [],
        warnings: [],
        done: null,
        events: [],
        trace: null,
        selected: null,
        cursor: null,
        robot: null,
        tick: 0,
        running: false,
        halt: null,
        frame: null,
        lastError: null,
    };
}

/** Apply one envelope, in arrival order. Pure: returns a new state. */
export function apply(state: ViewState, env: Envelope): ViewState {
    switch (env.topic) {
        case 'lab/maze/set': {
            // a new world invalidates everything downstream of it
            return {
                ...initialState(),
                maze: env.payload,
                blockedNow: [...env.payload.blocked],
                robot: env.payload.start,
            };
        }
        case 'lab/synth/request': {
            return {
                ...state,
                requestId: env.payload.id,
                solutions: [],
                warnings: [],
                done: null,
                events: [],
                selected: null,
                cursor: null,
            };
        }
        case 'lab/synth/solution': {
            if (env.payload.id !== state.requestId) return state;
            return { ...state, solutions: [...state.solutions, env.payload] };
        }
        case 'lab/synth/warning': {
            if (env.payload.id !== state.requestId) return state;
            return { ...state, warnings: [...state.warnings, env.payload] };
        }
        case 'lab/synth/done': {
            if (env.payload.id !== state.requestId) return state;
            return { ...state, done: env.payload };
        }
        case 'lab/synth/events': {
            if (env.payload.id !== state.requestId) return state;
            const events = env.payload.events;
            return { ...state, events, cursor: events.length ? events.length - 1 : null };
        }
        case 'lab/synth/explain':
            return state;
        case 'lab/synth/trace': {
            return { ...state, trace: env.payload.trace };
        }
        case 'lab/robot/execute': {
            // echo of a playback start: back to the synthesis start cell
            return {
                ...state,
                running: true,
                halt: null,
                tick: 0,
                robot: state.maze ? state.maze.start : null,
            };
        }
        case 'lab/robot/position': {
            return { ...state, robot: env.payload.cell, tick: env.payload.t };
        }
        case 'lab/robot/halt': {
            return { ...state, running: false, halt: env.payload, robot: env.payload.cell };
        }
        case 'lab/world/obstacle': {
            const { cell, blocked } = env.payload;
            const rest = state.blockedNow.filter((c) => !cellsEqual(c, cell));
            return { ...state, blockedNow: blocked ? [...rest, cell] : rest };
        }
        case 'lab/laser/frame': {
            return { ...state, frame: env.payload };
        }
        case 'lab/error': {
            return { ...state, lastError: env.payload.reason };
        }
    }
}

/** Panel selection; ignores out-of-range indices so the invariant holds. */
export function selectSolution(state: ViewState, index: number): ViewState {
    if (index < 0 || index >= state.solutions.length) return state;
    return { ...state, selected: index };
}

/** Replay cursor; clamped into the event log. */
export function setCursor(state: ViewState, cursor: number): ViewState {
    if (state.events.length === 0) return { ...state, cursor: null };
    const clamped = Math.max(0, Math.min(cursor, state.events.length - 1));
    return { ...state, cursor: clamped };
}

export function isBlockedNow(state: ViewState, cell: Cell): boolean {
    const k = cellKey(cell);
    return state.blockedNow.some((c) => cellKey(c) === k);
}
