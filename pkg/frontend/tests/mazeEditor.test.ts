import { describe, expect, it } from 'vitest';

import { editMessages, moveMarker, toggleCell } from '../src/mazeEditor';
import type { MazePayload } from '../src/protocol';
import { fixture, ndjson } from './helpers';

const oracle = JSON.parse(fixture('oracle.json')) as {
    demoMaze: MazePayload;
    editedMaze: MazePayload;
    editedCell: [number, number];
};

describe('toggleCell', () => {
    it('unblocks a wall, producing exactly the maze the service saw', () => {
        const edited = toggleCell(oracle.demoMaze, oracle.editedCell);
        expect(edited).toEqual(oracle.editedMaze);
    });

    it('blocks a free cell, keeping the list row-major sorted', () => {
        const edited = toggleCell(oracle.demoMaze, [2, 0]);
        expect(edited?.blocked).toEqual([
            [1, 1],
            [2, 0],
            [3, 0],
            [3, 2],
        ]);
    });

    it('round-trips: toggling twice restores the original maze', () => {
        const once = toggleCell(oracle.demoMaze, [0, 0]);
        expect(once && toggleCell(once, [0, 0])).toEqual(oracle.demoMaze);
    });

    it('refuses to wall in the start or goal markers', () => {
        expect(toggleCell(oracle.demoMaze, oracle.demoMaze.start)).toBeNull();
        expect(toggleCell(oracle.demoMaze, oracle.demoMaze.goal)).toBeNull();
    });

    it('refuses out-of-bounds cells', () => {
        expect(toggleCell(oracle.demoMaze, [-1, 0])).toBeNull();
        expect(toggleCell(oracle.demoMaze, [4, 0])).toBeNull();
        expect(toggleCell(oracle.demoMaze, [0, 3])).toBeNull();
    });
});

describe('moveMarker', () => {
    it('moves the goal to a free cell', () => {
        const moved = moveMarker(oracle.demoMaze, 'goal', [0, 0]);
        expect(moved?.goal).toEqual([0, 0]);
        expect(moved?.start).toEqual(oracle.demoMaze.start);
        expect(moved?.blocked).toEqual(oracle.demoMaze.blocked);
    });

    it('rejects drops on blocked or out-of-bounds cells', () => {
        expect(moveMarker(oracle.demoMaze, 'start', [1, 1])).toBeNull();
        expect(moveMarker(oracle.demoMaze, 'start', [4, 4])).toBeNull();
    });

    it('treats a drop on the same cell as no edit', () => {
        expect(moveMarker(oracle.demoMaze, 'start', oracle.demoMaze.start)).toBeNull();
    });
});

describe('editMessages', () => {
    it('publishes the exact command envelopes recorded in the session', () => {
        const session = ndjson('session.ndjson');
        const commands = session.filter(
            (e) => e.topic === 'lab/maze/set' || e.topic === 'lab/synth/request',
        );
        expect(editMessages(oracle.demoMaze, 'ide-1')).toEqual(commands.slice(0, 2));
        expect(editMessages(oracle.editedMaze, 'ide-2')).toEqual(commands.slice(2, 4));
    });
});
