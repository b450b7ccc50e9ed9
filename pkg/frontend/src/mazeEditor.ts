/**
 * Maze editing. The pure core turns a click or a marker drag into a new
 * maze payload (or null when the edit is a no-op or illegal — illegal edits
 * never publish anything); `editMessages` is the single place that decides
 * what an accepted edit puts on the bus: the new maze plus a fresh
 * simple-path synthesis request.
 */

import type { Cell, Envelope, MazePayload } from './protocol';
import { cellKey, cellsEqual, envelope } from './protocol';

export type Marker = 'start' | 'goal';

function inBounds(maze: MazePayload, cell: Cell): boolean {
    return cell[0] >= 0 && cell[0] < maze.rows && cell[1] >= 0 && cell[1] < maze.cols;
}

function isBlocked(maze: MazePayload, cell: Cell): boolean {
    return maze.blocked.some((c) => cellsEqual(c, cell));
}

function sortedCells(cells: Cell[]): Cell[] {
    return [...cells].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
}

/**
 * Toggle a cell between free and blocked. Returns the edited maze, or null
 * when nothing may change: out of bounds, or the cell carries the start or
 * goal marker (those must stay free).
 */
export function toggleCell(maze: MazePayload, cell: Cell): MazePayload | null {
    if (!inBounds(maze, cell)) return null;
    if (cellsEqual(cell, maze.start) || cellsEqual(cell, maze.goal)) return null;
    const blocked = isBlocked(maze, cell)
        ? maze.blocked.filter((c) => !cellsEqual(c, cell))
        : sortedCells([...maze.blocked, cell]);
    return { ...maze, blocked };
}

/**
 * Drop the start or goal marker on a cell. Returns null when the drop is
 * rejected (blocked target, out of bounds) or is not an edit at all
 * (same cell), so the caller publishes nothing.
 */
export function moveMarker(maze: MazePayload, marker: Marker, cell: Cell): MazePayload | null {
    if (!inBounds(maze, cell) || isBlocked(maze, cell)) return null;
    if (cellsEqual(cell, maze[marker])) return null;
    return { ...maze, [marker]: cell };
}

/**
 * Every accepted edit publishes the maze and immediately re-synthesizes,
 * asking for the construction event log so the replay panel stays current.
 */
export function editMessages(maze: MazePayload, requestId: string): Envelope[] {
    return [
        envelope('lab/maze/set', maze),
        envelope('lab/synth/request', {
            id: requestId,
            maxSolutions: 50,
            constraints: ['simplePath'],
            includeEvents: true,
        }),
    ];
}

export interface MazeEditorCallbacks {
    onEdit(maze: MazePayload): void;
}

/**
 * DOM grid bound to a maze payload. Click toggles a wall; dragging the S or
 * G badge moves the marker. Rejected interactions flash the cell instead of
 * publishing.
 */
export class MazeEditor {
    private maze: MazePayload | null = null;
    private dragging: Marker | null = null;

    constructor(
        private readonly root: HTMLElement,
        private readonly callbacks: MazeEditorCallbacks,
    ) {
        root.classList.add('maze-editor');
        root.addEventListener('mouseup', () => {
            this.dragging = null;
        });
    }

    setMaze(maze: MazePayload | null): void {
        this.maze = maze;
        this.render();
    }

    private render(): void {
        this.root.textContent = '';
        const maze = this.maze;
        if (!maze) {
            this.root.textContent = 'no maze loaded';
            return;
        }
        this.root.style.setProperty('--cols', String(maze.cols));
        for (let r = 0; r < maze.rows; r++) {
            for (let c = 0; c < maze.cols; c++) {
                const cell: Cell = [r, c];
                const el = document.createElement('div');
                el.className = 'cell';
                el.dataset.cell = cellKey(cell);
                if (maze.blocked.some((b) => cellsEqual(b, cell))) el.classList.add('blocked');
                if (cellsEqual(cell, maze.start)) {
                    el.classList.add('start');
                    el.textContent = 'S';
                }
                if (cellsEqual(cell, maze.goal)) {
                    el.classList.add('goal');
                    el.textContent = 'G';
                }
                el.addEventListener('mousedown', (ev) => {
                    ev.preventDefault();
                    if (cellsEqual(cell, maze.start)) this.dragging = 'start';
                    else if (cellsEqual(cell, maze.goal)) this.dragging = 'goal';
                    else this.dragging = null;
                });
                el.addEventListener('mouseup', () => {
                    if (this.dragging) {
                        this.commit(moveMarker(maze, this.dragging, cell), el);
                        this.dragging = null;
                    } else {
                        this.commit(toggleCell(maze, cell), el);
                    }
                });
                this.root.appendChild(el);
            }
        }
    }

    private commit(edited: MazePayload | null, el: HTMLElement): void {
        if (edited === null) {
            el.classList.add('rejected');
            setTimeout(() => el.classList.remove('rejected'), 300);
            return;
        }
        this.callbacks.onEdit(edited);
    }
}
