/**
 * Robot playback: what the play / inject buttons publish, the halt banner
 * wording, and a client-side renderer for incoming laser frames. Position
 * and tick state live in the reducer; this module is stateless.
 */

import type { Cell, Envelope, FramePayload, HaltPayload, SolutionPayload } from './protocol';
import { envelope } from './protocol';

export function executeMessage(solution: SolutionPayload, tickMs: number): Envelope {
    return envelope('lab/robot/execute', {
        robot: 'r1',
        moves: [...solution.moves],
        tickMs,
    });
}

export function obstacleMessage(cell: Cell, blocked = true): Envelope {
    return envelope('lab/world/obstacle', { cell, blocked });
}

/** One line explaining why (and where) the run stopped. */
export function banner(halt: HaltPayload | null): string | null {
    if (!halt) return null;
    const at = `(${halt.cell[0]}, ${halt.cell[1]})`;
    switch (halt.cause) {
        case 'planComplete':
            return `planComplete — goal reached at ${at}`;
        case 'worldFailure':
            return `worldFailure — the world changed after synthesis; halted at ${at}`;
        case 'specError':
            return `specError — the plan was invalid for the synthesized maze; halted at ${at}`;
    }
}

/** Laser view: the frame's polylines as an SVG document string. */
export function frameToSvg(frame: FramePayload): string {
    let maxX = 1;
    let maxY = 1;
    for (const p of frame.polylines) {
        for (const [x, y] of p.points) {
            if (x > maxX) maxX = x;
            if (y > maxY) maxY = y;
        }
    }
    const lines = frame.polylines.map((p) => {
        const pts = p.points.map(([x, y]) => `${x},${y}`).join(' ');
        return `<polyline points="${pts}" stroke="${p.color}" stroke-width="0.05" fill="none"/>`;
    });
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${maxX} ${maxY}">` +
        lines.join('') +
        `</svg>`
    );
}
