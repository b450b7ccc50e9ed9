import { readFileSync } from 'node:fs';

import type { Envelope } from '../src/protocol';
import { decode } from '../src/protocol';

export function fixture(name: string): string {
    return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), 'utf8');
}

export function ndjson(name: string): Envelope[] {
    return fixture(name)
        .split('\n')
        .filter((line) => line.length > 0)
        .map(decode);
}
