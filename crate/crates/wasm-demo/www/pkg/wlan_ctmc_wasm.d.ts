/* tslint:disable */
/* eslint-disable */

/**
 * γ and p as the number of contending nodes grows.
 */
export function gammaCurve(cw_min: number, m: number, tagged_nodes: number, max_contenders: number): string;

/**
 * Feasible states with their stationary probabilities.
 */
export function stateSpace(scenario: string, n_nodes: number, cw_min: number): string;

/**
 * Per-WLAN throughput for CW_min = 4..8192, with and without collisions,
 * plus a short simulation when `sim_seconds > 0`.
 */
export function throughputSweep(scenario: string, n_nodes: number, sim_seconds: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly gammaCurve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly stateSpace: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly throughputSweep: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
