/* tslint:disable */
/* eslint-disable */

export function ancilla_coupling(): number;

export function effective_coupling_mhz(): number;

export function preset_names(): string[];

export function quench_nbar(xi_max: number, t_phi_us: number, n_fock: number): Float64Array;

export function rabi_signal(alpha: number, shots: number, seed: number, tau_max_us: number, points: number): Float64Array;

export function wigner_map(preset: string, xi: number, alpha: number, n_fock: number, half_width: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ancilla_coupling: () => number;
    readonly effective_coupling_mhz: () => number;
    readonly preset_names: () => [number, number];
    readonly quench_nbar: (a: number, b: number, c: number) => [number, number, number, number];
    readonly rabi_signal: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly wigner_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
