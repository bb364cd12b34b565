/* tslint:disable */
/* eslint-disable */

/**
 * Rows `[h_o, p_u, p_g, p_cov]` for `h_o` on `[h_lo, h_hi]` at
 * `λ_u = lambda_ratio · λ_g`.
 */
export function coverage_vs_height(lambda_ratio: number, h_lo: number, h_hi: number, points: number): Float64Array;

/**
 * Rows `[N_g, p_g, p_g limit]` for `N_g = 1..=n_max` at threshold `beta_db`.
 */
export function ground_coverage_vs_antennas(beta_db: number, n_max: number): Float64Array;

/**
 * Rows `[ν, V_u]` for `ν` on `[-1, 1]` with `H = h_o ‖X‖^{-ν}`.
 */
export function vse_vs_nu(h_o: number, lambda_ratio: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly coverage_vs_height: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly ground_coverage_vs_antennas: (a: number, b: number) => [number, number, number, number];
    readonly vse_vs_nu: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
