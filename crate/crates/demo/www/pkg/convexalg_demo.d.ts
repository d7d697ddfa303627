/* tslint:disable */
/* eslint-disable */

/**
 * Gap between the chord minimizers of the squared distances to `c1` and
 * `c2` on the unit disk, as a function of the chord angle, and the
 * common direction where it vanishes.
 */
export function borsuk_scan(c1: Float64Array, c2: Float64Array, samples: number): string;

/**
 * Chord profiles of both functions, their `g_eps` approximants and the
 * witness that stays away from the pinned algebra.
 */
export function counterexample_profile(c1: Float64Array, c2: Float64Array, eps: number, samples: number): string;

/**
 * Convex approximation of `p(x) = sum coeffs[k] x^k` by a polynomial in
 * `e^x` on `[a, b]`, sampled at `samples` points.
 */
export function prop3_curve(coeffs: Float64Array, a: number, b: number, eps: number, samples: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly borsuk_scan: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly counterexample_profile: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly prop3_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
