/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const borsuk_scan: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const counterexample_profile: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const prop3_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
