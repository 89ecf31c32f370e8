#ifndef TWCOUNT_H
#define TWCOUNT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Join algorithm.
 */
typedef enum TwcJoin {
  TWC_JOIN_FAST = 0,
  TWC_JOIN_NAIVE = 1,
} TwcJoin;

/*
 Result of every fallible call.
 */
typedef enum TwcStatus {
  TWC_STATUS_OK = 0,
  TWC_STATUS_NULL_ARGUMENT = 1,
  TWC_STATUS_INVALID_UTF8 = 2,
  TWC_STATUS_PARSE = 3,
  TWC_STATUS_VALIDATION = 4,
  TWC_STATUS_CAPACITY = 5,
  TWC_STATUS_INTERNAL = 6,
} TwcStatus;

/*
 A validated tree decomposition, already made nice, tied to the graph it was parsed against.
 */
typedef struct TwcDecomposition TwcDecomposition;

/*
 A parsed graph.
 */
typedef struct TwcGraph TwcGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a graph in `p tw n m` format. On success `*out` owns a new handle.

 # Safety
 `text` must be null or a NUL-terminated string; `out` must be null or writable.
 */
enum TwcStatus twc_graph_parse(const char *text, struct TwcGraph **out);

/*
 Number of vertices, or 0 for a null handle.

 # Safety
 `graph` must be null or a live handle.
 */
uintptr_t twc_graph_vertices(const struct TwcGraph *graph);

/*
 Number of edges, or 0 for a null handle.

 # Safety
 `graph` must be null or a live handle.
 */
uintptr_t twc_graph_edges(const struct TwcGraph *graph);

/*
 # Safety
 `graph` must be null or a handle from [`twc_graph_parse`] not yet freed.
 */
void twc_graph_free(struct TwcGraph *graph);

/*
 Parses and validates a tree decomposition (`s td` format) of `graph`.

 # Safety
 `graph` must be null or a live handle; `text` null or NUL-terminated; `out` null or writable.
 */
enum TwcStatus twc_decomposition_parse(const struct TwcGraph *graph,
                                       const char *text,
                                       struct TwcDecomposition **out);

/*
 Width of the decomposition, or 0 for a null handle.

 # Safety
 `td` must be null or a live handle.
 */
uintptr_t twc_decomposition_width(const struct TwcDecomposition *td);

/*
 # Safety
 `td` must be null or a handle from [`twc_decomposition_parse`] not yet freed.
 */
void twc_decomposition_free(struct TwcDecomposition *td);

/*
 Counts Steiner trees of every size connecting the 1-based `terminals`.

 `modulus` 0 counts exactly; otherwise it must be a prime above 2^60.
 On success `*out_json` receives `{"sizes":{"<edges>":"<count>",...}}`
 listing the nonzero sizes.

 # Safety
 Handles must be live; `terminals` must point to `n_terminals` values
 (may be null when `n_terminals` is 0); `out_json` must be null or writable.
 */
enum TwcStatus twc_count_steiner(const struct TwcGraph *graph,
                                 const struct TwcDecomposition *td,
                                 const uint32_t *terminals,
                                 uintptr_t n_terminals,
                                 enum TwcJoin join,
                                 uint64_t modulus,
                                 char **out_json);

/*
 Counts Hamiltonian cycles; `*out_decimal` receives the count in base 10.

 # Safety
 Handles must be live; `out_decimal` must be null or writable.
 */
enum TwcStatus twc_count_hamiltonian(const struct TwcGraph *graph,
                                     const struct TwcDecomposition *td,
                                     enum TwcJoin join,
                                     uint64_t modulus,
                                     char **out_decimal);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void twc_string_free(char *s);

/*
 Message for the last failed call on this thread, or null. Valid until the
 next call into this library on the same thread.
 */
const char *twc_last_error(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TWCOUNT_H */
