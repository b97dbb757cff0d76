#ifndef GFOMC_H
#define GFOMC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Side type codes used in [`GfomcClassification`].
typedef enum GfomcSideType {
  GFOMC_SIDE_TYPE_NONE = 0,
  GFOMC_SIDE_TYPE_TYPE_I = 1,
  GFOMC_SIDE_TYPE_TYPE_II = 2,
  GFOMC_SIDE_TYPE_MIXED = 3,
} GfomcSideType;

// Status codes returned by every fallible function.
typedef enum GfomcStatus {
  GFOMC_STATUS_OK = 0,
  GFOMC_STATUS_NULL_POINTER = 1,
  GFOMC_STATUS_INVALID_UTF8 = 2,
  GFOMC_STATUS_PARSE = 3,
  GFOMC_STATUS_DOMAIN = 4,
  GFOMC_STATUS_VAR_CAP = 5,
  GFOMC_STATUS_SINGULAR = 6,
  GFOMC_STATUS_INAPPLICABLE = 7,
  GFOMC_STATUS_SEARCH_FAILED = 8,
  GFOMC_STATUS_INTERNAL = 9,
  GFOMC_STATUS_IO = 10,
  GFOMC_STATUS_PANIC = 11,
} GfomcStatus;

// Opaque parsed query.
typedef struct GfomcQuery GfomcQuery;

// Opaque tuple-independent database.
typedef struct GfomcTid GfomcTid;

typedef struct GfomcClassification {
  bool bipartite;
  bool is_unsafe;
  // Length of the shortest left-right path, or -1 for safe queries.
  int32_t length;
  bool is_final;
  bool forbidden;
  enum GfomcSideType left_type;
  enum GfomcSideType right_type;
} GfomcClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *gfomc_version(void);

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call into the library on the same thread.
const char *gfomc_last_error(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void gfomc_string_free(char *s);

// Parses a query in the `forall x forall y (...) & ...` syntax.
//
// # Safety
// `src` must be a NUL-terminated string; `out` must be writable.
enum GfomcStatus gfomc_query_parse(const char *src, struct GfomcQuery **out);

// # Safety
// `q` must come from [`gfomc_query_parse`] and not be freed twice.
void gfomc_query_free(struct GfomcQuery *q);

// # Safety
// `q` must be a live query handle; `out` must be writable.
enum GfomcStatus gfomc_query_classify(const struct GfomcQuery *q, struct GfomcClassification *out);

// Minimized query as text.
//
// # Safety
// `q` must be a live query handle; `out` must be writable.
enum GfomcStatus gfomc_query_minimize(const struct GfomcQuery *q, char **out);

// Parses a database in the line format (`domain left: ...`, `tuple S(a,b) 1/2`).
//
// # Safety
// `src` must be a NUL-terminated string; `out` must be writable.
enum GfomcStatus gfomc_tid_parse(const char *src, struct GfomcTid **out);

// # Safety
// `t` must come from [`gfomc_tid_parse`] and not be freed twice.
void gfomc_tid_free(struct GfomcTid *t);

// Exact probability of `q` over `t` as `num/den`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum GfomcStatus gfomc_probability(const struct GfomcQuery *q,
                                   const struct GfomcTid *t,
                                   char **out);

// Number of satisfying worlds over the uncertain tuples, in decimal.
//
// # Safety
// Handles must be live; `out` must be writable.
enum GfomcStatus gfomc_count_worlds(const struct GfomcQuery *q,
                                    const struct GfomcTid *t,
                                    char **out);

// `#Φ` for a `p2cnf` text recovered through probabilities of the type-I
// query `q` with block probability `c` (`num/den`), in decimal.
//
// # Safety
// `q` must be live, the strings NUL-terminated and `out` writable.
enum GfomcStatus gfomc_reduce_p2cnf(const struct GfomcQuery *q,
                                    const char *p2cnf,
                                    const char *c,
                                    char **out);

// Null-safe helper for callers that want to reset an out-pointer.
struct GfomcQuery *gfomc_null_query(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GFOMC_H */
