#ifndef FLOPCALC_H
#define FLOPCALC_H

#include <stddef.h>
#include <stdint.h>

// Result of every call.
typedef enum FlopStatus {
  FLOP_STATUS_OK = 0,
  FLOP_STATUS_NULL_POINTER = 1,
  FLOP_STATUS_INVALID_UTF8 = 2,
  // Malformed diagram, subset, rational or table JSON.
  FLOP_STATUS_PARSE = 3,
  // Well-formed input outside the domain of the operation.
  FLOP_STATUS_DOMAIN = 4,
  // The Novikov point is a pole of the quantum potential.
  FLOP_STATUS_POLE = 5,
  // Chamber enumeration hit its limit.
  FLOP_STATUS_LIMIT = 6,
  // An oracle check failed.
  FLOP_STATUS_VERIFICATION = 7,
  // The output buffer is too small; the required length was written.
  FLOP_STATUS_BUFFER_TOO_SMALL = 8,
  FLOP_STATUS_PANIC = 9,
} FlopStatus;

// A parsed Dynkin diagram.
typedef struct FlopDiagram FlopDiagram;

// A Gopakumar-Vafa table.
typedef struct FlopTable FlopTable;

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *flop_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void flop_string_free(char *s);

// Parses a diagram such as `"E8"`.
//
// # Safety
// `spec` must be a nul-terminated string and `out` writable.
enum FlopStatus flop_diagram_parse(const char *spec, struct FlopDiagram **out_diagram);

// # Safety
// `d` must come from [`flop_diagram_parse`] and not have been freed. Null is ignored.
void flop_diagram_free(struct FlopDiagram *d);

// # Safety
// Pointers must be valid.
enum FlopStatus flop_diagram_rank(const struct FlopDiagram *d, size_t *out_rank);

// Number of positive roots.
//
// # Safety
// Pointers must be valid.
enum FlopStatus flop_positive_root_count(const struct FlopDiagram *d, size_t *out_count);

// Size of `Cham(Δ, I)`, with `subset` written like `"1,2,4"`. A `limit` of zero
// uses the library default.
//
// # Safety
// Pointers must be valid, `subset` nul-terminated.
enum FlopStatus flop_chamber_count(const struct FlopDiagram *d,
                                   const char *subset_spec,
                                   size_t limit,
                                   size_t *out_count);

// Row-major `M_i` for the flop at node `i`. `out_n` receives the matrix size `n`;
// `buf` must hold `n * n` entries, otherwise `BufferTooSmall` is returned.
//
// # Safety
// Pointers must be valid and `buf` must hold `cap` entries.
enum FlopStatus flop_flop_matrix(const struct FlopDiagram *d,
                                 const char *subset_spec,
                                 size_t node,
                                 int64_t *buf,
                                 size_t cap,
                                 size_t *out_n);

// The full flop step (charts, `ω_i(I)`, `M_i`, `M_i^{-1}`, `N_i`) as JSON.
//
// # Safety
// Pointers must be valid.
enum FlopStatus flop_flop_json(const struct FlopDiagram *d,
                               const char *subset_spec,
                               size_t node,
                               char **out_json);

// Returns `Verification` when the restriction lemma check finds a violation.
//
// # Safety
// Pointers must be valid.
enum FlopStatus flop_verify_lemma(const struct FlopDiagram *d, const char *subset_spec);

// Returns `Verification` when the chamber count disagrees with its oracle.
//
// # Safety
// Pointers must be valid.
enum FlopStatus flop_verify_chambers(const struct FlopDiagram *d,
                                     const char *subset_spec,
                                     size_t limit);

// Reads a GV table from its JSON form.
//
// # Safety
// `json` must be nul-terminated and `out_table` writable.
enum FlopStatus flop_table_from_json(const char *json, struct FlopTable **out_table);

// # Safety
// `t` must come from this library and not have been freed. Null is ignored.
void flop_table_free(struct FlopTable *t);

// Canonical JSON of a table.
//
// # Safety
// Pointers must be valid.
enum FlopStatus flop_table_to_json(const struct FlopTable *t, char **out_json);

// The table after flopping the curve with the given label.
//
// # Safety
// Pointers must be valid.
enum FlopStatus flop_table_transform(const struct FlopTable *t,
                                     size_t label,
                                     struct FlopTable **out_table);

// Contraction algebra dimension as a decimal string.
//
// # Safety
// Pointers must be valid.
enum FlopStatus flop_table_dim(const struct FlopTable *t, char **out_dim);

// Dimension after mutation at the given curve, as a decimal string.
//
// # Safety
// Pointers must be valid.
enum FlopStatus flop_table_dim_after_mutation(const struct FlopTable *t,
                                              size_t label,
                                              char **out_dim);

// Exact quantum potential. Each of `gamma1..3` and `q` is a comma separated list
// of rationals such as `"1/2,-3"`; the result is written as `"p/q"`.
//
// # Safety
// Pointers must be valid and strings nul-terminated.
enum FlopStatus flop_quantum_potential(const struct FlopTable *t,
                                       const char *gamma1,
                                       const char *gamma2,
                                       const char *gamma3,
                                       const char *q,
                                       char **out_value);

// Library version, static storage.
const char *flop_version(void);

#endif  /* FLOPCALC_H */
