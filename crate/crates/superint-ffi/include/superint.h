#ifndef SUPERINT_H
#define SUPERINT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum SuperintStatus {
  SuperintStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  SuperintStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  SuperintStatus_InvalidUtf8 = 2,
  /**
   * The catalog name is unknown or carries a bad parameter.
   */
  SuperintStatus_UnknownSystem = 3,
  /**
   * A JSON document failed to parse or validate.
   */
  SuperintStatus_ParseError = 4,
  /**
   * The structure violates an axiom (symmetry, associativity, differential).
   */
  SuperintStatus_AxiomFailure = 5,
  /**
   * A downstream pipeline stage failed (solver, companion, certificate).
   */
  SuperintStatus_PipelineFailure = 6,
} SuperintStatus;

/**
 * Opaque handle to a validated flat-metric structure.
 */
typedef struct SuperintStructure SuperintStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying crate as a static NUL-terminated string.
 * The pointer is valid for the lifetime of the program; do not free it.
 */
const char *superint_version(void);

/**
 * Builds a structure from a catalog name such as `nilpotent4d`, `glued8d`,
 * or `semisimple:4:1110`.
 */
enum SuperintStatus superint_structure_catalog(const char *name, struct SuperintStructure **out);

/**
 * Parses a structure document (the same JSON the CLI reads and writes).
 */
enum SuperintStatus superint_structure_parse(const char *json, struct SuperintStructure **out);

/**
 * Dimension of the underlying space; 0 for a null handle.
 */
uintptr_t superint_structure_dim(const struct SuperintStructure *s);

/**
 * Runs the exact axiom checks on the handle.
 */
enum SuperintStatus superint_structure_check(const struct SuperintStructure *s);

/**
 * Direct-sum product of two structures, as a fresh handle.
 */
enum SuperintStatus superint_structure_glue(const struct SuperintStructure *a,
                                            const struct SuperintStructure *b,
                                            struct SuperintStructure **out);

/**
 * Serializes the structure document; release the string with
 * `superint_string_free`.
 */
enum SuperintStatus superint_structure_to_json(const struct SuperintStructure *s, char **out);

/**
 * Runs the full pipeline (axioms, potential family, compatible tensors,
 * independence certificate) and returns the report document as JSON.
 * Catalog handles for product systems include inheritance accounting.
 */
enum SuperintStatus superint_run_json(const struct SuperintStructure *s, uint64_t seed, char **out);

/**
 * Releases a string returned by this library.  Null is ignored.
 */
void superint_string_free(char *s);

/**
 * Releases a structure handle.  Null is ignored.
 */
void superint_structure_free(struct SuperintStructure *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUPERINT_H */
