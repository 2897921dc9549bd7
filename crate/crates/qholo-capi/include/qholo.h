#ifndef QHOLO_H
#define QHOLO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API function.
 */
typedef enum QholoStatus {
  /**
   * Success.
   */
  QholoOk = 0,
  /**
   * A required pointer argument was null.
   */
  QholoNullPointer = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  QholoInvalidUtf8 = 2,
  /**
   * Input text or JSON could not be parsed.
   */
  QholoParseError = 3,
  /**
   * The computation failed (invalid web, step limit, arithmetic error).
   */
  QholoComputeError = 4,
  /**
   * Recursion guessing finished without finding an annihilator.
   */
  QholoNoRecursion = 5,
  /**
   * An argument was out of range for the handle it addresses.
   */
  QholoOutOfRange = 6,
  /**
   * A panic was caught at the boundary; the handle state is unchanged.
   */
  QholoInternalError = 7,
} QholoStatus;

/**
 * Opaque colored braid handle.
 */
typedef struct QholoBraid QholoBraid;

/**
 * Opaque evaluator handle (owns the reduction memo; reusable).
 */
typedef struct QholoEvaluator QholoEvaluator;

/**
 * Opaque recursion operator handle.
 */
typedef struct QholoOperator QholoOperator;

/**
 * Opaque table handle (values indexed by the running color).
 */
typedef struct QholoTable QholoTable;

/**
 * Opaque exact value handle (a rational function in a and q).
 */
typedef struct QholoValue QholoValue;

/**
 * Message describing the most recent failure on this thread. The pointer
 * is owned by the library and valid until the next failing call.
 */
const char *qholo_last_error(void);

/**
 * Release a string returned by this library.
 */
void qholo_string_free(char *s);

/**
 * Parse a braid from `s=...; w=[...]; colors=[...]` text or JSON.
 */
enum QholoStatus qholo_braid_parse(const char *text, struct QholoBraid **out);

/**
 * Create an evaluator with the default step budget (the QHOLO_STEP_LIMIT
 * environment variable overrides it).
 */
struct QholoEvaluator *qholo_evaluator_new(void);

/**
 * Create an evaluator with an explicit reduction step budget.
 */
struct QholoEvaluator *qholo_evaluator_with_step_limit(uintptr_t limit);

/**
 * Framed colored HOMFLY of the braid closure, every component colored by
 * the column of its braid color.
 */
enum QholoStatus qholo_homfly(const struct QholoEvaluator *ev,
                              const struct QholoBraid *braid,
                              struct QholoValue **out);

/**
 * Evaluate a closed web given as JSON (`{vertices, edges, loops}`).
 */
enum QholoStatus qholo_web_eval(const struct QholoEvaluator *ev,
                                const char *web_json,
                                struct QholoValue **out);

/**
 * Human-readable form of a value; release with qholo_string_free.
 */
enum QholoStatus qholo_value_display(const struct QholoValue *v, char **out);

/**
 * Exact equality of two values (1 = equal, 0 = different).
 */
int qholo_value_equals(const struct QholoValue *a, const struct QholoValue *b);

/**
 * Build the table f_0..f_nmax of invariants with the axis component's
 * column color running over n.
 */
enum QholoStatus qholo_table_build(const struct QholoEvaluator *ev,
                                   const struct QholoBraid *braid,
                                   uintptr_t axis,
                                   uintptr_t nmax,
                                   struct QholoTable **out);

/**
 * Number of entries in the table.
 */
uintptr_t qholo_table_len(const struct QholoTable *t);

/**
 * Copy out entry n of the table as a fresh value handle.
 */
enum QholoStatus qholo_table_value(const struct QholoTable *t,
                                   uintptr_t n,
                                   struct QholoValue **out);

/**
 * Guess an annihilating operator for the table within the ansatz bounds.
 * Returns QholoNoRecursion when the search is exhaustive but empty.
 */
enum QholoStatus qholo_guess_recursion(const struct QholoTable *t,
                                       uintptr_t order,
                                       uint32_t mdeg,
                                       uint32_t adeg,
                                       uint32_t qdeg,
                                       struct QholoOperator **out);

/**
 * Order of the operator, or -1 for the zero operator.
 */
int qholo_operator_order(const struct QholoOperator *p);

/**
 * Human-readable form of an operator; release with qholo_string_free.
 */
enum QholoStatus qholo_operator_display(const struct QholoOperator *p, char **out);

/**
 * JSON serialization of an operator; release with qholo_string_free.
 */
enum QholoStatus qholo_operator_to_json(const struct QholoOperator *p, char **out);

/**
 * Parse an operator from its JSON serialization.
 */
enum QholoStatus qholo_operator_from_json(const char *json, struct QholoOperator **out);

#endif /* QHOLO_H */
