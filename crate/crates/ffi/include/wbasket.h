#ifndef WBASKET_H
#define WBASKET_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WbStatus {
  WB_STATUS_OK = 0,
  WB_STATUS_NULL_POINTER = 1,
  WB_STATUS_INVALID_UTF8 = 2,
  WB_STATUS_PARSE_ERROR = 3,
  WB_STATUS_INVALID_PAIR = 4,
  WB_STATUS_INFEASIBLE = 5,
  WB_STATUS_OUT_OF_RANGE = 6,
  WB_STATUS_CONFIG = 7,
  WB_STATUS_PANIC = 8,
} WbStatus;

/**
 * Opaque list of weighted baskets.
 */
typedef struct WbBasketList WbBasketList;

/**
 * Opaque weighted basket `(basket, P2, χ)`.
 */
typedef struct WbWeightedBasket WbWeightedBasket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library from this thread.
 */
const char *wb_last_error(void);

/**
 * Static name of a status code.
 */
const char *wb_status_name(enum WbStatus status);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a string obtained from this library, freed once.
 */
void wb_string_free(char *s);

/**
 * Parses basket text such as `7x(1,2),2x(2,5)` into a weighted basket.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum WbStatus wb_weighted_basket_parse(const char *text,
                                       int64_t p2,
                                       int64_t chi,
                                       struct WbWeightedBasket **out);

/**
 * # Safety
 * `wb` must be NULL or a handle from this library, freed once.
 */
void wb_weighted_basket_free(struct WbWeightedBasket *wb);

/**
 * Canonical text of the basket part.
 *
 * # Safety
 * `wb` must be a live handle; `out` must be writable.
 */
enum WbStatus wb_weighted_basket_text(const struct WbWeightedBasket *wb, char **out);

/**
 * `K³` as a `p/q` string.
 *
 * # Safety
 * `wb` must be a live handle; `out` must be writable.
 */
enum WbStatus wb_k3(const struct WbWeightedBasket *wb, char **out);

/**
 * `χ_m` for `m ≥ 2` as a `p/q` string.
 *
 * # Safety
 * `wb` must be a live handle; `out` must be writable.
 */
enum WbStatus wb_plurigenus(const struct WbWeightedBasket *wb, uint32_t m, char **out);

/**
 * lcm of the local indices.
 *
 * # Safety
 * `wb` must be a live handle; `out` must be writable.
 */
enum WbStatus wb_cartier_index(const struct WbWeightedBasket *wb, uint64_t *out);

/**
 * Head multiplicities `n(1,2), n(2,5), n(1,3), n(1,4)` of `B^(5)` for
 * `p = [P2, P3, P4, P5, P6]`, with `tail_len` tail indices `r ≥ 5`
 * (`σ5 = tail_len`). `tail` may be NULL when `tail_len` is 0.
 *
 * # Safety
 * `p` must point to 5 values, `tail` to `tail_len` values and
 * `coefficients` to room for 4.
 */
enum WbStatus wb_b5_coefficients(int64_t chi,
                                 const int64_t *p,
                                 const uint32_t *tail,
                                 size_t tail_len,
                                 int64_t *coefficients);

/**
 * `⌈q·r⌉/r` for a rational string `q`.
 *
 * # Safety
 * `q` must be a NUL-terminated string; `out` must be writable.
 */
enum WbStatus wb_quantize_up(const char *q, uint64_t r, char **out);

/**
 * Packing descendants with an optional `K³` floor (NULL for none) and
 * `χ_m` preservation for `3 ≤ m ≤ preserve_pm_upto` (0 for none).
 *
 * # Safety
 * `wb` must be a live handle, `k3_floor` NULL or a NUL-terminated string,
 * `out` writable.
 */
enum WbStatus wb_descendants(const struct WbWeightedBasket *wb,
                             const char *k3_floor,
                             uint32_t preserve_pm_upto,
                             struct WbBasketList **out);

/**
 * Number of entries; 0 for NULL.
 *
 * # Safety
 * `list` must be NULL or a live handle.
 */
size_t wb_basket_list_len(const struct WbBasketList *list);

/**
 * Canonical basket text of entry `i`.
 *
 * # Safety
 * `list` must be a live handle; `out` must be writable.
 */
enum WbStatus wb_basket_list_text(const struct WbBasketList *list, size_t i, char **out);

/**
 * # Safety
 * `list` must be NULL or a handle from this library, freed once.
 */
void wb_basket_list_free(struct WbBasketList *list);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WBASKET_H */
