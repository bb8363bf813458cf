#ifndef ACQUIS_H
#define ACQUIS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AcquisStatus {
  ACQUIS_STATUS_OK = 0,
  ACQUIS_STATUS_NULL_POINTER = 1,
  ACQUIS_STATUS_INVALID_UTF8 = 2,
  ACQUIS_STATUS_INVALID_CELEX = 3,
  ACQUIS_STATUS_UNSUPPORTED_ENDPOINT = 4,
  ACQUIS_STATUS_INVALID_TEI = 5,
  ACQUIS_STATUS_INVALID_STANDOFF = 6,
  ACQUIS_STATUS_INVALID_ARGUMENT = 7,
  ACQUIS_STATUS_PANIC = 8,
} AcquisStatus;

typedef enum AcquisEndpoint {
  ACQUIS_ENDPOINT_SMARTAPI = 0,
  ACQUIS_ENDPOINT_LEXURISERV = 1,
  ACQUIS_ENDPOINT_CCVISTA = 2,
} AcquisEndpoint;

/**
 * Opaque parsed CELEX identifier.
 */
typedef struct AcquisCelex AcquisCelex;

/**
 * Opaque parsed TEI document.
 */
typedef struct AcquisTeiDocument AcquisTeiDocument;

/**
 * One Gale-Church bead over 0-based positions.
 */
typedef struct AcquisBead {
  size_t src_start;
  size_t tgt_start;
  uint8_t src_len;
  uint8_t tgt_len;
  double cost;
} AcquisBead;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *acquis_last_error(void);

/**
 * Static version string.
 */
const char *acquis_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void acquis_string_free(char *s);

/**
 * Parses `text` into a new handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum AcquisStatus acquis_celex_parse(const char *text, struct AcquisCelex **out);

/**
 * # Safety
 * `id` must come from [`acquis_celex_parse`] and not have been freed.
 */
void acquis_celex_free(struct AcquisCelex *id);

/**
 * Canonical text of `id`.
 *
 * # Safety
 * `id` must be a live handle; `out` must be writable.
 */
enum AcquisStatus acquis_celex_format(const struct AcquisCelex *id, char **out);

/**
 * Download URL of one language version at `endpoint`.
 *
 * # Safety
 * `id` must be a live handle, `lang` a NUL-terminated string and `out`
 * writable.
 */
enum AcquisStatus acquis_document_url(const struct AcquisCelex *id,
                                      const char *lang,
                                      enum AcquisEndpoint endpoint,
                                      char **out);

/**
 * Parses a TEI document into a new handle stored in `*out`.
 *
 * # Safety
 * `xml` must be a NUL-terminated string; `out` must be writable.
 */
enum AcquisStatus acquis_tei_parse(const char *xml, struct AcquisTeiDocument **out);

/**
 * # Safety
 * `doc` must come from [`acquis_tei_parse`] and not have been freed.
 */
void acquis_tei_free(struct AcquisTeiDocument *doc);

/**
 * # Safety
 * `doc` must be a live handle; `out` must be writable.
 */
enum AcquisStatus acquis_tei_serialize(const struct AcquisTeiDocument *doc, char **out);

/**
 * Number of paragraph segments, title included.
 *
 * # Safety
 * `doc` must be a live handle; `out` must be writable.
 */
enum AcquisStatus acquis_tei_extent(const struct AcquisTeiDocument *doc, size_t *out);

/**
 * Aligns two paragraph-length sequences with default parameters.
 *
 * The bead array stored in `*beads` holds `*n_beads` entries and is
 * released with [`acquis_beads_free`]; empty input yields NULL and 0.
 *
 * # Safety
 * `src` and `tgt` must point to `n_src` and `n_tgt` readable values (or
 * be NULL when the count is 0); the out-parameters must be writable.
 */
enum AcquisStatus acquis_gale_church_align(const size_t *src,
                                           size_t n_src,
                                           const size_t *tgt,
                                           size_t n_tgt,
                                           struct AcquisBead **beads,
                                           size_t *n_beads,
                                           double *total_cost);

/**
 * # Safety
 * `beads` and `n` must come from one [`acquis_gale_church_align`] call.
 */
void acquis_beads_free(struct AcquisBead *beads, size_t n);

/**
 * Converts a stand-off XML alignment file to its CSV export.
 *
 * # Safety
 * `xml` must be a NUL-terminated string; `out` must be writable.
 */
enum AcquisStatus acquis_standoff_xml_to_csv(const char *xml, char **out);

/**
 * Builds the in-place bilingual file of `src` and `tgt` from the links
 * that `standoff_xml` holds for their document.
 *
 * # Safety
 * `src` and `tgt` must be live handles, `standoff_xml` a NUL-terminated
 * string and `out` writable.
 */
enum AcquisStatus acquis_generate_inplace(const struct AcquisTeiDocument *src,
                                          const struct AcquisTeiDocument *tgt,
                                          const char *standoff_xml,
                                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACQUIS_H */
