#ifndef GTNN_H
#define GTNN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GtnnStatus {
  GTNN_STATUS_OK = 0,
  GTNN_STATUS_NULL_POINTER = 1,
  GTNN_STATUS_INVALID_ARGUMENT = 2,
  GTNN_STATUS_IO = 3,
  GTNN_STATUS_PARSE = 4,
  GTNN_STATUS_DOMAIN = 5,
  GTNN_STATUS_TRAINING = 6,
  GTNN_STATUS_PANIC = 7,
} GtnnStatus;

// Loaded graph and splits.
typedef struct GtnnDataset GtnnDataset;

// Trained or loaded model.
typedef struct GtnnModel GtnnModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty if none. Valid
// until the next failing call on the same thread.
const char *gtnn_last_error(void);

// Principal branch of the Lambert W function.
//
// # Safety
// `out` must be valid for writing one `double`.
enum GtnnStatus gtnn_lambert_w0(double x, double *out);

// Closed-form curriculum confidence for one sample.
//
// # Safety
// `out` must be valid for writing one `double`.
enum GtnnStatus gtnn_sigma_star(double loss,
                                double tau,
                                double delta,
                                double alpha,
                                double lambda,
                                double *out);

// Trend statistic of a loss history, oldest first.
//
// # Safety
// `losses` must point to `len` readable doubles (or be null with `len == 0`);
// `out` must be valid for writing one `double`.
enum GtnnStatus gtnn_trend_delta(const double *losses, size_t len, double *out);

// Loads `nodes.tsv`, `edges.tsv` and `splits.tsv` from `dir`.
//
// # Safety
// `dir` must be a NUL-terminated string; `out` must be valid for writing a pointer.
enum GtnnStatus gtnn_dataset_load(const char *dir, struct GtnnDataset **out);

// Number of nodes in a dataset.
//
// # Safety
// `ds` must be a live handle or null.
size_t gtnn_dataset_node_count(const struct GtnnDataset *ds);

// # Safety
// `ds` must be null or a handle from `gtnn_dataset_load` not yet freed.
void gtnn_dataset_free(struct GtnnDataset *ds);

// Trains a model with `seed`. `config` holds optional `key = value`
// lines and may be null.
//
// # Safety
// `ds` must be a live dataset handle; `config` null or NUL-terminated;
// `out` valid for writing a pointer.
enum GtnnStatus gtnn_train(const struct GtnnDataset *ds,
                           const char *config,
                           uint64_t seed,
                           struct GtnnModel **out);

// Test-split F1 recorded at training time; NaN for loaded models.
//
// # Safety
// `model` must be a live handle or null.
double gtnn_model_test_f1(const struct GtnnModel *model);

// Link probabilities for `n` node-id pairs.
//
// # Safety
// `model` and `ds` must be live handles; `us` and `vs` must each hold `n`
// NUL-terminated strings; `out` must have room for `n` doubles.
enum GtnnStatus gtnn_predict(const struct GtnnModel *model,
                             const struct GtnnDataset *ds,
                             const char *const *us,
                             const char *const *vs,
                             size_t n,
                             double *out);

// # Safety
// `model` must be a live handle; `path` NUL-terminated.
enum GtnnStatus gtnn_model_save(const struct GtnnModel *model, const char *path);

// # Safety
// `path` must be NUL-terminated; `out` valid for writing a pointer.
enum GtnnStatus gtnn_model_load(const char *path, struct GtnnModel **out);

// # Safety
// `model` must be null or a handle from `gtnn_train`/`gtnn_model_load` not yet freed.
void gtnn_model_free(struct GtnnModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GTNN_H */
