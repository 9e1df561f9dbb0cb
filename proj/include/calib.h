/* C interface to the multi-class calibration library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return CALIB_OK on success or an error code; the message for
 * the most recent failure on the calling thread is available from
 * calib_last_error().
 *
 * Parameter strings are whitespace-separated key=value lists, e.g.
 * "m=2 seed=7". Unknown keys are rejected. List values use commas
 * ("T=0,1"); point lists separate points with semicolons
 * ("points=0.5,0.5;0.3,0.7").
 */
#ifndef CALIB_H
#define CALIB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct calib_dataset calib_dataset;
typedef struct calib_report calib_report;
typedef struct calib_witness calib_witness;

enum {
  CALIB_OK = 0,
  CALIB_EPARSE = 2, /* malformed input, unknown name, invalid parameter */
  CALIB_EGUARD = 3, /* a size or budget guard refused the computation */
  CALIB_EFAIL = 4   /* internal solver failure */
};

const char* calib_last_error(void);

/* Datasets: line-delimited JSON records {"v":[...],"y":<int>[,"w":<real>]}. */
int calib_dataset_load(const char* path, calib_dataset** out);
int calib_dataset_parse(const char* text, calib_dataset** out);
int calib_dataset_save(const calib_dataset* ds, const char* path);
int calib_dataset_size(const calib_dataset* ds);
int calib_dataset_dim(const calib_dataset* ds);
void calib_dataset_free(calib_dataset* ds);

/* Synthetic data. Generators: "calibrated" (prior=dirichlet|vertices|fixed,
 * alpha=..., points=..., stratified=0|1, k=, n=, seed=), "subset-violation"
 * (k=, T=, gamma=, n=, seed=, exact=0|1), "sigmoid-violation" (k=, a=, b=,
 * L=, gamma=, n=, seed=, exact=0|1). certified_alpha may be NULL. */
int calib_synth(const char* generator, const char* params,
                calib_dataset** out, double* certified_alpha);

/* Measures: classwise, confidence, toplabel, ece, ssce (m=), smce-subset
 * (T=), psce (m=, directions=, seed=), fsce, decision. */
int calib_measure(const calib_dataset* ds, const char* measure,
                  const char* params, calib_report** out);

double calib_report_value(const calib_report* rep);
/* Copies the flat key=value record into buf (cap bytes, NUL-terminated) and
 * returns the full length, excluding the terminator. */
int calib_report_text(const calib_report* rep, char* buf, size_t cap);
void calib_report_free(calib_report* rep);

/* Auditors: family is "psmooth" (m=), "sigmoid" (L=), or "lowdeg"
 * (degree=). Common keys: r=, c0=, c1=, c2=, c3=, nmax=, delta=, split=,
 * split_seed=, exact=0|1. Either output pointer may be NULL. */
int calib_audit(const calib_dataset* ds, const char* family, double alpha,
                const char* params, calib_witness** w_out,
                calib_report** rep_out);

int calib_witness_save(const calib_witness* w, const char* path);
int calib_witness_load(const char* path, calib_witness** out);
double calib_witness_correlation(const calib_witness* w);
/* Evaluates the weight function at a length-k prediction vector. */
int calib_witness_eval(const calib_witness* w, const double* v, int k,
                       double* out);
void calib_witness_free(calib_witness* w);

/* Witness-driven post-processing until the auditor falls below beta_stop.
 * Outputs: recalibrated dataset, a trace CSV, and a replayable pipeline
 * document; any output pointer may be NULL. Strings are released with
 * calib_string_free. */
int calib_recalibrate(const calib_dataset* ds, const char* family,
                      double alpha, double beta_stop, const char* params,
                      calib_dataset** out, char** trace_csv,
                      char** pipeline_doc);

/* Applies a stored pipeline document to every prediction of a dataset. */
int calib_apply_pipeline(const char* pipeline_doc, const calib_dataset* ds,
                         calib_dataset** out);

/* Lower-bound lab; results come back as CSV text.
 * packing:    k=, eps=, budget=, seed=
 * hardfamily: k=, eps=, seed=  (adds the certified witness value and fsCE)
 * birthday:   k=, eps=, n=<comma list>, trials=, seed=, freeze=0|1 */
int calib_lab_packing(const char* params, char** csv);
int calib_lab_hardfamily(const char* params, char** csv);
int calib_lab_birthday(const char* params, char** csv);

void calib_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* CALIB_H */
