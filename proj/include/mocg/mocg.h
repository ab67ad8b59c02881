#ifndef MOCG_MOCG_H
#define MOCG_MOCG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MOCG_BUILDING)
#    define MOCG_API __declspec(dllexport)
#  else
#    define MOCG_API __declspec(dllimport)
#  endif
#else
#  define MOCG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mocg_status {
  MOCG_OK = 0,
  MOCG_INVALID_ARGUMENT = 1,
  MOCG_NOT_FOUND = 2,
  MOCG_CONFLICT = 3,
  MOCG_CYCLE = 4,
  MOCG_NUMERIC = 5,
  MOCG_IO = 6,
  MOCG_INTERNAL = 7
} mocg_status;

typedef struct mocg_dataset mocg_dataset;
typedef struct mocg_server mocg_server;

MOCG_API const char* mocg_version(void);

/* JSON {code, message, detail} describing the last failure on the calling
 * thread; "" if none. Valid until the next failing call on that thread. */
MOCG_API const char* mocg_last_error(void);

/* Releases any string returned through a char** out-parameter. */
MOCG_API void mocg_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

MOCG_API mocg_status mocg_dataset_open(const char* csv_path, mocg_dataset** out);
MOCG_API mocg_status mocg_dataset_parse(const char* bytes, size_t len, mocg_dataset** out);
MOCG_API void mocg_dataset_close(mocg_dataset* ds);

/* {id, rows, columns, dropped_rows, variables} */
MOCG_API mocg_status mocg_dataset_describe(const mocg_dataset* ds, char** json_out);

/* Pearson correlations with `outcome`, strongest first; top = 0 keeps all. */
MOCG_API mocg_status mocg_dataset_correlations(const mocg_dataset* ds, const char* outcome, size_t top,
                                               char** json_out);

/* ---- discovery --------------------------------------------------------- */

/* Runs the selected algorithms to completion on the calling thread.
 * request: {outcome, top?, variables?, algorithms?, ci_alpha?, rng_seed?,
 *           continuous?: {...}, hybrid?: {lambda}, backbone?}
 * result:  {job: snapshot document, graph: causal graph with effects} */
MOCG_API mocg_status mocg_discover(const mocg_dataset* ds, const char* request_json, char** json_out);

/* ---- synthetic data and metrics ---------------------------------------- */

/* csv_out receives the table, truth_json_out {nodes, directed, undirected}.
 * Either out-parameter may be NULL. */
MOCG_API mocg_status mocg_synthesize(const char* kind, size_t n, uint64_t seed, char** csv_out,
                                     char** truth_json_out);

/* predictions: [{algorithm, graph: {nodes, directed, undirected}}, ...]
 * truth:       {nodes, directed, undirected}
 * result:      {rows: [...], union: {...}} */
MOCG_API mocg_status mocg_evaluate(const char* predictions_json, const char* truth_json, char** json_out);

/* ---- layout ------------------------------------------------------------ */

/* graphs: array of causal graph documents (or objects holding one under
 * "graph"). mode: "super", "extracted" or "compressed"; a single graph is
 * always laid out on its own.
 * result: {mode, views: [{id, graph, svg, dot}], stress: [...], comparison?} */
MOCG_API mocg_status mocg_layout(const char* graphs_json, const char* mode, char** json_out);

/* Comparison set for saved history entries in a service data directory.
 * ids: JSON array of entry ids. */
MOCG_API mocg_status mocg_compare_history(const char* data_dir, const char* ids_json, char** json_out);

/* ---- service ----------------------------------------------------------- */

/* config: {ci_alpha?, threshold?, max_epochs?} or NULL. */
MOCG_API mocg_status mocg_server_open(const char* data_dir, const char* config_json, mocg_server** out);
/* port 0 picks a free port; the bound port is written to bound_port. */
MOCG_API mocg_status mocg_server_bind(mocg_server* server, const char* host, int port, int* bound_port);
/* Serves until mocg_server_stop is called from another thread. */
MOCG_API mocg_status mocg_server_run(mocg_server* server);
MOCG_API void mocg_server_stop(mocg_server* server);
MOCG_API void mocg_server_close(mocg_server* server);

#ifdef __cplusplus
}
#endif

#endif
