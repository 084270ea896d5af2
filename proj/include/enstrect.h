/* C API for the 2.5D structural-damage extraction pipeline.
 *
 * All functions return ENSTRECT_OK (0) on success, ENSTRECT_ERR_VALIDATION
 * (1) when inputs violate a documented contract, and ENSTRECT_ERR_PROCESSING
 * (2) when a computation fails on valid inputs. enstrect_last_error() holds
 * the message of the most recent failure on the calling thread.
 *
 * Stage runners take a JSON options document (UTF-8 text, NULL means all
 * defaults); the accepted keys per stage match the CLI flags and config-file
 * sections and are documented in the project README.
 */
#ifndef ENSTRECT_H
#define ENSTRECT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define ENSTRECT_OK 0
#define ENSTRECT_ERR_VALIDATION 1
#define ENSTRECT_ERR_PROCESSING 2

const char* enstrect_version(void);
const char* enstrect_last_error(void);

/* Frees strings returned through out-parameters. */
void enstrect_string_free(char* s);

/* Stage runners (file oriented, one per CLI subcommand). */
int enstrect_map_run(const char* options_json);
int enstrect_cluster_run(const char* options_json);
int enstrect_extract_run(const char* options_json);
/* report_text, when non-NULL, receives the aligned text table. */
int enstrect_evaluate_run(const char* options_json, char** report_text);
int enstrect_pipeline_run(const char* options_json, char** report_text);
int enstrect_synth_run(const char* options_json);

/* Opaque point-cloud handle for linking applications. */
typedef struct enstrect_cloud enstrect_cloud;

int enstrect_cloud_load(const char* ply_path, enstrect_cloud** out);
/* xyz is a packed array of 3*count doubles. */
int enstrect_cloud_create(const double* xyz, uint64_t count, enstrect_cloud** out);
int enstrect_cloud_size(const enstrect_cloud* cloud, uint64_t* count);
int enstrect_cloud_positions(const enstrect_cloud* cloud, double* xyz);
int enstrect_cloud_has_normals(const enstrect_cloud* cloud, int* has_normals);
int enstrect_cloud_normals(const enstrect_cloud* cloud, double* xyz);
int enstrect_cloud_estimate_normals(enstrect_cloud* cloud, int k);
int enstrect_cloud_save(const enstrect_cloud* cloud, const char* ply_path, int binary);
void enstrect_cloud_free(enstrect_cloud* cloud);

#ifdef __cplusplus
}
#endif

#endif /* ENSTRECT_H */
