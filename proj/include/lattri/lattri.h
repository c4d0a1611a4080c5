#ifndef LATTRI_H
#define LATTRI_H

/* C interface to the lattice triangulation library. Every function that can
 * fail returns an lt_status; on failure lt_last_error() holds a message for
 * the calling thread. Handles are opaque and freed by their *_free call. */

#include <stddef.h>
#include <stdint.h>

#if defined(LATTRI_BUILDING)
#define LATTRI_API __attribute__((visibility("default")))
#else
#define LATTRI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lt_status {
    LT_OK = 0,
    LT_INVALID_ARGUMENT,
    LT_INVALID_POLYGON,
    LT_CONSTRAINT_CONFLICT,
    LT_INVALID_EDGE,
    LT_UNIT_AXIS_EDGE,
    LT_INVALID_TRIANGULATION,
    LT_NOT_FLIPPABLE,
    LT_AT_GROUND_STATE,
    LT_MIDPOINT_MISMATCH,
    LT_NOT_A_ROOT,
    LT_NOT_GROUND_EDGE,
    LT_UNDEFINED_CLASS,
    LT_INVALID_LAMBDA,
    LT_CAP_EXCEEDED,
    LT_DEGENERATE_CONDITION,
    LT_MIDPOINT_SET_MISMATCH,
    LT_PARSE_ERROR,
    LT_UNKNOWN_EXPERIMENT,
    LT_IO_ERROR,
    LT_INTERNAL,
    LT_UNKNOWN
} lt_status;

typedef struct lt_config lt_config;
typedef struct lt_region lt_region;
typedef struct lt_triangulation lt_triangulation;
typedef struct lt_chain lt_chain;
typedef struct lt_text lt_text;
typedef struct lt_manifest lt_manifest;

LATTRI_API const char* lt_version(void);
LATTRI_API const char* lt_status_name(lt_status s);
LATTRI_API const char* lt_last_error(void);

/* Owned strings returned by the library. */
LATTRI_API const char* lt_text_data(const lt_text* t);
LATTRI_API size_t lt_text_size(const lt_text* t);
LATTRI_API void lt_text_free(lt_text* t);

/* key = value configuration */
LATTRI_API lt_status lt_config_new(lt_config** out);
LATTRI_API lt_status lt_config_parse(const char* text, lt_config** out);
LATTRI_API lt_status lt_config_set(lt_config* c, const char* key, const char* value);
/* NULL when absent; valid until the key is set again or c is freed. */
LATTRI_API const char* lt_config_get(const lt_config* c, const char* key);
LATTRI_API lt_status lt_config_text(const lt_config* c, lt_text** out);
LATTRI_API void lt_config_free(lt_config* c);

/* Regions with their boundary condition. spec: square:N, rect:WxH,
 * strip:KxN or a JSON polygon; constraints: "x0,y0,x1,y1;..." or NULL. */
typedef struct lt_region_info {
    int32_t midpoints;
    int32_t interior_points;
    int32_t boundary_points;
    int64_t twice_area;
    int32_t constraints;
    int32_t convex;
} lt_region_info;

LATTRI_API lt_status lt_region_from_spec(const char* spec, const char* constraints, lt_region** out);
/* Uses the fields region and constraints. */
LATTRI_API lt_status lt_region_from_config(const lt_config* c, lt_region** out);
LATTRI_API lt_status lt_region_info_get(const lt_region* r, lt_region_info* out);
LATTRI_API void lt_region_free(lt_region* r);

/* Triangulations. Edges pass as four lattice coordinates x0, y0, x1, y1. */
LATTRI_API lt_status lt_ground_state(const lt_region* r, lt_triangulation** out);
LATTRI_API lt_status lt_triangulation_parse(const lt_region* r, const char* text, lt_triangulation** out);
LATTRI_API lt_status lt_triangulation_text(const lt_triangulation* t, lt_text** out);
LATTRI_API int32_t lt_triangulation_size(const lt_triangulation* t);
LATTRI_API int64_t lt_triangulation_total_length(const lt_triangulation* t);
/* Copies edge i into xy[4]. */
LATTRI_API lt_status lt_triangulation_edge(const lt_triangulation* t, int32_t i, int32_t xy[4]);
LATTRI_API lt_status lt_triangulation_flip(lt_triangulation* t, int32_t i);
/* highlight: edge to mark with the edges meeting it, or NULL. */
LATTRI_API lt_status lt_render_svg(const lt_triangulation* t, int classify, const int32_t* highlight, lt_text** out);
LATTRI_API void lt_triangulation_free(lt_triangulation* t);

/* Exhaustive enumeration. lambda ("p/q" or decimal) may be NULL; when given,
 * z_out receives Z(lambda) as an exact fraction. */
typedef struct lt_enum_info {
    int64_t count;
    int32_t free_midpoints; /* log2 of the Anclin bound */
    int32_t max_live;
    int64_t dead_leaves;
} lt_enum_info;

LATTRI_API lt_status lt_enumerate(const lt_region* r, int64_t cap, const char* lambda, lt_enum_info* out,
                                  lt_text** z_out);

/* Heat-bath chain. */
typedef struct lt_run_stats {
    uint64_t steps;
    uint64_t flips;
    uint64_t held_constraint;
    uint64_t held_unflippable;
    uint64_t held_coin;
} lt_run_stats;

LATTRI_API lt_status lt_chain_new(const lt_triangulation* initial, double lambda, uint64_t seed, lt_chain** out);
LATTRI_API lt_status lt_chain_run(lt_chain* c, uint64_t steps, lt_run_stats* out);
LATTRI_API uint64_t lt_chain_step_count(const lt_chain* c);
/* Copy of the current state. */
LATTRI_API lt_status lt_chain_state(const lt_chain* c, lt_triangulation** out);
LATTRI_API lt_status lt_chain_checkpoint(const lt_chain* c, lt_text** out);
LATTRI_API lt_status lt_chain_restore(const lt_region* r, const char* checkpoint, lt_chain** out);
LATTRI_API void lt_chain_free(lt_chain* c);

/* Lyapunov drift of Psi_g at t. g NULL: canonical ground edge at the most
 * central free midpoint. csv_out may be NULL. */
typedef struct lt_drift_info {
    double psi;
    double drift;        /* closed form */
    double direct;       /* brute-force one-step expectation */
    int32_t dec_count;
    int32_t inc_count;
    int32_t above_psi0;
    int32_t contracting; /* above_psi0 and drift < 0 */
    int32_t g[4];
} lt_drift_info;

LATTRI_API lt_status lt_lyapunov(const lt_triangulation* t, const int32_t* g, double lambda, double psi0,
                                 lt_drift_info* out, lt_text** csv_out);
/* A state with Psi_g >= target on the reversed drive path of a forced
 * crossing state (long edges meeting g, completed by a ground state). */
LATTRI_API lt_status lt_reverse_drive(const lt_region* r, const int32_t* g, double lambda, double target,
                                      uint64_t seed, lt_triangulation** out);

/* Named experiment driven by a configuration; both outputs may be NULL. */
LATTRI_API lt_status lt_experiment(const char* name, const lt_config* c, lt_text** csv_out, lt_text** summary_out);
/* Space-separated names. */
LATTRI_API const char* lt_experiment_names(void);

/* Lowercase hex digest into out[65]. */
LATTRI_API lt_status lt_sha256_hex(const void* data, size_t size, char out[65]);

/* Run manifest: command, config echo, seeds, artifact hashes, timing. */
LATTRI_API lt_status lt_manifest_new(const char* command, const lt_config* c, lt_manifest** out);
LATTRI_API lt_status lt_manifest_add_seed(lt_manifest* m, uint64_t seed);
LATTRI_API lt_status lt_manifest_add_artifact(lt_manifest* m, const char* path, const void* data, size_t size);
LATTRI_API lt_status lt_manifest_set_timing(lt_manifest* m, double wall_seconds, double steps_per_second);
LATTRI_API lt_status lt_manifest_json(const lt_manifest* m, lt_text** out);
LATTRI_API void lt_manifest_free(lt_manifest* m);

LATTRI_API lt_status lt_read_file(const char* path, lt_text** out);
LATTRI_API lt_status lt_write_file(const char* path, const void* data, size_t size);

#ifdef __cplusplus
}
#endif

#endif
