/* Exercises the C interface from plain C. */
#include "lattri/lattri.h"

#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                   \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "%s:%d: %s failed (%s)\n", __FILE__, __LINE__, #cond, lt_last_error()); \
            ++failures;                                                \
        }                                                              \
    } while (0)

int main(void) {
    lt_region* r = NULL;
    lt_enum_info info;
    lt_text* z = NULL;
    lt_region_info ri;
    lt_triangulation* g = NULL;
    lt_triangulation* a = NULL;
    lt_triangulation* b = NULL;
    lt_chain* c = NULL;
    lt_chain* d = NULL;
    lt_text* ck = NULL;
    lt_text* ta = NULL;
    lt_text* tb = NULL;
    lt_run_stats st;
    lt_drift_info di;
    char hex[65];
    int i;

    EXPECT(strlen(lt_version()) > 0);
    EXPECT(lt_region_from_spec("strip:1x4", NULL, &r) == LT_OK);
    EXPECT(lt_region_info_get(r, &ri) == LT_OK);
    EXPECT(ri.midpoints == 3 * 1 * 4 + 4 + 1);
    EXPECT(ri.convex == 1);
    EXPECT(lt_enumerate(r, 1000000, "1/2", &info, &z) == LT_OK);
    EXPECT(info.count == 70);
    EXPECT(info.free_midpoints == 7);
    EXPECT(z != NULL && strchr(lt_text_data(z), '/') != NULL);
    lt_text_free(z);
    EXPECT(lt_enumerate(r, 10, NULL, &info, NULL) == LT_CAP_EXCEEDED);

    EXPECT(lt_ground_state(r, &g) == LT_OK);
    EXPECT(lt_triangulation_size(g) == ri.midpoints);
    EXPECT(lt_chain_new(g, 0.0, 1, &c) == LT_INVALID_LAMBDA);
    EXPECT(strlen(lt_last_error()) > 0);
    EXPECT(strcmp(lt_status_name(LT_INVALID_LAMBDA), "InvalidLambda") == 0);

    /* checkpoint, restore, continue: same trajectory */
    EXPECT(lt_chain_new(g, 0.7, 5, &c) == LT_OK);
    EXPECT(lt_chain_run(c, 3000, &st) == LT_OK);
    EXPECT(st.steps == 3000);
    EXPECT(st.flips + st.held_coin + st.held_constraint + st.held_unflippable == st.steps);
    EXPECT(lt_chain_checkpoint(c, &ck) == LT_OK);
    EXPECT(lt_chain_restore(r, lt_text_data(ck), &d) == LT_OK);
    EXPECT(lt_chain_step_count(d) == 3000);
    EXPECT(lt_chain_run(c, 2000, NULL) == LT_OK);
    EXPECT(lt_chain_run(d, 2000, NULL) == LT_OK);
    EXPECT(lt_chain_state(c, &a) == LT_OK);
    EXPECT(lt_chain_state(d, &b) == LT_OK);
    EXPECT(lt_triangulation_text(a, &ta) == LT_OK);
    EXPECT(lt_triangulation_text(b, &tb) == LT_OK);
    EXPECT(lt_text_size(ta) == lt_text_size(tb) && memcmp(lt_text_data(ta), lt_text_data(tb), lt_text_size(ta)) == 0);

    /* drift at the ground state of its own central edge: Psi = 1, no contraction claim */
    EXPECT(lt_lyapunov(g, NULL, 0.5, 50.0, &di, NULL) == LT_OK);
    EXPECT(di.psi == 1.0);
    EXPECT(di.above_psi0 == 0);
    EXPECT(lt_lyapunov(g, NULL, 1.5, 50.0, &di, NULL) == LT_INVALID_LAMBDA);

    for (i = 0; i < lt_triangulation_size(g); ++i) {
        int32_t xy[4];
        EXPECT(lt_triangulation_edge(g, i, xy) == LT_OK);
    }
    EXPECT(lt_triangulation_edge(g, -1, (int32_t[4]){0, 0, 0, 0}) == LT_INVALID_ARGUMENT);
    EXPECT(lt_experiment("nope", NULL, NULL, NULL) != LT_OK);

    EXPECT(lt_sha256_hex("abc", 3, hex) == LT_OK);
    EXPECT(strcmp(hex, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad") == 0);

    lt_text_free(ck);
    lt_text_free(ta);
    lt_text_free(tb);
    lt_triangulation_free(a);
    lt_triangulation_free(b);
    lt_chain_free(c);
    lt_chain_free(d);
    lt_triangulation_free(g);
    lt_region_free(r);
    if (failures == 0) printf("capi smoke ok\n");
    return failures != 0;
}
