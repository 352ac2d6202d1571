#include <stdio.h>
#include <string.h>
#include "hfrep.h"

#define CHECK(c) do { if (!(c)) { fprintf(stderr, "failed: %s (line %d)\n", #c, __LINE__); return 1; } } while (0)

int main(void) {
    HfrepModel *m = NULL;
    CHECK(hfrep_model_new("no-such-model", &m) == HFREP_STATUS_UNKNOWN_MODEL);
    char msg[128];
    CHECK(hfrep_last_error(msg, sizeof msg) > 0);
    CHECK(strstr(msg, "no-such-model") != NULL);

    CHECK(hfrep_model_new("star", &m) == HFREP_STATUS_OK);
    CHECK(hfrep_model_dim(m) == 2);
    HfrepField *f = NULL;
    CHECK(hfrep_field_build(m, HFREP_ROUTE_DT, 65, 0.0, &f) == HFREP_STATUS_OK);
    double centre[2] = {0.0, 0.0}, far[2] = {5.0, 0.0}, v = 0.0;
    CHECK(hfrep_field_eval(f, centre, &v) == HFREP_STATUS_OK && v > 0.0);
    CHECK(hfrep_field_eval(f, far, &v) == HFREP_STATUS_DOMAIN);
    HfrepGrid *g = NULL;
    CHECK(hfrep_field_sample(f, 17, &g) == HFREP_STATUS_OK);
    CHECK(hfrep_grid_len(g) == 17 * 17);
    CHECK(hfrep_grid_values(g)[0] < 0.0);
    hfrep_grid_free(g);
    hfrep_field_free(f);
    hfrep_model_free(m);
    CHECK(hfrep_field_build(NULL, HFREP_ROUTE_DT, 65, 0.0, &f) == HFREP_STATUS_NULL_POINTER);
    puts("ok");
    return 0;
}
