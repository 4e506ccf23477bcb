#include "pcurv.h"
#include <math.h>
#include <stdio.h>

int main(void) {
    PcurvSurface *s = NULL;
    if (pcurv_sphere_new(1.0, 256, &s) != PCURV_STATUS_OK) return 1;
    double e = 0.0;
    if (pcurv_energy(s, PCURV_FUNCTIONAL_EP, 4.0, &e) != PCURV_STATUS_OK) return 2;
    if (fabs(e - 9.0 * M_PI) > 1e-6 * 9.0 * M_PI) return 3;
    double w = 0.0, gb = 1.0;
    if (pcurv_willmore(s, &w, &gb) != PCURV_STATUS_OK || fabs(gb) > 1e-6) return 4;
    PcurvSurface *bad = NULL;
    if (pcurv_sphere_new(-1.0, 256, &bad) != PCURV_STATUS_INVALID_PARAMETER || bad != NULL) return 5;
    char msg[128];
    if (pcurv_last_error(msg, sizeof msg) == 0) return 6;
    pcurv_surface_free(s);
    printf("%s %.12f\n", pcurv_version(), e);
    return 0;
}
