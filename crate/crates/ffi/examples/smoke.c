#include <math.h>
#include <stdio.h>
#include "modsigma.h"

int main(void) {
    MsComplex w1 = {0.5, 0.0}, w2 = {0.0, 0.5}, z = {0.5, 0.0}, out;
    MsLattice *lat = NULL;
    MsEvaluator *ev = NULL;
    if (ms_lattice_new(w1, w2, &lat) != MS_OK || ms_evaluator_new(lat, &ev) != MS_OK) {
        fprintf(stderr, "setup: %s\n", ms_last_error_message());
        return 1;
    }
    if (ms_eval(ev, MS_FN_ZETA, z, &out) != MS_OK) {
        fprintf(stderr, "eval: %s\n", ms_last_error_message());
        return 1;
    }
    MsComplex origin = {0.0, 0.0};
    int rc = ms_eval(ev, MS_FN_ZETA, origin, &out) == MS_ERR_POLE ? 0 : 1;
    ms_eval(ev, MS_FN_ZETA, z, &out);
    printf("%.17g %.17g\n", out.re, out.im);
    ms_evaluator_free(ev);
    ms_lattice_free(lat);
    return rc || fabs(out.re - 1.5707963267948966) > 1e-12;
}
